#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "agmon/graph.hpp"

namespace agmon {

// Rooted tree: one root edge, then every vertex splits into `branching` edges of equal length.
struct RegularTreeParams {
  int branching = 2;
  double length = 1.0;
};

// Naimark–Solomyak regular tree. lengths[j] is the length of generation-j edges,
// branching[j] the branching number of the vertex at the end of generation j.
// potentials[j], when given, is the potential on generation-j edges.
// Sequences shorter than the depth repeat cyclically.
struct NsTreeParams {
  std::vector<int> branching;
  std::vector<double> lengths;
  std::vector<double> potentials;
};

// Each vertex splits into one edge of length1 and one of length2. The root edge has length1.
struct TwoLengthsParams {
  double length1 = 1.0;
  double length2 = 2.0;
};

// Half-line body (spacing 2) with a leg at every even position. Legs carry
// potential E + delta^2 and are cut at leg_length.
struct MillipedeParams {
  double delta = 0.1;
  double leg_length = 8.0;
};

enum class LadderMode { symmetric, antisymmetric };

// Two unit-spaced rails joined by rungs of width w. The root sits on the
// symmetry axis, joined to both rails by half-rung connectors.
struct LadderParams {
  double rung_width = 1.0;
  LadderMode mode = LadderMode::antisymmetric;
  // Defaults to the energy (symmetric mode) or the rail potential (antisymmetric).
  std::optional<double> rung_potential;
};

// Regular braided graph. Generation-j vertices sit at positions[j-1] (v_0 = 0 is
// the root), each with arriving[j-1] incoming and ongoing[j-1] outgoing edges.
struct BraidedParams {
  std::vector<int> ongoing;
  std::vector<int> arriving;
  std::vector<double> positions;
  std::vector<double> potentials;  // per generation, optional
};

using FamilyParams =
    std::variant<RegularTreeParams, NsTreeParams, TwoLengthsParams, MillipedeParams, LadderParams, BraidedParams>;

struct FamilySpec {
  FamilyParams params;
  int depth = 1;
  double potential = 0.0;  // base potential (tree edges, millipede body, ladder rails)
  double energy = -1.0;
};

std::string_view family_name(const FamilySpec& spec);
std::string_view to_string(LadderMode mode);
LadderMode ladder_mode_from_string(std::string_view name);

// Per-generation data of a generation-uniform family (regular/NS trees, braided graphs).
struct GenerationProfile {
  std::vector<double> lengths;     // generation 0..depth
  std::vector<double> potentials;  // generation 0..depth
  std::vector<double> positions;   // v_j for j = 0..depth+1 (v_0 = 0)
  std::vector<int> ongoing;        // b_j, index j = 1..depth (index 0 unused, = 1)
  std::vector<int> arriving;       // a_j, index j = 1..depth (index 0 unused, = 1)
};

// Throws std::invalid_argument for non-generation-uniform families.
GenerationProfile generation_profile(const FamilySpec& spec);

double ladder_rung_potential(const FamilySpec& spec, const LadderParams& params);

// Truncated-to-depth graph of the family. Throws std::invalid_argument on bad parameters.
MetricGraph generate_family(const FamilySpec& spec);

}  // namespace agmon
