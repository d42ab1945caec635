#pragma once

#include <cmath>
#include <vector>

#include "agmon/families.hpp"
#include "agmon/graph.hpp"

namespace agmon::test {

inline FamilySpec tree_spec(int b, double kL, int depth, double V = 0.0, double E = -1.0) {
  FamilySpec s;
  s.params = RegularTreeParams{b, kL / std::sqrt(V - E)};
  s.depth = depth;
  s.potential = V;
  s.energy = E;
  return s;
}

inline FamilySpec two_lengths_spec(double kL1, double kL2, int depth) {
  FamilySpec s;
  s.params = TwoLengthsParams{kL1, kL2};
  s.depth = depth;
  return s;
}

inline FamilySpec millipede_spec(double delta, int depth, double leg = 8.0) {
  FamilySpec s;
  s.params = MillipedeParams{delta, leg};
  s.depth = depth;
  return s;
}

inline FamilySpec ladder_spec(double w, LadderMode mode, int depth) {
  FamilySpec s;
  LadderParams p;
  p.rung_width = w;
  p.mode = mode;
  s.params = p;
  s.depth = depth;
  return s;
}

inline FamilySpec ns_spec(std::vector<int> b, std::vector<double> L, int depth) {
  FamilySpec s;
  s.params = NsTreeParams{std::move(b), std::move(L), {}};
  s.depth = depth;
  return s;
}

inline FamilySpec braided_spec(std::vector<int> b, std::vector<int> a, std::vector<double> v, int depth) {
  FamilySpec s;
  s.params = BraidedParams{std::move(b), std::move(a), std::move(v), {}};
  s.depth = depth;
  return s;
}

// Every family at a modest depth, for structural sweeps.
inline std::vector<FamilySpec> all_families(int depth) {
  return {tree_spec(2, 1.0, depth),
          tree_spec(3, 0.5, std::min(depth, 8)),
          ns_spec({2, 3}, {1.0, 0.5, 1.5}, std::min(depth, 8)),
          two_lengths_spec(1.0, 2.0, depth),
          two_lengths_spec(0.5, 1.0, depth),
          millipede_spec(0.1, depth),
          ladder_spec(1.0, LadderMode::antisymmetric, depth),
          ladder_spec(0.5, LadderMode::symmetric, depth),
          braided_spec({2}, {1, 2}, {1.0, 2.5, 3.0}, depth)};
}

}  // namespace agmon::test
