#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "agmon/action_metric.hpp"
#include "agmon/families.hpp"
#include "agmon/graph.hpp"
#include "agmon/transfer.hpp"

namespace agmon {

// psi(x) = a cosh kx + b sinh kx on [0, L], x measured from the tail.
// k = 0 means psi(x) = a + b x.
struct EdgeSolution {
  std::int64_t edge_id = 0;
  double k = 0.0;
  double a = 0.0;
  double b = 0.0;

  double value(double x) const noexcept;
  double derivative(double x) const noexcept;
};

// Range-checked versions; throw std::out_of_range when x is outside [0, length].
double edge_eval(const EdgeSolution& sol, double length, double x);
double edge_deriv(const EdgeSolution& sol, double length, double x);

// Running products initial, T1 initial, T2 T1 initial, ...
std::vector<Coefficients> propagate(Coefficients initial, std::span<const TransferMatrix> steps);

// A solution on a distance-oriented graph, one EdgeSolution per edge.
class Eigenfunction {
 public:
  // `core` defaults to the root alone.
  Eigenfunction(MetricGraph graph, std::vector<EdgeSolution> solutions, std::vector<VertexIndex> core = {},
                std::optional<FamilySpec> family = std::nullopt);

  const MetricGraph& graph() const noexcept { return graph_; }
  const std::vector<EdgeSolution>& solutions() const noexcept { return solutions_; }
  const EdgeSolution& solution(EdgeIndex e) const { return solutions_.at(e); }
  // Derivative fraction of each edge at its tail vertex; NaN at the root or when undefined.
  const std::vector<double>& fractions() const noexcept { return fractions_; }
  const std::vector<double>& arc_distance() const noexcept { return arc_distance_; }
  const std::vector<VertexIndex>& core() const noexcept { return core_; }
  bool is_core(VertexIndex v) const;
  const std::optional<FamilySpec>& family() const noexcept { return family_; }
  // Present for regular trees, NS trees and braided graphs.
  const std::optional<GenerationProfile>& profile() const noexcept { return profile_; }

  double value(GraphPoint p) const;
  double derivative(GraphPoint p) const;
  // Value at a vertex as seen from its first incident edge.
  double vertex_value(VertexIndex v) const;

  Eigenfunction with_solution(EdgeIndex e, EdgeSolution sol) const;

 private:
  MetricGraph graph_;
  std::vector<EdgeSolution> solutions_;
  std::vector<double> fractions_;
  std::vector<double> arc_distance_;
  std::vector<VertexIndex> core_;
  std::optional<FamilySpec> family_;
  std::optional<GenerationProfile> profile_;
};

// Exterior solution on the truncated family graph; root value 1 on the root edge.
Eigenfunction construct(const FamilySpec& spec);

// One solution per generation 0..depth for regular/NS trees and braided graphs,
// without building the graph (edge_id holds the generation).
std::vector<EdgeSolution> generation_solutions(const FamilySpec& spec);

// (max - min) of the edge-end values at v, over max|psi| at the ends of the incident edges.
double continuity_residual(const Eigenfunction& f, VertexIndex v);

// |sum of outgoing derivatives| / (sum of their magnitudes + 1e-300). Throws at leaves.
double kirchhoff_residual(const Eigenfunction& f, VertexIndex v);

// Non-leaf, non-core vertices.
std::vector<VertexIndex> interior_vertices(const Eigenfunction& f);

// Weighted average over all points at arc distance y, taken as the right limit at
// vertex positions unless left_limit is set. Throws std::invalid_argument without
// a profile, std::out_of_range beyond the truncation.
double averaged_wave_function(const Eigenfunction& f, double y, bool left_limit = false);

// Max relative error of the centered second difference against k^2 psi at 16 interior points.
double ode_residual(const EdgeSolution& sol, double length, double h);

// Root-to-leaf path that prefers edges leading further out, with the constructed fractions.
PathSpec first_path(const Eigenfunction& f);

}  // namespace agmon
