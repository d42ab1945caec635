#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agmon/action_metric.hpp"
#include "agmon/eigenfunction.hpp"

namespace agmon {

enum class MultiplierKind { none, rho_a, rho_path, f_ave };

std::string_view to_string(MultiplierKind kind);
MultiplierKind multiplier_kind_from_string(std::string_view name);
std::string_view to_string(ShiftSign sign);
ShiftSign shift_sign_from_string(std::string_view name);

// log F = action_scale * action(E_eff) + sum over passed vertices of (vertex term + vertex_extra).
// The vertex term is 0 for rho_a, log(1/p_v)/2 for rho_path and log(b_j/a_j)/2 for f_ave.
// E_eff = E + delta (plus) or E - delta (minus).
struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::rho_a;
  double action_scale = 1.0;
  double delta = 0.0;
  ShiftSign sign = ShiftSign::plus;
  double vertex_extra = 0.0;
};

class Multiplier {
 public:
  // rho_path needs a path; f_ave needs a generation profile.
  Multiplier(const MetricGraph& graph, MultiplierSpec spec, std::optional<PathSpec> path = std::nullopt,
             std::optional<GenerationProfile> profile = std::nullopt);
  Multiplier(const Eigenfunction& f, MultiplierSpec spec, std::optional<PathSpec> path = std::nullopt);

  const MultiplierSpec& spec() const noexcept { return spec_; }
  double effective_energy() const noexcept { return energy_eff_; }
  bool on_path(EdgeIndex e) const;

  // Graph multipliers (none, rho_a, rho_path). Slope is d/dx along the edge orientation.
  double log_value(GraphPoint p) const;
  double log_slope(GraphPoint p) const;

  // Averaged multiplier as a function of the distance y.
  double log_value_y(double y) const;
  double log_slope_y(double y) const;

 private:
  const MetricGraph* graph_;
  MultiplierSpec spec_;
  double energy_eff_;
  AgmonMetricTable table_;
  std::optional<PathSpec> path_;
  std::optional<GenerationProfile> profile_;
  std::vector<int> path_position_;    // per edge, -1 off the path
  std::vector<bool> path_reversed_;   // per edge
  std::vector<double> path_log_start_;  // log F at the start of each path edge
};

// Min over samples on non-core edges of V - E - (F'/F)^2, with the analytic slope of log F.
// rho_path is restricted to the path; f_ave uses the averaged variable.
double constraint_margin(const MetricGraph& graph, const MultiplierSpec& spec, int n_samples);
double constraint_margin(const Eigenfunction& f, const MultiplierSpec& spec, int n_samples,
                         std::optional<PathSpec> path = std::nullopt);

struct GenerationStats {
  int generation = 0;
  double sup_f_psi = 0.0;
  double l2_increment = 0.0;        // of (F psi)^2
  double plain_l2_increment = 0.0;  // of psi^2, closed form
};

struct DepthSummary {
  int depth = 0;
  double sup_f_psi = 0.0;
  double cum_l2 = 0.0;
  double plain_cum_l2 = 0.0;
  bool plateau_pass = false;
};

struct DecayReport {
  std::string family;
  MultiplierSpec multiplier;
  double effective_energy = 0.0;
  bool on_path = false;
  std::vector<GenerationStats> generations;
  std::vector<DepthSummary> depths;
  double tail_ratio = 0.0;          // exp of the fitted slope of log increment vs generation, g >= 3
  double log_psi_rho_slope = 0.0;   // least-squares slope of log|psi| against rho_a at edge tails (graph multipliers)
  bool plateau_pass = false;
  bool cauchy_pass = false;
  bool pass = false;
};

inline constexpr double kPlateauFactor = 1.01;
inline constexpr int kPlateauLead = 3;

// Per-generation sups and L2 increments of F psi over the whole graph, the given
// path, or (f_ave) the averaged function. Throws std::invalid_argument when the
// multiplier does not fit the family or a depth exceeds the construction.
DecayReport decay_report(const Eigenfunction& f, const MultiplierSpec& spec, const std::vector<int>& depths,
                         std::optional<PathSpec> path = std::nullopt);

// Closed-form integral of (a cosh kx + b sinh kx)^2 over [0, L].
double edge_l2(const EdgeSolution& sol, double length);

// Least-squares slope of ys against xs.
double fit_log_slope(std::span<const double> xs, std::span<const double> ys);

// Slope of log|psi| against arc distance. Needs >= 10 samples with psi != 0.
double fit_decay_rate(const Eigenfunction& f, std::span<const GraphPoint> samples);

// Start of every edge on the path (the vertex samples).
std::vector<GraphPoint> path_vertex_samples(const PathSpec& path);

// max |(F phi)'(phi/F)' - (phi')^2 + (F'/F)^2 phi^2| over interior samples, centered differences.
double identity_check(std::span<const double> f_samples, std::span<const double> phi_samples, double h);

// Same on a window [x0, x1] strictly inside one edge, with F from the multiplier.
// Throws std::invalid_argument when the window reaches a vertex.
double identity_check_on_edge(const Eigenfunction& f, const Multiplier& m, EdgeIndex e, double x0, double x1,
                              double h);

struct MonotonicityResult {
  bool monotone = true;
  std::int64_t edge_id = -1;  // first violation
  double offset = 0.0;
  std::size_t edges_checked = 0;
  std::size_t midpoint_zeros = 0;  // antisymmetric ladder rungs
  std::string message;
};

// |psi| non-increasing along every distance-oriented edge beyond the radius.
// For the antisymmetric ladder each rung must also vanish at its midpoint.
MonotonicityResult monotonicity_check(const Eigenfunction& f, double exclusion_radius);

// Psi'(v_j+) / Psi'(v_j-) from one-sided three-point differences.
double averaged_derivative_jump(const Eigenfunction& f, int j, double h = 1e-4);

// |Psi(v_j-) - Psi(v_j+)| / |Psi(v_j+)|.
double averaged_continuity(const Eigenfunction& f, int j);

}  // namespace agmon
