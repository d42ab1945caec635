#include "agmon/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

namespace agmon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  double t;  // in [0, 1]
  double weight;
};

// 16-point Gauss-Legendre on [0, 1].
const std::array<Node, 16>& gauss_nodes() {
  static const std::array<Node, 16> nodes = [] {
    using Rule = boost::math::quadrature::gauss<double, 16>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    std::array<Node, 16> out{};
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[n++] = {0.5 * (1.0 - x[i]), 0.5 * w[i]};
      out[n++] = {0.5 * (1.0 + x[i]), 0.5 * w[i]};
    }
    std::sort(out.begin(), out.end(), [](const Node& a, const Node& b) { return a.t < b.t; });
    return out;
  }();
  return nodes;
}

bool is_antisymmetric_ladder(const Eigenfunction& f) {
  if (!f.family()) return false;
  const auto* p = std::get_if<LadderParams>(&f.family()->params);
  return p != nullptr && p->mode == LadderMode::antisymmetric;
}

int profile_generation(const GenerationProfile& prof, double y) {
  const int depth = static_cast<int>(prof.lengths.size()) - 1;
  int g = 0;
  while (g + 1 <= depth && prof.positions[g + 1] <= y) ++g;
  return g;
}

double generation_rate(const GenerationProfile& prof, int g, double energy) {
  const double excess = prof.potentials[g] - energy;
  if (!(excess > 0.0)) {
    throw std::domain_error(fmt::format("averaged multiplier: V_m - E = {} in generation {}", excess, g));
  }
  return std::sqrt(excess);
}

}  // namespace

std::string_view to_string(MultiplierKind kind) {
  switch (kind) {
    case MultiplierKind::none: return "none";
    case MultiplierKind::rho_a: return "rho-a";
    case MultiplierKind::rho_path: return "path";
    case MultiplierKind::f_ave: return "f-ave";
  }
  return "?";
}

MultiplierKind multiplier_kind_from_string(std::string_view name) {
  if (name == "none") return MultiplierKind::none;
  if (name == "rho-a" || name == "rho_a") return MultiplierKind::rho_a;
  if (name == "path" || name == "rho-path" || name == "rho_path") return MultiplierKind::rho_path;
  if (name == "f-ave" || name == "f_ave") return MultiplierKind::f_ave;
  throw std::invalid_argument(fmt::format("unknown multiplier '{}'", name));
}

std::string_view to_string(ShiftSign sign) { return sign == ShiftSign::plus ? "plus" : "minus"; }

ShiftSign shift_sign_from_string(std::string_view name) {
  if (name == "plus" || name == "+") return ShiftSign::plus;
  if (name == "minus" || name == "-") return ShiftSign::minus;
  throw std::invalid_argument(fmt::format("unknown shift sign '{}'", name));
}

Multiplier::Multiplier(const MetricGraph& graph, MultiplierSpec spec, std::optional<PathSpec> path,
                       std::optional<GenerationProfile> profile)
    : graph_(&graph),
      spec_(spec),
      energy_eff_(shifted_energy(graph.energy(), spec.delta, spec.sign)),
      table_(compute_rho_a(graph, energy_eff_)),
      path_(std::move(path)),
      profile_(std::move(profile)) {
  if (spec_.kind == MultiplierKind::f_ave && !profile_) {
    throw std::invalid_argument("the averaged multiplier needs a braided or tree family");
  }
  if (spec_.kind == MultiplierKind::rho_path && !path_) {
    throw std::invalid_argument("the path multiplier needs a path");
  }
  path_position_.assign(graph.edge_count(), -1);
  path_reversed_.assign(graph.edge_count(), false);
  if (!path_) return;
  validate_path(graph, *path_);
  const auto vertices = path_vertices(graph, *path_);
  double cum = 0.0;
  for (std::size_t i = 0; i < path_->edges.size(); ++i) {
    const EdgeIndex e = path_->edges[i];
    path_position_[e] = static_cast<int>(i);
    path_reversed_[e] = graph.edge(e).tail != vertices[i];
    path_log_start_.push_back(cum);
    cum += spec_.action_scale * table_.action_weight[e];
    if (i + 1 < path_->edges.size()) cum += 0.5 * std::log(1.0 / path_->fractions[i]) + spec_.vertex_extra;
  }
}

Multiplier::Multiplier(const Eigenfunction& f, MultiplierSpec spec, std::optional<PathSpec> path)
    : Multiplier(f.graph(), spec, std::move(path), f.profile()) {}

bool Multiplier::on_path(EdgeIndex e) const { return path_ && path_position_.at(e) >= 0; }

double Multiplier::log_value(GraphPoint p) const {
  const Edge& e = graph_->edge(p.edge);
  switch (spec_.kind) {
    case MultiplierKind::none:
      return 0.0;
    case MultiplierKind::rho_a:
      return spec_.action_scale * eval_rho_a(*graph_, table_, p) + spec_.vertex_extra * e.generation;
    case MultiplierKind::rho_path: {
      const int pos = path_position_.at(p.edge);
      if (pos < 0) throw std::invalid_argument(fmt::format("edge {} is not on the path", e.id));
      const double x = path_reversed_[p.edge] ? e.length - p.offset : p.offset;
      return path_log_start_[pos] + spec_.action_scale * action_rate(e, energy_eff_) * x;
    }
    case MultiplierKind::f_ave:
      break;
  }
  throw std::invalid_argument("the averaged multiplier is a function of the distance only");
}

double Multiplier::log_slope(GraphPoint p) const {
  const Edge& e = graph_->edge(p.edge);
  const double a = spec_.action_scale * action_rate(e, energy_eff_);
  switch (spec_.kind) {
    case MultiplierKind::none:
      return 0.0;
    case MultiplierKind::rho_a: {
      const double s = std::clamp(p.offset, 0.0, e.length);
      const double from_tail = table_.rho[e.tail] + action_rate(e, energy_eff_) * s;
      const double from_head = table_.rho[e.head] + action_rate(e, energy_eff_) * (e.length - s);
      return from_tail <= from_head ? a : -a;
    }
    case MultiplierKind::rho_path:
      if (path_position_.at(p.edge) < 0) throw std::invalid_argument(fmt::format("edge {} is not on the path", e.id));
      return path_reversed_[p.edge] ? -a : a;
    case MultiplierKind::f_ave:
      break;
  }
  throw std::invalid_argument("the averaged multiplier is a function of the distance only");
}

double Multiplier::log_value_y(double y) const {
  if (spec_.kind != MultiplierKind::f_ave) throw std::invalid_argument("log_value_y needs the averaged multiplier");
  const GenerationProfile& prof = *profile_;
  const auto& v = prof.positions;
  if (!(y >= 0.0) || y > v.back() * (1.0 + 1e-12)) throw std::out_of_range("averaged multiplier: y outside profile");
  double result = 0.0;
  for (std::size_t g = 0; g + 1 < v.size(); ++g) {
    if (g >= 1 && v[g] < y) {
      result += 0.5 * std::log(static_cast<double>(prof.ongoing[g]) / prof.arriving[g]) + spec_.vertex_extra;
    }
    if (v[g] >= y) break;
    result += spec_.action_scale * generation_rate(prof, static_cast<int>(g), energy_eff_) *
              (std::min(y, v[g + 1]) - v[g]);
  }
  return result;
}

double Multiplier::log_slope_y(double y) const {
  if (spec_.kind != MultiplierKind::f_ave) throw std::invalid_argument("log_slope_y needs the averaged multiplier");
  return spec_.action_scale * generation_rate(*profile_, profile_generation(*profile_, y), energy_eff_);
}

double constraint_margin(const MetricGraph& graph, const MultiplierSpec& spec, int n_samples) {
  if (spec.kind == MultiplierKind::f_ave) {
    throw std::invalid_argument("constraint_margin: the averaged multiplier needs an eigenfunction with a profile");
  }
  if (n_samples < 1) throw std::invalid_argument("constraint_margin: need at least one sample per edge");
  MultiplierSpec local = spec;
  if (local.kind == MultiplierKind::rho_path) local.kind = MultiplierKind::rho_a;
  const Multiplier m(graph, local);
  double margin = kInf;
  for (EdgeIndex ei = 0; ei < graph.edge_count(); ++ei) {
    const Edge& e = graph.edge(ei);
    if (e.core) continue;
    for (int i = 0; i < n_samples; ++i) {
      const double slope = m.log_slope({ei, e.length * (i + 0.5) / n_samples});
      margin = std::min(margin, e.potential - graph.energy() - slope * slope);
    }
  }
  return margin;
}

double constraint_margin(const Eigenfunction& f, const MultiplierSpec& spec, int n_samples,
                         std::optional<PathSpec> path) {
  if (spec.kind != MultiplierKind::f_ave && spec.kind != MultiplierKind::rho_path) {
    return constraint_margin(f.graph(), spec, n_samples);
  }
  if (n_samples < 1) throw std::invalid_argument("constraint_margin: need at least one sample per edge");
  const double energy = f.graph().energy();
  double margin = kInf;
  if (spec.kind == MultiplierKind::rho_path) {
    if (!path) return constraint_margin(f.graph(), spec, n_samples);
    const Multiplier m(f, spec, path);
    for (const EdgeIndex ei : path->edges) {
      const Edge& e = f.graph().edge(ei);
      if (e.core) continue;
      for (int i = 0; i < n_samples; ++i) {
        const double slope = m.log_slope({ei, e.length * (i + 0.5) / n_samples});
        margin = std::min(margin, e.potential - energy - slope * slope);
      }
    }
    return margin;
  }
  const Multiplier m(f, spec);
  const GenerationProfile& prof = *f.profile();
  for (std::size_t g = 0; g < prof.lengths.size(); ++g) {
    for (int i = 0; i < n_samples; ++i) {
      const double y = prof.positions[g] + prof.lengths[g] * (i + 0.5) / n_samples;
      const double slope = m.log_slope_y(y);
      margin = std::min(margin, prof.potentials[g] - energy - slope * slope);
    }
  }
  return margin;
}

double edge_l2(const EdgeSolution& sol, double L) {
  const double a = sol.a;
  const double b = sol.b;
  const double k = sol.k;
  if (k == 0.0) return a * a * L + a * b * L * L + b * b * L * L * L / 3.0;
  const double kl = k * L;
  double sinh_term;  // sinh(2kL)/(4k) - L/2
  double cross;      // (cosh(2kL) - 1)/(4k)
  if (kl < 1e-2) {
    sinh_term = k * k * L * L * L / 3.0 + k * k * k * k * L * L * L * L * L / 15.0;
    cross = 0.5 * k * L * L + k * k * k * L * L * L * L / 6.0;
  } else {
    sinh_term = std::sinh(2.0 * kl) / (4.0 * k) - 0.5 * L;
    cross = (std::cosh(2.0 * kl) - 1.0) / (4.0 * k);
  }
  return a * a * (L + sinh_term) + b * b * sinh_term + 2.0 * a * b * cross;
}

namespace {

double tail_ratio_fit(const std::vector<GenerationStats>& gens, int upto) {
  std::vector<double> xs, ys;
  for (const auto& g : gens) {
    if (g.generation < kPlateauLead || g.generation > upto) continue;
    xs.push_back(g.generation);
    ys.push_back(std::log(g.l2_increment + 1e-300));
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::exp(fit_log_slope(xs, ys));
}

bool plateau(const std::vector<GenerationStats>& gens, int upto) {
  double lead = 0.0;
  double tail = 0.0;
  for (const auto& g : gens) {
    if (g.generation > upto) continue;
    if (g.generation < kPlateauLead) {
      lead = std::max(lead, g.sup_f_psi);
    } else {
      tail = std::max(tail, g.sup_f_psi);
    }
  }
  return tail <= kPlateauFactor * lead;
}

void accumulate_graph(const Eigenfunction& f, const Multiplier& m, const std::vector<EdgeIndex>& domain,
                      std::vector<GenerationStats>& gens, std::vector<double>& rho_x, std::vector<double>& log_psi) {
  const MetricGraph& g = f.graph();
  const AgmonMetricTable plain = compute_rho_a(g);
  for (const EdgeIndex ei : domain) {
    const Edge& e = g.edge(ei);
    const EdgeSolution& sol = f.solution(ei);
    GenerationStats& row = gens.at(static_cast<std::size_t>(e.generation));
    double sup = 0.0;
    for (const double x : {0.0, e.length}) {
      sup = std::max(sup, std::exp(m.log_value({ei, x})) * std::abs(sol.value(x)));
    }
    double integral = 0.0;
    for (const Node& n : gauss_nodes()) {
      const double x = n.t * e.length;
      const double psi = sol.value(x);
      const double fpsi = std::exp(m.log_value({ei, x})) * psi;
      sup = std::max(sup, std::abs(fpsi));
      integral += n.weight * fpsi * fpsi;
    }
    // slope samples at edge tails only
    if (const double psi0 = sol.value(0.0); psi0 != 0.0) {
      rho_x.push_back(plain.rho[e.tail]);
      log_psi.push_back(std::log(std::abs(psi0)));
    }
    row.sup_f_psi = std::max(row.sup_f_psi, sup);
    row.l2_increment += integral * e.length;
    row.plain_l2_increment += edge_l2(sol, e.length);
  }
}

void accumulate_averaged(const Eigenfunction& f, const Multiplier& m, std::vector<GenerationStats>& gens) {
  const GenerationProfile& prof = *f.profile();
  for (std::size_t g = 0; g < prof.lengths.size(); ++g) {
    const double y0 = prof.positions[g];
    const double len = prof.lengths[g];
    GenerationStats& row = gens.at(g);
    double sup = 0.0;
    sup = std::max(sup, std::exp(m.log_value_y(y0)) * std::abs(averaged_wave_function(f, y0)));
    sup = std::max(sup, std::exp(m.log_value_y(y0 + len)) * std::abs(averaged_wave_function(f, y0 + len, true)));
    double integral = 0.0;
    double plain = 0.0;
    for (const Node& n : gauss_nodes()) {
      const double y = y0 + n.t * len;
      const double psi = averaged_wave_function(f, y);
      const double fpsi = std::exp(m.log_value_y(y)) * psi;
      sup = std::max(sup, std::abs(fpsi));
      integral += n.weight * fpsi * fpsi;
      plain += n.weight * psi * psi;
    }
    row.sup_f_psi = sup;
    row.l2_increment = integral * len;
    row.plain_l2_increment = plain * len;
  }
}

}  // namespace

DecayReport decay_report(const Eigenfunction& f, const MultiplierSpec& spec, const std::vector<int>& depths,
                         std::optional<PathSpec> path) {
  DecayReport report;
  report.family = f.family() ? std::string(family_name(*f.family())) : "graph";
  report.multiplier = spec;
  report.on_path = path.has_value() && spec.kind != MultiplierKind::f_ave;

  const Multiplier m(f, spec, spec.kind == MultiplierKind::f_ave ? std::nullopt : path);
  report.effective_energy = m.effective_energy();

  int max_generation = 0;
  std::vector<EdgeIndex> domain;
  if (spec.kind == MultiplierKind::f_ave) {
    max_generation = static_cast<int>(f.profile()->lengths.size()) - 1;
  } else {
    if (path) {
      domain = path->edges;
    } else {
      for (EdgeIndex e = 0; e < f.graph().edge_count(); ++e) domain.push_back(e);
    }
    for (const EdgeIndex e : domain) max_generation = std::max(max_generation, f.graph().edge(e).generation);
  }
  for (int g = 0; g <= max_generation; ++g) report.generations.push_back({g, 0.0, 0.0, 0.0});

  std::vector<double> rho_x, log_psi;
  if (spec.kind == MultiplierKind::f_ave) {
    accumulate_averaged(f, m, report.generations);
    report.log_psi_rho_slope = std::numeric_limits<double>::quiet_NaN();
  } else {
    accumulate_graph(f, m, domain, report.generations, rho_x, log_psi);
    report.log_psi_rho_slope =
        rho_x.size() >= 2 ? fit_log_slope(rho_x, log_psi) : std::numeric_limits<double>::quiet_NaN();
  }

  std::vector<int> schedule = depths.empty() ? std::vector<int>{max_generation} : depths;
  std::sort(schedule.begin(), schedule.end());
  for (const int d : schedule) {
    if (d < 0 || d > max_generation) {
      throw std::invalid_argument(
          fmt::format("depth {} outside the constructed generations 0..{}", d, max_generation));
    }
    DepthSummary row;
    row.depth = d;
    for (int g = 0; g <= d; ++g) {
      const auto& s = report.generations[g];
      row.sup_f_psi = std::max(row.sup_f_psi, s.sup_f_psi);
      row.cum_l2 += s.l2_increment;
      row.plain_cum_l2 += s.plain_l2_increment;
    }
    row.plateau_pass = plateau(report.generations, d);
    report.depths.push_back(row);
  }
  const int top = schedule.back();
  report.plateau_pass = std::all_of(report.depths.begin(), report.depths.end(),
                                    [](const DepthSummary& r) { return r.plateau_pass; });
  report.tail_ratio = tail_ratio_fit(report.generations, top);
  report.cauchy_pass = report.tail_ratio < 1.0;
  report.pass = report.plateau_pass && report.cauchy_pass;
  return report;
}

double fit_log_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("fit_log_slope: need >= 2 paired samples");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_log_slope: all abscissae coincide");
  return sxy / sxx;
}

double fit_decay_rate(const Eigenfunction& f, std::span<const GraphPoint> samples) {
  std::vector<double> xs, ys;
  for (const GraphPoint& p : samples) {
    const double psi = f.value(p);
    if (psi == 0.0) continue;
    xs.push_back(f.arc_distance()[f.graph().edge(p.edge).tail] + p.offset);
    ys.push_back(std::log(std::abs(psi)));
  }
  if (xs.size() < 10) {
    throw std::invalid_argument(fmt::format("fit_decay_rate: {} usable samples, need at least 10", xs.size()));
  }
  return fit_log_slope(xs, ys);
}

std::vector<GraphPoint> path_vertex_samples(const PathSpec& path) {
  std::vector<GraphPoint> out;
  for (const EdgeIndex e : path.edges) out.push_back({e, 0.0});
  return out;
}

double identity_check(std::span<const double> F, std::span<const double> phi, double h) {
  if (F.size() != phi.size() || F.size() < 3) throw std::invalid_argument("identity_check: need >= 3 paired samples");
  if (!(h > 0.0)) throw std::invalid_argument("identity_check: step must be positive");
  for (const double x : F) {
    if (!(x > 0.0)) throw std::invalid_argument("identity_check: F must be positive");
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < F.size(); ++i) {
    const double d_fphi = (F[i + 1] * phi[i + 1] - F[i - 1] * phi[i - 1]) / (2.0 * h);
    const double d_ratio = (phi[i + 1] / F[i + 1] - phi[i - 1] / F[i - 1]) / (2.0 * h);
    const double d_phi = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
    const double log_slope = (F[i + 1] - F[i - 1]) / (2.0 * h * F[i]);
    const double lhs = d_fphi * d_ratio;
    const double rhs = d_phi * d_phi - log_slope * log_slope * phi[i] * phi[i];
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double identity_check_on_edge(const Eigenfunction& f, const Multiplier& m, EdgeIndex e, double x0, double x1,
                              double h) {
  const double L = f.graph().edge(e).length;
  if (!(x0 > 0.0 && x1 < L && x1 > x0)) {
    throw std::invalid_argument(fmt::format("identity_check: window [{}, {}] must lie strictly inside (0, {})", x0, x1, L));
  }
  const auto n = static_cast<std::size_t>(std::llround((x1 - x0) / h)) + 1;
  std::vector<double> F, phi;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::min(x0 + h * i, x1);
    F.push_back(std::exp(m.log_value({e, x})));
    phi.push_back(f.value({e, x}));
  }
  return identity_check(F, phi, h);
}

MonotonicityResult monotonicity_check(const Eigenfunction& f, double exclusion_radius) {
  constexpr int kSamples = 32;
  MonotonicityResult result;
  const MetricGraph& g = f.graph();
  const bool odd_ladder = is_antisymmetric_ladder(f);
  auto fail = [&](const Edge& e, double x, std::string msg) {
    if (!result.monotone) return;
    result.monotone = false;
    result.edge_id = e.id;
    result.offset = x;
    result.message = std::move(msg);
  };
  for (EdgeIndex ei = 0; ei < g.edge_count(); ++ei) {
    const Edge& e = g.edge(ei);
    const EdgeSolution& sol = f.solution(ei);
    const double d0 = f.arc_distance()[e.tail];
    if (d0 + e.length < exclusion_radius) continue;
    ++result.edges_checked;
    double prev = kInf;
    double prev_x = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
      const double x = e.length * i / kSamples;
      if (d0 + x < exclusion_radius) continue;
      const double mag = std::abs(sol.value(x));
      if (prev < kInf && mag > prev * (1.0 + 1e-12) + 1e-300) {
        fail(e, x,
             fmt::format("|psi| increases on edge {} between offsets {} and {} ({} -> {})", e.id, prev_x, x, prev,
                         mag));
        break;
      }
      prev = mag;
      prev_x = x;
    }
    if (odd_ladder && e.kind == EdgeKind::rung) {
      const double start = std::abs(sol.value(0.0));
      const double end = std::abs(sol.value(e.length));
      if (end <= 1e-10 * start + 1e-300) {
        ++result.midpoint_zeros;
      } else {
        fail(e, e.length, fmt::format("rung edge {} does not vanish at the midpoint ({})", e.id, end));
      }
    }
  }
  return result;
}

double averaged_derivative_jump(const Eigenfunction& f, int j, double h) {
  if (!f.profile()) throw std::invalid_argument("averaged_derivative_jump: needs a generation-uniform family");
  const GenerationProfile& prof = *f.profile();
  const int depth = static_cast<int>(prof.lengths.size()) - 1;
  if (j < 1 || j > depth) throw std::invalid_argument("averaged_derivative_jump: j must be in 1..depth");
  const double y = prof.positions[j];
  if (2.0 * h >= std::min(prof.lengths[j - 1], prof.lengths[j])) {
    throw std::invalid_argument("averaged_derivative_jump: step too large for the generation lengths");
  }
  const double right = (-3.0 * averaged_wave_function(f, y) + 4.0 * averaged_wave_function(f, y + h) -
                        averaged_wave_function(f, y + 2.0 * h)) /
                       (2.0 * h);
  const double left = (3.0 * averaged_wave_function(f, y, true) - 4.0 * averaged_wave_function(f, y - h) +
                       averaged_wave_function(f, y - 2.0 * h)) /
                      (2.0 * h);
  return right / left;
}

double averaged_continuity(const Eigenfunction& f, int j) {
  if (!f.profile()) throw std::invalid_argument("averaged_continuity: needs a generation-uniform family");
  const double y = f.profile()->positions.at(static_cast<std::size_t>(j));
  const double right = averaged_wave_function(f, y);
  const double left = averaged_wave_function(f, y, true);
  return std::abs(left - right) / (std::abs(right) + 1e-300);
}

}  // namespace agmon
