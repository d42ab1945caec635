#include "agmon/eigenfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace agmon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_offset(double length, double x) {
  const double slack = 1e-12 * length;
  if (!(x >= -slack && x <= length + slack)) {
    throw std::out_of_range(fmt::format("x = {} outside edge of length {}", x, length));
  }
}

double rate(double potential, double energy) {
  const double excess = potential - energy;
  if (!(excess > 0.0)) {
    throw std::invalid_argument(fmt::format("V - E = {} must be positive on exterior edges", excess));
  }
  return std::sqrt(excess);
}

// Edge indices ordered by the arc distance of their tail.
std::vector<EdgeIndex> outward_order(const MetricGraph& graph, const std::vector<double>& dist) {
  std::vector<EdgeIndex> order(graph.edge_count());
  std::iota(order.begin(), order.end(), EdgeIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](EdgeIndex x, EdgeIndex y) { return dist[graph.edge(x).tail] < dist[graph.edge(y).tail]; });
  return order;
}

struct GenerationCoefficients {
  std::vector<double> k, a, b;
};

// Per-generation (A, B) for generation-uniform families. The B/A ratio comes from
// a backward recurrence seeded well beyond the truncation, which converges onto
// the decaying direction; amplitudes then follow by continuity.
GenerationCoefficients uniform_coefficients(const FamilySpec& spec) {
  const GenerationProfile base = generation_profile(spec);
  double min_kl = std::numeric_limits<double>::infinity();
  for (int g = 0; g <= spec.depth; ++g) {
    min_kl = std::min(min_kl, rate(base.potentials[g], spec.energy) * base.lengths[g]);
  }
  const int extra = static_cast<int>(std::min(200000.0, std::max(64.0, std::ceil(40.0 / (2.0 * min_kl)))));
  FamilySpec extended = spec;
  extended.depth = spec.depth + extra;
  const GenerationProfile prof = generation_profile(extended);
  const int n = extended.depth;

  std::vector<double> k(n + 1), r(n + 1);
  for (int g = 0; g <= n; ++g) k[g] = rate(prof.potentials[g], spec.energy);
  r[n] = -1.0;
  for (int g = n - 1; g >= 0; --g) {
    const double p = static_cast<double>(prof.arriving[g + 1]) / prof.ongoing[g + 1];
    const double q = r[g + 1] * k[g + 1] / (p * k[g]);
    const double c = std::cosh(k[g] * prof.lengths[g]);
    const double s = std::sinh(k[g] * prof.lengths[g]);
    r[g] = (q * c - s) / (c - q * s);
  }

  GenerationCoefficients out;
  double amplitude = 1.0;
  for (int g = 0; g <= spec.depth; ++g) {
    out.k.push_back(k[g]);
    out.a.push_back(amplitude);
    out.b.push_back(r[g] * amplitude);
    const double kl = k[g] * prof.lengths[g];
    amplitude *= std::cosh(kl) + r[g] * std::sinh(kl);
  }
  return out;
}

std::vector<EdgeSolution> regular_tree_solutions(const MetricGraph& graph, const FamilySpec& spec,
                                                 const RegularTreeParams& p) {
  const double k = rate(spec.potential, spec.energy);
  const EigenPair2 eig = eig2(vertex_edge_transfer(k * p.length, 1.0 / p.branching));
  const double w = eig.small_vector.b / eig.small_vector.a;
  std::vector<EdgeSolution> out;
  for (const auto& e : graph.edges()) {
    const double amp = std::pow(eig.small, e.generation);
    out.push_back({e.id, k, amp, amp * w});
  }
  return out;
}

std::vector<EdgeSolution> uniform_solutions(const MetricGraph& graph, const FamilySpec& spec) {
  const GenerationCoefficients gc = uniform_coefficients(spec);
  std::vector<EdgeSolution> out;
  for (const auto& e : graph.edges()) {
    const auto g = static_cast<std::size_t>(e.generation);
    out.push_back({e.id, gc.k.at(g), gc.a.at(g), gc.b.at(g)});
  }
  return out;
}

std::vector<EdgeSolution> two_lengths_solutions(const MetricGraph& graph, const FamilySpec& spec,
                                                const TwoLengthsParams& p) {
  const double k = rate(spec.potential, spec.energy);
  const SharedEigenvector m = match_vertex_eigenvector(k * p.length1, k * p.length2);
  const double sigma = m.w / m.p1;
  const double ratio[2] = {m.w, sigma * (1.0 - m.p1)};

  const auto dist = arc_distances(graph);
  std::vector<double> value(graph.vertex_count(), kNaN);
  value[graph.root()] = 1.0;
  std::vector<EdgeSolution> out(graph.edge_count());
  for (const EdgeIndex ei : outward_order(graph, dist)) {
    const Edge& e = graph.edge(ei);
    const int type = std::abs(e.length - p.length1) <= std::abs(e.length - p.length2) ? 0 : 1;
    const double a = value[e.tail];
    out[ei] = {e.id, k, a, ratio[type] * a};
    value[e.head] = out[ei].value(e.length);
  }
  return out;
}

std::vector<EdgeSolution> millipede_solutions(const MetricGraph& graph, const FamilySpec& spec,
                                              const MillipedeParams& p) {
  const double k = rate(spec.potential, spec.energy);
  const double k_leg = rate(spec.energy + p.delta * p.delta, spec.energy);
  const EigenPair2 eig = eig2(coupled_transfer(2.0 * k, k_leg / k));
  const double w = eig.small_vector.b / eig.small_vector.a;
  std::vector<EdgeSolution> out;
  for (const auto& e : graph.edges()) {
    const double amp = std::pow(eig.small, e.generation);
    if (e.kind == EdgeKind::leg) {
      out.push_back({e.id, k_leg, amp, -amp});
    } else {
      out.push_back({e.id, k, amp, amp * w});
    }
  }
  return out;
}

std::vector<EdgeSolution> ladder_solutions(const MetricGraph& graph, const FamilySpec& spec, const LadderParams& p,
                                           std::vector<VertexIndex>& core) {
  const bool odd = p.mode == LadderMode::antisymmetric;
  const double k = rate(spec.potential, spec.energy);
  const double k_r = std::sqrt(std::max(ladder_rung_potential(spec, p) - spec.energy, 0.0));
  const double half = 0.5 * p.rung_width;
  const double x = k_r * half;
  double eta;
  if (k_r == 0.0) {
    eta = odd ? 1.0 / half : 0.0;
  } else {
    eta = odd ? k_r / std::tanh(x) : k_r * std::tanh(x);
  }
  const EigenPair2 eig = eig2(coupled_transfer(k, eta / k));
  const double w = eig.small_vector.b / eig.small_vector.a;

  const auto dist = arc_distances(graph);
  std::vector<int> side(graph.vertex_count(), -1);
  std::vector<double> value(graph.vertex_count(), kNaN);
  std::vector<EdgeSolution> out(graph.edge_count());
  int next_side = 0;
  core.assign(1, graph.root());
  for (const EdgeIndex ei : outward_order(graph, dist)) {
    const Edge& e = graph.edge(ei);
    if (e.kind == EdgeKind::connector) {
      const int s = next_side++;
      const double sign = (odd && s == 1) ? -1.0 : 1.0;
      side[e.head] = s;
      core.push_back(e.head);
      if (!odd) {
        out[ei] = {e.id, k_r, k_r == 0.0 ? 1.0 : 1.0 / std::cosh(x), 0.0};
      } else {
        out[ei] = {e.id, k_r, 0.0, sign / (k_r == 0.0 ? half : std::sinh(x))};
      }
      value[e.head] = sign;
    } else if (e.kind == EdgeKind::rail) {
      const int s = side[e.tail];
      if (s < 0) throw std::logic_error("ladder: rail edge not reachable from a connector");
      side[e.head] = s;
      const double sign = (odd && s == 1) ? -1.0 : 1.0;
      const double amp = sign * std::pow(eig.small, e.generation);
      out[ei] = {e.id, k, amp, amp * w};
      value[e.head] = out[ei].value(e.length);
    } else if (e.kind == EdgeKind::rung) {
      const double v = value[e.tail];
      double b;
      if (k_r == 0.0) {
        b = odd ? -v / half : 0.0;
      } else {
        b = odd ? -v / std::tanh(x) : -v * std::tanh(x);
      }
      out[ei] = {e.id, k_r, v, b};
    } else {
      throw std::logic_error("ladder: unexpected edge kind");
    }
  }
  return out;
}

std::vector<double> derivative_fractions(const MetricGraph& graph, const std::vector<EdgeSolution>& sols) {
  std::vector<double> total(graph.vertex_count(), 0.0);
  for (std::size_t e = 0; e < graph.edge_count(); ++e) total[graph.edge(e).tail] += sols[e].derivative(0.0);
  std::vector<double> out(graph.edge_count(), kNaN);
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const VertexIndex t = graph.edge(e).tail;
    if (t == graph.root() || total[t] == 0.0) continue;
    out[e] = sols[e].derivative(0.0) / total[t];
  }
  return out;
}

}  // namespace

double EdgeSolution::value(double x) const noexcept {
  if (k == 0.0) return a + b * x;
  return a * std::cosh(k * x) + b * std::sinh(k * x);
}

double EdgeSolution::derivative(double x) const noexcept {
  if (k == 0.0) return b;
  return k * (a * std::sinh(k * x) + b * std::cosh(k * x));
}

double edge_eval(const EdgeSolution& sol, double length, double x) {
  check_offset(length, x);
  return sol.value(x);
}

double edge_deriv(const EdgeSolution& sol, double length, double x) {
  check_offset(length, x);
  return sol.derivative(x);
}

std::vector<Coefficients> propagate(Coefficients initial, std::span<const TransferMatrix> steps) {
  std::vector<Coefficients> out{initial};
  for (const auto& t : steps) out.push_back(t.apply(out.back()));
  return out;
}

Eigenfunction::Eigenfunction(MetricGraph graph, std::vector<EdgeSolution> solutions, std::vector<VertexIndex> core,
                             std::optional<FamilySpec> family)
    : graph_(std::move(graph)), solutions_(std::move(solutions)), core_(std::move(core)), family_(std::move(family)) {
  if (solutions_.size() != graph_.edge_count()) {
    throw std::invalid_argument(
        fmt::format("eigenfunction: {} solutions for {} edges", solutions_.size(), graph_.edge_count()));
  }
  if (core_.empty()) core_.push_back(graph_.root());
  for (const VertexIndex v : core_) {
    if (v >= graph_.vertex_count()) throw std::invalid_argument("eigenfunction: core vertex off-graph");
  }
  fractions_ = derivative_fractions(graph_, solutions_);
  arc_distance_ = arc_distances(graph_);
  if (family_) {
    const bool uniform = std::holds_alternative<RegularTreeParams>(family_->params) ||
                         std::holds_alternative<NsTreeParams>(family_->params) ||
                         std::holds_alternative<BraidedParams>(family_->params);
    if (uniform) profile_ = generation_profile(*family_);
  }
}

bool Eigenfunction::is_core(VertexIndex v) const { return std::find(core_.begin(), core_.end(), v) != core_.end(); }

double Eigenfunction::value(GraphPoint p) const {
  return edge_eval(solutions_.at(p.edge), graph_.edge(p.edge).length, p.offset);
}

double Eigenfunction::derivative(GraphPoint p) const {
  return edge_deriv(solutions_.at(p.edge), graph_.edge(p.edge).length, p.offset);
}

double Eigenfunction::vertex_value(VertexIndex v) const {
  const auto& incident = graph_.vertex(v).incident;
  if (incident.empty()) throw std::invalid_argument("vertex has no incident edge");
  const Edge& e = graph_.edge(incident.front());
  return solutions_[incident.front()].value(e.tail == v ? 0.0 : e.length);
}

Eigenfunction Eigenfunction::with_solution(EdgeIndex e, EdgeSolution sol) const {
  std::vector<EdgeSolution> sols = solutions_;
  sols.at(e) = sol;
  return Eigenfunction(graph_, std::move(sols), core_, family_);
}

Eigenfunction construct(const FamilySpec& spec) {
  const MetricGraph graph = insert_cut_points(generate_family(spec));
  std::vector<VertexIndex> core;
  std::vector<EdgeSolution> sols;
  if (const auto* p = std::get_if<RegularTreeParams>(&spec.params)) {
    sols = regular_tree_solutions(graph, spec, *p);
  } else if (const auto* p = std::get_if<TwoLengthsParams>(&spec.params)) {
    sols = two_lengths_solutions(graph, spec, *p);
  } else if (const auto* p = std::get_if<MillipedeParams>(&spec.params)) {
    sols = millipede_solutions(graph, spec, *p);
  } else if (const auto* p = std::get_if<LadderParams>(&spec.params)) {
    sols = ladder_solutions(graph, spec, *p, core);
  } else {
    sols = uniform_solutions(graph, spec);
  }
  return Eigenfunction(graph, std::move(sols), std::move(core), spec);
}

std::vector<EdgeSolution> generation_solutions(const FamilySpec& spec) {
  const GenerationCoefficients gc = uniform_coefficients(spec);
  std::vector<EdgeSolution> out;
  for (std::size_t g = 0; g < gc.k.size(); ++g) {
    out.push_back({static_cast<std::int64_t>(g), gc.k[g], gc.a[g], gc.b[g]});
  }
  return out;
}

namespace {

struct EndValues {
  std::vector<double> values;
  std::vector<double> outgoing;  // derivative pointing away from the vertex
};

EndValues ends_at(const Eigenfunction& f, VertexIndex v) {
  EndValues out;
  const auto& g = f.graph();
  for (const EdgeIndex ei : g.vertex(v).incident) {
    const Edge& e = g.edge(ei);
    const EdgeSolution& s = f.solution(ei);
    if (e.tail == v) {
      out.values.push_back(s.value(0.0));
      out.outgoing.push_back(s.derivative(0.0));
    }
    if (e.head == v) {
      out.values.push_back(s.value(e.length));
      out.outgoing.push_back(-s.derivative(e.length));
    }
  }
  return out;
}

}  // namespace

double continuity_residual(const Eigenfunction& f, VertexIndex v) {
  const EndValues ends = ends_at(f, v);
  if (ends.values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(ends.values.begin(), ends.values.end());
  // scale by |psi| over both ends of every incident edge, so a node of psi
  // (antisymmetric rung midpoints) is not divided by its own roundoff
  double scale = 0.0;
  for (const EdgeIndex e : f.graph().vertex(v).incident) {
    const auto& sol = f.solution(e);
    scale = std::max({scale, std::abs(sol.value(0.0)), std::abs(sol.value(f.graph().edge(e).length))});
  }
  return (*hi - *lo) / (scale + 1e-300);
}

double kirchhoff_residual(const Eigenfunction& f, VertexIndex v) {
  if (f.graph().is_leaf(v)) {
    throw std::invalid_argument(
        fmt::format("Kirchhoff condition does not apply at leaf vertex {}", f.graph().vertex(v).id));
  }
  const EndValues ends = ends_at(f, v);
  double sum = 0.0;
  double mag = 0.0;
  for (const double d : ends.outgoing) {
    sum += d;
    mag += std::abs(d);
  }
  return std::abs(sum) / (mag + 1e-300);
}

std::vector<VertexIndex> interior_vertices(const Eigenfunction& f) {
  std::vector<VertexIndex> out;
  for (VertexIndex v = 0; v < f.graph().vertex_count(); ++v) {
    if (!f.graph().is_leaf(v) && !f.is_core(v)) out.push_back(v);
  }
  return out;
}

double averaged_wave_function(const Eigenfunction& f, double y, bool left_limit) {
  if (!f.profile()) throw std::invalid_argument("averaged wave function needs a generation-uniform family");
  const GenerationProfile& prof = *f.profile();
  const auto& v = prof.positions;
  const int depth = static_cast<int>(prof.lengths.size()) - 1;
  const double end = v.back();
  if (!(y >= 0.0) || y > end * (1.0 + 1e-12)) {
    throw std::out_of_range(fmt::format("y = {} outside the truncated graph [0, {}]", y, end));
  }
  int g = 0;
  while (g + 1 <= depth && (left_limit ? v[g + 1] < y : v[g + 1] <= y)) ++g;
  const double x = std::min(y - v[g], prof.lengths[g]);
  double weight = 1.0;
  for (int j = 1; j <= g; ++j) weight *= static_cast<double>(prof.arriving[j]) / prof.ongoing[j];
  double sum = 0.0;
  for (std::size_t e = 0; e < f.graph().edge_count(); ++e) {
    if (f.graph().edge(e).generation == g) sum += f.solution(e).value(x);
  }
  return weight * sum;
}

double ode_residual(const EdgeSolution& sol, double length, double h) {
  constexpr int kPoints = 16;
  if (!(h > 0.0) || h >= length / (kPoints + 1)) {
    throw std::invalid_argument("ode_residual: step must be positive and below L/17");
  }
  double err = 0.0;
  double scale = 0.0;
  for (int i = 1; i <= kPoints; ++i) {
    const double x = length * i / (kPoints + 1);
    const double second = (sol.value(x + h) - 2.0 * sol.value(x) + sol.value(x - h)) / (h * h);
    const double exact = sol.k * sol.k * sol.value(x);
    err = std::max(err, std::abs(second - exact));
    scale = std::max(scale, std::abs(exact));
  }
  return err / (scale + 1e-300);
}

PathSpec first_path(const Eigenfunction& f) {
  const MetricGraph& g = f.graph();
  std::vector<int> out_degree(g.vertex_count(), 0);
  for (const auto& e : g.edges()) ++out_degree[e.tail];
  PathSpec path;
  VertexIndex at = g.root();
  while (out_degree[at] > 0) {
    // continuing edges first, then the larger derivative fraction (NaN at the root ranks lowest)
    EdgeIndex pick = kNoIndex;
    auto rank = [&](EdgeIndex ei) {
      const double frac = f.fractions()[ei];
      return std::pair{out_degree[g.edge(ei).head] > 0, std::isnan(frac) ? -1.0 : frac};
    };
    for (const EdgeIndex ei : g.vertex(at).incident) {
      if (g.edge(ei).tail != at) continue;
      if (pick == kNoIndex || rank(ei) > rank(pick)) pick = ei;
    }
    if (!path.edges.empty()) path.fractions.push_back(f.fractions()[pick]);
    path.edges.push_back(pick);
    at = g.edge(pick).head;
  }
  return path;
}

}  // namespace agmon
