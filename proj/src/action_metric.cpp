#include "agmon/action_metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace agmon {

double action_rate(const Edge& edge, double energy) { return std::sqrt(std::max(edge.potential - energy, 0.0)); }

double edge_action_weight(const Edge& edge, double energy) { return action_rate(edge, energy) * edge.length; }

AgmonMetricTable compute_rho_a(const MetricGraph& graph) { return compute_rho_a(graph, graph.energy()); }

AgmonMetricTable compute_rho_a(const MetricGraph& graph, double energy) {
  AgmonMetricTable table;
  table.energy = energy;
  table.action_weight.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) table.action_weight.push_back(edge_action_weight(e, energy));
  table.rho = shortest_distances(graph, table.action_weight);
  table.arc_distance = arc_distances(graph);
  return table;
}

double eval_rho_a(const MetricGraph& graph, const AgmonMetricTable& table, GraphPoint point) {
  if (point.edge >= graph.edge_count()) throw std::out_of_range("eval_rho_a: edge index off-graph");
  const Edge& e = graph.edge(point.edge);
  const double slack = 1e-12 * e.length;
  if (!(point.offset >= -slack && point.offset <= e.length + slack)) {
    throw std::out_of_range(fmt::format("eval_rho_a: offset {} outside edge {} of length {}", point.offset, e.id,
                                        e.length));
  }
  const double s = std::clamp(point.offset, 0.0, e.length);
  const double a = action_rate(e, table.energy);
  if (s == 0.0) return table.rho[e.tail];
  if (s == e.length) return table.rho[e.head];
  return std::min(table.rho[e.tail] + a * s, table.rho[e.head] + a * (e.length - s));
}

MetricGraph insert_cut_points(const MetricGraph& graph) { return insert_cut_points(graph, compute_rho_a(graph)); }

MetricGraph insert_cut_points(const MetricGraph& graph, const AgmonMetricTable& table) {
  const auto& dist = table.arc_distance;
  if (dist.size() != graph.vertex_count()) throw std::invalid_argument("insert_cut_points: table/graph mismatch");
  const bool nothing_to_do = std::all_of(graph.edges().begin(), graph.edges().end(), [&](const Edge& e) {
    return dist[e.head] - dist[e.tail] >= e.length * (1.0 - 1e-12);
  });
  if (nothing_to_do) return graph;
  GraphDescription out = graph.description();
  out.edges.clear();
  std::int64_t next_vertex = graph.next_vertex_id();
  std::int64_t next_edge = graph.next_edge_id();
  for (const auto& e : graph.edges()) {
    const double du = dist[e.tail];
    const double dv = dist[e.head];
    EdgeRecord rec{e.id,         graph.vertex(e.tail).id, graph.vertex(e.head).id, e.length, e.potential,
                   e.generation, e.kind,                  e.core};
    if (std::abs(du - dv) >= e.length * (1.0 - 1e-12)) {
      if (du > dv) std::swap(rec.tail, rec.head);
      out.edges.push_back(rec);
      continue;
    }
    // interior point where both approaches meet
    const double s = 0.5 * (dv + e.length - du);
    const std::int64_t mid = next_vertex++;
    out.vertices.push_back(
        {mid, std::max(graph.vertex(e.tail).generation, graph.vertex(e.head).generation)});
    EdgeRecord first = rec;
    first.head = mid;
    first.length = s;
    EdgeRecord second = rec;
    second.id = next_edge++;
    second.tail = rec.head;
    second.head = mid;
    second.length = e.length - s;
    out.edges.push_back(first);
    out.edges.push_back(second);
  }
  return MetricGraph::build(out);
}

bool is_distance_oriented(const MetricGraph& graph) {
  const auto dist = arc_distances(graph);
  for (const auto& e : graph.edges()) {
    if (!(dist[e.head] > dist[e.tail])) return false;
  }
  return true;
}

std::vector<VertexIndex> path_vertices(const MetricGraph& graph, const PathSpec& path) {
  if (path.edges.empty()) throw std::invalid_argument("path: no edges");
  if (path.fractions.size() + 1 != path.edges.size()) {
    throw std::invalid_argument("path: need one fraction per interior vertex");
  }
  std::vector<VertexIndex> vertices{graph.root()};
  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    if (path.edges[i] >= graph.edge_count()) throw std::invalid_argument("path: edge index off-graph");
    const Edge& e = graph.edge(path.edges[i]);
    const VertexIndex at = vertices.back();
    if (e.tail != at && e.head != at) {
      throw std::invalid_argument(fmt::format("path: edge {} does not continue from vertex {}", e.id,
                                              graph.vertex(at).id));
    }
    vertices.push_back(e.other_end(at));
  }
  return vertices;
}

void validate_path(const MetricGraph& graph, const PathSpec& path) {
  path_vertices(graph, path);
  for (const double p : path.fractions) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument(fmt::format("path: derivative fraction {} is not positive", p));
    }
  }
}

double rho_path(const MetricGraph& graph, const PathSpec& path, double energy) {
  validate_path(graph, path);
  double total = 0.0;
  for (const EdgeIndex e : path.edges) total += edge_action_weight(graph.edge(e), energy);
  for (const double p : path.fractions) total += 0.5 * std::log(1.0 / p);
  return total;
}

double log_f_ave(double y, const GenerationProfile& profile, double energy) {
  if (!(y >= 0.0)) throw std::invalid_argument("f_ave: y must be non-negative");
  const auto& v = profile.positions;
  if (y > v.back() * (1.0 + 1e-12)) {
    throw std::out_of_range(fmt::format("f_ave: y = {} beyond the profile (last vertex at {})", y, v.back()));
  }
  double result = 0.0;
  for (std::size_t g = 0; g + 1 < v.size(); ++g) {
    if (g >= 1 && v[g] < y) {
      result += 0.5 * std::log(static_cast<double>(profile.ongoing[g]) / profile.arriving[g]);
    }
    if (v[g] >= y) break;
    const double excess = profile.potentials[g] - energy;
    if (!(excess > 0.0)) {
      throw std::domain_error(fmt::format("f_ave: V_m - E = {} is not positive in generation {}", excess, g));
    }
    result += std::sqrt(excess) * (std::min(y, v[g + 1]) - v[g]);
  }
  return result;
}

double f_ave(double y, const GenerationProfile& profile, double energy) {
  return std::exp(log_f_ave(y, profile, energy));
}

double shifted_energy(double energy, double delta, ShiftSign sign) {
  if (!(delta >= 0.0)) throw std::invalid_argument("energy shift must be non-negative");
  return sign == ShiftSign::plus ? energy + delta : energy - delta;
}

}  // namespace agmon
