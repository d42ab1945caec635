#include "agmon/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <queue>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

namespace agmon {

namespace {

constexpr std::string_view kKindNames[] = {"plain", "body", "leg", "rail", "rung", "connector"};

std::vector<int> hop_counts(const std::vector<Vertex>& vertices, const std::vector<Edge>& edges,
                            VertexIndex root) {
  std::vector<int> hops(vertices.size(), -1);
  std::deque<VertexIndex> queue{root};
  hops[root] = 0;
  while (!queue.empty()) {
    const VertexIndex u = queue.front();
    queue.pop_front();
    for (const EdgeIndex e : vertices[u].incident) {
      const VertexIndex w = edges[e].other_end(u);
      if (hops[w] < 0) {
        hops[w] = hops[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return hops;
}

}  // namespace

std::string_view to_string(EdgeKind kind) { return kKindNames[static_cast<int>(kind)]; }

EdgeKind edge_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == name) return static_cast<EdgeKind>(i);
  }
  throw std::invalid_argument(fmt::format("unknown edge kind '{}'", name));
}

MetricGraph MetricGraph::build(const GraphDescription& description) {
  MetricGraph g;
  if (description.vertices.empty()) throw GraphError("graph has no vertices", description.root);
  if (!std::isfinite(description.energy)) throw GraphError("energy is not finite", description.root);
  g.energy_ = description.energy;

  std::unordered_map<std::int64_t, VertexIndex> vertex_lookup;
  g.vertices_.reserve(description.vertices.size());
  for (const auto& rec : description.vertices) {
    if (!vertex_lookup.emplace(rec.id, g.vertices_.size()).second) {
      throw GraphError(fmt::format("duplicate vertex id {}", rec.id), rec.id);
    }
    g.vertices_.push_back(Vertex{rec.id, rec.generation, {}});
  }

  std::unordered_map<std::int64_t, EdgeIndex> edge_lookup;
  g.edges_.reserve(description.edges.size());
  g.min_edge_length_ = std::numeric_limits<double>::infinity();
  for (const auto& rec : description.edges) {
    if (!edge_lookup.emplace(rec.id, g.edges_.size()).second) {
      throw GraphError(fmt::format("duplicate edge id {}", rec.id), rec.id);
    }
    const auto tail = vertex_lookup.find(rec.tail);
    const auto head = vertex_lookup.find(rec.head);
    if (tail == vertex_lookup.end() || head == vertex_lookup.end()) {
      const std::int64_t missing = tail == vertex_lookup.end() ? rec.tail : rec.head;
      throw GraphError(
          fmt::format("dangling endpoint: edge {} references missing vertex {}", rec.id, missing),
          rec.id);
    }
    if (!(rec.length > 0.0) || !std::isfinite(rec.length)) {
      throw GraphError(fmt::format("non-positive length on edge {}", rec.id), rec.id);
    }
    if (!std::isfinite(rec.potential)) {
      throw GraphError(fmt::format("non-finite potential on edge {}", rec.id), rec.id);
    }
    if (!rec.core && !(rec.potential > description.energy)) {
      throw GraphError(
          fmt::format("potential not above energy on non-core edge {} (V={}, E={})", rec.id,
                      rec.potential, description.energy),
          rec.id);
    }
    const EdgeIndex index = g.edges_.size();
    g.edges_.push_back(Edge{rec.id, tail->second, head->second, rec.length, rec.potential,
                            rec.generation, rec.kind, rec.core});
    g.vertices_[tail->second].incident.push_back(index);
    if (head->second != tail->second) g.vertices_[head->second].incident.push_back(index);
    g.min_edge_length_ = std::min(g.min_edge_length_, rec.length);
  }
  if (g.edges_.empty()) g.min_edge_length_ = 0.0;

  const auto root = vertex_lookup.find(description.root);
  if (root == vertex_lookup.end()) {
    throw GraphError(fmt::format("root vertex {} does not exist", description.root), description.root);
  }
  g.root_ = root->second;

  const std::vector<int> hops = hop_counts(g.vertices_, g.edges_, g.root_);
  for (std::size_t v = 0; v < g.vertices_.size(); ++v) {
    if (hops[v] < 0) {
      throw GraphError(fmt::format("vertex {} is disconnected from the root component", g.vertices_[v].id),
                       g.vertices_[v].id);
    }
    if (g.vertices_[v].generation < 0) g.vertices_[v].generation = hops[v];
  }
  for (auto& e : g.edges_) {
    if (e.generation < 0) e.generation = std::min(hops[e.tail], hops[e.head]);
  }
  return g;
}

int MetricGraph::max_generation() const noexcept {
  int result = 0;
  for (const auto& e : edges_) result = std::max(result, e.generation);
  return result;
}

VertexIndex MetricGraph::find_vertex(std::int64_t id) const {
  const auto it = std::find_if(vertices_.begin(), vertices_.end(), [id](const Vertex& v) { return v.id == id; });
  return it == vertices_.end() ? kNoIndex : static_cast<VertexIndex>(it - vertices_.begin());
}

EdgeIndex MetricGraph::find_edge(std::int64_t id) const {
  const auto it = std::find_if(edges_.begin(), edges_.end(), [id](const Edge& e) { return e.id == id; });
  return it == edges_.end() ? kNoIndex : static_cast<EdgeIndex>(it - edges_.begin());
}

std::int64_t MetricGraph::next_vertex_id() const noexcept {
  std::int64_t id = -1;
  for (const auto& v : vertices_) id = std::max(id, v.id);
  return id + 1;
}

std::int64_t MetricGraph::next_edge_id() const noexcept {
  std::int64_t id = -1;
  for (const auto& e : edges_) id = std::max(id, e.id);
  return id + 1;
}

GraphDescription MetricGraph::description() const {
  GraphDescription d;
  d.root = vertices_[root_].id;
  d.energy = energy_;
  d.vertices.reserve(vertices_.size());
  for (const auto& v : vertices_) d.vertices.push_back({v.id, v.generation});
  d.edges.reserve(edges_.size());
  for (const auto& e : edges_) {
    d.edges.push_back({e.id, vertices_[e.tail].id, vertices_[e.head].id, e.length, e.potential,
                       e.generation, e.kind, e.core});
  }
  return d;
}

MetricGraph build_graph(const GraphDescription& description) { return MetricGraph::build(description); }

std::vector<double> shortest_distances(const MetricGraph& graph, std::span<const double> edge_weights) {
  if (edge_weights.size() != graph.edge_count()) {
    throw std::invalid_argument("shortest_distances: one weight per edge required");
  }
  const auto& edges = graph.edges();
  std::vector<double> dist(graph.vertex_count(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, VertexIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[graph.root()] = 0.0;
  queue.emplace(0.0, graph.root());
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const EdgeIndex e : graph.vertex(u).incident) {
      const VertexIndex w = edges[e].other_end(u);
      const double candidate = d + edge_weights[e];
      if (candidate < dist[w]) {
        dist[w] = candidate;
        queue.emplace(candidate, w);
      }
    }
  }
  return dist;
}

std::vector<double> arc_distances(const MetricGraph& graph) {
  std::vector<double> lengths;
  lengths.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) lengths.push_back(e.length);
  return shortest_distances(graph, lengths);
}

MetricGraph truncate(const MetricGraph& graph, double radius) {
  if (!(radius >= graph.min_edge_length()) || !std::isfinite(radius)) {
    throw std::invalid_argument(
        fmt::format("truncate: radius {} below minimum edge length {}", radius, graph.min_edge_length()));
  }
  const std::vector<double> dist = arc_distances(graph);
  const double tol = 1e-12 * std::max(1.0, radius);

  GraphDescription out;
  out.root = graph.vertex(graph.root()).id;
  out.energy = graph.energy();
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    if (dist[v] <= radius + tol) out.vertices.push_back({graph.vertex(v).id, graph.vertex(v).generation});
  }

  std::int64_t next_vertex = graph.next_vertex_id();
  std::int64_t next_edge = graph.next_edge_id();
  for (const auto& e : graph.edges()) {
    const double reach_tail = radius - dist[e.tail];
    const double reach_head = radius - dist[e.head];
    EdgeRecord rec{e.id,          graph.vertex(e.tail).id, graph.vertex(e.head).id, e.length, e.potential,
                   e.generation, e.kind,                  e.core};
    if (reach_tail + reach_head >= e.length - tol) {
      out.edges.push_back(rec);
      continue;
    }
    bool first_piece = true;
    if (reach_tail > tol * e.length) {
      const std::int64_t terminal = next_vertex++;
      out.vertices.push_back({terminal, e.generation + 1});
      EdgeRecord piece = rec;
      piece.head = terminal;
      piece.length = reach_tail;
      out.edges.push_back(piece);
      first_piece = false;
    }
    if (reach_head > tol * e.length) {
      const std::int64_t terminal = next_vertex++;
      out.vertices.push_back({terminal, e.generation + 1});
      EdgeRecord piece = rec;
      if (!first_piece) piece.id = next_edge++;
      piece.tail = terminal;
      piece.length = reach_head;
      out.edges.push_back(piece);
    }
  }
  return MetricGraph::build(out);
}

}  // namespace agmon
