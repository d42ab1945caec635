#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agmon {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

// Role of an edge inside a generated family. Plain for user graphs and trees.
enum class EdgeKind { plain, body, leg, rail, rung, connector };

std::string_view to_string(EdgeKind kind);
EdgeKind edge_kind_from_string(std::string_view name);

// Validation failure that names the offending vertex or edge id.
class GraphError : public std::runtime_error {
 public:
  GraphError(const std::string& what, std::int64_t offending_id)
      : std::runtime_error(what), offending_id_(offending_id) {}

  std::int64_t offending_id() const noexcept { return offending_id_; }

 private:
  std::int64_t offending_id_;
};

struct VertexRecord {
  std::int64_t id = 0;
  int generation = -1;  // -1: assign hop count from the root
};

struct EdgeRecord {
  std::int64_t id = 0;
  std::int64_t tail = 0;
  std::int64_t head = 0;
  double length = 0.0;
  double potential = 0.0;
  int generation = -1;
  EdgeKind kind = EdgeKind::plain;
  bool core = false;  // inside the compact core: V > E is not required
};

// Explicit, unvalidated graph description (the non-family form of a graph spec).
struct GraphDescription {
  std::vector<VertexRecord> vertices;
  std::vector<EdgeRecord> edges;
  std::int64_t root = 0;
  double energy = 0.0;
};

struct Vertex {
  std::int64_t id = 0;
  int generation = 0;
  std::vector<EdgeIndex> incident;
};

struct Edge {
  std::int64_t id = 0;
  VertexIndex tail = 0;
  VertexIndex head = 0;
  double length = 0.0;
  double potential = 0.0;
  int generation = 0;
  EdgeKind kind = EdgeKind::plain;
  bool core = false;

  VertexIndex other_end(VertexIndex v) const noexcept { return v == tail ? head : tail; }
};

// A point on the graph: arc-length offset measured from the edge's tail.
struct GraphPoint {
  EdgeIndex edge = 0;
  double offset = 0.0;
};

// Rooted metric graph with constant potential per edge and a fixed energy.
// Immutable once built; every instance satisfies the validation invariants.
class MetricGraph {
 public:
  static MetricGraph build(const GraphDescription& description);

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Vertex& vertex(VertexIndex v) const { return vertices_.at(v); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  VertexIndex root() const noexcept { return root_; }
  double energy() const noexcept { return energy_; }
  double min_edge_length() const noexcept { return min_edge_length_; }
  int max_generation() const noexcept;

  std::size_t degree(VertexIndex v) const { return vertices_.at(v).incident.size(); }
  bool is_leaf(VertexIndex v) const { return degree(v) == 1; }

  // kNoIndex when absent.
  VertexIndex find_vertex(std::int64_t id) const;
  EdgeIndex find_edge(std::int64_t id) const;

  std::int64_t next_vertex_id() const noexcept;
  std::int64_t next_edge_id() const noexcept;

  GraphDescription description() const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  VertexIndex root_ = 0;
  double energy_ = 0.0;
  double min_edge_length_ = 0.0;
};

MetricGraph build_graph(const GraphDescription& description);

// Single-source shortest distances from the root; weights are per edge, >= 0.
std::vector<double> shortest_distances(const MetricGraph& graph, std::span<const double> edge_weights);

// Arc-length distances from the root.
std::vector<double> arc_distances(const MetricGraph& graph);

// Sub-graph of points within arc distance `radius` of the root. Edges cut
// mid-span end in a new degree-1 vertex; an edge reachable from both ends can
// leave two pieces.
MetricGraph truncate(const MetricGraph& graph, double radius);

}  // namespace agmon
