#pragma once

#include <vector>

#include "agmon/families.hpp"
#include "agmon/graph.hpp"

namespace agmon {

struct AgmonMetricTable {
  double energy = 0.0;
  std::vector<double> rho;            // per vertex
  std::vector<double> arc_distance;   // per vertex
  std::vector<double> action_weight;  // per edge
};

// sqrt((V - E)_+), the local decay rate on an edge.
double action_rate(const Edge& edge, double energy);
// sqrt((V - E)_+) * L
double edge_action_weight(const Edge& edge, double energy);

AgmonMetricTable compute_rho_a(const MetricGraph& graph);
AgmonMetricTable compute_rho_a(const MetricGraph& graph, double energy);

// Interior-point value: min over both endpoint approaches. Throws std::out_of_range off-graph.
double eval_rho_a(const MetricGraph& graph, const AgmonMetricTable& table, GraphPoint point);

// Splits every edge at its interior cut point and orients all edges away from the root.
// `table` must come from the same graph (arc distances are read from it).
MetricGraph insert_cut_points(const MetricGraph& graph, const AgmonMetricTable& table);
MetricGraph insert_cut_points(const MetricGraph& graph);

// True when every edge has arc_distance(head) > arc_distance(tail).
bool is_distance_oriented(const MetricGraph& graph);

// Edge indices from the root outward, plus the derivative fraction at each interior vertex.
struct PathSpec {
  std::vector<EdgeIndex> edges;
  std::vector<double> fractions;  // fractions[i] at the vertex between edges[i] and edges[i+1]
};

// Vertex sequence root, v1, ..., end. Throws std::invalid_argument if the path is malformed.
std::vector<VertexIndex> path_vertices(const MetricGraph& graph, const PathSpec& path);
void validate_path(const MetricGraph& graph, const PathSpec& path);

double rho_path(const MetricGraph& graph, const PathSpec& path, double energy);

// exp of f_ave is F_ave. Profile positions give v_j; potentials give V_m per generation.
double log_f_ave(double y, const GenerationProfile& profile, double energy);
double f_ave(double y, const GenerationProfile& profile, double energy);

enum class ShiftSign { plus, minus };

double shifted_energy(double energy, double delta, ShiftSign sign);

}  // namespace agmon
