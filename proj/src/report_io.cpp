#include "agmon/report_io.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace agmon {

using nlohmann::json;

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

void write_metric_csv(std::ostream& out, const MetricGraph& graph, const AgmonMetricTable& table) {
  out << "vertex_id,arc_distance,rho_a\n";
  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
    out << graph.vertex(v).id << ',' << format_double(table.arc_distance[v]) << ',' << format_double(table.rho[v])
        << '\n';
  }
}

void write_psi_csv(std::ostream& out, const Eigenfunction& f, int samples) {
  if (samples < 2) throw std::invalid_argument("need at least 2 samples per edge");
  out << "edge_id,generation,x_local,arc_distance,psi,dpsi\n";
  const MetricGraph& g = f.graph();
  for (EdgeIndex ei = 0; ei < g.edge_count(); ++ei) {
    const Edge& e = g.edge(ei);
    const EdgeSolution& sol = f.solution(ei);
    const double d0 = f.arc_distance()[e.tail];
    for (int i = 0; i < samples; ++i) {
      const double x = e.length * i / (samples - 1);
      out << e.id << ',' << e.generation << ',' << format_double(x) << ',' << format_double(d0 + x) << ','
          << format_double(sol.value(x)) << ',' << format_double(sol.derivative(x)) << '\n';
    }
  }
}

json to_json(const MultiplierSpec& spec) {
  return {{"kind", std::string(to_string(spec.kind))},
          {"action_scale", spec.action_scale},
          {"delta", spec.delta},
          {"shift_sign", std::string(to_string(spec.sign))},
          {"vertex_extra", spec.vertex_extra}};
}

json to_json(const DecayReport& report) {
  json gens = json::array();
  for (const auto& g : report.generations) {
    gens.push_back({{"generation", g.generation},
                    {"sup_F_psi", g.sup_f_psi},
                    {"L2_increment", g.l2_increment},
                    {"plain_L2_increment", g.plain_l2_increment}});
  }
  json depths = json::array();
  for (const auto& d : report.depths) {
    depths.push_back({{"depth", d.depth},
                      {"sup_F_psi", d.sup_f_psi},
                      {"cum_L2", d.cum_l2},
                      {"plain_cum_L2", d.plain_cum_l2},
                      {"plateau_pass", d.plateau_pass}});
  }
  return {{"status", report.pass ? "PASS" : "FAIL"},
          {"plateau_pass", report.plateau_pass},
          {"cauchy_pass", report.cauchy_pass},
          {"family", report.family},
          {"multiplier", to_json(report.multiplier)},
          {"effective_energy", report.effective_energy},
          {"on_path", report.on_path},
          {"tail_ratio", report.tail_ratio},
          {"log_psi_vs_rho_a_slope", report.log_psi_rho_slope},
          {"generations", std::move(gens)},
          {"depths", std::move(depths)}};
}

void write_report_csv(std::ostream& out, const DecayReport& report) {
  out << "generation,sup_F_psi,cum_L2,depth\n";
  for (const auto& d : report.depths) {
    double cum = 0.0;
    for (int g = 0; g <= d.depth; ++g) {
      const auto& row = report.generations.at(static_cast<std::size_t>(g));
      cum += row.l2_increment;
      out << g << ',' << format_double(row.sup_f_psi) << ',' << format_double(cum) << ',' << d.depth << '\n';
    }
  }
}

}  // namespace agmon
