#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "agmon/action_metric.hpp"
#include "agmon/eigenfunction.hpp"
#include "agmon/verify.hpp"

namespace agmon {

// 17 significant digits, locale independent.
std::string format_double(double x);

// vertex_id,arc_distance,rho_a
void write_metric_csv(std::ostream& out, const MetricGraph& graph, const AgmonMetricTable& table);

// edge_id,generation,x_local,arc_distance,psi,dpsi with `samples` evenly spaced points per edge (ends included).
void write_psi_csv(std::ostream& out, const Eigenfunction& f, int samples);

nlohmann::json to_json(const MultiplierSpec& spec);
nlohmann::json to_json(const DecayReport& report);

// generation,sup_F_psi,cum_L2,depth: one block of rows per scheduled depth.
void write_report_csv(std::ostream& out, const DecayReport& report);

}  // namespace agmon
