#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "agmon/families.hpp"
#include "agmon/graph.hpp"

namespace agmon {

// Malformed spec document (syntax, unknown keys, wrong types).
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Either an explicit vertex/edge list or a named family.
struct GraphSpec {
  std::variant<GraphDescription, FamilySpec> content;
};

GraphSpec parse_graph_spec(const nlohmann::json& doc);
GraphSpec parse_graph_spec(std::string_view text);
GraphSpec load_graph_spec(const std::filesystem::path& path);

// Accepts both "regular_tree" and "regular-tree" spellings.
FamilySpec parse_family(std::string_view name, const nlohmann::json& params, int depth, double potential,
                        double energy);
std::string normalize_family_name(std::string_view name);

MetricGraph build_graph(const GraphSpec& spec);

nlohmann::json to_json(const MetricGraph& graph);
nlohmann::json to_json(const FamilySpec& spec);

}  // namespace agmon
