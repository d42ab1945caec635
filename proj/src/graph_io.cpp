#include "agmon/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>

namespace agmon {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw SpecError(fmt::format("{}: expected an object", where));
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw SpecError(fmt::format("{}: unknown key '{}'", where, item.key()));
    }
  }
}

template <class T>
T get_required(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key)) throw SpecError(fmt::format("{}: missing key '{}'", where, key));
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SpecError(fmt::format("{}: bad value for '{}': {}", where, key, e.what()));
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
  if (!obj.contains(key)) return fallback;
  return get_required<T>(obj, key, where);
}

GraphDescription parse_description(const json& doc) {
  check_keys(doc, {"vertices", "edges", "root", "energy"}, "graph spec");
  GraphDescription d;
  d.root = get_required<std::int64_t>(doc, "root", "graph spec");
  d.energy = get_required<double>(doc, "energy", "graph spec");
  const json& vertices = doc.contains("vertices") ? doc.at("vertices") : json();
  if (!vertices.is_array()) throw SpecError("graph spec: 'vertices' must be an array");
  for (const auto& v : vertices) {
    check_keys(v, {"id", "generation"}, "vertex");
    d.vertices.push_back({get_required<std::int64_t>(v, "id", "vertex"), get_or<int>(v, "generation", -1, "vertex")});
  }
  const json& edges = doc.contains("edges") ? doc.at("edges") : json::array();
  if (!edges.is_array()) throw SpecError("graph spec: 'edges' must be an array");
  for (const auto& e : edges) {
    check_keys(e, {"id", "tail", "head", "length", "potential", "generation", "kind", "core"}, "edge");
    EdgeRecord rec;
    rec.id = get_required<std::int64_t>(e, "id", "edge");
    rec.tail = get_required<std::int64_t>(e, "tail", "edge");
    rec.head = get_required<std::int64_t>(e, "head", "edge");
    rec.length = get_required<double>(e, "length", "edge");
    rec.potential = get_required<double>(e, "potential", "edge");
    rec.generation = get_or<int>(e, "generation", -1, "edge");
    rec.core = get_or<bool>(e, "core", false, "edge");
    if (e.contains("kind")) {
      try {
        rec.kind = edge_kind_from_string(get_required<std::string>(e, "kind", "edge"));
      } catch (const std::invalid_argument& ex) {
        throw SpecError(ex.what());
      }
    }
    d.edges.push_back(rec);
  }
  return d;
}

}  // namespace

std::string normalize_family_name(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '-', '_');
  if (out == "ns_tree") out = "ns_regular_tree";
  if (out == "two_lengths") out = "two_lengths_tree";
  return out;
}

FamilySpec parse_family(std::string_view name, const json& params, int depth, double potential, double energy) {
  const std::string family = normalize_family_name(name);
  const std::string where = "params of " + family;
  FamilySpec spec;
  spec.depth = depth;
  spec.potential = potential;
  spec.energy = energy;
  const json p = params.is_null() ? json::object() : params;
  if (family == "regular_tree") {
    check_keys(p, {"b", "L"}, where);
    spec.params = RegularTreeParams{get_or<int>(p, "b", 2, where), get_or<double>(p, "L", 1.0, where)};
  } else if (family == "ns_regular_tree") {
    check_keys(p, {"b", "L", "V"}, where);
    spec.params = NsTreeParams{get_required<std::vector<int>>(p, "b", where),
                               get_required<std::vector<double>>(p, "L", where),
                               get_or<std::vector<double>>(p, "V", {}, where)};
  } else if (family == "two_lengths_tree") {
    check_keys(p, {"L1", "L2"}, where);
    spec.params = TwoLengthsParams{get_or<double>(p, "L1", 1.0, where), get_or<double>(p, "L2", 2.0, where)};
  } else if (family == "millipede") {
    check_keys(p, {"delta", "leg_length"}, where);
    spec.params = MillipedeParams{get_or<double>(p, "delta", 0.1, where), get_or<double>(p, "leg_length", 8.0, where)};
  } else if (family == "ladder") {
    check_keys(p, {"w", "mode", "rung_potential"}, where);
    LadderParams lp;
    lp.rung_width = get_or<double>(p, "w", 1.0, where);
    try {
      lp.mode = ladder_mode_from_string(get_or<std::string>(p, "mode", "antisymmetric", where));
    } catch (const std::invalid_argument& e) {
      throw SpecError(e.what());
    }
    if (p.contains("rung_potential")) lp.rung_potential = get_required<double>(p, "rung_potential", where);
    spec.params = lp;
  } else if (family == "braided") {
    check_keys(p, {"b", "a", "v", "V"}, where);
    spec.params = BraidedParams{get_required<std::vector<int>>(p, "b", where),
                                get_required<std::vector<int>>(p, "a", where),
                                get_required<std::vector<double>>(p, "v", where),
                                get_or<std::vector<double>>(p, "V", {}, where)};
  } else {
    throw SpecError(fmt::format("unknown family '{}'", name));
  }
  return spec;
}

GraphSpec parse_graph_spec(const json& doc) {
  if (!doc.is_object()) throw SpecError("graph spec must be a JSON object");
  if (!doc.contains("family")) return GraphSpec{parse_description(doc)};
  check_keys(doc, {"family", "params", "depth", "potential", "energy"}, "family spec");
  const auto name = get_required<std::string>(doc, "family", "family spec");
  const json params = doc.contains("params") ? doc.at("params") : json::object();
  return GraphSpec{parse_family(name, params, get_required<int>(doc, "depth", "family spec"),
                                get_or<double>(doc, "potential", 0.0, "family spec"),
                                get_or<double>(doc, "energy", -1.0, "family spec"))};
}

GraphSpec parse_graph_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(fmt::format("invalid JSON: {}", e.what()));
  }
  return parse_graph_spec(doc);
}

GraphSpec load_graph_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_graph_spec(std::string_view(buffer.str()));
}

MetricGraph build_graph(const GraphSpec& spec) {
  if (const auto* d = std::get_if<GraphDescription>(&spec.content)) return MetricGraph::build(*d);
  return generate_family(std::get<FamilySpec>(spec.content));
}

json to_json(const MetricGraph& graph) {
  json vertices = json::array();
  for (const auto& v : graph.vertices()) vertices.push_back({{"id", v.id}, {"generation", v.generation}});
  json edges = json::array();
  for (const auto& e : graph.edges()) {
    json rec = {{"id", e.id},
                {"tail", graph.vertex(e.tail).id},
                {"head", graph.vertex(e.head).id},
                {"length", e.length},
                {"potential", e.potential},
                {"generation", e.generation},
                {"kind", std::string(to_string(e.kind))}};
    if (e.core) rec["core"] = true;
    edges.push_back(std::move(rec));
  }
  return {{"root", graph.vertex(graph.root()).id},
          {"energy", graph.energy()},
          {"vertices", std::move(vertices)},
          {"edges", std::move(edges)}};
}

json to_json(const FamilySpec& spec) {
  json params = std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RegularTreeParams>) {
          return {{"b", p.branching}, {"L", p.length}};
        } else if constexpr (std::is_same_v<T, NsTreeParams>) {
          json j = {{"b", p.branching}, {"L", p.lengths}};
          if (!p.potentials.empty()) j["V"] = p.potentials;
          return j;
        } else if constexpr (std::is_same_v<T, TwoLengthsParams>) {
          return {{"L1", p.length1}, {"L2", p.length2}};
        } else if constexpr (std::is_same_v<T, MillipedeParams>) {
          return {{"delta", p.delta}, {"leg_length", p.leg_length}};
        } else if constexpr (std::is_same_v<T, LadderParams>) {
          json j = {{"w", p.rung_width}, {"mode", std::string(to_string(p.mode))}};
          if (p.rung_potential) j["rung_potential"] = *p.rung_potential;
          return j;
        } else {
          json j = {{"b", p.ongoing}, {"a", p.arriving}, {"v", p.positions}};
          if (!p.potentials.empty()) j["V"] = p.potentials;
          return j;
        }
      },
      spec.params);
  return {{"family", std::string(family_name(spec))},
          {"params", std::move(params)},
          {"depth", spec.depth},
          {"potential", spec.potential},
          {"energy", spec.energy}};
}

}  // namespace agmon
