#include "agmon/families.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace agmon {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <class T>
const T& cyclic(const std::vector<T>& seq, std::size_t i) {
  return seq[i % seq.size()];
}

void require(bool condition, std::string_view message) {
  if (!condition) throw std::invalid_argument(std::string(message));
}

// Accumulates a GraphDescription with sequential ids.
class Builder {
 public:
  explicit Builder(double energy) { description_.energy = energy; }

  std::int64_t add_vertex(int generation) {
    const std::int64_t id = static_cast<std::int64_t>(description_.vertices.size());
    description_.vertices.push_back({id, generation});
    return id;
  }

  void add_edge(std::int64_t tail, std::int64_t head, double length, double potential, int generation,
                EdgeKind kind = EdgeKind::plain, bool core = false) {
    const std::int64_t id = static_cast<std::int64_t>(description_.edges.size());
    description_.edges.push_back({id, tail, head, length, potential, generation, kind, core});
  }

  MetricGraph build() {
    description_.root = 0;
    return MetricGraph::build(description_);
  }

 private:
  GraphDescription description_;
};

MetricGraph generation_uniform_graph(const FamilySpec& spec) {
  const GenerationProfile profile = generation_profile(spec);
  Builder builder(spec.energy);
  const std::int64_t root = builder.add_vertex(0);
  std::vector<std::int64_t> current{builder.add_vertex(1)};
  builder.add_edge(root, current.front(), profile.lengths[0], profile.potentials[0], 0);

  for (int g = 1; g <= spec.depth; ++g) {
    const std::size_t count = current.size();
    const auto ongoing = static_cast<std::size_t>(profile.ongoing[g]);
    const std::size_t edges = count * ongoing;
    std::vector<std::int64_t> next;
    if (g == spec.depth) {
      next.reserve(edges);
      for (std::size_t i = 0; i < edges; ++i) next.push_back(builder.add_vertex(g + 1));
    } else {
      const auto arriving = static_cast<std::size_t>(profile.arriving[g + 1]);
      if (edges % arriving != 0) {
        throw std::invalid_argument(fmt::format(
            "braided: generation {} has {} outgoing edges, not divisible by arriving number {}", g, edges,
            arriving));
      }
      const std::size_t next_count = edges / arriving;
      next.reserve(next_count);
      for (std::size_t i = 0; i < next_count; ++i) next.push_back(builder.add_vertex(g + 1));
    }
    for (std::size_t i = 0; i < edges; ++i) {
      const std::int64_t tail = current[i / ongoing];
      const std::int64_t head = next[i % next.size()];
      builder.add_edge(tail, head, profile.lengths[g], profile.potentials[g], g);
    }
    current = std::move(next);
  }
  return builder.build();
}

MetricGraph two_lengths_graph(const FamilySpec& spec, const TwoLengthsParams& p) {
  require(p.length1 > 0.0 && p.length2 > 0.0, "two_lengths_tree: lengths must be positive");
  Builder builder(spec.energy);
  const std::int64_t root = builder.add_vertex(0);
  std::vector<std::int64_t> current{builder.add_vertex(1)};
  builder.add_edge(root, current.front(), p.length1, spec.potential, 0);
  for (int g = 1; g <= spec.depth; ++g) {
    std::vector<std::int64_t> next;
    next.reserve(2 * current.size());
    for (const std::int64_t v : current) {
      for (const double length : {p.length1, p.length2}) {
        const std::int64_t child = builder.add_vertex(g + 1);
        builder.add_edge(v, child, length, spec.potential, g);
        next.push_back(child);
      }
    }
    current = std::move(next);
  }
  return builder.build();
}

MetricGraph millipede_graph(const FamilySpec& spec, const MillipedeParams& p) {
  require(p.delta > 0.0, "millipede: delta must be positive");
  require(p.leg_length > 0.0, "millipede: leg_length must be positive");
  constexpr double kSpacing = 2.0;
  const double leg_potential = spec.energy + p.delta * p.delta;
  Builder builder(spec.energy);
  std::int64_t body = builder.add_vertex(0);
  for (int j = 0; j <= spec.depth; ++j) {
    if (j > 0) {
      const std::int64_t tip = builder.add_vertex(j + 1);
      builder.add_edge(body, tip, p.leg_length, leg_potential, j, EdgeKind::leg);
    }
    const std::int64_t next = builder.add_vertex(j + 1);
    builder.add_edge(body, next, kSpacing, spec.potential, j, EdgeKind::body);
    body = next;
  }
  return builder.build();
}

MetricGraph ladder_graph(const FamilySpec& spec, const LadderParams& p) {
  require(p.rung_width > 0.0, "ladder: rung width must be positive");
  const double rung_potential = ladder_rung_potential(spec, p);
  require(rung_potential >= spec.energy, "ladder: rung potential below the energy");
  const bool rung_core = !(rung_potential > spec.energy);

  Builder builder(spec.energy);
  const std::int64_t root = builder.add_vertex(0);
  std::int64_t rail[2];
  for (auto& r : rail) {
    r = builder.add_vertex(0);
    builder.add_edge(root, r, 0.5 * p.rung_width, rung_potential, 0, EdgeKind::connector, rung_core);
  }
  for (int j = 0; j <= spec.depth; ++j) {
    std::int64_t next[2];
    for (int side = 0; side < 2; ++side) {
      next[side] = builder.add_vertex(j + 1);
      builder.add_edge(rail[side], next[side], 1.0, spec.potential, j, EdgeKind::rail);
    }
    if (j + 1 <= spec.depth) {
      builder.add_edge(next[0], next[1], p.rung_width, rung_potential, j + 1, EdgeKind::rung, rung_core);
    }
    rail[0] = next[0];
    rail[1] = next[1];
  }
  return builder.build();
}

}  // namespace

std::string_view family_name(const FamilySpec& spec) {
  return std::visit(Overloaded{
                        [](const RegularTreeParams&) { return std::string_view("regular_tree"); },
                        [](const NsTreeParams&) { return std::string_view("ns_regular_tree"); },
                        [](const TwoLengthsParams&) { return std::string_view("two_lengths_tree"); },
                        [](const MillipedeParams&) { return std::string_view("millipede"); },
                        [](const LadderParams&) { return std::string_view("ladder"); },
                        [](const BraidedParams&) { return std::string_view("braided"); },
                    },
                    spec.params);
}

std::string_view to_string(LadderMode mode) {
  return mode == LadderMode::symmetric ? "symmetric" : "antisymmetric";
}

LadderMode ladder_mode_from_string(std::string_view name) {
  if (name == "symmetric") return LadderMode::symmetric;
  if (name == "antisymmetric") return LadderMode::antisymmetric;
  throw std::invalid_argument(fmt::format("unknown ladder mode '{}'", name));
}

double ladder_rung_potential(const FamilySpec& spec, const LadderParams& params) {
  if (params.rung_potential) return *params.rung_potential;
  return params.mode == LadderMode::symmetric ? spec.energy : spec.potential;
}

GenerationProfile generation_profile(const FamilySpec& spec) {
  require(spec.depth >= 1, "depth must be at least 1");
  const auto depth = static_cast<std::size_t>(spec.depth);
  GenerationProfile profile;
  profile.ongoing.assign(depth + 1, 1);
  profile.arriving.assign(depth + 1, 1);
  profile.potentials.assign(depth + 1, spec.potential);

  if (const auto* tree = std::get_if<RegularTreeParams>(&spec.params)) {
    require(tree->branching >= 1, "regular_tree: branching must be at least 1");
    require(tree->length > 0.0, "regular_tree: length must be positive");
    profile.lengths.assign(depth + 1, tree->length);
    for (std::size_t g = 1; g <= depth; ++g) profile.ongoing[g] = tree->branching;
  } else if (const auto* ns = std::get_if<NsTreeParams>(&spec.params)) {
    require(!ns->branching.empty() && !ns->lengths.empty(), "ns_regular_tree: empty sequence");
    for (const int b : ns->branching) require(b >= 1, "ns_regular_tree: branching must be at least 1");
    for (const double l : ns->lengths) require(l > 0.0, "ns_regular_tree: lengths must be positive");
    for (std::size_t g = 0; g <= depth; ++g) {
      profile.lengths.push_back(cyclic(ns->lengths, g));
      if (!ns->potentials.empty()) profile.potentials[g] = cyclic(ns->potentials, g);
      if (g >= 1) profile.ongoing[g] = cyclic(ns->branching, g - 1);
    }
  } else if (const auto* braided = std::get_if<BraidedParams>(&spec.params)) {
    require(!braided->ongoing.empty() && !braided->arriving.empty() && !braided->positions.empty(),
            "braided: empty sequence");
    for (const int b : braided->ongoing) require(b >= 2, "braided: ongoing branching must be at least 2");
    for (const int a : braided->arriving) require(a >= 1, "braided: arriving branching must be at least 1");
    require(braided->arriving.front() == 1, "braided: the first generation has a single arriving edge");
    std::vector<double> v{0.0};
    for (const double x : braided->positions) {
      require(x > v.back(), "braided: positions must be strictly increasing and positive");
      v.push_back(x);
    }
    const double last_gap = v[v.size() - 1] - v[v.size() - 2];
    while (v.size() < depth + 2) v.push_back(v.back() + last_gap);
    for (std::size_t g = 0; g <= depth; ++g) {
      profile.lengths.push_back(v[g + 1] - v[g]);
      if (!braided->potentials.empty()) profile.potentials[g] = cyclic(braided->potentials, g);
      if (g >= 1) {
        profile.ongoing[g] = cyclic(braided->ongoing, g - 1);
        profile.arriving[g] = cyclic(braided->arriving, g - 1);
      }
    }
  } else {
    throw std::invalid_argument(fmt::format("{} is not a generation-uniform family", family_name(spec)));
  }

  profile.positions.assign(1, 0.0);
  for (std::size_t g = 0; g <= depth; ++g) profile.positions.push_back(profile.positions.back() + profile.lengths[g]);
  return profile;
}

MetricGraph generate_family(const FamilySpec& spec) {
  require(spec.depth >= 1, "depth must be at least 1");
  require(std::isfinite(spec.potential) && std::isfinite(spec.energy), "potential and energy must be finite");
  return std::visit(Overloaded{
                        [&](const TwoLengthsParams& p) { return two_lengths_graph(spec, p); },
                        [&](const MillipedeParams& p) { return millipede_graph(spec, p); },
                        [&](const LadderParams& p) { return ladder_graph(spec, p); },
                        [&](const auto&) { return generation_uniform_graph(spec); },
                    },
                    spec.params);
}

}  // namespace agmon
