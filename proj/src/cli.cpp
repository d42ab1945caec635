#include "agmon/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "agmon/action_metric.hpp"
#include "agmon/eigenfunction.hpp"
#include "agmon/graph_io.hpp"
#include "agmon/report_io.hpp"
#include "agmon/transfer.hpp"

namespace agmon::cli {

using nlohmann::json;

namespace {

// Bad flag values; mapped to the usage exit code.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double to_double(const std::string& text, std::string_view flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(fmt::format("{}: '{}' is not a number", flag, text));
  return v;
}

double single(const std::string& text, std::string_view flag) {
  if (text.find(':') != std::string::npos) throw UsageError(fmt::format("{}: expected one value, got a grid", flag));
  return to_double(text, flag);
}

int single_int(const std::string& text, std::string_view flag) {
  const double v = single(text, flag);
  if (v != std::floor(v)) throw UsageError(fmt::format("{}: '{}' is not an integer", flag, text));
  return static_cast<int>(v);
}

std::vector<int> int_list(const std::string& text, std::string_view flag) {
  std::vector<int> out;
  for (const double v : parse_list(text)) {
    if (v != std::floor(v)) throw UsageError(fmt::format("{}: '{}' has a non-integer entry", flag, text));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) {
    writer(fallback);
    return;
  }
  const auto target = resolve_output(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::ofstream file(target);
  if (!file) throw std::runtime_error(fmt::format("cannot write '{}'", target.string()));
  writer(file);
}

double family_rate(const RunConfig& c) {
  const double excess = single(c.V, "--V") - single(c.E, "--E");
  if (!(excess > 0.0)) throw UsageError("--V must exceed --E");
  return std::sqrt(excess);
}

MetricGraph graph_from_config(const RunConfig& c) {
  if (!c.spec_path.empty()) return build_graph(load_graph_spec(c.spec_path));
  return generate_family(family_from_config(c));
}

// Starts of the non-connector path edges: the vertex samples along the chosen path.
std::vector<GraphPoint> decay_samples(const Eigenfunction& f) {
  const PathSpec path = first_path(f);
  std::vector<GraphPoint> out;
  for (const EdgeIndex e : path.edges) {
    if (f.graph().edge(e).kind != EdgeKind::connector) out.push_back({e, 0.0});
  }
  return out;
}

// CSV table with a fixed header; booleans are tracked for the exit code.
class SweepTable {
 public:
  explicit SweepTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  void check(bool ok) { all_ok_ = all_ok_ && ok; }
  bool all_ok() const noexcept { return all_ok_; }

  void write(std::ostream& out) const {
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  bool all_ok_ = true;
};

SweepTable sweep_ladder(const RunConfig& c) {
  SweepTable table({"w", "gamma", "det_T", "trace_T", "lambda_small", "fitted_rate", "det_is_one",
                    "lambda_below_exp_minus_1"});
  for (const double w : parse_grid(c.w)) {
    const TransferMatrix t = ladder_antisym_transfer(w);
    const EigenPair2 eig = eig2(t);
    RunConfig local = c;
    local.family = "ladder";
    local.w = format_double(w);
    local.mode = "antisymmetric";
    local.depth = std::to_string(std::max(16, single_int(c.depth, "--depth")));
    const Eigenfunction f = construct(family_from_config(local));
    const double rate = fit_decay_rate(f, decay_samples(f));
    const bool det_ok = std::abs(t.entry_det() - 1.0) <= 1e-12;
    const bool below = eig.small < std::exp(-1.0);
    table.check(det_ok && below);
    table.add({format_double(w), format_double(std::sinh(1.0) / std::tanh(0.5 * w)), format_double(t.entry_det()),
               format_double(t.trace()), format_double(eig.small), format_double(rate), fmt_bool(det_ok),
               fmt_bool(below)});
  }
  return table;
}

SweepTable sweep_millipede(const RunConfig& c) {
  SweepTable table(
      {"delta", "det_T", "lambda_small", "expansion_residual", "fitted_rate", "det_is_one", "contracting"});
  for (const double delta : parse_grid(c.delta)) {
    const TransferMatrix t = millipede_transfer(delta);
    const EigenPair2 eig = eig2(t);
    RunConfig local = c;
    local.family = "millipede";
    local.delta = format_double(delta);
    local.depth = std::to_string(std::max(16, single_int(c.depth, "--depth")));
    const Eigenfunction f = construct(family_from_config(local));
    const double rate = fit_decay_rate(f, decay_samples(f));
    const bool det_ok = std::abs(t.entry_det() - 1.0) <= 1e-12;
    const bool contracting = eig.small < 1.0;
    table.check(det_ok && contracting);
    table.add({format_double(delta), format_double(t.entry_det()), format_double(eig.small),
               format_double(std::abs(std::log(eig.small) + 2.0 + 0.5 * delta)), format_double(rate),
               fmt_bool(det_ok), fmt_bool(contracting)});
  }
  return table;
}

SweepTable sweep_tree(const RunConfig& c) {
  SweepTable table({"b", "kL", "lambda_small", "lambda_closed_form", "bound", "below_bound", "l2_ratio",
                    "l2_ratio_below_one", "fitted_rate"});
  const double k = family_rate(c);
  for (const double bv : parse_grid(c.b)) {
    const int b = static_cast<int>(std::lround(bv));
    for (const double kl : parse_grid(c.kL)) {
      const EigenPair2 eig = eig2(vertex_edge_transfer(kl, 1.0 / b));
      const double ch = std::cosh(kl);
      const double half = 0.5 * (1.0 + 1.0 / b) * ch;
      const double closed = half - std::sqrt(half * half - 1.0 / b);
      const double bound = 1.0 / (b * ch);
      FamilySpec spec;
      spec.params = RegularTreeParams{b, kl / k};
      spec.depth = std::max(10, single_int(c.depth, "--depth"));
      spec.potential = single(c.V, "--V");
      spec.energy = single(c.E, "--E");
      const auto gens = generation_solutions(spec);
      std::vector<double> xs, ys;
      for (std::size_t g = 0; g < gens.size(); ++g) {
        xs.push_back(g * kl / k);
        ys.push_back(std::log(std::abs(gens[g].a)));
      }
      const double rate = fit_log_slope(xs, ys);
      const double ratio = b * eig.small * eig.small;
      table.check(eig.small < bound && ratio < 1.0);
      table.add({std::to_string(b), format_double(kl), format_double(eig.small), format_double(closed),
                 format_double(bound), fmt_bool(eig.small < bound), format_double(ratio), fmt_bool(ratio < 1.0),
                 format_double(rate)});
    }
  }
  return table;
}

SweepTable sweep_two_lengths(const RunConfig& c) {
  SweepTable table({"kL1", "kL2", "p1_shared", "equation_residual", "p1_vertex", "lambda", "mu", "residual_ok",
                    "p1_in_range"});
  for (const double k1 : parse_grid(c.kL1)) {
    for (const double k2 : parse_grid(c.kL2)) {
      const SharedEigenvector shared = match_shared_eigenvector(k1, k2);
      const SharedEigenvector vertex = match_vertex_eigenvector(k1, k2);
      const double residual = std::abs(shared_eigenvector_mismatch(k1, k2, shared.p1));
      const bool ok = residual <= 1e-10;
      const bool in_range = shared.p1 > 0.0 && shared.p1 < 1.0;
      table.check(ok && in_range);
      table.add({format_double(k1), format_double(k2), format_double(shared.p1), format_double(residual),
                 format_double(vertex.p1), format_double(vertex.lambda), format_double(vertex.mu), fmt_bool(ok),
                 fmt_bool(in_range)});
    }
  }
  return table;
}

int do_generate(const RunConfig& c, std::ostream& out) {
  const MetricGraph g = graph_from_config(c);
  emit(c.out, out, [&](std::ostream& os) { os << to_json(g).dump(2) << '\n'; });
  return kExitOk;
}

int do_metric(const RunConfig& c, std::ostream& out) {
  MetricGraph g = graph_from_config(c);
  if (c.cut_points) g = insert_cut_points(g);
  const AgmonMetricTable table =
      compute_rho_a(g, shifted_energy(g.energy(), c.shift_delta, shift_sign_from_string(c.shift_sign)));
  emit(c.out, out, [&](std::ostream& os) { write_metric_csv(os, g, table); });
  return kExitOk;
}

int do_solve(const RunConfig& c, std::ostream& out) {
  const Eigenfunction f = construct(family_from_config(c));
  emit(c.out, out, [&](std::ostream& os) { write_psi_csv(os, f, c.samples); });
  return kExitOk;
}

int do_verify(const RunConfig& c, std::ostream& out) {
  const FamilySpec spec = family_from_config(c);
  const Eigenfunction f = construct(spec);
  if (!(c.epsilon < 1.0)) throw UsageError("--epsilon must be below 1");
  MultiplierSpec m;
  m.kind = multiplier_kind_from_string(c.multiplier);
  m.action_scale = 1.0 - c.epsilon;
  m.delta = c.shift_delta;
  m.sign = shift_sign_from_string(c.shift_sign);
  m.vertex_extra = c.vertex_extra;
  std::optional<PathSpec> path;
  if (m.kind == MultiplierKind::rho_path) path = first_path(f);
  const std::vector<int> depths = c.depths.empty() ? std::vector<int>{} : int_list(c.depths, "--depths");

  const double margin = constraint_margin(f, m, 16, path);
  const DecayReport report = decay_report(f, m, depths, path);

  // identity on the first generation-1 exterior edge (the path's when there is one)
  MultiplierSpec im = m;
  if (im.kind == MultiplierKind::f_ave) im.kind = MultiplierKind::rho_a;
  const Multiplier identity_multiplier(f, im, path);
  EdgeIndex probe = kNoIndex;
  const std::vector<EdgeIndex> candidates = path ? path->edges : [&] {
    std::vector<EdgeIndex> all;
    for (EdgeIndex e = 0; e < f.graph().edge_count(); ++e) all.push_back(e);
    return all;
  }();
  for (const EdgeIndex e : candidates) {
    if (f.graph().edge(e).core) continue;
    if (probe == kNoIndex || (f.graph().edge(e).generation == 1 && f.graph().edge(probe).generation != 1)) probe = e;
  }
  json identity = {{"checked", false}};
  bool identity_pass = true;
  if (probe != kNoIndex) {
    const double L = f.graph().edge(probe).length;
    const double h1 = L / 100.0;
    const double r1 = identity_check_on_edge(f, identity_multiplier, probe, 0.25 * L, 0.75 * L, h1);
    const double r2 = identity_check_on_edge(f, identity_multiplier, probe, 0.25 * L, 0.75 * L, 0.5 * h1);
    const double order = std::log2(r1 / r2);
    const GraphPoint mid{probe, 0.5 * L};
    const double ref = std::pow(f.derivative(mid), 2) + std::pow(identity_multiplier.log_slope(mid) * f.value(mid), 2);
    identity_pass = (order >= 1.8 && order <= 2.2) || r1 <= 1e-10 * ref;
    identity = {{"checked", true},   {"edge_id", f.graph().edge(probe).id}, {"h", h1}, {"residual", r1},
                {"residual_half_h", r2}, {"order", order}, {"pass", identity_pass}};
  }

  double radius = 0.0;
  for (const VertexIndex v : f.core()) radius = std::max(radius, f.arc_distance()[v]);
  if (c.exclusion_radius) radius = *c.exclusion_radius;
  const MonotonicityResult mono = monotonicity_check(f, radius);

  const bool constraint_pass = margin > 0.0;
  const bool pass = constraint_pass && report.pass && identity_pass && mono.monotone;
  json doc = {{"status", pass ? "PASS" : "FAIL"},
              {"family", to_json(spec)},
              {"constraint", {{"margin", margin}, {"pass", constraint_pass}, {"effective_energy", report.effective_energy}}},
              {"decay", to_json(report)},
              {"identity", identity},
              {"monotonicity",
               {{"pass", mono.monotone},
                {"exclusion_radius", radius},
                {"edges_checked", mono.edges_checked},
                {"midpoint_zeros", mono.midpoint_zeros},
                {"message", mono.message}}}};
  emit(c.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  if (!c.csv.empty()) emit(c.csv, out, [&](std::ostream& os) { write_report_csv(os, report); });
  return pass ? kExitOk : kExitFail;
}

int do_sweep(const RunConfig& c, std::ostream& out) {
  const std::string family = normalize_family_name(c.family);
  SweepTable table({});
  if (family == "ladder") {
    table = sweep_ladder(c);
  } else if (family == "millipede") {
    table = sweep_millipede(c);
  } else if (family == "regular_tree") {
    table = sweep_tree(c);
  } else if (family == "two_lengths_tree") {
    table = sweep_two_lengths(c);
  } else {
    throw UsageError(fmt::format("sweep supports ladder, millipede, regular-tree and two-lengths, not '{}'", c.family));
  }
  emit(c.out, out, [&](std::ostream& os) { table.write(os); });
  return table.all_ok() ? kExitOk : kExitFail;
}

void add_family_options(CLI::App* app, RunConfig& c) {
  app->add_option("--spec", c.spec_path, "JSON graph or family spec");
  app->add_option("--family", c.family, "regular-tree|ns-tree|two-lengths|millipede|ladder|braided");
  app->add_option("--b", c.b, "branching number (regular tree)");
  app->add_option("--L", c.L, "edge length (regular tree); overrides --kL");
  app->add_option("--kL", c.kL, "k times edge length (regular tree)");
  app->add_option("--depth", c.depth, "truncation depth");
  app->add_option("--V", c.V, "base potential");
  app->add_option("--E", c.E, "energy");
  app->add_option("--b-seq", c.b_seq, "branching sequence, comma separated");
  app->add_option("--L-seq", c.L_seq, "length sequence (ns-tree)");
  app->add_option("--a-seq", c.a_seq, "arriving branching sequence (braided)");
  app->add_option("--V-seq", c.V_seq, "per-generation potentials");
  app->add_option("--positions", c.positions, "vertex positions v_1, v_2, ... (braided)");
  app->add_option("--kL1", c.kL1, "k L1 (two-lengths)");
  app->add_option("--kL2", c.kL2, "k L2 (two-lengths)");
  app->add_option("--delta", c.delta, "leg decay rate (millipede)");
  app->add_option("--leg-length", c.leg_length, "leg truncation length (millipede)");
  app->add_option("--w", c.w, "rung width (ladder)");
  app->add_option("--mode", c.mode, "symmetric|antisymmetric (ladder)");
  app->add_option("--rung-potential", c.rung_potential, "rung potential (ladder)");
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(to_double(item, "list"));
  }
  if (out.empty()) throw UsageError(fmt::format("empty list '{}'", text));
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() == 1) return {to_double(parts[0], "grid")};
  if (parts.size() != 3) throw UsageError(fmt::format("grid '{}' is not start:stop:step", text));
  const double start = to_double(parts[0], "grid start");
  const double stop = to_double(parts[1], "grid stop");
  const double step = to_double(parts[2], "grid step");
  if (!(step > 0.0) || stop < start) throw UsageError(fmt::format("grid '{}' needs step > 0 and stop >= start", text));
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double x = start + i * step;
    if (x > stop + 0.5 * step) break;
    out.push_back(x);
  }
  return out;
}

FamilySpec family_from_config(const RunConfig& c) {
  if (!c.spec_path.empty()) {
    const GraphSpec spec = load_graph_spec(c.spec_path);
    if (const auto* f = std::get_if<FamilySpec>(&spec.content)) return *f;
    throw UsageError("this subcommand needs a family spec, not an explicit graph");
  }
  FamilySpec spec;
  spec.depth = single_int(c.depth, "--depth");
  spec.potential = single(c.V, "--V");
  spec.energy = single(c.E, "--E");
  const std::string family = normalize_family_name(c.family);
  if (family == "regular_tree") {
    const double L = c.L.empty() ? single(c.kL, "--kL") / family_rate(c) : single(c.L, "--L");
    spec.params = RegularTreeParams{single_int(c.b, "--b"), L};
  } else if (family == "ns_regular_tree") {
    if (c.b_seq.empty() || c.L_seq.empty()) throw UsageError("ns-tree needs --b-seq and --L-seq");
    spec.params = NsTreeParams{int_list(c.b_seq, "--b-seq"), parse_list(c.L_seq),
                               c.V_seq.empty() ? std::vector<double>{} : parse_list(c.V_seq)};
  } else if (family == "two_lengths_tree") {
    const double k = family_rate(c);
    spec.params = TwoLengthsParams{single(c.kL1, "--kL1") / k, single(c.kL2, "--kL2") / k};
  } else if (family == "millipede") {
    spec.params = MillipedeParams{single(c.delta, "--delta"), single(c.leg_length, "--leg-length")};
  } else if (family == "ladder") {
    LadderParams p;
    p.rung_width = single(c.w, "--w");
    p.mode = ladder_mode_from_string(c.mode);
    if (!c.rung_potential.empty()) p.rung_potential = single(c.rung_potential, "--rung-potential");
    spec.params = p;
  } else if (family == "braided") {
    if (c.b_seq.empty() || c.a_seq.empty() || c.positions.empty()) {
      throw UsageError("braided needs --b-seq, --a-seq and --positions");
    }
    spec.params = BraidedParams{int_list(c.b_seq, "--b-seq"), int_list(c.a_seq, "--a-seq"), parse_list(c.positions),
                                c.V_seq.empty() ? std::vector<double>{} : parse_list(c.V_seq)};
  } else {
    throw UsageError(fmt::format("unknown family '{}'", c.family));
  }
  return spec;
}

std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* base = std::getenv("AGMON_OUTPUT_DIR"); base != nullptr && *base != '\0') {
      return std::filesystem::path(base) / p;
    }
  }
  return p;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Agmon decay toolkit for quantum graphs", "agmon"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "build and validate a graph, print canonical JSON");
  add_family_options(generate, c);
  generate->add_option("--out", c.out, "output file (default stdout)");

  auto* metric = app.add_subcommand("metric", "classical action metric table as CSV");
  add_family_options(metric, c);
  metric->add_flag("--cut-points", c.cut_points, "insert cut points first");
  metric->add_option("--shift-delta", c.shift_delta, "energy shift");
  metric->add_option("--shift-sign", c.shift_sign, "plus|minus");
  metric->add_option("--out", c.out, "output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "construct a family eigenfunction, print sampled psi as CSV");
  add_family_options(solve, c);
  solve->add_option("--samples", c.samples, "samples per edge (ends included)")->check(CLI::Range(2, 100000));
  solve->add_option("--out", c.out, "output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "decay, constraint, identity and monotonicity checks");
  add_family_options(verify, c);
  verify->add_option("--multiplier", c.multiplier, "none|rho-a|path|f-ave");
  verify->add_option("--epsilon", c.epsilon, "action scale is 1 - epsilon");
  verify->add_option("--shift-delta", c.shift_delta, "energy shift delta >= 0");
  verify->add_option("--shift-sign", c.shift_sign, "plus|minus");
  verify->add_option("--vertex-extra", c.vertex_extra, "extra log factor per passed vertex");
  verify->add_option("--depths", c.depths, "depth schedule, comma separated");
  verify->add_option("--exclusion-radius", c.exclusion_radius, "monotonicity is not checked inside this radius");
  verify->add_option("--out", c.out, "JSON report file (default stdout)");
  verify->add_option("--csv", c.csv, "flat CSV report file");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep, one CSV row per point");
  add_family_options(sweep, c);
  sweep->add_option("--out", c.out, "output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return do_generate(c, out);
    if (metric->parsed()) return do_metric(c, out);
    if (solve->parsed()) return do_solve(c, out);
    if (verify->parsed()) return do_verify(c, out);
    if (sweep->parsed()) return do_sweep(c, out);
  } catch (const GraphError& e) {
    err << "error: " << e.what() << " (offending id " << e.offending_id() << ")\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace agmon::cli
