// One PASS/FAIL line per acceptance criterion, with wall time against its budget.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "agmon/action_metric.hpp"
#include "agmon/eigenfunction.hpp"
#include "agmon/transfer.hpp"
#include "agmon/verify.hpp"
#include "support.hpp"

using namespace agmon;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

double closed_lambda(int b, double kl) {
  const double half = 0.5 * (1.0 + 1.0 / b) * std::cosh(kl);
  return (1.0 / b) / (half + std::sqrt(half * half - 1.0 / b));
}

std::vector<double> tenths(int from, int to) {
  std::vector<double> out;
  for (int i = from; i <= to; ++i) out.push_back(i / 10.0);
  return out;
}

Outcome ac1() {
  double worst_rel = 0.0, worst_margin = 1.0;
  bool below = true;
  for (int b = 2; b <= 10; ++b) {
    for (double kl : tenths(1, 30)) {
      const double got = eig2(vertex_edge_transfer(kl, 1.0 / b)).small;
      const double want = closed_lambda(b, kl);
      worst_rel = std::max(worst_rel, std::abs(got - want) / want);
      const double bound = 1.0 / (b * std::cosh(kl));
      below = below && got < bound;
      worst_margin = std::min(worst_margin, (bound - got) / bound);
    }
  }
  return {worst_rel <= 1e-12 && below,
          fmt::format("max rel diff {:.2e}, min relative gap to 1/(b cosh kL) {:.3e}", worst_rel, worst_margin)};
}

Outcome ac2() {
  double worst_ratio = 0.0;
  for (int b = 2; b <= 10; ++b)
    for (double kl : tenths(1, 30)) {
      const double lam = eig2(vertex_edge_transfer(kl, 1.0 / b)).small;
      worst_ratio = std::max(worst_ratio, b * lam * lam);
    }
  bool ok = worst_ratio < 1.0;
  double worst_fit = 0.0;
  MultiplierSpec none;
  none.kind = MultiplierKind::none;
  for (int b : {2, 3}) {
    for (double kl : {0.5, 1.0, 2.0}) {
      const Eigenfunction f = construct(test::tree_spec(b, kl, 12));
      const DecayReport r = decay_report(f, none, {6, 8, 10, 12});
      const double lam = closed_lambda(b, kl);
      const double want = b * lam * lam;
      const double rel = std::abs(r.tail_ratio - want) / want;
      worst_fit = std::max(worst_fit, rel);
      bool increasing = true;
      for (std::size_t i = 1; i < r.depths.size(); ++i)
        increasing = increasing && r.depths[i].plain_cum_l2 >= r.depths[i - 1].plain_cum_l2;
      ok = ok && r.tail_ratio < 1.0 && rel <= 0.05 && increasing;
    }
  }
  return {ok, fmt::format("max b*lambda^2 {:.4f}; fitted tail ratio within {:.2e} of b*lambda^2", worst_ratio,
                          worst_fit)};
}

Outcome ac3() {
  std::vector<double> xs, ys;
  for (double d : {0.1, 0.05, 0.02, 0.01, 0.005}) {
    const double lam = eig2(millipede_transfer(d)).small;
    xs.push_back(std::log(d));
    ys.push_back(std::log(std::abs(std::log(lam) + 2.0 + 0.5 * d)));
  }
  const double slope = fit_log_slope(xs, ys);
  return {std::abs(slope - 2.0) <= 0.2, fmt::format("log-log slope of the expansion residual {:.4f}", slope)};
}

Outcome ac4() {
  bool ok = true;
  double worst_det = 0.0, max_lambda = 0.0;
  std::vector<std::pair<double, double>> by_gamma;
  for (int i = 1; i <= 16; ++i) {
    const double w = 0.25 * i;
    const TransferMatrix t = ladder_antisym_transfer(w);
    const double lam = eig2(t).small;
    worst_det = std::max(worst_det, std::abs(t.entry_det() - 1.0));
    max_lambda = std::max(max_lambda, lam);
    by_gamma.push_back({std::sinh(1.0) / std::tanh(0.5 * w), lam});
  }
  std::sort(by_gamma.begin(), by_gamma.end());
  bool decreasing = true;
  for (std::size_t i = 1; i < by_gamma.size(); ++i) decreasing = decreasing && by_gamma[i].second < by_gamma[i - 1].second;
  const double l005 = eig2(ladder_antisym_transfer(0.05)).small;
  const double l025 = eig2(ladder_antisym_transfer(0.25)).small;
  // lambda ~ w / (2 sinh 1) for small w, so this ratio sits near 1/4
  ok = worst_det <= 1e-12 && max_lambda < std::exp(-1.0) && decreasing && l005 < l025 / 10.0;
  return {ok, fmt::format("max |det-1| {:.1e}, max lambda {:.4f} (1/e = {:.4f}), decreasing in gamma: {}, "
                          "lambda(0.05)/lambda(0.25) = {:.4f}",
                          worst_det, max_lambda, std::exp(-1.0), decreasing, l005 / l025)};
}

Outcome ac5() {
  bool ok = true;
  double worst_res = 0.0, worst_half = 0.0, worst_kirchhoff = 0.0;
  for (double k1 : {0.5, 1.0, 2.0}) {
    for (double k2 : {0.5, 1.0, 2.0}) {
      const SharedEigenvector s = match_shared_eigenvector(k1, k2);
      ok = ok && s.p1 > 0.0 && s.p1 < 1.0;
      worst_res = std::max(worst_res, std::abs(shared_eigenvector_mismatch(k1, k2, s.p1)));
      if (k1 == k2) worst_half = std::max(worst_half, std::abs(s.p1 - 0.5));
      const Eigenfunction f = construct(test::two_lengths_spec(k1, k2, 8));
      for (VertexIndex v : interior_vertices(f)) worst_kirchhoff = std::max(worst_kirchhoff, kirchhoff_residual(f, v));
    }
  }
  ok = ok && worst_res <= 1e-10 && worst_half <= 1e-12 && worst_kirchhoff <= 1e-9;
  return {ok, fmt::format("max residual {:.1e}, max |p1-1/2| at equal lengths {:.1e}, max Kirchhoff {:.1e}", worst_res,
                          worst_half, worst_kirchhoff)};
}

Outcome ac6() {
  double worst_cont = 0.0, worst_kirch = 0.0, worst_order = 0.0;
  std::size_t vertices = 0, edges = 0;
  for (const auto& spec : test::all_families(12)) {
    const Eigenfunction f = construct(spec);
    for (VertexIndex v : interior_vertices(f)) {
      worst_cont = std::max(worst_cont, continuity_residual(f, v));
      worst_kirch = std::max(worst_kirch, kirchhoff_residual(f, v));
      ++vertices;
    }
    // finite-difference order on the first few edges of each generation
    std::vector<int> seen;
    for (EdgeIndex e = 0; e < f.graph().edge_count(); ++e) {
      const int gen = f.graph().edge(e).generation;
      if (std::count(seen.begin(), seen.end(), gen) >= 2) continue;
      seen.push_back(gen);
      const auto& sol = f.solution(e);
      const double L = f.graph().edge(e).length;
      if (sol.k == 0.0) continue;
      const double r1 = ode_residual(sol, L, L / 40.0);
      const double r2 = ode_residual(sol, L, L / 80.0);
      if (r1 < 1e-9) continue;  // already at roundoff
      worst_order = std::max(worst_order, std::abs(std::log2(r1 / r2) - 2.0));
      ++edges;
    }
  }
  const bool ok = worst_cont <= 1e-10 && worst_kirch <= 1e-9 && worst_order <= 0.2;
  return {ok, fmt::format("{} vertices: max continuity {:.1e}, max Kirchhoff {:.1e}; {} edges: max |order-2| {:.3f}",
                          vertices, worst_cont, worst_kirch, edges, worst_order)};
}

Outcome ac7() {
  const double kl = 1.0;
  const Eigenfunction f = construct(test::tree_spec(2, kl, 12));
  const PathSpec path = first_path(f);
  const std::vector<int> depths{6, 7, 8, 9, 10, 11, 12};
  MultiplierSpec m;
  m.kind = MultiplierKind::rho_path;
  m.action_scale = 0.9;
  const DecayReport good = decay_report(f, m, depths, path);
  MultiplierSpec control = m;
  control.action_scale = 1.1;
  control.vertex_extra = 0.1 * kl;
  const DecayReport bad = decay_report(f, control, depths, path);
  const bool ok = good.plateau_pass && good.cauchy_pass && !bad.pass;
  return {ok, fmt::format("scaled: plateau {} cauchy {} tail ratio {:.4f}; control: plateau {} cauchy {} (must FAIL)",
                          good.plateau_pass, good.cauchy_pass, good.tail_ratio, bad.plateau_pass, bad.cauchy_pass)};
}

Outcome ac8() {
  const Eigenfunction f = construct(test::braided_spec({2}, {1}, {1.0}, 12));
  MultiplierSpec m;
  m.kind = MultiplierKind::f_ave;
  m.delta = 0.1;
  m.sign = ShiftSign::minus;
  const DecayReport r = decay_report(f, m, {6, 8, 10, 12});
  double worst_cont = 0.0, worst_jump = 0.0;
  const GenerationProfile& p = *f.profile();
  for (int j = 1; j <= 11; ++j) {
    worst_cont = std::max(worst_cont, averaged_continuity(f, j));
    worst_jump = std::max(worst_jump,
                          std::abs(averaged_derivative_jump(f, j) - static_cast<double>(p.arriving[j]) / p.ongoing[j]));
  }
  const bool ok = r.plateau_pass && worst_cont <= 1e-10 && worst_jump <= 1e-6;
  return {ok, fmt::format("plateau {}, max continuity {:.1e}, max |jump - a/b| {:.1e}", r.plateau_pass, worst_cont,
                          worst_jump)};
}

Outcome ac9() {
  // legs of the millipede have V - E = 0.01, so the shift stays below that
  const double delta = 0.005;
  double min_plus = 1e300, max_minus = -1e300;
  for (const auto& spec : test::all_families(8)) {
    const Eigenfunction f = construct(spec);
    MultiplierSpec plus;
    plus.delta = delta;
    plus.sign = ShiftSign::plus;
    MultiplierSpec minus = plus;
    minus.sign = ShiftSign::minus;
    min_plus = std::min(min_plus, constraint_margin(f, plus, 16));
    max_minus = std::max(max_minus, constraint_margin(f, minus, 16));
  }
  const bool ok = min_plus >= delta - 1e-9 && max_minus <= -delta + 1e-9;
  return {ok, fmt::format("delta {}: min margin with E+delta {:.6g}, max margin with E-delta {:.6g}", delta, min_plus,
                          max_minus)};
}

Outcome ac10() {
  double worst = 0.0;
  for (double c : {0.5, 1.0, 2.0}) {
    for (double k : {0.5, 1.0, 2.0}) {
      std::vector<double> r;
      for (double h : {1e-2, 5e-3, 2.5e-3}) {
        std::vector<double> F, phi;
        const int n = static_cast<int>(std::lround(1.0 / h));
        for (int i = 0; i <= n; ++i) {
          F.push_back(std::exp(c * i * h));
          phi.push_back(std::cosh(k * i * h));
        }
        r.push_back(identity_check(F, phi, h));
      }
      worst = std::max({worst, std::abs(std::log2(r[0] / r[1]) - 2.0), std::abs(std::log2(r[1] / r[2]) - 2.0)});
    }
  }
  return {worst <= 0.2, fmt::format("max |order-2| {:.4f}", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "regular tree bound", 1.0, ac1},
      {2, "L2 convergence", 10.0, ac2},
      {3, "millipede expansion", 1.0, ac3},
      {4, "ladder", 1.0, ac4},
      {5, "two-lengths tree", 5.0, ac5},
      {6, "structural invariants", 30.0, ac6},
      {7, "path multiplier decay", 10.0, ac7},
      {8, "averaged multiplier decay", 10.0, ac8},
      {9, "constraint sign", 5.0, ac9},
      {10, "multiplier identity", 1.0, ac10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget;
    const bool pass = o.ok && in_time;
    if (!pass) ++failures;
    std::cout << fmt::format("AC{:<2} {} {}: {} [{:.3f} s / {} s{}]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                             o.detail, secs, c.budget, in_time ? "" : ", over budget");
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
