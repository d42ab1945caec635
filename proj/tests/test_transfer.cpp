#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "agmon/transfer.hpp"

using namespace agmon;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Textbook quadratic formula in long double.
std::pair<long double, long double> naive_roots(const TransferMatrix& t) {
  const long double tr = static_cast<long double>(t.t11) + t.t22;
  const long double det = static_cast<long double>(t.t11) * t.t22 - static_cast<long double>(t.t12) * t.t21;
  const long double disc = std::sqrt(tr * tr - 4 * det);
  return {(tr - disc) / 2, (tr + disc) / 2};
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Self-similar decaying solution on the two-lengths tree from the Dirichlet-to-Neumann
// map: kappa = -(total outgoing derivative)/value is the same at every vertex.
struct DtnSolution {
  double p1, r1, r2;
};

DtnSolution dtn_two_lengths(double kL1, double kL2) {
  auto r = [](double kl, double kappa) {
    const double c = std::cosh(kl), s = std::sinh(kl);
    return -(kappa * c + s) / (c + kappa * s);
  };
  const double kappa = bisect([&](double x) { return x + r(kL1, x) + r(kL2, x); }, 1e-9, 50.0);
  const double r1 = r(kL1, kappa), r2 = r(kL2, kappa);
  return {r1 / (r1 + r2), r1, r2};
}

}  // namespace

TEST_CASE("vertex-edge transfer entries and determinant") {
  const TransferMatrix t = vertex_edge_transfer(0.8, 0.25);
  CHECK(t.t11 == std::cosh(0.8));
  CHECK(t.t21 == 0.25 * std::sinh(0.8));
  CHECK_THAT(t.entry_det(), WithinRel(0.25, 1e-14));
  CHECK(t.det() == 0.25);
  CHECK_THROWS_AS(vertex_edge_transfer(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(vertex_edge_transfer(-1.0, 0.5), std::invalid_argument);
}

TEST_CASE("eig2 agrees with the long double quadratic formula") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int checked = 0;
  while (checked < 500) {
    TransferMatrix t{u(rng), u(rng), u(rng), u(rng)};
    const double disc = t.trace() * t.trace() - 4 * t.det();
    if (disc < 1e-3) continue;
    const auto [lo, hi] = naive_roots(t);
    const EigenPair2 e = eig2(t);
    // small/large order by value on the real line
    const double a = std::min(e.small, e.large), b = std::max(e.small, e.large);
    CHECK_THAT(a, WithinAbs(static_cast<double>(lo), 1e-12 * t.norm()));
    CHECK_THAT(b, WithinAbs(static_cast<double>(hi), 1e-12 * t.norm()));
    // eigenvectors
    for (const auto& [lam, v] : {std::pair{e.small, e.small_vector}, std::pair{e.large, e.large_vector}}) {
      const Coefficients tv = t.apply(v);
      CHECK_THAT(tv.a, WithinAbs(lam * v.a, 1e-10 * t.norm() * (std::abs(v.a) + std::abs(v.b))));
      CHECK_THAT(tv.b, WithinAbs(lam * v.b, 1e-10 * t.norm() * (std::abs(v.a) + std::abs(v.b))));
    }
    ++checked;
  }
}

TEST_CASE("eig2 is accurate for the tiny root of a stiff step") {
  // eigenvalues 1e-9 and 1e9; the naive formula loses the small one entirely in double
  const TransferMatrix t{1e9, 0.0, 0.0, 1e-9};
  const EigenPair2 e = eig2(t);
  CHECK_THAT(e.small, WithinRel(1e-9, 1e-14));
  const TransferMatrix s = vertex_edge_transfer(20.0, 0.5);
  const EigenPair2 es = eig2(s);
  CHECK_THAT(es.small * es.large, WithinRel(0.5, 1e-12));
  // same step as a product of a plain edge and a vertex split keeps the determinant
  const TransferMatrix split{1.0, 0.0, 0.0, 0.5, 0.5};
  const TransferMatrix prod = split * vertex_edge_transfer(20.0, 1.0);
  CHECK_THAT(eig2(prod).small, WithinRel(es.small, 1e-12));
}

TEST_CASE("eig2 rejects complex spectra") {
  CHECK_THROWS_AS(eig2(TransferMatrix{0.0, -1.0, 1.0, 0.0}), std::domain_error);
}

TEST_CASE("regular tree eigenvalue: closed form and the known b=2, kL=1 value") {
  for (int b = 2; b <= 6; ++b) {
    for (double kl : {0.3, 1.0, 2.5}) {
      const double c = std::cosh(kl);
      const double half = 0.5 * (1.0 + 1.0 / b) * c;
      const double closed = half - std::sqrt(half * half - 1.0 / b);
      CHECK_THAT(eig2(vertex_edge_transfer(kl, 1.0 / b)).small, WithinRel(closed, 1e-12));
    }
  }
  CHECK_THAT(eig2(vertex_edge_transfer(1.0, 0.5)).small, WithinAbs(0.2411, 5e-5));
}

TEST_CASE("decaying ratio is an eigenvector") {
  for (double kl : {0.1, 1.0, 4.0, 15.0}) {
    for (double p : {0.1, 0.5, 0.9, 1.0}) {
      const double w = decaying_ratio(kl, p);
      const TransferMatrix t = vertex_edge_transfer(kl, p);
      const double lam = eig2(t).small;
      // backward error: forward application cancels for large kL
      const Coefficients out = t.apply({1.0, w});
      const double tol = 1e-14 * t.norm() * (1.0 + std::abs(w));
      CHECK_THAT(out.a, WithinAbs(lam, tol));
      CHECK_THAT(out.b, WithinAbs(lam * w, tol));
      CHECK(w < 0.0);
    }
  }
}

TEST_CASE("millipede and ladder steps are unimodular") {
  for (double d : {0.5, 0.1, 0.01}) {
    const TransferMatrix t = millipede_transfer(d);
    CHECK_THAT(t.entry_det(), WithinAbs(1.0, 1e-12));
    const double lam = eig2(t).small;
    CHECK(std::abs(std::log(lam) + 2.0 + 0.5 * d) < d * d);
  }
  for (double w = 0.25; w <= 4.0; w += 0.25) {
    const TransferMatrix t = ladder_antisym_transfer(w);
    CHECK_THAT(t.entry_det(), WithinAbs(1.0, 1e-12));
    CHECK(eig2(t).small < std::exp(-1.0));
  }
  CHECK_THROWS_AS(ladder_antisym_transfer(0.0), std::invalid_argument);
}

TEST_CASE("coupled transfer with zero load is a plain edge step") {
  const TransferMatrix a = coupled_transfer(1.3, 0.0);
  const TransferMatrix b = vertex_edge_transfer(1.3, 1.0);
  CHECK(a.t11 == b.t11);
  CHECK(a.t12 == b.t12);
  CHECK(a.t21 == b.t21);
  CHECK(a.t22 == b.t22);
}

TEST_CASE("shared eigenvector: equal lengths give one half") {
  for (double kl : {0.5, 1.0, 2.0}) {
    const SharedEigenvector s = match_shared_eigenvector(kl, kl);
    CHECK_THAT(s.p1, WithinAbs(0.5, 1e-12));
    const SharedEigenvector v = match_vertex_eigenvector(kl, kl);
    CHECK_THAT(v.p1, WithinAbs(0.5, 1e-12));
  }
}

TEST_CASE("shared eigenvector residual and swap symmetry") {
  for (double k1 : {0.5, 1.0, 2.0}) {
    for (double k2 : {0.5, 1.0, 2.0}) {
      const SharedEigenvector s = match_shared_eigenvector(k1, k2);
      CHECK(s.p1 > 0.0);
      CHECK(s.p1 < 1.0);
      CHECK(std::abs(shared_eigenvector_mismatch(k1, k2, s.p1)) <= 1e-10);
      CHECK_THAT(match_shared_eigenvector(k2, k1).p1, WithinAbs(1.0 - s.p1, 1e-11));
    }
  }
  // the common-eigenvector condition at kL = (1, 2)
  CHECK_THAT(match_shared_eigenvector(1.0, 2.0).p1, WithinAbs(0.8418, 1e-4));
}

TEST_CASE("vertex-consistent two-lengths solution matches the DtN fixed point") {
  for (double k1 : {0.5, 1.0, 2.0, 3.0}) {
    for (double k2 : {0.5, 1.0, 2.0}) {
      const DtnSolution want = dtn_two_lengths(k1, k2);
      const SharedEigenvector got = match_vertex_eigenvector(k1, k2);
      CHECK_THAT(got.p1, WithinAbs(want.p1, 1e-10));
      CHECK_THAT(got.w, WithinAbs(want.r1, 1e-9));
      CHECK_THAT(got.lambda, WithinRel(std::cosh(k1) + want.r1 * std::sinh(k1), 1e-8));
      CHECK_THAT(got.mu, WithinRel(std::cosh(k2) + want.r2 * std::sinh(k2), 1e-8));
    }
  }
  CHECK_THAT(match_vertex_eigenvector(1.0, 2.0).p1, WithinAbs(0.52095, 1e-5));
}

TEST_CASE("ladder eigenvalue vanishes linearly in the rung length") {
  // tr T ~ 2 sinh 1 / w, lambda ~ 1/tr T
  for (double w : {0.01, 0.002}) {
    const TransferMatrix t = ladder_antisym_transfer(w);
    const double lam = eig2(t).small;
    CHECK_THAT(lam * t.trace(), WithinAbs(1.0, 2.0 / (t.trace() * t.trace())));
    CHECK_THAT(lam, WithinRel(w / (2.0 * std::sinh(1.0)), 0.02));
  }
  const double ratio = eig2(ladder_antisym_transfer(0.05)).small / eig2(ladder_antisym_transfer(0.25)).small;
  CHECK_THAT(ratio, WithinAbs(0.247, 0.005));
}
