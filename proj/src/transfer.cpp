#include "agmon/transfer.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include <fmt/format.h>

namespace agmon {

double TransferMatrix::norm() const noexcept { return std::sqrt(t11 * t11 + t12 * t12 + t21 * t21 + t22 * t22); }

double TransferMatrix::det() const noexcept { return std::isnan(exact_det) ? entry_det() : exact_det; }

double TransferMatrix::entry_det() const noexcept {
  // Kahan's fma form of ad - bc
  const double w = t12 * t21;
  const double e = std::fma(-t12, t21, w);
  return std::fma(t11, t22, -w) + e;
}

TransferMatrix TransferMatrix::operator*(const TransferMatrix& o) const noexcept {
  return {t11 * o.t11 + t12 * o.t21, t11 * o.t12 + t12 * o.t22, t21 * o.t11 + t22 * o.t21,
          t21 * o.t12 + t22 * o.t22, exact_det * o.exact_det};
}

TransferMatrix vertex_edge_transfer(double kL, double p) {
  if (!(kL >= 0.0)) throw std::invalid_argument("vertex_edge_transfer: kL must be >= 0");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("vertex_edge_transfer: p must lie in (0,1]");
  const double c = std::cosh(kL);
  const double s = std::sinh(kL);
  return {c, s, p * s, p * c, p};
}

TransferMatrix coupled_transfer(double kL, double eta_hat) {
  if (!(kL >= 0.0)) throw std::invalid_argument("coupled_transfer: kL must be >= 0");
  const double c = std::cosh(kL);
  const double s = std::sinh(kL);
  return {c, s, s + eta_hat * c, c + eta_hat * s, 1.0};
}

TransferMatrix millipede_transfer(double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("millipede_transfer: delta must be >= 0");
  return coupled_transfer(2.0, delta);
}

TransferMatrix ladder_antisym_transfer(double w) {
  if (!(w > 0.0)) throw std::invalid_argument("ladder_antisym_transfer: w must be > 0");
  return coupled_transfer(1.0, 1.0 / std::tanh(0.5 * w));
}

namespace {

Coefficients eigenvector(const TransferMatrix& t, double lambda) {
  const double scale = t.norm();
  // rows give (t12, lambda - t11) and (lambda - t22, t21); use whichever is better conditioned
  if (std::abs(t.t12) > 1e-14 * scale) return {1.0, (lambda - t.t11) / t.t12};
  const double x = lambda - t.t22;
  if (std::abs(t.t21) > 1e-14 * scale) {
    if (std::abs(x) > 1e-14 * scale) return {1.0, t.t21 / x};
    return {0.0, 1.0};
  }
  // diagonal
  return std::abs(lambda - t.t11) <= std::abs(lambda - t.t22) ? Coefficients{1.0, 0.0} : Coefficients{0.0, 1.0};
}

}  // namespace

EigenPair2 eig2(const TransferMatrix& t) {
  const double tr = t.trace();
  const double det = t.det();
  double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) {
    if (disc < -1e-14 * std::max(tr * tr, std::abs(det))) {
      throw std::domain_error(fmt::format("eig2: complex spectrum, discriminant {}", disc));
    }
    disc = 0.0;
  }
  const double root = std::sqrt(disc);
  const double q = tr >= 0.0 ? 0.5 * (tr + root) : 0.5 * (tr - root);
  const double other = q != 0.0 ? det / q : 0.0;
  EigenPair2 out;
  out.small = std::min(q, other);
  out.large = std::max(q, other);
  if (t.t12 == 0.0 && t.t21 == 0.0 && out.small == out.large) {
    out.small_vector = {1.0, 0.0};
    out.large_vector = {0.0, 1.0};
    return out;
  }
  out.small_vector = eigenvector(t, out.small);
  out.large_vector = eigenvector(t, out.large);
  return out;
}

double decaying_ratio(double kL, double p) {
  const double c = std::cosh(kL);
  const double s = std::sinh(kL);
  const double sum = (1.0 + p) * c;
  const double lambda = 2.0 * p / (sum + std::sqrt(sum * sum - 4.0 * p));
  return (lambda - c) / s;
}

namespace {

double shared_side(double kL, double p) {
  const double c = std::cosh(kL);
  const double s = std::sinh(kL);
  return (p * c - c - std::sqrt((c + p * c) * (c + p * c) - 4.0 * p)) / (2.0 * s);
}

double smaller_eigenvalue(double kL, double p) {
  const double c = std::cosh(kL);
  const double sum = (1.0 + p) * c;
  return 2.0 * p / (sum + std::sqrt(sum * sum - 4.0 * p));
}

// f(0) < 0 < f(1) is required; returns the root in p1.
double bisect(const std::function<double(double)>& f, int& iterations) {
  double lo = 0.0;
  double hi = 1.0;
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    throw std::logic_error(fmt::format("bisection bracket inconsistent: f(0)={}, f(1)={}", f_lo, f_hi));
  }
  iterations = 0;
  while (hi - lo > 1e-12 && iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    ++iterations;
    if (f_mid == 0.0) return mid;
    (f_mid < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void check_lengths(double kL1, double kL2) {
  if (!(kL1 > 0.0 && kL2 > 0.0) || !std::isfinite(kL1) || !std::isfinite(kL2)) {
    throw std::invalid_argument("kL1 and kL2 must be positive and finite");
  }
}

}  // namespace

double shared_eigenvector_mismatch(double kL1, double kL2, double p1) {
  return shared_side(kL1, p1) - shared_side(kL2, 1.0 - p1);
}

SharedEigenvector match_shared_eigenvector(double kL1, double kL2) {
  check_lengths(kL1, kL2);
  SharedEigenvector out;
  out.p1 = bisect([&](double p) { return decaying_ratio(kL1, p) - decaying_ratio(kL2, 1.0 - p); }, out.iterations);
  out.w = decaying_ratio(kL1, out.p1);
  out.lambda = smaller_eigenvalue(kL1, out.p1);
  out.mu = smaller_eigenvalue(kL2, 1.0 - out.p1);
  return out;
}

SharedEigenvector match_vertex_eigenvector(double kL1, double kL2) {
  check_lengths(kL1, kL2);
  SharedEigenvector out;
  out.p1 = bisect(
      [&](double p) { return (1.0 - p) * decaying_ratio(kL1, p) - p * decaying_ratio(kL2, 1.0 - p); },
      out.iterations);
  out.w = decaying_ratio(kL1, out.p1);
  out.lambda = smaller_eigenvalue(kL1, out.p1);
  out.mu = smaller_eigenvalue(kL2, 1.0 - out.p1);
  return out;
}

}  // namespace agmon
