#pragma once

#include <cmath>
#include <limits>

namespace agmon {

// (A, B) of psi = A cosh kx + B sinh kx on one edge.
struct Coefficients {
  double a = 0.0;
  double b = 0.0;
};

struct TransferMatrix {
  double t11 = 1.0, t12 = 0.0, t21 = 0.0, t22 = 1.0;
  // Known determinant, when the constructor has it exactly. For large kL the
  // entries alone lose it to cancellation (c^2 - s^2).
  double exact_det = std::numeric_limits<double>::quiet_NaN();

  double det() const noexcept;
  // From the entries only (fma-compensated); what a unimodularity check should look at.
  double entry_det() const noexcept;
  double trace() const noexcept { return t11 + t22; }
  double norm() const noexcept;  // Frobenius
  Coefficients apply(Coefficients c) const noexcept { return {t11 * c.a + t12 * c.b, t21 * c.a + t22 * c.b}; }
  TransferMatrix operator*(const TransferMatrix& o) const noexcept;
};

// Eigenvectors are (1, w) when the first component can be normalised, else (0, 1).
struct EigenPair2 {
  double small = 0.0;
  double large = 0.0;
  Coefficients small_vector;
  Coefficients large_vector;
};

// [[cosh kL, sinh kL], [p sinh kL, p cosh kL]]
TransferMatrix vertex_edge_transfer(double kL, double p);

// Edge step followed by a vertex carrying an extra Robin-type load eta on the
// outgoing derivative (a leg, or a rung). eta_hat = eta / k.
TransferMatrix coupled_transfer(double kL, double eta_hat);

TransferMatrix millipede_transfer(double delta);
TransferMatrix ladder_antisym_transfer(double w);

// Throws std::domain_error for a complex spectrum.
EigenPair2 eig2(const TransferMatrix& t);

struct SharedEigenvector {
  double p1 = 0.5;
  double w = 0.0;       // B/A on the length-1 edge
  double lambda = 0.0;  // smaller eigenvalue of T_1(p1)
  double mu = 0.0;      // smaller eigenvalue of T_2(1 - p1)
  int iterations = 0;
};

// Smaller-root eigenvector ratio w = (lambda - c)/s of vertex_edge_transfer(kL, p),
// lambda taken in the reciprocal form 2p / ((1+p)c + sqrt(D)).
double decaying_ratio(double kL, double p);

// Common eigenvector (1, w) of T_1(p1) and T_2(1 - p1) by bisection in p1.
SharedEigenvector match_shared_eigenvector(double kL1, double kL2);

// Left minus right side of the common-eigenvector equation, each side in the
// direct (non-reciprocal) radical form.
double shared_eigenvector_mismatch(double kL1, double kL2, double p1);

// Self-similar solution of the two-lengths tree: (1, w_l) is the decaying
// eigenvector of T_l(p_l) with w_1 / p_1 = w_2 / p_2 so that the vertex state is
// the same behind every edge. lambda, mu as above; w is w_1.
SharedEigenvector match_vertex_eigenvector(double kL1, double kL2);

}  // namespace agmon
