#pragma once

// Spin-j operator matrices, binomial amplitude weights and the (Delta, q, A)
// parameter algebra shared by every other header.
//
// Local basis convention: index i = 0 .. 2j corresponds to m = j - i, so the
// highest-weight ("all spin up") state is always index 0.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace xxzpin {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTightTol = 1e-12;

namespace detail {

// Returns 2*x rounded, throwing unless x is a half-integer.
inline int twice_half_integer(double x, const char* what) {
  const double t = 2.0 * x;
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-9) {
    throw std::invalid_argument(std::string(what) + " must be a half-integer, got " +
                                std::to_string(x));
  }
  return static_cast<int>(r);
}

}  // namespace detail

// Anisotropy Delta > 1 together with the derived quantities
//   q in (0,1):  q + 1/q = 2*Delta,
//   A = sqrt(1 - Delta^-2), the boundary field magnitude at which the chain
//   becomes frustration free with domain-wall ground states.
struct SpinParams {
  int two_j = 1;
  double delta = 0.0;
  double q = 0.0;
  double a_field = 0.0;

  double spin_j() const { return 0.5 * two_j; }
  int dim_local() const { return two_j + 1; }

  static SpinParams make(double j, double delta);
};

// q = Delta - sqrt(Delta^2 - 1) (the root in (0,1)) and A = sqrt(1 - Delta^-2).
inline std::pair<double, double> params_from_delta(double delta) {
  if (!(delta > 1.0)) {
    throw std::invalid_argument("anisotropy Delta must be > 1, got " + std::to_string(delta));
  }
  const double q = delta - std::sqrt(delta * delta - 1.0);
  const double a = std::sqrt(1.0 - 1.0 / (delta * delta));
  return {q, a};
}

inline SpinParams SpinParams::make(double j, double delta) {
  SpinParams p;
  p.two_j = detail::twice_half_integer(j, "spin j");
  if (p.two_j <= 0) {
    throw std::invalid_argument("spin j must be positive, got " + std::to_string(j));
  }
  p.delta = delta;
  std::tie(p.q, p.a_field) = params_from_delta(delta);
  return p;
}

// w_m = sqrt(binom(2j, m+j)).  The ladder-end convention w_{+-(j+1)} = 0 is
// part of the contract; anything further out of range is rejected.
inline double weight(double j, double m) {
  const int two_j = detail::twice_half_integer(j, "spin j");
  const int two_m = detail::twice_half_integer(m, "weight argument m");
  if ((two_j + two_m) % 2 != 0) {
    throw std::invalid_argument("m + j must be an integer");
  }
  const int k = (two_m + two_j) / 2;  // m + j
  if (k == -1 || k == two_j + 1) return 0.0;
  if (k < 0 || k > two_j) {
    throw std::out_of_range("weight: m out of range for this spin");
  }
  // log-gamma keeps large spins overflow-free; exact to well below 1e-12 for
  // the small spins exercised here.
  const double log_binom =
      std::lgamma(two_j + 1.0) - std::lgamma(k + 1.0) - std::lgamma(two_j - k + 1.0);
  return std::exp(0.5 * log_binom);
}

// rho_n = sqrt(j(j+1) - n(n+1)), the raising coefficient from m=n to m=n+1.
// Domain n in {-j-1, ..., j}; both ends give exactly 0.
inline double rho(double j, double n) {
  const int two_j = detail::twice_half_integer(j, "spin j");
  const int two_n = detail::twice_half_integer(n, "rho argument n");
  if ((two_j + two_n) % 2 != 0) {
    throw std::invalid_argument("n must differ from j by an integer");
  }
  if (two_n > two_j || two_n < -two_j - 2) {
    throw std::out_of_range("rho: n out of range for this spin");
  }
  const double jj = 0.5 * two_j;
  const double nn = 0.5 * two_n;
  const double val = jj * (jj + 1.0) - nn * (nn + 1.0);
  return std::sqrt(std::max(val, 0.0));
}

struct SpinOperators {
  Matrix s1, s2, s3, sp, sm;
};

// Standard (2j+1)-dimensional spin matrices in the m = j .. -j basis order.
inline SpinOperators spin_matrices(double j) {
  const int two_j = detail::twice_half_integer(j, "spin j");
  if (two_j <= 0) throw std::invalid_argument("spin j must be positive");
  const int d = two_j + 1;
  const double jj = 0.5 * two_j;

  SpinOperators ops;
  ops.s3 = Matrix::Zero(d, d);
  ops.sp = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = jj - i;
    ops.s3(i, i) = m;
    if (i >= 1) ops.sp(i - 1, i) = rho(jj, m);  // S+ |m> = rho_m |m+1>
  }
  ops.sm = ops.sp.adjoint();
  ops.s1 = 0.5 * (ops.sp + ops.sm);
  ops.s2 = Complex(0.0, -0.5) * (ops.sp - ops.sm);
  return ops;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace xxzpin
