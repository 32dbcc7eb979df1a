#pragma once

// Reference computations used only by the tests. None of them call into the
// divided-difference tableau or the contraction code they are checking.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXcd;

// Complete homogeneous symmetric polynomial h_k(x_0, ..., x_n); equals the
// divided difference [x_0..x_n] of t^(n+k), confluent or not.
inline double complete_homogeneous(const std::vector<double>& x, int k) {
  // h_k over the first j variables, built up one variable at a time.
  std::vector<double> h(static_cast<std::size_t>(k) + 1, 0.0);
  h[0] = 1.0;
  for (double xi : x) {
    for (int d = 1; d <= k; ++d) h[d] += xi * h[d - 1];
  }
  return h[static_cast<std::size_t>(k)];
}

// [x_0..x_n] exp for distinct nodes in long double.
inline double exp_dd_distinct(const std::vector<double>& x) {
  long double sum = 0.0L;
  for (std::size_t j = 0; j < x.size(); ++j) {
    long double den = 1.0L;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k != j) den *= static_cast<long double>(x[j]) - x[k];
    }
    sum += std::exp(static_cast<long double>(x[j])) / den;
  }
  return static_cast<double>(sum);
}

// Kronecker product of two square matrices.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows(), m = b.rows();
  Matrix out(n * m, n * m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out.block(i * m, j * m, m, m) = a(i, j) * b;
  return out;
}

// f(X) for Hermitian X via Eigen's self-adjoint solver.
inline Matrix herm_function(const Matrix& x, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x);
  Eigen::VectorXcd d(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(es.eigenvalues()(i));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

// f(nabla_a)(x) with nabla_a(x) = -a x + x a, realized as a dim^2 x dim^2
// Hermitian matrix acting on the row-major vectorization of x.
inline Matrix nabla_brute_force(const Matrix& a, const Matrix& x,
                                const std::function<double(double)>& f) {
  const Eigen::Index d = a.rows();
  const Matrix id = Matrix::Identity(d, d);
  // vec_r(a x) = (a (x) I) vec_r(x), vec_r(x a) = (I (x) a^T) vec_r(x).
  const Matrix big = -kron(a, id) + kron(id, a.transpose());
  Eigen::VectorXcd v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = x(i, j);
  const Eigen::VectorXcd w = herm_function(big, f) * v;
  Matrix out(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = w(i * d + j);
  return out;
}

// H^CM_{1,1,1}(a, b) from its log form, a, b, 1 distinct.
inline double hcm111(double a, double b) {
  return std::log(a) / ((a - 1.0) * (b - a)) - std::log(b) / ((b - 1.0) * (b - a));
}

// Fourier route for Gaussian divided differences: with g(x) = exp(-x^2),
// g(x) = (1/2 sqrt(pi)) \int exp(-w^2/4) e^{iwx} dw, hence
// [x_0..x_n]g = (1/2 sqrt(pi)) \int exp(-w^2/4) [x_0..x_n]e^{iw.} dw and the
// inner divided difference of the exponential is the simplex integral of
// (iw)^n e^{iw(...)}. Evaluated here for two and three nodes in closed form
// of the inner difference, with a plain trapezoid in w.
inline double gaussian_dd_fourier(const std::vector<double>& x) {
  const double h = 0.01, wmax = 40.0;
  std::complex<double> sum = 0.0;
  for (double w = -wmax; w <= wmax + 1e-12; w += h) {
    std::complex<double> inner;
    const std::complex<double> I(0.0, 1.0);
    auto e = [&](double t) { return std::exp(I * w * t); };
    if (std::abs(w) < 1e-12) {
      inner = x.size() == 1 ? 1.0 : 0.0;
    } else if (x.size() == 1) {
      inner = e(x[0]);
    } else if (x.size() == 2) {
      inner = (e(x[1]) - e(x[0])) / (x[1] - x[0]);
    } else {
      const std::complex<double> d01 = (e(x[1]) - e(x[0])) / (x[1] - x[0]);
      const std::complex<double> d12 = (e(x[2]) - e(x[1])) / (x[2] - x[1]);
      inner = (d12 - d01) / (x[2] - x[0]);
    }
    sum += std::exp(-w * w / 4.0) * inner * h;
  }
  return sum.real() / (2.0 * std::sqrt(M_PI));
}

}  // namespace oracle
