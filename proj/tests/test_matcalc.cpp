#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"
#include "ddcalc/matcalc.hpp"
#include "ddcalc/quad.hpp"
#include "oracles.hpp"

using namespace ddcalc;
using matcalc::Complex;
using matcalc::ContractionKernel;
using matcalc::HermitianMatrix;
using matcalc::Matrix;

namespace {

std::mt19937_64 gen(2024);

Matrix random_matrix(int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(n(gen), n(gen));
  return m;
}

HermitianMatrix random_hermitian(int d, double scale = 1.0) {
  const Matrix m = random_matrix(d);
  return HermitianMatrix(scale * (m + m.adjoint()) / 4.0);
}

double exp_dd2(double x, double y) {
  return std::abs(x - y) < 1e-12 ? std::exp(0.5 * (x + y)) : (std::exp(y) - std::exp(x)) / (y - x);
}

}  // namespace

TEST_CASE("Hermitian validation and eigendecomposition") {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(HermitianMatrix{bad}, PreconditionError);

  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  const auto sd = matcalc::eigh(HermitianMatrix(d));
  CHECK(sd.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(sd.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(sd.eigenvalues(2) == doctest::Approx(3.0));

  Matrix px(2, 2);
  px << 0.0, 1.0, 1.0, 0.0;
  const auto sp = matcalc::eigh(HermitianMatrix(px));
  CHECK(sp.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(sp.eigenvalues(1) == doctest::Approx(1.0));

  const HermitianMatrix a = random_hermitian(5);
  const auto s = matcalc::eigh(a);
  const Matrix recon = s.unitary * s.eigenvalues.cast<Complex>().asDiagonal() * s.unitary.adjoint();
  CHECK(matcalc::max_abs(recon - a.matrix()) < 1e-12);
  CHECK(matcalc::max_abs(s.unitary.adjoint() * s.unitary - Matrix::Identity(5, 5)) < 1e-12);
  for (int k = 0; k < 5; ++k) {
    // phase convention: first non-negligible component real positive
    int i = 0;
    while (std::abs(s.unitary(i, k)) <= 1e-12) ++i;
    CHECK(std::abs(s.unitary(i, k).imag()) < 1e-14);
    CHECK(s.unitary(i, k).real() > 0.0);
  }
}

TEST_CASE("slot contraction basics") {
  const HermitianMatrix a = random_hermitian(4);
  const Matrix b1 = random_matrix(4), b2 = random_matrix(4);
  const auto one = ContractionKernel::slots(3, [](std::span<const double>) { return Complex(1.0); });
  CHECK(matcalc::max_abs(matcalc::contract(a, one, {b1, b2}) - b1 * b2) < 1e-12);

  const auto prod = ContractionKernel::product({fn::exp(), fn::gaussian(), fn::cosh_scaled(0.5)});
  const Matrix direct = oracle::herm_function(a.matrix(), [](double x) { return std::exp(x); }) * b1 *
                        oracle::herm_function(a.matrix(), [](double x) { return std::exp(-x * x); }) *
                        b2 * oracle::herm_function(a.matrix(), [](double x) { return std::cosh(0.5 * x); });
  CHECK(matcalc::max_abs(matcalc::contract(a, prod, {b1, b2}) - direct) < 1e-11);

  CHECK_THROWS_AS(matcalc::contract(a, one, {b1}), PreconditionError);
  const auto sing = ContractionKernel::slots(2, [](std::span<const double>) {
    return Complex(std::numeric_limits<double>::infinity());
  });
  CHECK_THROWS_AS(matcalc::contract(a, sing, {b1}), KernelSingularityError);
}

TEST_CASE("first divided-difference kernel is the derivative of f(a)") {
  for (int trial = 0; trial < 5; ++trial) {
    const HermitianMatrix a = random_hermitian(4);
    const Matrix db = random_hermitian(4).matrix();
    const Matrix dk =
        matcalc::contract(a, ContractionKernel::divided_difference(1, fn::exp()), {db});
    // central difference with Richardson on the entrywise derivative
    auto at = [&](double t) {
      return oracle::herm_function(a.matrix() + t * db, [](double x) { return std::exp(x); });
    };
    const double h = 1e-3;
    const Matrix d1 = (at(h) - at(-h)) / (2 * h);
    const Matrix d2 = (at(h / 2) - at(-h / 2)) / h;
    const Matrix fd = (4.0 * d2 - d1) / 3.0;
    CHECK(matcalc::max_abs(dk - fd) < 1e-6);
  }
}

TEST_CASE("nabla and modular conventions") {
  Matrix a = Matrix::Zero(2, 2);
  a(1, 1) = std::log(2.0);
  const Matrix x = Matrix::Ones(2, 2);
  const auto expk = ContractionKernel::nabla(1, [](std::span<const double> m) { return Complex(std::exp(m[0])); });
  const Matrix r = matcalc::contract_nabla(HermitianMatrix(a), expk, {x});
  CHECK(std::abs(r(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(r(0, 1) - 2.0) < 1e-14);
  CHECK(std::abs(r(1, 0) - 0.5) < 1e-14);
  CHECK(std::abs(r(1, 1) - 1.0) < 1e-14);

  // F(s) = s is conjugation by A
  const HermitianMatrix h = random_hermitian(3);
  const Matrix A = oracle::herm_function(h.matrix(), [](double v) { return std::exp(v); });
  const Matrix b = random_matrix(3);
  const auto id = ContractionKernel::modular(1, [](std::span<const double> s) { return Complex(s[0]); });
  const Matrix conj = matcalc::contract_modular(HermitianMatrix((A + A.adjoint()) / 2.0), id, {b});
  CHECK(matcalc::max_abs(conj - A.inverse() * b * A) < 1e-11);
  Matrix neg = Matrix::Identity(2, 2);
  neg(1, 1) = -1.0;
  CHECK_THROWS_AS(matcalc::contract_modular(HermitianMatrix(neg), id, {Matrix::Ones(2, 2)}),
                  DomainError);
}

TEST_CASE("nabla contraction against the dim^2 brute force") {
  for (int d : {2, 3, 4}) {
    const HermitianMatrix a = random_hermitian(d);
    const Matrix x = random_matrix(d);
    const auto g = ContractionKernel::nabla(1, [](std::span<const double> m) {
      return Complex(std::exp(-m[0] * m[0]) + m[0]);
    });
    const Matrix lib = matcalc::contract_nabla(a, g, {x});
    const Matrix ref = oracle::nabla_brute_force(a.matrix(), x,
                                                 [](double m) { return std::exp(-m * m) + m; });
    CHECK(matcalc::max_abs(lib - ref) < 1e-11);
  }
}

TEST_CASE("doubled contraction against an explicit doubled algebra") {
  const int d = 3;
  const HermitianMatrix a = random_hermitian(d);
  const Matrix b1 = random_matrix(d), b2 = random_matrix(d), x = random_matrix(d);
  // A (x) A as d^2 x d^2 matrices; nabla~ = -a (x) 1 + 1 (x) a is Hermitian.
  const Matrix id = Matrix::Identity(d, d);
  const Matrix L = -oracle::kron(a.matrix(), id) + oracle::kron(id, a.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(L);
  const Matrix U = es.eigenvectors();
  Matrix Bt = U.adjoint() * oracle::kron(b1, b2) * U;
  for (int i = 0; i < d * d; ++i)
    for (int j = 0; j < d * d; ++j) Bt(i, j) *= exp_dd2(es.eigenvalues()(i), es.eigenvalues()(j));
  const Matrix C = U * Bt * U.adjoint();
  // (p (x) q)(x) = p x q
  Matrix ref = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) ref(i, l) += C(i * d + k, j * d + l) * x(j, k);

  const auto kernel = ContractionKernel::slots(2, [](std::span<const double> m) {
    return Complex(exp_dd2(m[0], m[1]));
  });
  const Matrix lib = matcalc::doubled_contract(a, kernel, {{b1, b2}}, x);
  CHECK(matcalc::max_abs(lib - ref) < 1e-10);

  // no pairs: plain f(nabla_a)(x)
  const auto g = ContractionKernel::slots(1, [](std::span<const double> m) { return Complex(std::exp(m[0])); });
  const Matrix n0 = matcalc::doubled_contract(a, g, {}, x);
  CHECK(matcalc::max_abs(n0 - oracle::nabla_brute_force(a.matrix(), x,
                                                         [](double m) { return std::exp(m); })) < 1e-11);
}

TEST_CASE("adjoint covariance for reversal-symmetric real kernels") {
  const HermitianMatrix a = random_hermitian(4);
  const Matrix b1 = random_matrix(4), b2 = random_matrix(4);
  const auto k = ContractionKernel::divided_difference(2, fn::exp());
  const Matrix lhs = matcalc::contract(a, k, {b1, b2}).adjoint();
  const Matrix rhs = matcalc::contract(a, k, {b2.adjoint(), b1.adjoint()});
  CHECK(matcalc::max_abs(lhs - rhs) < 1e-12);
}

TEST_CASE("repeated eigenvalues feed confluent kernels") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0 + 1e-12;
  a(2, 2) = 2.0;
  const Matrix b = Matrix::Ones(3, 3);
  const Matrix r = matcalc::contract(HermitianMatrix(a), ContractionKernel::divided_difference(1, fn::log()), {b});
  CHECK(std::abs(r(0, 1) - 1.0) < 1e-10);
  CHECK(std::abs(r(0, 2) - std::log(2.0)) < 1e-12);
}

TEST_CASE("norms") {
  Matrix m(2, 2);
  m << 3.0, 0.0, 0.0, -4.0;
  CHECK(matcalc::max_abs(m) == 4.0);
  CHECK(matcalc::spectral_norm(m) == doctest::Approx(4.0));
}
