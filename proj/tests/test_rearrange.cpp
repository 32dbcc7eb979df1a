#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ddcalc/errors.hpp"
#include "ddcalc/rearrange.hpp"
#include "oracles.hpp"

using namespace ddcalc;
using funcs::MultiIndex;
using matcalc::Complex;
using matcalc::HermitianMatrix;
using matcalc::Matrix;

namespace {

std::mt19937_64 gen(77);

Matrix random_matrix(int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(n(gen), n(gen));
  return m;
}

HermitianMatrix random_hermitian(int d, double scale) {
  const Matrix m = random_matrix(d);
  return HermitianMatrix(scale * (m + m.adjoint()) / 4.0);
}

Matrix random_unitary(int d) { return Eigen::HouseholderQR<Matrix>(random_matrix(d)).householderQ(); }

HermitianMatrix positive_with(const Matrix& U, const std::vector<double>& eig) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(eig.size()));
  for (std::size_t i = 0; i < eig.size(); ++i) v(static_cast<Eigen::Index>(i)) = eig[i];
  const Matrix m = U * v.asDiagonal() * U.adjoint();
  return HermitianMatrix((m + m.adjoint()) / 2.0);
}

rearrange::RearrangementCase make_case(std::vector<int> alpha, double nu, HermitianMatrix a,
                                       std::vector<Matrix> b) {
  return {MultiIndex(std::move(alpha)), nu, std::move(a), std::move(b), {}};
}

}  // namespace

TEST_CASE("scalar rearrangement") {
  const double lambda = 2.5;
  Matrix a(1, 1);
  a(0, 0) = std::log(lambda);
  const auto c = make_case({0, 0}, 0.0, HermitianMatrix(a), {Matrix::Ones(1, 1)});
  REQUIRE(c.m().has_value());
  CHECK(*c.m() == 0);
  CHECK(std::abs(rearrange::rearrangement_lhs(c)(0, 0) - 1.0 / lambda) < 1e-10);
  CHECK(std::abs(rearrange::rearrangement_rhs(c)(0, 0) - 1.0 / lambda) < 1e-12);
}

TEST_CASE("identity modular operator gives scalar multiples of the product") {
  const Matrix b1 = random_matrix(3), b2 = random_matrix(3);
  const auto c = make_case({1, 0, 1}, 1.0, HermitianMatrix(Matrix::Zero(3, 3)), {b1, b2});
  const double h = funcs::h_func(MultiIndex({1, 0, 1}), {1.0, 1.0}, *c.m());
  CHECK(matcalc::max_abs(rearrange::rearrangement_rhs(c) - h * b1 * b2) < 1e-12);
  CHECK(matcalc::max_abs(rearrange::rearrangement_lhs(c) - h * b1 * b2) < 1e-8);
}

TEST_CASE("rearrangement identity on random matrices") {
  for (const auto& [alpha, nu] : std::vector<std::pair<std::vector<int>, double>>{
           {{1, 0, 1}, 1.0}, {{0, 0}, 0.0}, {{0, 1}, 1.0}, {{0, 0, 0, 0}, 2.0}, {{2, 0}, -0.0}}) {
    const int p = static_cast<int>(alpha.size()) - 1;
    std::vector<Matrix> b;
    for (int j = 0; j < p; ++j) b.push_back(random_matrix(3));
    const auto c = make_case(alpha, nu, random_hermitian(3, 1.5), b);
    const Matrix rhs = rearrange::rearrangement_rhs(c);
    CHECK(matcalc::max_abs(rearrange::rearrangement_lhs(c) - rhs) <=
          1e-6 * (1.0 + matcalc::max_abs(rhs)));
  }
}

TEST_CASE("non-integer exponent for p = 1") {
  const auto c = make_case({0, 0}, 0.35, random_hermitian(3, 1.0), {random_matrix(3)});
  CHECK_FALSE(c.m().has_value());
  const Matrix rhs = rearrange::rearrangement_rhs(c);
  CHECK(matcalc::max_abs(rearrange::rearrangement_lhs(c) - rhs) <= 1e-6 * (1.0 + matcalc::max_abs(rhs)));
  const auto bad = make_case({0, 1}, 0.35, random_hermitian(2, 1.0), {random_matrix(2)});
  CHECK_THROWS(rearrange::rearrangement_rhs(bad));
}

TEST_CASE("case validation") {
  const auto c = make_case({0, 0}, 2.5, random_hermitian(2, 1.0), {random_matrix(2)});
  CHECK_THROWS(c.validate());
  const auto d = make_case({0, 0, 0}, 0.0, random_hermitian(2, 1.0), {random_matrix(2)});
  CHECK_THROWS(d.validate());
}

TEST_CASE("operator substitution for commuting families") {
  const Matrix U = random_unitary(3);
  const std::vector<HermitianMatrix> R = {positive_with(U, {0.5, 1.2, 3.0}),
                                          positive_with(U, {2.0, 0.7, 1.1}),
                                          positive_with(U, {1.3, 1.3, 0.4})};
  const auto f = rearrange::osl_integrand(MultiIndex({1, 1, 0}), 1.0);
  const auto r = rearrange::operator_substitution_check(R, f);
  CHECK(matcalc::max_abs(r.lhs - r.rhs) < 1e-8);

  // n = 0: \int (1 + u r)^{-2} du = 1 / r
  const auto f0 = rearrange::osl_integrand(MultiIndex({1}), 0.0);
  const auto r0 = rearrange::operator_substitution_check({R[0]}, f0);
  CHECK(matcalc::max_abs(r0.rhs - R[0].matrix().inverse()) < 1e-10);

  const Matrix V = random_unitary(3);
  CHECK_THROWS_AS(rearrange::operator_substitution_check({R[0], positive_with(V, {1.0, 2.0, 3.0})}, f0),
                  PreconditionError);
}

TEST_CASE("joint diagonalization") {
  const Matrix U = random_unitary(4);
  const std::vector<HermitianMatrix> R = {positive_with(U, {1.0, 1.0, 2.0, 3.0}),
                                          positive_with(U, {5.0, 4.0, 4.0, 1.0})};
  const auto js = rearrange::joint_diagonalize(R);
  for (std::size_t j = 0; j < R.size(); ++j) {
    Eigen::VectorXcd v(4);
    for (int i = 0; i < 4; ++i) v(i) = js.values[j][static_cast<std::size_t>(i)];
    const Matrix recon = js.unitary * v.asDiagonal() * js.unitary.adjoint();
    CHECK(matcalc::max_abs(recon - R[j].matrix()) < 1e-10);
  }
}

TEST_CASE("spectral Fubini") {
  const Matrix U = random_unitary(3);
  const std::vector<HermitianMatrix> R = {positive_with(U, {0.5, 1.5, 2.5})};
  const auto sep = rearrange::spectral_fubini_check(
      R, [](double u, std::span<const double> l) { return std::exp(-u) * l[0] * l[0]; });
  CHECK(matcalc::max_abs(sep.lhs - R[0].matrix() * R[0].matrix()) < 1e-10);
  const auto inv = rearrange::spectral_fubini_check(
      R, [](double u, std::span<const double> l) { return std::pow(1 + u * l[0], -2.0); });
  CHECK(matcalc::max_abs(inv.rhs - R[0].matrix().inverse()) < 1e-10);
  CHECK(matcalc::max_abs(inv.lhs - inv.rhs) < 1e-8);
}
