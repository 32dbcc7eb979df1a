#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ddcalc/errors.hpp"
#include "ddcalc/funcs.hpp"
#include "ddcalc/quad.hpp"
#include "oracles.hpp"

using namespace ddcalc;
using funcs::MultiIndex;

namespace {

// \int_0^inf x^{e} prod_j (1 + s_j x)^{-a_j - 1} dx by plain quadrature.
double m_integral(const std::vector<int>& a, const std::vector<double>& s, double e) {
  quad::QuadratureSpec spec;
  spec.tolerance = 1e-12;
  return quad::integrate_halfline(
             [&](double x) {
               double v = std::pow(x, e);
               for (std::size_t j = 0; j < a.size(); ++j) v *= std::pow(1 + s[j] * x, -a[j] - 1);
               return v;
             },
             spec)
      .value;
}

}  // namespace

TEST_CASE("multi-index arithmetic") {
  const MultiIndex a({2, 0, 1});
  CHECK(a.p() == 2);
  CHECK(a.order() == 3);
  CHECK(a.factorial() == 2.0);
  CHECK(a.prime().parts == std::vector<int>{0, 0, 1});
  CHECK_THROWS_AS(MultiIndex({-1, 0}), PreconditionError);
}

TEST_CASE("modified logarithms") {
  CHECK(funcs::mod_log(0, 2.0) == doctest::Approx(std::log(2.0)));
  CHECK(funcs::mod_log(0, 1.0) == doctest::Approx(1.0));
  CHECK(funcs::mod_log(1, 2.0) == doctest::Approx(1.0 - std::log(2.0)));
  CHECK_THROWS_AS(funcs::mod_log(0, -1.0), DomainError);
  // L_m is the integral of x^m (1+x)^{-m-1} (1+sx)^{-1}
  for (int m = 0; m <= 3; ++m) {
    for (double s : {0.3, 2.0, 7.0}) {
      CHECK(funcs::mod_log(m, s) == doctest::Approx(m_integral({m, 0}, {1.0, s}, m)).epsilon(1e-9));
    }
  }
}

TEST_CASE("M and H agree with their defining integrals") {
  CHECK(funcs::m_func(MultiIndex({0, 0}), {1.0, 2.0}, 0) == doctest::Approx(std::log(2.0)));
  CHECK(funcs::h_func(MultiIndex({0, 0}), {2.0}, 0) == doctest::Approx(std::log(2.0)));
  CHECK(funcs::h_func(MultiIndex({0, 0, 0}), {2.0, 3.0}, 0) ==
        doctest::Approx(std::log(2.0) - std::log(3.0) / 2.0));

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (const auto& a : std::vector<std::vector<int>>{{0, 1}, {1, 1}, {2, 0, 1}, {0, 1, 0, 1}}) {
    const MultiIndex alpha(a);
    const int top = alpha.order() + alpha.p() - 1;
    for (int m = 0; m <= top; ++m) {
      std::vector<double> s(a.size());
      for (double& v : s) v = u(gen);
      const double expect = m_integral(a, s, top - m);
      CHECK(funcs::m_func(alpha, s, m) == doctest::Approx(expect).epsilon(1e-8));
      CHECK(funcs::m_func_integral(alpha, s, m) == doctest::Approx(expect).epsilon(1e-8));
      CHECK(funcs::m_func_integral_dual(alpha, s, m) == doctest::Approx(expect).epsilon(1e-8));
    }
  }
  CHECK_THROWS(funcs::m_func(MultiIndex({0, 0}), {1.0, 2.0}, 1));  // m outside the strip
}

TEST_CASE("homogeneity of M") {
  // M(t s, m) = t^{m - |a| - p} M(s, m)
  const MultiIndex alpha({1, 0, 1});
  const std::vector<double> s{0.7, 1.9, 3.2};
  for (int m = 0; m <= 3; ++m) {
    for (double t : {0.5, 2.0, 3.7}) {
      std::vector<double> ts = s;
      for (double& v : ts) v *= t;
      CHECK(funcs::m_func(alpha, ts, m) ==
            doctest::Approx(std::pow(t, m - 4) * funcs::m_func(alpha, s, m)).epsilon(1e-10));
    }
  }
}

TEST_CASE("two-variable modular-curvature functions") {
  CHECK(funcs::hcm(1, 1, 1, 2.0, 3.0) == doctest::Approx(0.14384103622589046).epsilon(1e-15));
  for (double a : {0.5, 1.5, 2.0, 3.0}) {
    for (double b : {0.25, 0.75, 2.5, 4.0}) {
      CHECK(funcs::hcm(1, 1, 1, a, b) == doctest::Approx(oracle::hcm111(a, b)).epsilon(1e-12));
      for (auto [i, j, k] : std::vector<std::array<int, 3>>{
               {1, 1, 1}, {1, 2, 1}, {2, 1, 1}, {2, 2, 1}, {3, 1, 1}}) {
        const auto closed = funcs::hcm_closed_form(i, j, k, a, b);
        REQUIRE(closed.has_value());
        CHECK(*closed == doctest::Approx(funcs::hcm(i, j, k, a, b)).epsilon(1e-10));
      }
    }
  }
  CHECK_FALSE(funcs::hcm_closed_form(1, 1, 2, 2.0, 3.0).has_value());
  // (2,1,1) through one-variable modified logarithms
  const double a = 2.0, b = 3.5;
  CHECK(funcs::hcm(2, 1, 1, a, b) ==
        doctest::Approx(-(funcs::mod_log(1, b) - funcs::mod_log(1, a)) / (b - a)).epsilon(1e-12));
  // confluent diagonal stays finite
  CHECK(std::isfinite(funcs::hcm(1, 1, 1, 2.0, 2.0)));
  // H_{121} = -d/da H_{111}
  const double fd = quad::derivative([&](double x) { return funcs::hcm(1, 1, 1, x, b); }, a, 1);
  CHECK(funcs::hcm(1, 2, 1, a, b) == doctest::Approx(-fd).epsilon(1e-8));
}

TEST_CASE("Euler-operator form") {
  const funcs::HArgs zero{MultiIndex({0, 1, 0}), {1.5, 2.5}, 1};
  CHECK(funcs::euler_operator_form(zero) == doctest::Approx(funcs::h_func(zero)).epsilon(1e-10));
  const funcs::HArgs h311{MultiIndex({2, 0, 0}), {2.0, 3.0}, 0};
  CHECK(funcs::euler_operator_form(h311) ==
        doctest::Approx(funcs::hcm(3, 1, 1, 2.0, 3.0)).epsilon(1e-6));
}

TEST_CASE("Mellin transforms") {
  CHECK(funcs::mellin_basic(0.5, 0) == doctest::Approx(M_PI));
  CHECK(funcs::mellin_basic(0.5, 1) == doctest::Approx(M_PI / 2.0));
  CHECK(funcs::mellin_basic(1.0 / 3.0, 0) == doctest::Approx(2.0 * M_PI / std::sqrt(3.0)));
  CHECK_THROWS_AS(funcs::mellin_basic(1.5, 0), DomainError);
  for (int m = 0; m <= 3; ++m) {
    for (double z : {0.2, 0.5, 0.8}) {
      CHECK(funcs::mellin_basic(z, m) ==
            doctest::Approx(m_integral({m}, {1.0}, z - 1.0)).epsilon(1e-9));
    }
  }
  CHECK(funcs::m_func_general_z({1.0, 2.0}, 0.5) ==
        doctest::Approx(M_PI * (std::sqrt(2.0) - 1.0)).epsilon(1e-12));
  // q = 2, t = (1, 2, 4), z = 0.3: \int x^z prod (x + t_j)^{-1}
  quad::QuadratureSpec spec;
  spec.tolerance = 1e-12;
  const double direct = quad::integrate_halfline(
                            [](double x) { return std::pow(x, 0.3) / ((x + 1) * (x + 2) * (x + 4)); },
                            spec)
                            .value;
  CHECK(funcs::m_func_general_z({1.0, 2.0, 4.0}, 0.3) == doctest::Approx(direct).epsilon(1e-7));
  CHECK_THROWS(funcs::m_func_general_z({1.0, 2.0}, 1.0));
}

TEST_CASE("even-function identity and Bernoulli data") {
  const auto K = fn::bernoulli_even();
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.3, 1.1}, {-0.7, 2.0}, {1.5, -0.4}}) {
    const auto r = funcs::k_identity_pair(K, a, b);
    CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
  }
  CHECK_THROWS_AS(funcs::k_identity_pair(fn::exp(), 0.3, 1.1), PreconditionError);
  CHECK(funcs::bernoulli_gen(0.0) == 1.0);
  const auto c = funcs::bernoulli_coeffs(6);
  CHECK(c[1] == doctest::Approx(-0.5));
  CHECK(c[2] == doctest::Approx(1.0 / 12.0));
  CHECK(c[3] == doctest::Approx(0.0));
  CHECK(c[4] == doctest::Approx(-1.0 / 720.0));
  CHECK(funcs::bernoulli_series(0.1, 12) == doctest::Approx(funcs::bernoulli_gen(0.1)).epsilon(1e-14));
  const auto f3 = funcs::factorials(3.0, 3);
  CHECK(f3.rising == 60.0);
  CHECK(f3.falling == 6.0);
  const auto f0 = funcs::factorials(3.0, 0);
  CHECK(f0.rising == 1.0);
  CHECK(f0.falling == 1.0);
}
