#include <cmath>
#include <vector>

#include "doctest.h"
#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"
#include "ddcalc/quad.hpp"

using namespace ddcalc;

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  for (int order : {1, 2, 5, 10, 20, 40, 64}) {
    const auto& r = quad::gauss_legendre(order);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(order));
    for (int k = 0; k <= 2 * order - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < order; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(quad::gauss_legendre(0), PreconditionError);
}

TEST_CASE("adaptive interval quadrature") {
  quad::QuadratureSpec spec;
  const auto r = quad::integrate_interval([](double x) { return std::exp(x); }, 0.0, 1.0, spec);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  // integrable endpoint singularity
  const auto s = quad::integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                          spec);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-9));
  quad::QuadratureSpec tight;
  tight.max_subdivisions = 2;
  CHECK_THROWS_AS(quad::integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                           tight),
                  ToleranceError);
}

TEST_CASE("half-line quadrature") {
  quad::QuadratureSpec spec;
  auto one = quad::integrate_halfline([](double x) { return 1.0 / ((1 + x) * (1 + x)); }, spec);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-10));

  auto pi = quad::integrate_halfline([](double x) { return std::pow(x, -0.5) / (1 + x); }, spec);
  CHECK(pi.value == doctest::Approx(M_PI).epsilon(1e-9));

  // x / ((x+1)(x+2)(x+3)) against [1,2,3](x log x) by the recursion
  auto r = quad::integrate_halfline(
      [](double x) { return x / ((x + 1) * (x + 2) * (x + 3)); }, spec);
  const double dd = dd::dd_recursive(NodeSystem::from_values({1, 2, 3}), fn::idm_log(1));
  CHECK(r.value == doctest::Approx(dd).epsilon(1e-10));
  CHECK(r.value == doctest::Approx(0.26162407188227393).epsilon(1e-10));

  // slowly decaying tail x^{-1.1}
  auto tail = quad::integrate_halfline(
      [](double x) { return std::pow(x, 0.4) / ((1 + x) * (1 + x)); }, spec);
  const double exact = 0.4 * M_PI / std::sin(0.4 * M_PI);  // B(1.4, 0.6)
  CHECK(tail.value == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("matrix-valued quadrature shares one partition") {
  quad::QuadratureSpec spec;
  auto r = quad::integrate_interval(
      [](double x) {
        Eigen::Matrix2d m;
        m << 1.0, x, x * x, std::exp(x);
        return m;
      },
      0.0, 2.0, spec);
  CHECK(r.value(0, 0) == doctest::Approx(2.0));
  CHECK(r.value(0, 1) == doctest::Approx(2.0));
  CHECK(r.value(1, 0) == doctest::Approx(8.0 / 3.0));
  CHECK(r.value(1, 1) == doctest::Approx(std::exp(2.0) - 1.0));
}

TEST_CASE("simplex quadrature has volume 1/n!") {
  quad::QuadratureSpec spec;
  double fact = 1.0;
  for (int n = 1; n <= 5; ++n) {
    fact *= n;
    auto r = quad::integrate_simplex(n, [](std::span<const double>) { return 1.0; }, spec);
    CHECK(r.value == doctest::Approx(1.0 / fact).epsilon(1e-13));
  }
  // \int t_1 t_2 over 1 >= t_1 >= t_2 >= 0 = 1/8
  auto r = quad::integrate_simplex(2, [](std::span<const double> t) { return t[0] * t[1]; }, spec);
  CHECK(r.value == doctest::Approx(0.125).epsilon(1e-13));
  auto pt = quad::integrate_simplex(0, [](std::span<const double>) { return 3.0; }, spec);
  CHECK(pt.value == 3.0);
}

TEST_CASE("finite differences") {
  CHECK(quad::derivative([](double s) { return s * s; }, 3.0, 1) == doctest::Approx(6.0));
  CHECK(quad::derivative([](double s) { return std::sin(s); }, 0.3, 2) ==
        doctest::Approx(-std::sin(0.3)).epsilon(1e-8));
  std::vector<double> p{2.0}, d{2.0};
  const double v = quad::directional_derivative(
      [](std::span<const double> s) { return std::log(s[0]); }, p, d, 1);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}
