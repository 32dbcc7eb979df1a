#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"
#include "oracles.hpp"

using namespace ddcalc;

namespace {

NodeSystem nodes(std::vector<NodeSystem::Entry> e) { return NodeSystem(std::move(e)); }

// [y_0..y_n]exp = sum_k h_k(y) / (n+k)!
double exp_dd_series(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size()) - 1;
  double sum = 0.0, fact = std::tgamma(n + 1.0);
  for (int k = 0; k < 80; ++k) {
    if (k > 0) fact *= (n + k);
    sum += oracle::complete_homogeneous(y, k) / fact;
  }
  return sum;
}

}  // namespace

TEST_CASE("node systems coalesce and sort") {
  const NodeSystem s({{2.0, 1}, {1.0, 2}, {1.0 + 1e-12, 1}});
  REQUIRE(s.entries().size() == 2);
  CHECK(s.entries()[0].value == doctest::Approx(1.0));
  CHECK(s.entries()[0].multiplicity == 3);
  CHECK(s.order() == 3);
  CHECK(s.max_multiplicity() == 3);
  CHECK(s.flat() == std::vector<double>{s.entries()[0].value, s.entries()[0].value,
                                        s.entries()[0].value, 2.0});
  CHECK(NodeSystem().order() == -1);
  const NodeSystem m = s.merge(NodeSystem::from_values({2.0, 3.0}));
  CHECK(m.order() == 5);
  CHECK(m.entries()[1].multiplicity == 2);
}

TEST_CASE("documented divided-difference values") {
  const auto log = fn::log();
  const auto exp = fn::exp();
  CHECK(dd::dd_recursive(NodeSystem::from_values({1, 2}), log) == doctest::Approx(std::log(2.0)));
  CHECK(dd::dd_recursive(NodeSystem::from_values({0.7}), exp) == doctest::Approx(std::exp(0.7)));
  CHECK(dd::dd_recursive(NodeSystem::from_values({0, 1}), exp) ==
        doctest::Approx(std::exp(1.0) - 1.0));
  CHECK(dd::dd_confluent(nodes({{1.0, 2}}), log) == doctest::Approx(1.0));
  CHECK(dd::dd_confluent(nodes({{1.0, 3}}), exp) == doctest::Approx(std::exp(1.0) / 2.0));
  CHECK(dd::dd_confluent(nodes({{1.0, 2}, {2.0, 1}}), log) ==
        doctest::Approx(std::log(2.0) - 1.0));
  CHECK(dd::dd_hermite_genocchi(NodeSystem::from_values({0, 1}), exp) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(dd::dd_hermite_genocchi(NodeSystem::from_values({1, 2, 4}), log) ==
        doctest::Approx(dd::dd_recursive(NodeSystem::from_values({1, 2, 4}), log)).epsilon(1e-10));
  CHECK(dd::dd_contour(NodeSystem::from_values({1, 2}), exp, 1.5, 2.0, 64) ==
        doctest::Approx(std::exp(2.0) - std::exp(1.0)).epsilon(1e-12));
  CHECK(dd::dd_contour(nodes({{1.0, 2}}), log, 1.0, 0.5, 128) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dd::dd_contour_auto(NodeSystem::from_values({1, 2, 3}), fn::polynomial({0, 0, 1})) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("error reporting") {
  CHECK_THROWS_AS(dd::dd_recursive(nodes({{1.0, 2}}), fn::exp()), PreconditionError);
  CHECK_THROWS_AS(dd::dd_confluent(NodeSystem::from_values({-1.0, 2.0}), fn::log()), DomainError);
  // circle through the branch point
  CHECK_THROWS_AS(dd::dd_contour(NodeSystem::from_values({1, 2}), fn::log(), 1.5, 2.0, 64),
                  GeometryError);
  // only two derivatives on offer
  const ScalarFunction limited("c2", {}, 2, [](int k, double x) {
    return k == 0 ? x * x * x : (k == 1 ? 3 * x * x : 6 * x);
  });
  CHECK_THROWS_AS(dd::dd_confluent(nodes({{1.0, 4}}), limited), CapabilityError);
}

TEST_CASE("monomials give complete homogeneous polynomials") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<NodeSystem::Entry> e;
    const int distinct = 1 + trial % 4;
    for (int j = 0; j < distinct; ++j) e.push_back({u(gen) + 5.0 * j, 1 + (trial + j) % 3});
    const NodeSystem s(e);
    const int n = s.order();
    for (int k = 0; k <= 3; ++k) {
      std::vector<double> c(static_cast<std::size_t>(n + k) + 1, 0.0);
      c.back() = 1.0;
      const double expect = oracle::complete_homogeneous(s.flat(), k);
      CHECK(dd::dd_confluent(s, fn::polynomial(c)) ==
            doctest::Approx(expect).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("exponential: tableau against the power series") {
  const std::vector<std::vector<double>> cases = {
      {0.0, 0.5, 1.0},
      {0.3, 0.3, 0.3, 1.2},
      {1.0, 1.0 + 1e-3, 1.0 + 2e-3, 1.0 + 2e-3},      // clustered
      {-0.5, -0.5, -0.5, -0.499, -0.499, -0.499, 0.2},  // clustered, high multiplicity
  };
  for (const auto& y : cases) {
    const double v = dd::dd_confluent(NodeSystem::from_values(y, 0.0), fn::exp());
    CHECK(v == doctest::Approx(exp_dd_series(y)).epsilon(1e-11));
  }
  const std::vector<double> d = {-1.0, 0.25, 0.9, 2.0};
  CHECK(dd::dd_confluent(NodeSystem::from_values(d), fn::exp()) ==
        doctest::Approx(oracle::exp_dd_distinct(d)).epsilon(1e-13));
}

TEST_CASE("gaussian against the Fourier representation") {
  const auto g = fn::gaussian(1.0);
  for (const auto& x : std::vector<std::vector<double>>{{0.3}, {-0.4, 0.7}, {-1.0, 0.2, 0.9}}) {
    CHECK(dd::dd_confluent(NodeSystem::from_values(x), g) ==
          doctest::Approx(oracle::gaussian_dd_fourier(x)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("properties: symmetry, translation, Leibniz, substitution") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.5, 4.0);
  const auto log = fn::log();
  const auto exp = fn::exp();
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(4);
    for (double& v : x) v = u(gen);
    x[3] = x[1];  // one repeated node
    const NodeSystem s = NodeSystem::from_values(x);
    std::vector<double> y = x;
    std::shuffle(y.begin(), y.end(), gen);
    CHECK(dd::dd_confluent(NodeSystem::from_values(y), log) == dd::dd_confluent(s, log));

    // [x + c]f = [x](f(. + c))
    std::vector<double> shifted = x;
    for (double& v : shifted) v += 0.75;
    CHECK(dd::dd_confluent(NodeSystem::from_values(shifted), exp) ==
          doctest::Approx(dd::dd_confluent(s, fn::shifted(exp, 0.75))).epsilon(1e-12));

    // Leibniz: [x](f g) = sum_j [x_0..x_j]f [x_j..x_n]g
    const auto fg = fn::product(exp, log);
    CHECK(dd::leibniz_rhs(s, exp, log) ==
          doctest::Approx(dd::dd_confluent(s, fg)).epsilon(1e-11));

    const auto sub = dd::dd_substitute(NodeSystem::from_values({u(gen), u(gen)}), s, log);
    CHECK(sub.nested == doctest::Approx(sub.merged).epsilon(1e-11));
  }
}

TEST_CASE("partial divided difference derivative rule") {
  const NodeSystem prefix = NodeSystem::from_values({1.0, 2.5});
  const auto g = dd::partial_dd(prefix, fn::log());
  const double x = 1.7;
  // g'(x) = [1, 2.5, x, x]log
  CHECK(g.deriv(1, x) == doctest::Approx(dd::dd_confluent(nodes({{1.0, 1}, {x, 2}, {2.5, 1}}),
                                                          fn::log())));
  CHECK(g(x) == doctest::Approx(dd::dd_recursive(NodeSystem::from_values({1.0, 2.5, x}), fn::log())));
}

TEST_CASE("confluent limit is continuous") {
  const auto log = fn::log();
  const double limit = dd::dd_confluent(nodes({{2.0, 3}}), log);
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const double v = dd::dd_confluent(NodeSystem::from_values({2.0, 2.0 + eps, 2.0 + 2 * eps}, 0.0), log);
    CHECK(v == doctest::Approx(limit).epsilon(10 * eps));
  }
}
