#include "ddcalc/quad.hpp"

#include <array>
#include <numbers>

namespace ddcalc::quad {

void QuadratureSpec::validate() const {
  if (!(tolerance > 0.0)) throw PreconditionError("quadrature tolerance must be positive");
  if (base_order < 2 || base_order > 64) {
    throw PreconditionError("quadrature base_order must lie in [2, 64]");
  }
  if (max_subdivisions < 1) throw PreconditionError("max_subdivisions must be >= 1");
  if (abs_tolerance < 0.0) throw PreconditionError("abs_tolerance must be non-negative");
}

void DiffSpec::validate() const {
  if (!(base_step > 0.0)) throw PreconditionError("base_step must be positive");
  if (richardson_levels < 1) throw PreconditionError("richardson_levels must be >= 1");
}

namespace {

constexpr int kMaxOrder = 64;

// Newton iteration on P_n started from the Chebyshev-like guess.
GaussLegendreRule build_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z_prev = z;
      z = z_prev - p1 / dp;
      if (std::abs(z - z_prev) <= 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
  static const std::array<GaussLegendreRule, kMaxOrder + 1> table = [] {
    std::array<GaussLegendreRule, kMaxOrder + 1> t;
    for (int n = 1; n <= kMaxOrder; ++n) t[static_cast<std::size_t>(n)] = build_rule(n);
    return t;
  }();
  if (order < 1 || order > kMaxOrder) {
    throw PreconditionError("Gauss-Legendre order must lie in [1, 64]");
  }
  return table[static_cast<std::size_t>(order)];
}

namespace {

// Central difference of the requested order with step h; every stencil has
// an error expansion in even powers of h.
double central_difference(const std::function<double(double)>& phi, int order, double h) {
  auto sample = [&](double s) {
    const double v = phi(s);
    if (!std::isfinite(v)) throw DomainError("non-finite sample in finite difference");
    return v;
  };
  switch (order) {
    case 1:
      return (sample(h) - sample(-h)) / (2.0 * h);
    case 2:
      return (sample(h) - 2.0 * sample(0.0) + sample(-h)) / (h * h);
    case 3:
      return (sample(2.0 * h) - 2.0 * sample(h) + 2.0 * sample(-h) - sample(-2.0 * h)) /
             (2.0 * h * h * h);
    default:
      throw PreconditionError("finite-difference order must be 1, 2 or 3");
  }
}

double richardson(const std::function<double(double)>& phi, int order, const DiffSpec& spec) {
  spec.validate();
  const int levels = spec.richardson_levels;
  std::vector<std::vector<double>> table(static_cast<std::size_t>(levels));
  double h = spec.base_step;
  for (int j = 0; j < levels; ++j, h *= 0.5) {
    auto& row = table[static_cast<std::size_t>(j)];
    row.resize(static_cast<std::size_t>(j + 1));
    row[0] = central_difference(phi, order, h);
    double factor = 4.0;
    for (int k = 1; k <= j; ++k, factor *= 4.0) {
      const double prev = table[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)];
      row[static_cast<std::size_t>(k)] =
          row[static_cast<std::size_t>(k - 1)] + (row[static_cast<std::size_t>(k - 1)] - prev) / (factor - 1.0);
    }
  }
  return table.back().back();
}

}  // namespace

double directional_derivative(const MultiFunction& f, std::span<const double> point,
                              std::span<const double> direction, int order,
                              const DiffSpec& spec) {
  if (point.size() != direction.size()) {
    throw PreconditionError("point and direction must have the same length");
  }
  std::vector<double> x(point.size());
  auto phi = [&](double s) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = point[i] + s * direction[i];
    return f(std::span<const double>(x));
  };
  return richardson(phi, order, spec);
}

double derivative(const std::function<double(double)>& f, double x, int order,
                  const DiffSpec& spec) {
  return richardson([&](double s) { return f(x + s); }, order, spec);
}

}  // namespace ddcalc::quad
