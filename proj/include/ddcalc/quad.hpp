#pragma once

// Shared numerical utilities: Gauss-Legendre rules, adaptive quadrature on
// finite intervals and on the half line, tensorized rules on the ordered
// simplex, and Richardson-extrapolated finite differences.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "ddcalc/errors.hpp"

namespace ddcalc::quad {

enum class Rule { gauss_legendre };
enum class HalflineMap { rational };  // x = t / (1 - t)

struct QuadratureSpec {
  Rule rule = Rule::gauss_legendre;
  int base_order = 10;
  double tolerance = 1e-10;       // relative to the magnitude of the result
  double abs_tolerance = 0.0;     // absolute floor, useful for vanishing integrals
  int max_subdivisions = 4000;
  HalflineMap halfline_map = HalflineMap::rational;

  void validate() const;
};

struct DiffSpec {
  double base_step = 0.02;
  int richardson_levels = 4;

  void validate() const;
};

template <class T>
struct QuadResult {
  T value;
  double error = 0.0;
  int subdivisions = 0;
};

// Nodes and weights on [-1, 1]; orders 1..64.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(int order);

inline double max_abs(double v) { return std::abs(v); }
inline double max_abs(std::complex<double> v) { return std::abs(v); }
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

namespace detail {

template <class T>
bool all_finite(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::isfinite(v);
  } else if constexpr (std::is_same_v<T, std::complex<double>>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return v.allFinite();
  }
}

template <class F>
using interval_value_t = std::decay_t<std::invoke_result_t<F&, double>>;

template <class F>
interval_value_t<F> fixed_rule(F& g, double a, double b, const GaussLegendreRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  interval_value_t<F> sum = (rule.weights[0] * half) * g(mid + half * rule.nodes[0]);
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
    sum += (rule.weights[i] * half) * g(mid + half * rule.nodes[i]);
  }
  return sum;
}

}  // namespace detail

// Globally adaptive Gauss-Legendre on [a, b]. Each panel is integrated with
// orders p and 2p; the difference is the panel error estimate and the 2p
// value is kept. Vector/matrix integrands share one partition, driven by
// the max-entry error.
template <class F>
QuadResult<detail::interval_value_t<F>> integrate_interval(F&& g, double a, double b,
                                                           const QuadratureSpec& spec) {
  using T = detail::interval_value_t<F>;
  spec.validate();
  const auto& lo_rule = gauss_legendre(spec.base_order);
  const auto& hi_rule = gauss_legendre(std::min(2 * spec.base_order, 64));

  struct Panel {
    double a, b;
    T value;
    double err;
  };
  auto make_panel = [&](double pa, double pb) {
    T hi = detail::fixed_rule(g, pa, pb, hi_rule);
    T lo = detail::fixed_rule(g, pa, pb, lo_rule);
    double err = max_abs(hi - lo);
    if (!detail::all_finite(hi) || !std::isfinite(err)) {
      throw DomainError("integrand is not finite on the integration interval");
    }
    return Panel{pa, pb, std::move(hi), err};
  };
  auto by_error = [](const Panel& x, const Panel& y) { return x.err < y.err; };

  std::vector<Panel> panels;
  panels.push_back(make_panel(a, b));
  T total = panels.front().value;
  double total_err = panels.front().err;

  auto converged = [&] {
    return total_err <= std::max(spec.tolerance * max_abs(total), spec.abs_tolerance);
  };
  while (!converged()) {
    if (static_cast<int>(panels.size()) >= spec.max_subdivisions) {
      throw ToleranceError("adaptive quadrature exceeded max_subdivisions",
                           max_abs(total), total_err);
    }
    std::pop_heap(panels.begin(), panels.end(), by_error);
    Panel worst = std::move(panels.back());
    panels.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw ToleranceError("adaptive quadrature reached machine resolution",
                           max_abs(total), total_err);
    }
    Panel left = make_panel(worst.a, mid);
    Panel right = make_panel(mid, worst.b);
    total -= worst.value;
    total += left.value;
    total += right.value;
    total_err += left.err + right.err - worst.err;
    panels.push_back(std::move(left));
    std::push_heap(panels.begin(), panels.end(), by_error);
    panels.push_back(std::move(right));
    std::push_heap(panels.begin(), panels.end(), by_error);
  }

  // Final reduction in left-to-right order so the result does not depend on
  // the heap layout.
  std::sort(panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  T sum = panels.front().value;
  double err = panels.front().err;
  for (std::size_t i = 1; i < panels.size(); ++i) {
    sum += panels[i].value;
    err += panels[i].err;
  }
  return {std::move(sum), err, static_cast<int>(panels.size())};
}

// Integral over (0, inf) through x = t / (1 - t), dx = dt / (1 - t)^2.
// The upper half t in [1/2, 1) is parametrized by s = 1 - t so that panels
// crowding towards the slowly decaying tail keep full floating resolution.
template <class F>
QuadResult<detail::interval_value_t<F>> integrate_halfline(F&& g, const QuadratureSpec& spec) {
  using T = detail::interval_value_t<F>;
  auto lower = [&g](double t) -> T {
    const double s = 1.0 - t;
    T v = g(t / s);
    v *= 1.0 / (s * s);
    return v;
  };
  auto upper = [&g](double s) -> T {
    T v = g((1.0 - s) / s);
    v *= 1.0 / (s * s);
    return v;
  };
  auto head = integrate_interval(lower, 0.0, 0.5, spec);
  auto tail = integrate_interval(upper, 0.0, 0.5, spec);
  T sum = std::move(head.value);
  sum += tail.value;
  return {std::move(sum), head.error + tail.error, head.subdivisions + tail.subdivisions};
}

namespace detail {

template <class F>
using simplex_value_t = std::decay_t<std::invoke_result_t<F&, std::span<const double>>>;

// Tensor Gauss-Legendre rule of the given order on a box in collapsed
// coordinates v in [0,1]^n, where t_1 = v_1 and t_k = t_{k-1} v_k. The
// Jacobian of this Duffy-type map is t_1 t_2 ... t_{n-1}.
template <class F>
simplex_value_t<F> simplex_box_rule(F& g, int n, std::span<const double> lo,
                                    std::span<const double> hi, int order) {
  using T = simplex_value_t<F>;
  const auto& rule = gauss_legendre(order);
  const std::size_t un = static_cast<std::size_t>(n);
  // Mapped abscissae and scaled weights per axis.
  std::vector<double> v(un * static_cast<std::size_t>(order)), w(v.size());
  for (std::size_t k = 0; k < un; ++k) {
    const double mid = 0.5 * (lo[k] + hi[k]);
    const double half = 0.5 * (hi[k] - lo[k]);
    for (int i = 0; i < order; ++i) {
      v[k * order + i] = mid + half * rule.nodes[i];
      w[k * order + i] = half * rule.weights[i];
    }
  }
  std::vector<double> t(un), weight(un);
  std::vector<int> idx(un, 0);
  // Fill levels k..n-2 from the current indices.
  auto refresh = [&](std::size_t k) {
    for (; k + 1 < un; ++k) {
      const double prev_t = k == 0 ? 1.0 : t[k - 1];
      const double prev_w = k == 0 ? 1.0 : weight[k - 1];
      t[k] = prev_t * v[k * order + idx[k]];
      weight[k] = prev_w * w[k * order + idx[k]] * t[k];
    }
  };
  refresh(0);
  std::optional<T> sum;
  const std::size_t last = un - 1;
  while (true) {
    const double prev_t = last == 0 ? 1.0 : t[last - 1];
    const double prev_w = last == 0 ? 1.0 : weight[last - 1];
    for (int i = 0; i < order; ++i) {
      t[last] = prev_t * v[last * order + i];
      const double wi = prev_w * w[last * order + i];
      T val = g(std::span<const double>(t));
      if (sum) {
        *sum += wi * val;
      } else {
        sum.emplace(wi * val);
      }
    }
    // Odometer increment over levels 0..n-2.
    std::size_t k = last;
    while (k > 0) {
      --k;
      if (++idx[k] < order) break;
      idx[k] = 0;
      if (k == 0) return std::move(*sum);
    }
    if (last == 0) return std::move(*sum);
    refresh(k);
  }
}

}  // namespace detail

// Integral of g over the ordered simplex 1 >= t_1 >= ... >= t_n >= 0.
// g receives (t_1, ..., t_n). For n = 0 the simplex is a point of unit mass.
// Orders ramp up until two successive rules agree; if the ramp is exhausted
// the cube of collapsed coordinates is bisected adaptively.
template <class F>
QuadResult<detail::simplex_value_t<F>> integrate_simplex(int n, F&& g, const QuadratureSpec& spec) {
  using T = detail::simplex_value_t<F>;
  spec.validate();
  if (n < 0) throw PreconditionError("simplex dimension must be non-negative");
  if (n == 0) {
    std::vector<double> none;
    return {g(std::span<const double>(none)), 0.0, 0};
  }
  const int first_order = n >= 4 ? 8 : 12;
  const int last_order = n >= 4 ? 20 : 24;
  std::vector<double> lo(static_cast<std::size_t>(n), 0.0), hi(static_cast<std::size_t>(n), 1.0);

  auto accept = [&](const T& value, double err) {
    return err <= std::max(spec.tolerance * max_abs(value), spec.abs_tolerance);
  };

  // Successive differences shrink geometrically for analytic integrands;
  // once two of them are available the error of the newest rule is
  // estimated from their ratio.
  T prev = detail::simplex_box_rule(g, n, lo, hi, first_order);
  double prev_diff = -1.0;
  for (int q = first_order + 4; q <= last_order; q += 4) {
    T cur = detail::simplex_box_rule(g, n, lo, hi, q);
    const double diff = max_abs(cur - prev);
    if (!detail::all_finite(cur) || !std::isfinite(diff)) {
      throw DomainError("simplex integrand is not finite");
    }
    double err = diff;
    if (prev_diff > 0.0 && diff < 0.5 * prev_diff) {
      const double r = diff / prev_diff;
      err = std::max(diff * r / (1.0 - r), 1e-15 * max_abs(cur));
    }
    if (accept(cur, err)) return {std::move(cur), err, 1};
    prev = std::move(cur);
    prev_diff = diff;
  }

  // Bisection fallback with a fixed pair of orders per box.
  const int q_hi = last_order;
  const int q_lo = last_order - 4;
  struct Box {
    std::vector<double> lo, hi;
    int depth;
    T value;
    double err;
  };
  auto make_box = [&](std::vector<double> blo, std::vector<double> bhi, int depth) {
    T h = detail::simplex_box_rule(g, n, blo, bhi, q_hi);
    T l = detail::simplex_box_rule(g, n, blo, bhi, q_lo);
    double err = max_abs(h - l);
    return Box{std::move(blo), std::move(bhi), depth, std::move(h), err};
  };
  auto by_error = [](const Box& x, const Box& y) { return x.err < y.err; };
  std::vector<Box> boxes;
  boxes.push_back(make_box(lo, hi, 0));
  T total = boxes.front().value;
  double total_err = boxes.front().err;
  while (!accept(total, total_err)) {
    if (static_cast<int>(boxes.size()) >= spec.max_subdivisions) {
      throw ToleranceError("simplex quadrature exceeded max_subdivisions", max_abs(total),
                           total_err);
    }
    std::pop_heap(boxes.begin(), boxes.end(), by_error);
    Box worst = std::move(boxes.back());
    boxes.pop_back();
    const int axis = worst.depth % n;
    const double mid = 0.5 * (worst.lo[axis] + worst.hi[axis]);
    std::vector<double> left_hi = worst.hi, right_lo = worst.lo;
    left_hi[axis] = mid;
    right_lo[axis] = mid;
    Box left = make_box(worst.lo, std::move(left_hi), worst.depth + 1);
    Box right = make_box(std::move(right_lo), worst.hi, worst.depth + 1);
    total -= worst.value;
    total += left.value;
    total += right.value;
    total_err += left.err + right.err - worst.err;
    boxes.push_back(std::move(left));
    std::push_heap(boxes.begin(), boxes.end(), by_error);
    boxes.push_back(std::move(right));
    std::push_heap(boxes.begin(), boxes.end(), by_error);
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& x, const Box& y) { return x.lo < y.lo; });
  T sum = boxes.front().value;
  double err = boxes.front().err;
  for (std::size_t i = 1; i < boxes.size(); ++i) {
    sum += boxes[i].value;
    err += boxes[i].err;
  }
  return {std::move(sum), err, static_cast<int>(boxes.size())};
}

using MultiFunction = std::function<double(std::span<const double>)>;

// Derivative of the given order (1, 2 or 3) of s -> F(point + s * direction)
// at s = 0: central differences on halving steps, Richardson extrapolated.
double directional_derivative(const MultiFunction& f, std::span<const double> point,
                              std::span<const double> direction, int order,
                              const DiffSpec& spec = {});

// One-variable convenience form.
double derivative(const std::function<double(double)>& f, double x, int order,
                  const DiffSpec& spec = {});

}  // namespace ddcalc::quad
