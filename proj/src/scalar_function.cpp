#include "ddcalc/scalar_function.hpp"

#include <cmath>
#include <sstream>

#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"
#include "ddcalc/funcs.hpp"

namespace ddcalc {

ScalarFunction::ScalarFunction(std::string name, Interval domain, int max_order, DerivFn deriv,
                               ComplexFn complex_eval, std::optional<double> singular_edge)
    : name_(std::move(name)),
      domain_(domain),
      max_order_(max_order),
      deriv_(std::move(deriv)),
      complex_(std::move(complex_eval)),
      singular_edge_(singular_edge) {}

double ScalarFunction::deriv(int k, double x) const {
  if (k < 0) throw PreconditionError("derivative order must be non-negative");
  if (k > max_order_) {
    std::ostringstream os;
    os << name_ << " supports derivatives up to order " << max_order_ << ", requested " << k;
    throw CapabilityError(os.str());
  }
  if (!domain_.contains(x)) {
    std::ostringstream os;
    os.precision(17);
    os << name_ << " evaluated outside its domain at x = " << x;
    throw DomainError(os.str());
  }
  return deriv_(k, x);
}

std::complex<double> ScalarFunction::eval_complex(std::complex<double> z) const {
  if (!complex_) throw CapabilityError(name_ + " has no complex extension");
  return complex_(z);
}

namespace fn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const Interval kPositive{0.0, kInf};

double falling(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a - i;
  return r;
}

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

ScalarFunction exp() { return exp_scaled(1.0); }

ScalarFunction exp_scaled(double c) {
  std::ostringstream name;
  name << "exp";
  if (c != 1.0) name << "(" << c << "x)";
  return ScalarFunction(
      name.str(), Interval{}, ScalarFunction::kUnbounded,
      [c](int k, double x) { return std::pow(c, k) * std::exp(c * x); },
      [c](std::complex<double> z) { return std::exp(c * z); });
}

ScalarFunction log() { return idm_log(0); }

ScalarFunction idm_log(int m) {
  if (m < 0) throw PreconditionError("idm_log exponent must be non-negative");
  // f^(k)(x) = m^(k falling) x^{m-k} log x + c_{m,k} x^{m-k}, with
  // c_{m,0} = 0 and c_{m,k+1} = (m - k) c_{m,k} + m^(k falling).
  auto deriv = [m](int k, double x) {
    double c = 0.0;
    for (int j = 0; j < k; ++j) c = (m - j) * c + falling(m, j);
    const double xp = std::pow(x, m - k);
    return falling(m, k) * xp * std::log(x) + c * xp;
  };
  auto cplx = [m](std::complex<double> z) { return std::pow(z, m) * std::log(z); };
  std::string name = m == 0 ? "log" : "idmlog:" + std::to_string(m);
  return ScalarFunction(name, kPositive, ScalarFunction::kUnbounded, deriv, cplx, 0.0);
}

ScalarFunction power(double z) {
  std::ostringstream name;
  name.precision(17);
  name << "pow:" << z;
  return ScalarFunction(
      name.str(), kPositive, ScalarFunction::kUnbounded,
      [z](int k, double x) { return falling(z, k) * std::pow(x, z - k); },
      [z](std::complex<double> w) { return std::exp(z * std::log(w)); }, 0.0);
}

ScalarFunction polynomial(std::vector<double> coeffs) {
  std::ostringstream name;
  name.precision(17);
  name << "poly:";
  for (std::size_t i = 0; i < coeffs.size(); ++i) name << (i ? "," : "") << coeffs[i];
  auto deriv = [coeffs](int k, double x) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > static_cast<std::size_t>(k);) {
      acc = acc * x + coeffs[i] * falling(static_cast<double>(i), k);
    }
    return acc;
  };
  auto cplx = [coeffs](std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
    return acc;
  };
  return ScalarFunction(name.str(), Interval{}, ScalarFunction::kUnbounded, deriv, cplx);
}

ScalarFunction identity() { return polynomial({0.0, 1.0}); }

ScalarFunction gaussian(double width) {
  if (!(width > 0.0)) throw PreconditionError("gaussian width must be positive");
  // d^k/dx^k exp(-y^2), y = x / w, equals (-1)^k H_k(y) exp(-y^2) / w^k with
  // physicists' Hermite polynomials.
  auto deriv = [width](int k, double x) {
    const double y = x / width;
    double h_prev = 1.0, h = 2.0 * y;
    double hk = 1.0;
    if (k == 1) hk = h;
    for (int j = 1; j < k; ++j) {
      const double next = 2.0 * y * h - 2.0 * j * h_prev;
      h_prev = h;
      h = next;
      hk = h;
    }
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * hk * std::exp(-y * y) / std::pow(width, k);
  };
  auto cplx = [width](std::complex<double> z) {
    const std::complex<double> y = z / width;
    return std::exp(-y * y);
  };
  std::string name = width == 1.0 ? "gaussian" : "gaussian:" + std::to_string(width);
  return ScalarFunction(name, Interval{}, ScalarFunction::kUnbounded, deriv, cplx);
}

ScalarFunction cosh_scaled(double c) {
  return ScalarFunction(
      "cosh", Interval{}, ScalarFunction::kUnbounded,
      [c](int k, double x) {
        return std::pow(c, k) * (k % 2 == 0 ? std::cosh(c * x) : std::sinh(c * x));
      },
      [c](std::complex<double> z) { return std::cosh(c * z); });
}

ScalarFunction basic() {
  return ScalarFunction(
      "basic", Interval{-1.0, kInf}, ScalarFunction::kUnbounded,
      [](int k, double x) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        return sign * factorial(k) / std::pow(1.0 + x, k + 1);
      },
      [](std::complex<double> z) { return 1.0 / (1.0 + z); }, -1.0);
}

ScalarFunction mod_log(int m) {
  if (m < 0) throw PreconditionError("modified logarithm index must be non-negative");
  // L_m^(k)(s) / k! = (-1)^m [1^{m+1}, s^{k+1}] log.
  auto deriv = [m](int k, double s) {
    if (k == 0) return funcs::mod_log(m, s);
    const NodeSystem nodes({{1.0, m + 1}, {s, k + 1}});
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * factorial(k) * dd::dd_confluent(nodes, log());
  };
  return ScalarFunction("modlog:" + std::to_string(m), kPositive, ScalarFunction::kUnbounded,
                        deriv);
}

ScalarFunction bernoulli() {
  static const std::vector<double> coeffs = funcs::bernoulli_coeffs(40);
  auto deriv = [](int k, double x) {
    if (std::abs(x) < 1.0) {
      // sum_j B_j / j! x^j differentiated k times
      double acc = 0.0;
      for (std::size_t j = coeffs.size(); j-- > static_cast<std::size_t>(k);) {
        acc = acc * x + coeffs[j] * falling(static_cast<double>(j), k);
      }
      return acc;
    }
    const double e = std::exp(x);
    const double d = std::expm1(x);
    switch (k) {
      case 0:
        return x / d;
      case 1:
        return 1.0 / d - x * e / (d * d);
      default:
        return (-2.0 * e - x * e) / (d * d) + 2.0 * x * e * e / (d * d * d);
    }
  };
  return ScalarFunction("bernoulli", Interval{}, 2, deriv);
}

ScalarFunction bernoulli_even() {
  const ScalarFunction b = bernoulli();
  auto deriv = [b](int k, double x) {
    const double base = b.deriv(k, x);
    if (k == 0) return base + 0.5 * x;
    if (k == 1) return base + 0.5;
    return base;
  };
  return ScalarFunction("bernoulli_even", Interval{}, 2, deriv);
}

ScalarFunction product(const ScalarFunction& f, const ScalarFunction& g) {
  const Interval dom{std::max(f.domain().lo, g.domain().lo),
                     std::min(f.domain().hi, g.domain().hi)};
  auto deriv = [f, g](int k, double x) {
    double acc = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      acc += binom * f.deriv(j, x) * g.deriv(k - j, x);
      binom = binom * (k - j) / (j + 1);
    }
    return acc;
  };
  ScalarFunction::ComplexFn cplx;
  if (f.has_complex() && g.has_complex()) {
    cplx = [f, g](std::complex<double> z) { return f.eval_complex(z) * g.eval_complex(z); };
  }
  std::optional<double> edge = f.singular_edge();
  if (g.singular_edge() && (!edge || *g.singular_edge() > *edge)) edge = g.singular_edge();
  return ScalarFunction(f.name() + "*" + g.name(), dom, std::min(f.max_order(), g.max_order()),
                        deriv, cplx, edge);
}

ScalarFunction shifted(const ScalarFunction& f, double c) {
  const Interval dom{f.domain().lo - c, f.domain().hi - c};
  ScalarFunction::ComplexFn cplx;
  if (f.has_complex()) cplx = [f, c](std::complex<double> z) { return f.eval_complex(z + c); };
  std::optional<double> edge;
  if (f.singular_edge()) edge = *f.singular_edge() - c;
  std::ostringstream name;
  name.precision(17);
  name << f.name() << "(x+" << c << ")";
  return ScalarFunction(
      name.str(), dom, f.max_order(), [f, c](int k, double x) { return f.deriv(k, x + c); }, cplx,
      edge);
}

namespace {

int parse_index(const std::string& name, const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("bad index in function name '" + name + "'");
  }
}

}  // namespace

ScalarFunction from_name(const std::string& name) {
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : name.substr(colon + 1);
  if (head == "exp" && tail.empty()) return exp();
  if (head == "log" && tail.empty()) return log();
  if (head == "gaussian" && tail.empty()) return gaussian();
  if (head == "cosh" && tail.empty()) return cosh_scaled(1.0);
  if (head == "basic" && tail.empty()) return basic();
  if (head == "bernoulli" && tail.empty()) return bernoulli();
  if (head == "idmlog" && !tail.empty()) return idm_log(parse_index(name, tail));
  if (head == "modlog" && !tail.empty()) return mod_log(parse_index(name, tail));
  if (head == "poly" && !tail.empty()) {
    std::vector<double> coeffs;
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        coeffs.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw PreconditionError("bad coefficient in '" + name + "'");
      }
    }
    return polynomial(std::move(coeffs));
  }
  throw PreconditionError("unknown function '" + name + "'");
}

}  // namespace fn

}  // namespace ddcalc
