#include "ddcalc/funcs.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"

namespace ddcalc::funcs {

namespace {

double sign_of(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

void require_positive(const std::vector<double>& s) {
  for (double v : s) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "arguments must be positive and finite, got " << v;
      throw DomainError(os.str());
    }
  }
}

void require_m_range(const MultiIndex& alpha, int m) {
  const int top = alpha.order() + alpha.p() - 1;
  if (m < 0 || m > top) {
    std::ostringstream os;
    os << "exponent m = " << m << " outside the admissible range 0.." << top;
    throw DomainError(os.str());
  }
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> p) : parts(std::move(p)) {
  for (int v : parts) {
    if (v < 0) throw PreconditionError("multi-index parts must be non-negative");
  }
}

int MultiIndex::order() const {
  int s = 0;
  for (int v : parts) s += v;
  return s;
}

double MultiIndex::factorial() const {
  double r = 1.0;
  for (int v : parts) r *= funcs::factorial(v);
  return r;
}

MultiIndex MultiIndex::prime() const {
  MultiIndex r = *this;
  if (!r.parts.empty()) r.parts[0] = 0;
  return r;
}

double mod_log(int m, double s) {
  if (m < 0) throw PreconditionError("modified logarithm index must be non-negative");
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("modified logarithm needs s > 0");
  const double h = s - 1.0;
  if (std::abs(h) < 0.1) {
    // sum_k (-1)^k h^k / (m + 1 + k)
    double sum = 0.0;
    double pw = 1.0;
    for (int k = 0; k < 200; ++k) {
      const double term = sign_of(k) * pw / (m + 1 + k);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
      pw *= h;
    }
    return sum;
  }
  double poly = 0.0;
  double pw = 1.0;
  for (int j = 1; j <= m; ++j) {
    pw *= h;
    poly += sign_of(j - 1) * pw / j;
  }
  return sign_of(m) * (std::log(s) - poly) / std::pow(h, m + 1);
}

double m_func(const MultiIndex& alpha, const std::vector<double>& s, int m) {
  if (alpha.p() < 1) throw PreconditionError("M needs p >= 1");
  if (static_cast<int>(s.size()) != alpha.p() + 1) {
    throw PreconditionError("M needs p + 1 arguments");
  }
  require_positive(s);
  require_m_range(alpha, m);
  std::vector<NodeSystem::Entry> entries;
  for (std::size_t j = 0; j < s.size(); ++j) entries.push_back({s[j], alpha.parts[j] + 1});
  const double dd = dd::dd_confluent(NodeSystem(std::move(entries)), fn::idm_log(m));
  return sign_of(m + alpha.order() + alpha.p() - 1) * dd;
}

double m_func(const HArgs& args) { return m_func(args.alpha, args.s, args.m); }

double h_func(const MultiIndex& alpha, const std::vector<double>& s, int m) {
  if (static_cast<int>(s.size()) != alpha.p()) throw PreconditionError("H needs p arguments");
  std::vector<double> full;
  full.reserve(s.size() + 1);
  full.push_back(1.0);
  full.insert(full.end(), s.begin(), s.end());
  return m_func(alpha, full, m);
}

double h_func(const HArgs& args) { return h_func(args.alpha, args.s, args.m); }

double m_func_integral(const MultiIndex& alpha, const std::vector<double>& s, double z,
                       const quad::QuadratureSpec& spec) {
  if (static_cast<int>(s.size()) != alpha.p() + 1) {
    throw PreconditionError("M needs p + 1 arguments");
  }
  require_positive(s);
  const double expo = alpha.order() + alpha.p() - 1 - z;
  auto g = [&](double x) {
    double v = std::pow(x, expo);
    for (std::size_t j = 0; j < s.size(); ++j) v *= std::pow(1.0 + s[j] * x, -alpha.parts[j] - 1);
    return v;
  };
  return quad::integrate_halfline(g, spec).value;
}

double m_func_integral_dual(const MultiIndex& alpha, const std::vector<double>& s, double z,
                            const quad::QuadratureSpec& spec) {
  if (static_cast<int>(s.size()) != alpha.p() + 1) {
    throw PreconditionError("M needs p + 1 arguments");
  }
  require_positive(s);
  auto g = [&](double x) {
    double v = std::pow(x, z);
    for (std::size_t j = 0; j < s.size(); ++j) v *= std::pow(x + s[j], -alpha.parts[j] - 1);
    return v;
  };
  return quad::integrate_halfline(g, spec).value;
}

double m_func_general_z(const std::vector<double>& t, double z) {
  const int q = static_cast<int>(t.size()) - 1;
  if (q < 1) throw PreconditionError("need at least two nodes");
  require_positive(t);
  if (std::abs(z - std::round(z)) < 1e-6) {
    throw PreconditionError("z is within 1e-6 of an integer; use m_func");
  }
  if (!(z > -1.0 && z < q)) throw DomainError("z outside the convergence strip (-1, q)");
  const NodeSystem nodes = NodeSystem::from_values(t);
  if (static_cast<int>(nodes.entries().size()) != q + 1) {
    throw PreconditionError("m_func_general_z requires pairwise distinct nodes");
  }
  const double dd = dd::dd_explicit(nodes, fn::power(z));
  return sign_of(q - 1) * std::numbers::pi / std::sin(std::numbers::pi * z) * dd;
}

double mellin_basic(double z, int m) {
  if (!(z > 0.0 && z < 1.0)) throw DomainError("mellin_basic needs 0 < z < 1");
  if (m < 0) throw PreconditionError("mellin_basic needs m >= 0");
  // rising(1 - z, m) = (-1)^m falling(z - 1, m)
  return factorials(1.0 - z, m).rising / factorial(m) * std::numbers::pi /
         std::sin(std::numbers::pi * z);
}

double hcm(int i, int j, int k, double a, double b) {
  if (i < 1 || j < 1 || k < 1) throw PreconditionError("H^CM indices must be >= 1");
  return h_func(MultiIndex({i - 1, j - 1, k - 1}), {a, b}, 0);
}

std::optional<double> hcm_closed_form(int i, int j, int k, double a, double b) {
  const int key = 100 * i + 10 * j + k;
  if (key != 111 && key != 121 && key != 211 && key != 221 && key != 311) return std::nullopt;
  require_positive({a, b});
  if (a == 1.0 || b == 1.0 || a == b) {
    throw DomainError("closed forms need a, b, 1 pairwise distinct");
  }
  const double la = std::log(a), lb = std::log(b);
  const double a1 = a - 1.0, b1 = b - 1.0, ba = b - a;
  switch (key) {
    case 111:
      return la / (a1 * ba) - lb / (b1 * ba);
    case 121:
      return (b - 2 * a + 1) * la / (a1 * a1 * ba * ba) + lb / (b1 * ba * ba) -
             1.0 / (ba * a1 * a);
    case 211:
      return -la / (ba * a1 * a1) + lb / (b1 * b1 * ba) + 1.0 / (b1 * a1);
    case 221:
      return -(2 * b - 3 * a + 1) * la / (ba * ba * a1 * a1 * a1) - lb / (b1 * b1 * ba * ba) +
             ((a + 1) * b - a * a - 1) / (b1 * ba * a1 * a1 * a);
    default:  // 311
      return la / (ba * a1 * a1 * a1) - lb / (ba * b1 * b1 * b1) +
             ((a - 3) * b - 3 * a + 5) / (2 * b1 * b1 * a1 * a1);
  }
}

double euler_operator_form(const HArgs& args, const quad::DiffSpec& spec) {
  const MultiIndex& alpha = args.alpha;
  const int p = alpha.p();
  if (p < 1) throw PreconditionError("H needs p >= 1");
  if (static_cast<int>(args.s.size()) != p) throw PreconditionError("H needs p arguments");
  require_positive(args.s);
  const MultiIndex ap = alpha.prime();
  const int m = args.m;
  if (m < 0 || m > ap.order() + p - 1) {
    throw DomainError("Euler-operator form needs 0 <= m <= |a'| + p - 1");
  }
  if (alpha.order() > 3) throw PreconditionError("Euler-operator form supports |a| <= 3");
  const int a0 = alpha.parts[0];
  const double c = alpha.order() + p - 1 - m;

  // Coefficients of prod_{i<a0} (E + c - i) as a polynomial in E.
  std::vector<double> poly{1.0};
  for (int i = 0; i < a0; ++i) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k] += poly[k] * (c - i);
      next[k + 1] += poly[k];
    }
    poly = std::move(next);
  }

  const ScalarFunction f = fn::idm_log(m);
  const double ap_fact = ap.factorial();
  auto inner = [&](double tau) {
    const double scale = std::exp(tau);
    std::vector<NodeSystem::Entry> entries{{1.0, 1}};
    for (int k = 1; k <= p; ++k) entries.push_back({args.s[k - 1] * scale, alpha.parts[k] + 1});
    return ap_fact * dd::dd_confluent(NodeSystem(std::move(entries)), f);
  };

  // E^k G(s) = d^k/dtau^k G(e^tau s) at tau = 0.
  double acc = poly[0] * inner(0.0);
  for (std::size_t k = 1; k < poly.size(); ++k) {
    if (poly[k] == 0.0) continue;
    acc += poly[k] * quad::derivative(inner, 0.0, static_cast<int>(k), spec);
  }
  return sign_of(ap.order() + p - 1 - m) / alpha.factorial() * acc;
}

IdentityPair k_identity_pair(const ScalarFunction& K, double a, double b) {
  if (a == 0.0 || b == 0.0 || a + b == 0.0) {
    throw PreconditionError("k_identity_pair needs a, b, a + b nonzero");
  }
  for (double x : {a, b, a + b}) {
    const double kp = K(x), km = K(-x);
    if (std::abs(kp - km) > 1e-12 * std::max(1.0, std::abs(kp))) {
      throw PreconditionError("K is not even");
    }
  }
  const double ka = K(a), kb = K(b), kab = K(a + b);
  IdentityPair r{};
  r.lhs = (kb - ka) / (a + b) + (kab - kb) / a - (kab - ka) / b;
  auto dd2 = [&](double x, double y) {
    return dd::dd_confluent(NodeSystem::from_values({x, y}), K);
  };
  r.rhs = dd2(-a, b) + dd2(a + b, b) - dd2(a + b, a);
  return r;
}

double bernoulli_gen(double s) {
  if (s == 0.0) return 1.0;
  return s / std::expm1(s);
}

std::vector<double> bernoulli_coeffs(int n) {
  if (n < 0) throw PreconditionError("bernoulli_coeffs needs n >= 0");
  // sum_{k<=j} C(j+1, k) B_k = 0 divided by (j+1)!: sum_k c_k / (j+1-k)! = 0.
  std::vector<double> inv_fact(static_cast<std::size_t>(n + 2));
  inv_fact[0] = 1.0;
  for (int k = 1; k <= n + 1; ++k) inv_fact[static_cast<std::size_t>(k)] = inv_fact[k - 1] / k;
  std::vector<double> c(static_cast<std::size_t>(n + 1));
  c[0] = 1.0;
  for (int j = 1; j <= n; ++j) {
    double s = 0.0;
    for (int k = 0; k < j; ++k) s += c[static_cast<std::size_t>(k)] * inv_fact[j + 1 - k];
    c[static_cast<std::size_t>(j)] = -s;
  }
  return c;
}

double bernoulli_series(double s, int n) {
  const auto c = bernoulli_coeffs(n);
  double acc = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * s + c[j];
  return acc;
}

Factorials factorials(double a, int n) {
  if (n < 0) throw PreconditionError("factorial length must be >= 0");
  Factorials r{1.0, 1.0};
  for (int i = 0; i < n; ++i) {
    r.rising *= a + i;
    r.falling *= a - i;
  }
  return r;
}

}  // namespace ddcalc::funcs
