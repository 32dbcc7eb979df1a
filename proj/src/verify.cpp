#include "ddcalc/verify.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"
#include "ddcalc/expand.hpp"
#include "ddcalc/funcs.hpp"
#include "ddcalc/quad.hpp"
#include "ddcalc/rearrange.hpp"

namespace ddcalc::verify {

using matcalc::Complex;
using matcalc::HermitianMatrix;
using matcalc::Matrix;

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next() % span);
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix Rng::general(int dim, double scale) {
  Matrix m(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      const double re = normal();
      const double im = normal();
      m(i, j) = Complex(re, im) * (scale / std::sqrt(2.0));
    }
  }
  return m;
}

// Scaled to spectral norm `scale`.
Matrix Rng::hermitian(int dim, double scale) {
  const Matrix g = general(dim, 1.0);
  Matrix h = ((g + g.adjoint()) * 0.5).eval();
  const double n = matcalc::spectral_norm(h);
  if (n > 0.0) h *= scale / n;
  return ((h + h.adjoint()) * 0.5).eval();
}

Matrix Rng::unitary(int dim) {
  const Matrix g = general(dim, 1.0);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

bool SuiteReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseRecord& c) { return c.pass; });
}

std::size_t SuiteReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [](const CaseRecord& c) { return !c.pass; }));
}

double SuiteReport::worst_ratio() const {
  double worst = 0.0;
  for (const auto& c : cases) {
    if (!c.error.empty() || !std::isfinite(c.delta)) return std::numeric_limits<double>::infinity();
    if (c.tolerance > 0.0) {
      worst = std::max(worst, c.delta / c.tolerance);
    } else if (c.delta > 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("DDCALC_SEED")) {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec == std::errc() && ptr == end && ptr != env) return v;
  }
  return 1;
}

namespace {

// ---------------------------------------------------------------------------
// Formatting of case inputs.

std::string num(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s + "]";
}

std::string ilist(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

std::string nodes_str(const NodeSystem& ns) {
  std::string s;
  for (const auto& e : ns.entries()) {
    if (!s.empty()) s += ",";
    s += num(e.value) + ":" + std::to_string(e.multiplicity);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Per-check context.

struct Ctx {
  std::string check;
  Rng rng;
  const RunConfig& cfg;
  std::vector<CaseRecord>& out;
  int index = 0;

  int count(int fallback) const { return cfg.cases > 0 ? cfg.cases : fallback; }
  int dim(int lo, int hi) { return cfg.dim > 0 ? cfg.dim : rng.integer(lo, hi); }

  void push(const std::string& inputs, double lhs, double rhs, double delta, double threshold) {
    CaseRecord r;
    r.check = check;
    r.index = index++;
    r.inputs = inputs;
    r.lhs = lhs;
    r.rhs = rhs;
    r.delta = delta;
    r.tolerance = threshold;
    r.pass = std::isfinite(delta) && delta <= threshold;
    out.push_back(std::move(r));
  }

  // |lhs - rhs| <= tol * max(1, |rhs|)
  void scalar(const std::string& in, double lhs, double rhs, double tol) {
    push(in, lhs, rhs, std::abs(lhs - rhs), tol * cfg.tol_scale * std::max(1.0, std::abs(rhs)));
  }

  void complex(const std::string& in, Complex lhs, Complex rhs, double tol) {
    push(in, lhs.real(), rhs.real(), std::abs(lhs - rhs),
         tol * cfg.tol_scale * std::max(1.0, std::abs(rhs)));
  }

  // Max-entry comparison; lhs/rhs record the max-entry norms.
  void matrix(const std::string& in, const Matrix& lhs, const Matrix& rhs, double tol) {
    const double r = matcalc::max_abs(rhs);
    push(in, matcalc::max_abs(lhs), r, matcalc::max_abs(lhs - rhs),
         tol * cfg.tol_scale * std::max(1.0, r));
  }

  // |observed / expected - 1| <= rel_tol, recorded on the absolute scale.
  void ratio(const std::string& in, double observed, double expected, double rel_tol) {
    push(in, observed, expected, std::abs(observed - expected),
         rel_tol * cfg.tol_scale * std::abs(expected));
  }

  // value <= limit
  void bound(const std::string& in, double value, double limit) {
    push(in, value, limit, value, limit * cfg.tol_scale);
  }

  void fail(const std::string& in, const std::string& message) {
    CaseRecord r;
    r.check = check;
    r.index = index++;
    r.inputs = in;
    r.lhs = r.rhs = r.delta = std::numeric_limits<double>::quiet_NaN();
    r.tolerance = 0.0;
    r.pass = false;
    r.error = message.empty() ? "error" : message;
    out.push_back(std::move(r));
  }

  template <class F>
  void attempt(const std::string& in, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      fail(in, e.what());
    }
  }
};

// ---------------------------------------------------------------------------
// Random inputs.

std::vector<double> separated_values(Rng& r, int k, double lo, double hi, double sep,
                                     const std::vector<double>& avoid = {}) {
  std::vector<double> vals;
  int guard = 0;
  while (static_cast<int>(vals.size()) < k) {
    const double v = r.uniform(lo, hi);
    auto far = [&](double w) { return std::abs(v - w) >= sep; };
    if ((std::all_of(vals.begin(), vals.end(), far) && std::all_of(avoid.begin(), avoid.end(), far)) ||
        ++guard > 10000) {
      vals.push_back(v);
    }
  }
  return vals;
}

// `total` nodes counted with multiplicity, on 1..total distinct values.
NodeSystem random_nodes(Rng& r, int total, double lo, double hi, double sep) {
  const int k = r.integer(1, total);
  const auto vals = separated_values(r, k, lo, hi, sep);
  std::vector<int> mult(static_cast<std::size_t>(k), 1);
  for (int i = k; i < total; ++i) ++mult[static_cast<std::size_t>(r.integer(0, k - 1))];
  std::vector<NodeSystem::Entry> entries;
  for (int i = 0; i < k; ++i) {
    entries.push_back({vals[static_cast<std::size_t>(i)], mult[static_cast<std::size_t>(i)]});
  }
  return NodeSystem(std::move(entries));
}

// Multi-index (a_0, ..., a_p) with |a| <= max_order.
funcs::MultiIndex random_alpha(Rng& r, int p, int max_order) {
  std::vector<int> parts(static_cast<std::size_t>(p + 1), 0);
  const int total = r.integer(0, max_order);
  for (int i = 0; i < total; ++i) ++parts[static_cast<std::size_t>(r.integer(0, p))];
  return funcs::MultiIndex(parts);
}

// Every multi-index with p + 1 parts and |a| <= max_order, in lexicographic order.
std::vector<funcs::MultiIndex> all_alphas(int p, int max_order) {
  std::vector<funcs::MultiIndex> out;
  std::vector<int> parts(static_cast<std::size_t>(p + 1), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == p + 1) {
      out.emplace_back(parts);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      parts[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, left - v);
    }
    parts[static_cast<std::size_t>(pos)] = 0;
  };
  rec(0, max_order);
  return out;
}

std::vector<double> uniform_vec(Rng& r, int n, double lo, double hi) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = r.uniform(lo, hi);
  return v;
}

HermitianMatrix herm(const Matrix& m) { return HermitianMatrix(((m + m.adjoint()) * 0.5).eval()); }

std::string alpha_str(const funcs::MultiIndex& a) { return ilist(a.parts); }

// ---------------------------------------------------------------------------
// Independent numerical routes.

quad::QuadratureSpec tight_spec() {
  quad::QuadratureSpec s;
  s.tolerance = 1e-11;
  s.abs_tolerance = 1e-15;
  return s;
}

// \int_0^1 x^c g(x) dx for c > -1; a negative power is removed by x = y^{1/(c+1)}.
double power_weighted(double c, const std::function<double(double)>& g) {
  const auto spec = tight_spec();
  if (c >= 0.0) {
    return quad::integrate_interval([&](double x) { return std::pow(x, c) * g(x); }, 0.0, 1.0, spec)
        .value;
  }
  const double k = 1.0 / (c + 1.0);
  return k * quad::integrate_interval([&](double y) { return g(std::pow(y, k)); }, 0.0, 1.0, spec)
                 .value;
}

// \int_0^inf x^c g(x) dx split at 1. The outer part is passed already mapped
// by x = 1/u as u^e tail(u) on (0, 1).
double halfline_power(double c, const std::function<double(double)>& g, double e,
                      const std::function<double(double)>& tail) {
  return power_weighted(c, g) + power_weighted(e, tail);
}

// Central differences on halving steps with Richardson extrapolation, for
// matrix-valued functions of one variable.
Matrix fd_matrix(const std::function<Matrix(double)>& F, double h0 = 1e-2, int levels = 4) {
  std::vector<std::vector<Matrix>> R(static_cast<std::size_t>(levels));
  double h = h0;
  for (int k = 0; k < levels; ++k, h *= 0.5) {
    auto& row = R[static_cast<std::size_t>(k)];
    row.push_back((F(h) - F(-h)) / (2.0 * h));
    double f4 = 4.0;
    for (int j = 1; j <= k; ++j, f4 *= 4.0) {
      const Matrix& up = R[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)];
      row.push_back(row.back() + (row.back() - up) / (f4 - 1.0));
    }
  }
  return R.back().back();
}

// d^2/(ds dt) F(s, t) at 0 from the symmetric four-point stencil, Richardson
// extrapolated in h^2.
Matrix fd_mixed(const std::function<Matrix(double, double)>& F, double h0 = 2e-2, int levels = 4) {
  std::vector<std::vector<Matrix>> R(static_cast<std::size_t>(levels));
  double h = h0;
  for (int k = 0; k < levels; ++k, h *= 0.5) {
    auto& row = R[static_cast<std::size_t>(k)];
    row.push_back((F(h, h) - F(h, -h) - F(-h, h) + F(-h, -h)) / (4.0 * h * h));
    double f4 = 4.0;
    for (int j = 1; j <= k; ++j, f4 *= 4.0) {
      const Matrix& up = R[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)];
      row.push_back(row.back() + (row.back() - up) / (f4 - 1.0));
    }
  }
  return R.back().back();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Doubled-algebra brute force: nabla_a = -a (x) 1 + 1 (x) a as a dim^2 Hermitian
// matrix, the slot kernel g contracted against b'_k (x) b''_k, and the result
// c' (x) c'' applied to x as c' x c''.
Matrix doubled_brute_force(const Matrix& a, const matcalc::ContractionKernel::Fn& g,
                           const std::vector<matcalc::OperandPair>& pairs, const Matrix& x) {
  const Eigen::Index d = a.rows();
  const Matrix I = Matrix::Identity(d, d);
  const Matrix nab = (-kron(a, I) + kron(I, a)).eval();
  std::vector<Matrix> ops;
  for (const auto& p : pairs) ops.push_back(kron(p.first, p.second));
  const auto kernel = matcalc::ContractionKernel::slots(static_cast<int>(pairs.size()) + 1, g);
  const Matrix C = matcalc::contract(herm(nab), kernel, ops);
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index l = 0; l < d; ++l) {
      Complex acc = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) acc += C(i * d + k, j * d + l) * x(j, k);
      }
      out(i, l) = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ddcore

const std::vector<std::string> kOracleFuncs = {"exp", "log", "idmlog:1", "idmlog:2", "idmlog:3"};

void dd_oracle(Ctx& c, bool contour) {
  quad::QuadratureSpec spec;
  spec.tolerance = 1e-10;
  spec.abs_tolerance = 1e-13;
  for (int i = 0, n = c.count(200); i < n; ++i) {
    const NodeSystem nodes = random_nodes(c.rng, c.rng.integer(1, 6), 0.5, 4.0, 0.05);
    const std::string name = kOracleFuncs[static_cast<std::size_t>(c.rng.integer(0, 4))];
    const std::string in = "nodes=" + nodes_str(nodes) + " f=" + name;
    c.attempt(in, [&] {
      const ScalarFunction f = fn::from_name(name);
      const double v = dd::dd_confluent(nodes, f);
      const double o = contour ? dd::dd_contour_auto(nodes, f) : dd::dd_hermite_genocchi(nodes, f, spec);
      c.scalar(in, v, o, contour ? 1e-10 : 1e-8);
    });
  }
}

void check_dd_genocchi(Ctx& c) { dd_oracle(c, false); }
void check_dd_contour(Ctx& c) { dd_oracle(c, true); }

const std::vector<std::string> kSmoothFuncs = {"exp", "gaussian", "cosh", "poly:1,-2,0.5,0.25"};

void check_dd_permutation(Ctx& c) {
  for (int i = 0, n = c.count(50); i < n; ++i) {
    const NodeSystem nodes = random_nodes(c.rng, c.rng.integer(2, 6), -3.0, 3.0, 0.05);
    const std::string name = kSmoothFuncs[static_cast<std::size_t>(c.rng.integer(0, 3))];
    std::vector<double> flat = nodes.flat();
    for (std::size_t k = flat.size() - 1; k > 0; --k) {
      std::swap(flat[k], flat[static_cast<std::size_t>(c.rng.integer(0, static_cast<int>(k)))]);
    }
    const std::string in = "nodes=" + list(flat) + " f=" + name;
    c.attempt(in, [&] {
      const ScalarFunction f = fn::from_name(name);
      const double v = dd::dd_confluent(nodes, f);
      const double w = dd::dd_confluent(NodeSystem::from_values(flat), f);
      // Reordering is exact, so the two tableaux must agree bit for bit.
      c.push(in, w, v, std::abs(w - v), 0.0);
    });
  }
}

void check_dd_polynomial(Ctx& c) {
  for (int i = 0, n = c.count(50); i < n; ++i) {
    const int deg = c.rng.integer(0, 4);
    const auto coeffs = uniform_vec(c.rng, deg + 1, -2.0, 2.0);
    const int order = c.rng.integer(deg, 5);
    const NodeSystem nodes = random_nodes(c.rng, order + 1, -2.0, 2.0, 0.2);
    const std::string in = "coeffs=" + list(coeffs) + " nodes=" + nodes_str(nodes);
    c.attempt(in, [&] {
      const double v = dd::dd_confluent(nodes, fn::polynomial(coeffs));
      const double expected = order == deg ? coeffs.back() : 0.0;
      c.scalar(in, v, expected, 1e-10);
    });
  }
}

const std::vector<std::string> kShiftFuncs = {"exp", "gaussian", "cosh", "log"};

void check_dd_translation(Ctx& c) {
  for (int i = 0, n = c.count(50); i < n; ++i) {
    const NodeSystem nodes = random_nodes(c.rng, c.rng.integer(1, 6), 0.5, 3.0, 0.2);
    const double shift = c.rng.uniform(0.0, 1.0);
    const std::string name = kShiftFuncs[static_cast<std::size_t>(c.rng.integer(0, 3))];
    const std::string in = "nodes=" + nodes_str(nodes) + " c=" + num(shift) + " f=" + name;
    c.attempt(in, [&] {
      const ScalarFunction f = fn::from_name(name);
      std::vector<NodeSystem::Entry> moved = nodes.entries();
      for (auto& e : moved) e.value += shift;
      const double lhs = dd::dd_confluent(NodeSystem(moved), f);
      const double rhs = dd::dd_confluent(nodes, fn::shifted(f, shift));
      c.scalar(in, lhs, rhs, 1e-12);
    });
  }
}

void check_dd_collapse(Ctx& c) {
  const std::vector<std::string> names = {"exp", "log", "idmlog:2", "gaussian", "cosh"};
  for (int i = 0, n = c.count(50); i < n; ++i) {
    const double x = c.rng.uniform(0.5, 4.0);
    const int order = c.rng.integer(0, 5);
    const std::string name = names[static_cast<std::size_t>(c.rng.integer(0, 4))];
    const std::string in = "x=" + num(x) + " n=" + std::to_string(order) + " f=" + name;
    c.attempt(in, [&] {
      const ScalarFunction f = fn::from_name(name);
      const double lhs = dd::dd_confluent(NodeSystem({{x, order + 1}}), f);
      const double rhs = f.deriv(order, x) / std::tgamma(order + 1.0);
      c.scalar(in, lhs, rhs, 1e-13);
    });
  }
}

// ---------------------------------------------------------------------------
// identities

void check_even_k(Ctx& c) {
  for (int i = 0, n = c.count(100); i < n; ++i) {
    const int family = c.rng.integer(0, 3);
    std::string kname;
    std::optional<ScalarFunction> K;
    switch (family) {
      case 0: {
        const double s = c.rng.uniform(0.2, 1.5);
        kname = "cosh(" + num(s) + "x)";
        K = fn::cosh_scaled(s);
        break;
      }
      case 1: {
        const double w = c.rng.uniform(0.5, 2.0);
        kname = "gaussian(" + num(w) + ")";
        K = fn::gaussian(w);
        break;
      }
      case 2:
        kname = "bernoulli_even";
        K = fn::bernoulli_even();
        break;
      default: {
        const auto co = uniform_vec(c.rng, 3, -1.0, 1.0);
        kname = "poly" + list({co[0], 0.0, co[1], 0.0, co[2]});
        K = fn::polynomial({co[0], 0.0, co[1], 0.0, co[2]});
        break;
      }
    }
    double a = 0.0, b = 0.0;
    do {
      a = c.rng.uniform(0.2, 3.0) * (c.rng.coin() ? 1.0 : -1.0);
      b = c.rng.uniform(0.2, 3.0) * (c.rng.coin() ? 1.0 : -1.0);
    } while (std::abs(a + b) < 0.2);
    const std::string in = "K=" + kname + " a=" + num(a) + " b=" + num(b);
    c.attempt(in, [&] {
      const auto pr = funcs::k_identity_pair(*K, a, b);
      c.scalar(in, pr.lhs, pr.rhs, 1e-12);
    });
  }
}

// With f(x) = x / (e^x - 1): [0,s]f - [0,0]f = s [0,0,s]f, and
// [0,0,s]f = sum_{n>=1} B_{2n} s^{2n-2} / (2n)!.
void check_bernoulli_footnote(Ctx& c) {
  const ScalarFunction f = fn::bernoulli();
  const auto coeffs = funcs::bernoulli_coeffs(60);
  for (int i = 0, n = c.count(50); i < n; ++i) {
    double s = 0.0;
    do {
      s = c.rng.uniform(-3.0, 3.0);
    } while (std::abs(s) < 0.05);
    const std::string in = "s=" + num(s);
    c.attempt(in, [&] {
      const double d0s = dd::dd_confluent(NodeSystem::from_values({0.0, s}), f);
      const double d00 = dd::dd_confluent(NodeSystem({{0.0, 2}}), f);
      const double d00s = dd::dd_confluent(NodeSystem({{0.0, 2}, {s, 1}}), f);
      c.scalar(in + " form=recursion", d0s - d00, s * d00s, 1e-12);
      double series = 0.0;
      for (std::size_t k = coeffs.size() - 1; k >= 2; --k) series = series * s + coeffs[k];
      c.scalar(in + " form=series", d00s, series, 1e-12);
    });
  }
}

const std::vector<std::string> kLeibnizFuncs = {"exp",      "log",  "idmlog:1", "gaussian",
                                                "cosh",     "basic", "poly:1,0.5,-0.25,0.1"};

void check_leibniz(Ctx& c) {
  const int nf = static_cast<int>(kLeibnizFuncs.size());
  for (int i = 0, n = c.count(200); i < n; ++i) {
    const NodeSystem nodes = random_nodes(c.rng, c.rng.integer(1, 5), 0.5, 4.0, 0.2);
    const std::string fname = kLeibnizFuncs[static_cast<std::size_t>(c.rng.integer(0, nf - 1))];
    const std::string gname = kLeibnizFuncs[static_cast<std::size_t>(c.rng.integer(0, nf - 1))];
    const std::string in = "nodes=" + nodes_str(nodes) + " f=" + fname + " g=" + gname;
    c.attempt(in, [&] {
      const ScalarFunction f = fn::from_name(fname);
      const ScalarFunction g = fn::from_name(gname);
      const double lhs = dd::leibniz_rhs(nodes, f, g);
      const double rhs = dd::dd_confluent(nodes, fn::product(f, g));
      c.scalar(in, lhs, rhs, 1e-11);
    });
  }
}

void check_substitution(Ctx& c) {
  const std::vector<std::string> names = {"exp", "log", "idmlog:2", "gaussian"};
  for (int i = 0, n = c.count(200); i < n; ++i) {
    const NodeSystem prefix = random_nodes(c.rng, c.rng.integer(1, 3), 0.5, 4.0, 0.2);
    // Inner nodes either reuse a prefix value exactly or stay well separated.
    std::vector<double> used;
    for (const auto& e : prefix.entries()) used.push_back(e.value);
    const int total = c.rng.integer(1, 3);
    const int k = c.rng.integer(1, total);
    std::vector<double> vals;
    for (int j = 0; j < k; ++j) {
      if (c.rng.uniform() < 0.3) {
        const double v = used[static_cast<std::size_t>(c.rng.integer(0, static_cast<int>(used.size()) - 1))];
        if (std::find(vals.begin(), vals.end(), v) == vals.end()) {
          vals.push_back(v);
          continue;
        }
      }
      auto avoid = used;
      avoid.insert(avoid.end(), vals.begin(), vals.end());
      vals.push_back(separated_values(c.rng, 1, 0.5, 4.0, 0.2, avoid)[0]);
    }
    std::vector<NodeSystem::Entry> entries;
    for (double v : vals) entries.push_back({v, 1});
    for (int j = k; j < total; ++j) ++entries[static_cast<std::size_t>(c.rng.integer(0, k - 1))].multiplicity;
    const NodeSystem nodes(entries);
    const std::string name = names[static_cast<std::size_t>(c.rng.integer(0, 3))];
    const std::string in = "prefix=" + nodes_str(prefix) + " nodes=" + nodes_str(nodes) + " f=" + name;
    c.attempt(in, [&] {
      const auto r = dd::dd_substitute(prefix, nodes, fn::from_name(name));
      c.scalar(in, r.nested, r.merged, 1e-11);
    });
  }
}

// ---------------------------------------------------------------------------
// funcs

struct AlphaM {
  funcs::MultiIndex alpha;
  int m;
};

std::vector<AlphaM> admissible(int max_p, int max_order) {
  std::vector<AlphaM> out;
  for (int p = 1; p <= max_p; ++p) {
    for (const auto& a : all_alphas(p, max_order)) {
      for (int m = 0; m <= a.order() + p - 1; ++m) out.push_back({a, m});
    }
  }
  return out;
}

void check_h_integral(Ctx& c) {
  const int reps = c.count(10);
  quad::QuadratureSpec spec;
  spec.tolerance = 1e-10;
  for (const auto& [alpha, m] : admissible(3, 3)) {
    for (int k = 0; k < reps; ++k) {
      const auto s = uniform_vec(c.rng, alpha.p(), 0.3, 4.0);
      const std::string in = "alpha=" + alpha_str(alpha) + " s=" + list(s) + " m=" + std::to_string(m);
      c.attempt(in, [&] {
        std::vector<double> full = {1.0};
        full.insert(full.end(), s.begin(), s.end());
        const double lhs = funcs::h_func(alpha, s, m);
        const double rhs = funcs::m_func_integral(alpha, full, m, spec);
        c.scalar(in, lhs, rhs, 1e-6);
      });
    }
  }
}

void check_integral_forms(Ctx& c) {
  const int reps = c.cfg.cases > 0 ? std::min(c.cfg.cases, 2) : 2;
  quad::QuadratureSpec spec;
  spec.tolerance = 1e-10;
  for (const auto& [alpha, m] : admissible(3, 3)) {
    for (int k = 0; k < reps; ++k) {
      const auto s = uniform_vec(c.rng, alpha.p() + 1, 0.3, 4.0);
      const std::string in = "alpha=" + alpha_str(alpha) + " s=" + list(s) + " m=" + std::to_string(m);
      c.attempt(in, [&] {
        const double lhs = funcs::m_func_integral(alpha, s, m, spec);
        const double rhs = funcs::m_func_integral_dual(alpha, s, m, spec);
        c.scalar(in, lhs, rhs, 1e-6);
      });
    }
  }
}

void check_homogeneity(Ctx& c) {
  for (int i = 0, n = c.count(100); i < n; ++i) {
    const int p = c.rng.integer(1, 3);
    const auto alpha = random_alpha(c.rng, p, 3);
    const int m = c.rng.integer(0, alpha.order() + p - 1);
    const auto s = uniform_vec(c.rng, p + 1, 0.3, 4.0);
    const double lambda = (i % 2 == 0) ? 0.5 : 2.0;
    const std::string in = "alpha=" + alpha_str(alpha) + " s=" + list(s) + " m=" + std::to_string(m) +
                           " lambda=" + num(lambda);
    c.attempt(in, [&] {
      std::vector<double> scaled = s;
      for (auto& x : scaled) x *= lambda;
      const double lhs = funcs::m_func(alpha, scaled, m);
      const double rhs = std::pow(lambda, -alpha.order() - p + m) * funcs::m_func(alpha, s, m);
      c.scalar(in, lhs, rhs, 1e-10);
    });
  }
}

void check_scaling_reduction(Ctx& c) {
  for (int i = 0, n = c.count(50); i < n; ++i) {
    const int p = c.rng.integer(1, 3);
    const auto alpha = random_alpha(c.rng, p, 3);
    const int m = c.rng.integer(0, alpha.order() + p - 1);
    const auto s = uniform_vec(c.rng, p + 1, 0.3, 4.0);
    const std::string in = "alpha=" + alpha_str(alpha) + " s=" + list(s) + " m=" + std::to_string(m);
    c.attempt(in, [&] {
      std::vector<double> ratio(s.begin() + 1, s.end());
      for (auto& x : ratio) x /= s[0];
      const double lhs = funcs::m_func(alpha, s, m);
      const double rhs = std::pow(s[0], -alpha.order() - p + m) * funcs::h_func(alpha, ratio, m);
      c.scalar(in, lhs, rhs, 1e-10);
    });
  }
}

// (-1)^{m+|a|+p-1} / a! d_s^a [s_0, ..., s_p] id^m log, the derivatives taken
// numerically on the distinct-node divided difference.
void check_pi_formula2(Ctx& c) {
  for (int i = 0, n = c.count(30); i < n; ++i) {
    const int p = c.rng.integer(1, 2);
    std::vector<int> parts(static_cast<std::size_t>(p + 1), 0);
    const int shape = c.rng.integer(0, 2);
    const int j1 = c.rng.integer(0, p);
    if (shape == 1) {
      parts[static_cast<std::size_t>(j1)] = c.rng.integer(1, 2);
    } else if (shape == 2) {
      const int j2 = (j1 + c.rng.integer(1, p)) % (p + 1);
      parts[static_cast<std::size_t>(j1)] = 1;
      parts[static_cast<std::size_t>(j2)] = 1;
    }
    const funcs::MultiIndex alpha(parts);
    const int m = c.rng.integer(0, alpha.order() + p - 1);
    const auto s = separated_values(c.rng, p + 1, 0.5, 4.0, 0.3);
    const std::string in = "alpha=" + alpha_str(alpha) + " s=" + list(s) + " m=" + std::to_string(m);
    c.attempt(in, [&] {
      const ScalarFunction f = fn::idm_log(m);
      const quad::MultiFunction F = [&f](std::span<const double> x) {
        return dd::dd_confluent(NodeSystem::from_values(std::vector<double>(x.begin(), x.end())), f);
      };
      std::vector<int> idx;
      for (int j = 0; j <= p; ++j) {
        for (int r = 0; r < parts[static_cast<std::size_t>(j)]; ++r) idx.push_back(j);
      }
      auto unit = [&](int j, double sign) {
        std::vector<double> e(static_cast<std::size_t>(p + 1), 0.0);
        e[static_cast<std::size_t>(j)] = sign;
        return e;
      };
      double deriv = 0.0;
      if (idx.empty()) {
        deriv = F(s);
      } else if (idx.size() == 1 || idx[0] == idx[1]) {
        deriv = quad::directional_derivative(F, s, unit(idx[0], 1.0), static_cast<int>(idx.size()));
      } else {
        // Polarization: d_i d_j = (D_{e_i+e_j}^2 - D_{e_i-e_j}^2) / 4.
        auto plus = unit(idx[0], 1.0);
        auto minus = unit(idx[0], 1.0);
        plus[static_cast<std::size_t>(idx[1])] = 1.0;
        minus[static_cast<std::size_t>(idx[1])] = -1.0;
        deriv = 0.25 * (quad::directional_derivative(F, s, plus, 2) -
                        quad::directional_derivative(F, s, minus, 2));
      }
      const int sgn_exp = m + alpha.order() + p - 1;
      const double lhs = (sgn_exp % 2 == 0 ? 1.0 : -1.0) / alpha.factorial() * deriv;
      c.scalar(in, lhs, funcs::m_func(alpha, s, m), 1e-5);
    });
  }
}

void check_euler_form(Ctx& c) {
  const int reps = c.count(3);
  for (int p = 1; p <= 2; ++p) {
    for (const auto& alpha : all_alphas(p, 3)) {
      const int mmax = alpha.prime().order() + p - 1;
      for (int m = 0; m <= mmax; ++m) {
        for (int k = 0; k < reps; ++k) {
          const auto s = uniform_vec(c.rng, p, 0.3, 4.0);
          const std::string in = "alpha=" + alpha_str(alpha) + " s=" + list(s) + " m=" + std::to_string(m);
          c.attempt(in, [&] {
            const double lhs = funcs::euler_operator_form(funcs::HArgs{alpha, s, m});
            c.scalar(in, lhs, funcs::h_func(alpha, s, m), 1e-5);
          });
        }
      }
    }
  }
}

const std::vector<std::array<int, 3>> kHcmIndices = {{1, 1, 1}, {1, 2, 1}, {2, 1, 1}, {2, 2, 1}, {3, 1, 1}};
const std::vector<double> kGridA = {0.5, 1.5, 2.0, 3.0};
const std::vector<double> kGridB = {0.25, 0.75, 2.5, 4.0};

std::string hcm_in(const std::array<int, 3>& ijk, double a, double b) {
  return "H" + std::to_string(ijk[0]) + std::to_string(ijk[1]) + std::to_string(ijk[2]) +
         " a=" + num(a) + " b=" + num(b);
}

void hcm_closed_vs_dd(Ctx& c, double a, double b) {
  for (const auto& ijk : kHcmIndices) {
    const std::string in = hcm_in(ijk, a, b);
    c.attempt(in, [&] {
      const double closed = *funcs::hcm_closed_form(ijk[0], ijk[1], ijk[2], a, b);
      c.scalar(in, closed, funcs::hcm(ijk[0], ijk[1], ijk[2], a, b), 1e-10);
    });
  }
}

void check_hcm_grid(Ctx& c) {
  for (double a : kGridA) {
    for (double b : kGridB) hcm_closed_vs_dd(c, a, b);
  }
}

void check_hcm_fuzz(Ctx& c) {
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const auto ab = separated_values(c.rng, 2, 0.3, 4.0, 0.25, {1.0});
    hcm_closed_vs_dd(c, ab[0], ab[1]);
  }
}

void check_hcm_relations(Ctx& c) {
  auto H = [](int i, int j, int k) {
    return [=](double a, double b) { return funcs::hcm(i, j, k, a, b); };
  };
  auto d_a = [](const std::function<double(double, double)>& F, double a, double b) {
    return quad::derivative([&](double x) { return F(x, b); }, a, 1);
  };
  // (a d_a + b d_b) F = d/dtau F(e^tau a, e^tau b) at 0.
  auto euler = [](const std::function<double(double, double)>& F, double a, double b) {
    return quad::derivative([&](double t) { return F(std::exp(t) * a, std::exp(t) * b); }, 0.0, 1);
  };
  for (double a : kGridA) {
    for (double b : kGridB) {
      const std::string at = " a=" + num(a) + " b=" + num(b);
      c.attempt("H121=-d_a H111" + at, [&] {
        c.scalar("H121=-d_a H111" + at, H(1, 2, 1)(a, b), -d_a(H(1, 1, 1), a, b), 1e-6);
      });
      c.attempt("H221=-d_a H211" + at, [&] {
        c.scalar("H221=-d_a H211" + at, H(2, 2, 1)(a, b), -d_a(H(2, 1, 1), a, b), 1e-6);
      });
      for (int r = 1; r <= 2; ++r) {
        const std::string in = "H" + std::to_string(r + 1) + "11 one-variable reduction" + at;
        c.attempt(in, [&] {
          const double rhs = -(funcs::mod_log(r, b) - funcs::mod_log(r, a)) / (b - a);
          c.scalar(in, H(r + 1, 1, 1)(a, b), rhs, 1e-10);
        });
      }
      c.attempt("H211=(E+2)H111" + at, [&] {
        const double rhs = euler(H(1, 1, 1), a, b) + 2.0 * H(1, 1, 1)(a, b);
        c.scalar("H211=(E+2)H111" + at, H(2, 1, 1)(a, b), rhs, 1e-5);
      });
      c.attempt("H311=(E+3)H211/2" + at, [&] {
        const double rhs = 0.5 * (euler(H(2, 1, 1), a, b) + 3.0 * H(2, 1, 1)(a, b));
        c.scalar("H311=(E+3)H211/2" + at, H(3, 1, 1)(a, b), rhs, 1e-5);
      });
    }
  }
}

// \int_0^inf x^{z-1} (1+x)^{-m-1} dx by quadrature.
double mellin_quadrature(double z, int m) {
  const auto g = [m](double x) { return std::pow(1.0 + x, -m - 1); };
  // Outer part: u^{m-z} (1+u)^{-m-1} on (0, 1).
  return halfline_power(z - 1.0, g, m - z, g);
}

void check_mellin(Ctx& c) {
  for (double z : {0.2, 0.5, 0.8}) {
    for (int m = 0; m <= 3; ++m) {
      const std::string in = "z=" + num(z) + " m=" + std::to_string(m);
      c.attempt(in, [&] { c.scalar(in, funcs::mellin_basic(z, m), mellin_quadrature(z, m), 1e-8); });
    }
  }
}

// \int_0^inf x^{q-1-z} prod_j (1 + t_j x)^{-1} dx by quadrature.
double general_z_quadrature(const std::vector<double>& t, double z) {
  const int q = static_cast<int>(t.size()) - 1;
  const auto g = [&t](double x) {
    double v = 1.0;
    for (double tj : t) v /= 1.0 + tj * x;
    return v;
  };
  // x = 1/u: u^{z-q+1-2} prod (1 + t_j/u)^{-1} = u^z / prod (u + t_j).
  const auto tail = [&t](double u) {
    double v = 1.0;
    for (double tj : t) v /= u + tj;
    return v;
  };
  return halfline_power(q - 1 - z, g, z, tail);
}

double random_nonint(Rng& r, double lo, double hi, double gap) {
  double z = 0.0;
  do {
    z = r.uniform(lo, hi);
  } while (std::abs(z - std::round(z)) < gap);
  return z;
}

void check_general_z(Ctx& c) {
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int q = c.rng.integer(1, 3);
    const auto t = separated_values(c.rng, q + 1, 0.5, 4.0, 0.2);
    const double z = random_nonint(c.rng, -0.9, q - 0.2, 0.05);
    const std::string in = "t=" + list(t) + " z=" + num(z);
    c.attempt(in, [&] { c.scalar(in, funcs::m_func_general_z(t, z), general_z_quadrature(t, z), 1e-7); });
  }
}

void check_general_z_limit(Ctx& c) {
  const double h = 1e-4;
  for (int i = 0, n = c.count(10); i < n; ++i) {
    const int q = c.rng.integer(1, 3);
    const auto t = separated_values(c.rng, q + 1, 0.5, 4.0, 0.2);
    const int m = c.rng.integer(0, q - 1);
    const std::string in = "t=" + list(t) + " m=" + std::to_string(m);
    c.attempt(in, [&] {
      const double avg = 0.5 * (funcs::m_func_general_z(t, m + h) + funcs::m_func_general_z(t, m - h));
      const funcs::MultiIndex zero(std::vector<int>(static_cast<std::size_t>(q + 1), 0));
      c.scalar(in, avg, funcs::m_func(zero, t, m), 1e-4);
    });
  }
}

// d^n b = (-1)^n n! b^{n+1} and (D + l) b^l = l b^{l+1} for b(x) = 1/(1+x),
// D = x d/dx, both sides of each by finite differences.
void check_basic_function(Ctx& c) {
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const double x = c.rng.uniform(0.1, 4.0);
    const int order = c.rng.integer(1, 3);
    const int l = c.rng.integer(1, 4);
    const auto b = [](double y) { return 1.0 / (1.0 + y); };
    const std::string in1 = "x=" + num(x) + " n=" + std::to_string(order);
    c.attempt(in1, [&] {
      const double lhs = quad::derivative(b, x, order);
      const double rhs = (order % 2 ? -1.0 : 1.0) * std::tgamma(order + 1.0) * std::pow(b(x), order + 1);
      c.scalar(in1, lhs, rhs, 1e-6);
    });
    const std::string in2 = "x=" + num(x) + " l=" + std::to_string(l);
    c.attempt(in2, [&] {
      const auto bl = [&](double y) { return std::pow(b(y), l); };
      const double lhs = x * quad::derivative(bl, x, 1) + l * bl(x);
      c.scalar(in2, lhs, l * std::pow(b(x), l + 1), 1e-6);
    });
  }
}

// ---------------------------------------------------------------------------
// substitution

std::vector<HermitianMatrix> commuting_family(Rng& r, int dim, int count) {
  const Matrix U = r.unitary(dim);
  std::vector<HermitianMatrix> out;
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXcd d(dim);
    for (int i = 0; i < dim; ++i) d(i) = r.uniform(0.3, 3.0);
    out.push_back(herm(U * d.asDiagonal() * U.adjoint()));
  }
  return out;
}

void check_osl(Ctx& c) {
  quad::QuadratureSpec spec;
  spec.tolerance = 1e-11;
  for (int i = 0, n = c.count(30); i < n; ++i) {
    const int d = c.dim(1, 4);
    const int nn = c.rng.integer(0, 2);
    auto alpha = random_alpha(c.rng, nn, 3);
    if (alpha.order() + nn == 0) alpha.parts[0] = 1;
    const double nu = c.rng.uniform(-0.4, alpha.order() + nn - 0.5);
    const auto R = commuting_family(c.rng, d, nn + 1);
    const std::string in = "dim=" + std::to_string(d) + " alpha=" + alpha_str(alpha) + " nu=" + num(nu);
    c.attempt(in, [&] {
      const auto pr = rearrange::operator_substitution_check(R, rearrange::osl_integrand(alpha, nu), spec);
      c.push(in, matcalc::max_abs(pr.lhs), matcalc::max_abs(pr.rhs), matcalc::max_abs(pr.lhs - pr.rhs),
             1e-8 * c.cfg.tol_scale);
    });
  }
}

void check_spectral_fubini(Ctx& c) {
  quad::QuadratureSpec spec;
  spec.tolerance = 1e-11;
  for (int i = 0, n = c.count(10); i < n; ++i) {
    const int d = c.dim(1, 4);
    const auto R = commuting_family(c.rng, d, 2);
    const std::string in = "dim=" + std::to_string(d);
    c.attempt(in, [&] {
      const rearrange::ParamFn f = [](double u, std::span<const double> l) {
        return std::exp(-u * l[0]) / ((1.0 + u * l[1]) * (1.0 + u * l[1]));
      };
      const auto pr = rearrange::spectral_fubini_check(R, f, spec);
      c.matrix(in, pr.lhs, pr.rhs, 1e-8);
    });
  }
}

// ---------------------------------------------------------------------------
// rearrangement

rearrange::RearrangementCase random_rearrangement(Ctx& c, int d, int p, const funcs::MultiIndex& alpha,
                                                  double nu, bool hermitian_b) {
  rearrange::RearrangementCase rc{alpha, nu, herm(c.rng.hermitian(d, c.rng.uniform(0.3, 1.5))), {}, {}};
  for (int j = 0; j < p; ++j) {
    rc.b.push_back(hermitian_b ? c.rng.hermitian(d, 1.0) : c.rng.general(d, 1.0));
  }
  rc.quad.tolerance = 1e-10;
  return rc;
}

std::string rc_str(const rearrange::RearrangementCase& rc) {
  return "dim=" + std::to_string(rc.a.dim()) + " alpha=" + alpha_str(rc.alpha) + " nu=" + num(rc.nu);
}

void check_rearrangement(Ctx& c) {
  for (int i = 0, n = c.count(50); i < n; ++i) {
    const int d = c.dim(1, 4);
    const int p = c.rng.integer(1, 3);
    const auto alpha = random_alpha(c.rng, p, 2);
    const int nu = c.rng.integer(0, alpha.order() + p - 1);
    const auto rc = random_rearrangement(c, d, p, alpha, nu, false);
    const std::string in = rc_str(rc);
    c.attempt(in, [&] { c.matrix(in, rearrange::rearrangement_lhs(rc), rearrange::rearrangement_rhs(rc), 1e-6); });
  }
}

// a -> a + log(2) I doubles A; both sides then halve.
void check_rearrangement_scale(Ctx& c) {
  for (int i = 0, n = c.count(10); i < n; ++i) {
    const int d = c.dim(1, 4);
    const int p = c.rng.integer(1, 3);
    const auto alpha = random_alpha(c.rng, p, 2);
    const int nu = c.rng.integer(0, alpha.order() + p - 1);
    const auto rc = random_rearrangement(c, d, p, alpha, nu, false);
    auto shifted = rc;
    shifted.a = herm(rc.a.matrix() + std::log(2.0) * Matrix::Identity(d, d));
    const std::string in = rc_str(rc);
    c.attempt(in + " side=lhs", [&] {
      c.matrix(in + " side=lhs", rearrange::rearrangement_lhs(shifted), 0.5 * rearrange::rearrangement_lhs(rc), 1e-8);
    });
    c.attempt(in + " side=rhs", [&] {
      c.matrix(in + " side=rhs", rearrange::rearrangement_rhs(shifted), 0.5 * rearrange::rearrangement_rhs(rc), 1e-10);
    });
  }
}

void check_rearrangement_hermitian(Ctx& c) {
  for (int i = 0, n = c.count(10); i < n; ++i) {
    const int d = c.dim(1, 4);
    const int a0 = c.rng.integer(0, 2);
    // f_0 = f_1 needs nu = 0 on top of alpha_0 = alpha_1.
    const auto rc = random_rearrangement(c, d, 1, funcs::MultiIndex({a0, a0}), 0, true);
    const std::string in = rc_str(rc);
    c.attempt(in + " side=lhs", [&] {
      const Matrix l = rearrange::rearrangement_lhs(rc);
      c.matrix(in + " side=lhs", l, l.adjoint(), 1e-10);
    });
    c.attempt(in + " side=rhs", [&] {
      const Matrix r = rearrange::rearrangement_rhs(rc);
      c.matrix(in + " side=rhs", r, r.adjoint(), 1e-10);
    });
  }
}

void check_rearrangement_nonint(Ctx& c) {
  for (int i = 0, n = c.count(10); i < n; ++i) {
    const int d = c.dim(1, 4);
    const double nu = random_nonint(c.rng, -0.4, 0.9, 0.05);
    const auto rc = random_rearrangement(c, d, 1, funcs::MultiIndex({0, 0}), nu, false);
    const std::string in = rc_str(rc);
    c.attempt(in, [&] { c.matrix(in, rearrange::rearrangement_lhs(rc), rearrange::rearrangement_rhs(rc), 1e-6); });
  }
}

// ---------------------------------------------------------------------------
// expansion

void check_exp_paths(Ctx& c) {
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(1, 5);
    const int order = c.rng.integer(0, 4);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix b = c.rng.hermitian(d, 0.5);
    const std::string in = "dim=" + std::to_string(d) + " n=" + std::to_string(order);
    c.attempt(in, [&] {
      c.matrix(in, expand::exp_expansion_variant_nabla(a, b, order), expand::exp_expansion_term(a, b, order), 1e-7);
    });
  }
}

void check_exp_simplex(Ctx& c) {
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(1, 5);
    const int order = c.rng.integer(0, 2);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix b = c.rng.hermitian(d, 0.5);
    const std::string in = "dim=" + std::to_string(d) + " n=" + std::to_string(order);
    c.attempt(in, [&] {
      c.matrix(in, expand::exp_expansion_simplex(a, b, order), expand::exp_expansion_term(a, b, order), 1e-7);
    });
  }
}

void check_exp_remainder(Ctx& c) {
  const int N = 4;
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(1, 5);
    const HermitianMatrix a = herm(c.rng.hermitian(d, c.rng.uniform(0.2, 1.5)));
    const Matrix bm = c.rng.hermitian(d, 0.5);
    const std::string in = "dim=" + std::to_string(d) + " N=4 |b|=0.5";
    c.attempt(in, [&] {
      const auto full = expand::exp_expansion_report(a, herm(bm), N);
      const auto half = expand::exp_expansion_report(a, herm(0.5 * bm), N);
      const double r1 = full.remainders[N];
      const double r2 = half.remainders[N];
      c.ratio(in + " form=halving", r2 / r1, std::pow(2.0, -(N + 1)), 0.25);
      const double nb = matcalc::spectral_norm(bm);
      const double limit = std::pow(nb, N + 1) * std::exp(matcalc::spectral_norm(a.matrix()) + nb) /
                           std::tgamma(N + 2.0) * d;
      c.bound(in + " form=bound", r1, limit);
    });
  }
}

void check_magnus_order(Ctx& c) {
  const int N = 3;
  const ScalarFunction f = fn::gaussian();
  for (int i = 0, n = c.count(10); i < n; ++i) {
    const int d = c.dim(1, 4);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix bm = c.rng.hermitian(d, 1.0);
    const std::string in = "dim=" + std::to_string(d) + " N=3 f=gaussian |b|=0.02";
    c.attempt(in, [&] {
      auto remainder = [&](double eps) {
        const Matrix b = eps * bm;
        Matrix sum = Matrix::Zero(d, d);
        for (int k = 0; k <= N; ++k) sum += expand::taylor_term(a, b, f, k);
        return matcalc::spectral_norm(matcalc::matrix_function(herm(a.matrix() + b), f) - sum);
      };
      c.ratio(in, remainder(0.01) / remainder(0.02), std::pow(2.0, -(N + 1)), 0.25);
    });
  }
}

// ---------------------------------------------------------------------------
// nabla

const std::vector<std::string> kDkFuncs = {"exp", "gaussian", "cosh"};

void check_daleckii_krein(Ctx& c) {
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(1, 4);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix b = c.rng.hermitian(d, 1.0);
    const std::string name = kDkFuncs[static_cast<std::size_t>(c.rng.integer(0, 2))];
    const std::string in = "dim=" + std::to_string(d) + " f=" + name;
    c.attempt(in, [&] {
      const ScalarFunction f = fn::from_name(name);
      const Matrix fd = fd_matrix([&](double t) { return matcalc::matrix_function(herm(a.matrix() + t * b), f); });
      c.matrix(in, expand::taylor_term(a, b, f, 1), fd, 1e-6);
    });
  }
}

void check_parametric(Ctx& c) {
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(1, 4);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix x = c.rng.hermitian(d, 0.5);
    const Matrix y = c.rng.hermitian(d, 0.5);
    const Matrix z = c.rng.hermitian(d, 0.5);
    const std::string name = i % 2 == 0 ? "exp" : "gaussian";
    const std::string in = "dim=" + std::to_string(d) + " f=" + name;
    c.attempt(in, [&] {
      const ScalarFunction f = fn::from_name(name);
      const auto pd = expand::parametric_derivatives(a, x, y, z, f);
      auto F = [&](double s, double t) {
        return matcalc::matrix_function(herm(a.matrix() + s * x + t * y + s * t * z), f);
      };
      c.matrix(in + " form=first", pd.first, fd_matrix([&](double s) { return F(s, 0.0); }), 1e-6);
      c.matrix(in + " form=mixed", pd.mixed, fd_mixed(F), 1e-5);
    });
  }
}

void check_parametric_exp_nabla(Ctx& c) {
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(1, 4);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix x = c.rng.hermitian(d, 0.5);
    const Matrix y = c.rng.hermitian(d, 0.5);
    const Matrix z = c.rng.hermitian(d, 0.5);
    const std::string in = "dim=" + std::to_string(d);
    c.attempt(in, [&] {
      const auto slot = expand::parametric_derivatives(a, x, y, z, fn::exp());
      const auto nab = expand::parametric_derivatives_exp_nabla(a, x, y, z);
      c.matrix(in + " form=first", nab.first, slot.first, 1e-11);
      c.matrix(in + " form=mixed", nab.mixed, slot.mixed, 1e-11);
    });
  }
}

void check_nabla_cubic(Ctx& c) {
  const ScalarFunction f = fn::gaussian();
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(3, 3);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix b = c.rng.hermitian(d, 1.0);
    const Matrix x = c.rng.general(d, 1.0);
    const std::string in = "dim=" + std::to_string(d) + " f=gaussian eps=1e-2,5e-3";
    c.attempt(in, [&] {
      auto remainder = [&](double eps) {
        const Matrix direct = expand::nabla_apply(herm(a.matrix() + eps * b), f, x);
        return matcalc::spectral_norm(direct - expand::nabla_expansion_order2(a, eps * b, x, f).total());
      };
      c.ratio(in, remainder(1e-2) / remainder(5e-3), 8.0, 0.25);
    });
  }
}

void check_nabla_hermitian(Ctx& c) {
  const ScalarFunction f = fn::gaussian();
  for (int i = 0, n = c.count(10); i < n; ++i) {
    const int d = c.dim(1, 4);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix b = c.rng.hermitian(d, 0.5);
    const Matrix x = c.rng.hermitian(d, 1.0);
    const std::string in = "dim=" + std::to_string(d) + " f=gaussian";
    c.attempt(in, [&] {
      const Matrix t = expand::nabla_expansion_order2(a, b, x, f).total();
      c.matrix(in, t, t.adjoint(), 1e-10);
    });
  }
}

void check_trace_identity(Ctx& c) {
  const ScalarFunction f = fn::gaussian();
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(4, 4);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix b = c.rng.hermitian(d, 1.0);
    const Matrix x = c.rng.hermitian(d, 1.0);
    const Matrix y = c.rng.hermitian(d, 1.0);
    const std::string in = "dim=" + std::to_string(d) + " f=gaussian";
    c.attempt(in, [&] {
      const auto pr = expand::trace_derivative_identity(a, b, x, y, f);
      c.complex(in, pr.lhs, pr.rhs, 1e-10);
    });
  }
}

void check_trace_fd(Ctx& c) {
  const ScalarFunction f = fn::gaussian();
  const double h = 1e-4;
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(4, 4);
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    const Matrix b = c.rng.hermitian(d, 1.0);
    const Matrix x = c.rng.hermitian(d, 1.0);
    const Matrix y = c.rng.hermitian(d, 1.0);
    const std::string in = "dim=" + std::to_string(d) + " f=gaussian eps=1e-4";
    c.attempt(in, [&] {
      const auto pr = expand::trace_derivative_identity(a, b, x, y, f);
      auto phi = [&](double eps) {
        return expand::normalized_trace(expand::nabla_apply(herm(a.matrix() + eps * b), f, x) * y);
      };
      c.complex(in, pr.lhs, (phi(h) - phi(-h)) / (2.0 * h), 1e-6);
    });
  }
}

void check_doubled_contract(Ctx& c) {
  for (int i = 0, n = c.count(20); i < n; ++i) {
    const int d = c.dim(1, 3);
    const int order = 1 + i % 2;
    const HermitianMatrix a = herm(c.rng.hermitian(d, 1.0));
    std::vector<matcalc::OperandPair> pairs;
    for (int k = 0; k < order; ++k) {
      Matrix p1 = c.rng.general(d, 1.0);
      Matrix p2 = c.rng.general(d, 1.0);
      pairs.push_back({std::move(p1), std::move(p2)});
    }
    const Matrix x = c.rng.general(d, 1.0);
    const std::string name = i % 4 < 2 ? "gaussian" : "exp";
    const std::string in = "dim=" + std::to_string(d) + " n=" + std::to_string(order) + " g=[mu]" + name;
    c.attempt(in, [&] {
      const ScalarFunction f = fn::from_name(name);
      const matcalc::ContractionKernel::Fn g = [f](std::span<const double> mu) -> Complex {
        return dd::dd_confluent(NodeSystem::from_values(std::vector<double>(mu.begin(), mu.end())), f);
      };
      const auto kernel = matcalc::ContractionKernel::slots(order + 1, g);
      c.matrix(in, matcalc::doubled_contract(a, kernel, pairs, x),
               doubled_brute_force(a.matrix(), g, pairs, x), 1e-10);
    });
  }
}

// ---------------------------------------------------------------------------
// Registry.

using CheckFn = void (*)(Ctx&);

struct CheckEntry {
  const char* suite;
  const char* name;
  CheckFn fn;
};

const std::vector<CheckEntry>& registry() {
  static const std::vector<CheckEntry> r = {
      {"ddcore", "dd_genocchi", check_dd_genocchi},
      {"ddcore", "dd_contour", check_dd_contour},
      {"ddcore", "dd_permutation", check_dd_permutation},
      {"ddcore", "dd_polynomial", check_dd_polynomial},
      {"ddcore", "dd_translation", check_dd_translation},
      {"ddcore", "dd_collapse", check_dd_collapse},
      {"funcs", "h_integral", check_h_integral},
      {"funcs", "integral_forms", check_integral_forms},
      {"funcs", "homogeneity", check_homogeneity},
      {"funcs", "scaling_reduction", check_scaling_reduction},
      {"funcs", "pi_formula2", check_pi_formula2},
      {"funcs", "euler_form", check_euler_form},
      {"funcs", "hcm_grid", check_hcm_grid},
      {"funcs", "hcm_fuzz", check_hcm_fuzz},
      {"funcs", "hcm_relations", check_hcm_relations},
      {"funcs", "mellin", check_mellin},
      {"funcs", "general_z", check_general_z},
      {"funcs", "general_z_limit", check_general_z_limit},
      {"funcs", "basic_function", check_basic_function},
      {"rearrangement", "rearrangement", check_rearrangement},
      {"rearrangement", "rearrangement_scale", check_rearrangement_scale},
      {"rearrangement", "rearrangement_hermitian", check_rearrangement_hermitian},
      {"rearrangement", "rearrangement_nonint", check_rearrangement_nonint},
      {"substitution", "osl", check_osl},
      {"substitution", "spectral_fubini", check_spectral_fubini},
      {"expansion", "exp_paths", check_exp_paths},
      {"expansion", "exp_simplex", check_exp_simplex},
      {"expansion", "exp_remainder", check_exp_remainder},
      {"expansion", "magnus_order", check_magnus_order},
      {"nabla", "daleckii_krein", check_daleckii_krein},
      {"nabla", "parametric", check_parametric},
      {"nabla", "parametric_exp_nabla", check_parametric_exp_nabla},
      {"nabla", "nabla_cubic", check_nabla_cubic},
      {"nabla", "nabla_hermitian", check_nabla_hermitian},
      {"nabla", "trace_identity", check_trace_identity},
      {"nabla", "trace_fd", check_trace_fd},
      {"nabla", "doubled_contract", check_doubled_contract},
      {"identities", "even_k", check_even_k},
      {"identities", "bernoulli_footnote", check_bernoulli_footnote},
      {"identities", "leibniz", check_leibniz},
      {"identities", "substitution", check_substitution},
  };
  return r;
}

// Each check draws from its own stream so subsets and orderings of checks
// reproduce the same cases.
std::uint64_t check_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"ddcore", "funcs", "rearrangement", "substitution",
                                                 "expansion", "nabla", "identities"};
  return names;
}

bool is_suite(const std::string& name) {
  const auto& s = suite_names();
  return name == "all" || std::find(s.begin(), s.end(), name) != s.end();
}

const std::vector<std::string>& check_names(const std::string& suite) {
  static const std::map<std::string, std::vector<std::string>> by_suite = [] {
    std::map<std::string, std::vector<std::string>> m;
    for (const auto& e : registry()) {
      m[e.suite].push_back(e.name);
      m["all"].push_back(e.name);
    }
    return m;
  }();
  const auto it = by_suite.find(suite);
  if (it == by_suite.end()) throw PreconditionError("unknown suite '" + suite + "'");
  return it->second;
}

SuiteReport run_checks(const std::string& label, const std::vector<std::string>& checks,
                       const RunConfig& config) {
  if (!(config.tol_scale > 0.0)) throw PreconditionError("tolerance scale must be positive");
  if (config.dim < 0 || config.cases < 0) throw PreconditionError("dim and cases must be non-negative");
  SuiteReport report;
  report.suite = label;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& name : checks) {
    const auto it = std::find_if(registry().begin(), registry().end(),
                                 [&](const CheckEntry& e) { return name == e.name; });
    if (it == registry().end()) throw PreconditionError("unknown check '" + name + "'");
    Ctx ctx{name, Rng(check_seed(config.seed, name)), config, report.cases};
    it->fn(ctx);
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SuiteReport run_suite(const std::string& name, const RunConfig& config) {
  if (!is_suite(name)) throw PreconditionError("unknown suite '" + name + "'");
  return run_checks(name, check_names(name), config);
}

}  // namespace ddcalc::verify
