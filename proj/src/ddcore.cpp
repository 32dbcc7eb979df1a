#include "ddcalc/ddcore.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>

#include "ddcalc/errors.hpp"

namespace ddcalc {

NodeSystem::NodeSystem(std::vector<Entry> entries, double coalesce_tol) : tol_(coalesce_tol) {
  if (!(coalesce_tol >= 0.0)) throw PreconditionError("coalescing tolerance must be >= 0");
  for (const auto& e : entries) {
    if (e.multiplicity < 1) throw PreconditionError("node multiplicity must be >= 1");
    if (!std::isfinite(e.value)) throw PreconditionError("node values must be finite");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.value < b.value; });
  // Single-linkage clustering of the sorted values.
  std::size_t i = 0;
  while (i < entries.size()) {
    double weighted = entries[i].value * entries[i].multiplicity;
    int mult = entries[i].multiplicity;
    std::size_t j = i + 1;
    while (j < entries.size() &&
           entries[j].value - entries[j - 1].value <=
               tol_ * std::max(1.0, std::abs(entries[j].value))) {
      weighted += entries[j].value * entries[j].multiplicity;
      mult += entries[j].multiplicity;
      ++j;
    }
    const double value = (j == i + 1) ? entries[i].value : weighted / mult;
    entries_.push_back({value, mult});
    i = j;
  }
}

NodeSystem NodeSystem::from_values(const std::vector<double>& values, double coalesce_tol) {
  std::vector<Entry> entries;
  entries.reserve(values.size());
  for (double v : values) entries.push_back({v, 1});
  return NodeSystem(std::move(entries), coalesce_tol);
}

int NodeSystem::order() const {
  int total = 0;
  for (const auto& e : entries_) total += e.multiplicity;
  return total - 1;
}

int NodeSystem::max_multiplicity() const {
  int m = 0;
  for (const auto& e : entries_) m = std::max(m, e.multiplicity);
  return m;
}

std::vector<double> NodeSystem::flat() const {
  std::vector<double> out;
  for (const auto& e : entries_) out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.value);
  return out;
}

NodeSystem NodeSystem::merge(const NodeSystem& other) const {
  std::vector<Entry> all = entries_;
  all.insert(all.end(), other.entries_.begin(), other.entries_.end());
  return NodeSystem(std::move(all), tol_);
}

namespace dd {

namespace {

void require_nonempty(const NodeSystem& nodes) {
  if (nodes.empty()) throw PreconditionError("divided difference needs at least one node");
}

void require_simple(const NodeSystem& nodes, const char* what) {
  if (!nodes.all_simple()) {
    throw PreconditionError(std::string(what) +
                            " requires pairwise distinct nodes; use dd_confluent");
  }
}

// Distinct values closer than this (relative, floor 1) are grouped into a
// cluster whose divided differences come from a Taylor expansion instead of
// the recursion, which loses about log10(1/gap) digits per level.
constexpr double kClusterGap = 0.05;
constexpr int kTaylorTerms = 60;

// Distance from c to the nearest point where f may fail to be analytic.
double analytic_radius(const ScalarFunction& f, double c) {
  double r = std::min(c - f.domain().lo, f.domain().hi - c);
  if (f.singular_edge()) r = std::min(r, std::abs(c - *f.singular_edge()));
  return r;
}

// Taylor data of f about a cluster center: coef[r] = f^(r)(c) / r!.
class TaylorCluster {
 public:
  TaylorCluster(const ScalarFunction& f, double center) : f_(&f), center_(center) {}

  double center() const { return center_; }

  // [z_0, ..., z_k]f = sum_{r >= k} coef[r] h_{r-k}(z - c), with h the
  // complete homogeneous symmetric polynomials. nullopt if the series does
  // not settle.
  std::optional<double> dd(std::span<const double> z) {
    const std::size_t k = z.size() - 1;
    std::vector<double> h(kTaylorTerms + 1);
    const double u0 = z[0] - center_;
    h[0] = 1.0;
    for (int m = 1; m <= kTaylorTerms; ++m) h[m] = h[m - 1] * u0;
    for (std::size_t i = 1; i < z.size(); ++i) {
      const double u = z[i] - center_;
      for (int m = 1; m <= kTaylorTerms; ++m) h[m] += u * h[m - 1];
    }
    double sum = 0.0;
    int small = 0;
    for (int t = 0; t <= kTaylorTerms; ++t) {
      const auto c = coef(static_cast<int>(k) + t);
      if (!c) return std::nullopt;
      const double term = *c * h[t];
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) {
        if (++small >= 2) return sum;
      } else {
        small = 0;
      }
    }
    return std::nullopt;
  }

 private:
  std::optional<double> coef(int r) {
    while (static_cast<int>(coef_.size()) <= r) {
      const int j = static_cast<int>(coef_.size());
      inv_fact_ = j == 0 ? 1.0 : inv_fact_ / j;
      const double v = f_->deriv(j, center_) * inv_fact_;
      if (!std::isfinite(v)) return std::nullopt;
      coef_.push_back(v);
    }
    return coef_[static_cast<std::size_t>(r)];
  }

  const ScalarFunction* f_;
  double center_;
  double inv_fact_ = 1.0;
  std::vector<double> coef_;
};

// Lower-triangular table q[i][j] = [z_{i-j}, ..., z_i]f over the flat tuple.
std::vector<std::vector<double>> tableau(const NodeSystem& nodes, const ScalarFunction& f) {
  require_nonempty(nodes);
  const int need = nodes.max_multiplicity() - 1;
  if (need > f.max_order()) {
    std::ostringstream os;
    os << f.name() << " supplies derivatives up to order " << f.max_order()
       << " but the node system needs order " << need;
    throw CapabilityError(os.str());
  }
  const auto& entries = nodes.entries();

  // Clusters of distinct values (index into `clusters`, -1 for none).
  std::vector<int> entry_cluster(entries.size(), -1);
  std::vector<TaylorCluster> clusters;
  if (f.max_order() == ScalarFunction::kUnbounded) {
    std::size_t i = 0;
    while (i < entries.size()) {
      std::size_t j = i + 1;
      while (j < entries.size()) {
        const double lo = entries[i].value, hi = entries[j].value;
        const double c = 0.5 * (lo + hi);
        const double gap = hi - entries[j - 1].value;
        const double limit = std::min(0.25 * std::max(1.0, std::abs(c)), 0.25 * analytic_radius(f, c));
        if (gap > kClusterGap * std::max(1.0, std::abs(hi)) || hi - lo > limit) break;
        ++j;
      }
      if (j > i + 1) {
        const int id = static_cast<int>(clusters.size());
        clusters.emplace_back(f, 0.5 * (entries[i].value + entries[j - 1].value));
        for (std::size_t k = i; k < j; ++k) entry_cluster[k] = id;
      }
      i = j;
    }
  }

  std::vector<double> z;
  std::vector<std::size_t> group_start;
  std::vector<int> cluster_of;
  std::vector<std::vector<double>> seeds;  // per flat index: f^(j)(z)/j!
  for (std::size_t g = 0; g < entries.size(); ++g) {
    const auto& e = entries[g];
    std::vector<double> d(static_cast<std::size_t>(e.multiplicity));
    double fact = 1.0;
    for (int j = 0; j < e.multiplicity; ++j) {
      if (j > 0) fact *= j;
      d[static_cast<std::size_t>(j)] = f.deriv(j, e.value) / fact;
    }
    const std::size_t start = z.size();
    for (int c = 0; c < e.multiplicity; ++c) {
      z.push_back(e.value);
      group_start.push_back(start);
      cluster_of.push_back(entry_cluster[g]);
      seeds.push_back(d);
    }
  }
  const std::size_t n = z.size();
  std::vector<std::vector<double>> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i].resize(i + 1);
    q[i][0] = seeds[i][0];
    for (std::size_t j = 1; j <= i; ++j) {
      if (i - j >= group_start[i]) {
        q[i][j] = seeds[i][j];
        continue;
      }
      const int cl = cluster_of[i];
      if (cl >= 0 && cluster_of[i - j] == cl) {
        const auto t = clusters[static_cast<std::size_t>(cl)].dd(
            std::span<const double>(z.data() + (i - j), j + 1));
        if (t) {
          q[i][j] = *t;
          continue;
        }
      }
      q[i][j] = (q[i][j - 1] - q[i - 1][j - 1]) / (z[i] - z[i - j]);
    }
  }
  return q;
}

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

double dd_recursive(const NodeSystem& nodes, const ScalarFunction& f) {
  require_nonempty(nodes);
  require_simple(nodes, "dd_recursive");
  return tableau(nodes, f).back().back();
}

double dd_confluent(const NodeSystem& nodes, const ScalarFunction& f) {
  return tableau(nodes, f).back().back();
}

double dd_explicit(const NodeSystem& nodes, const ScalarFunction& f) {
  require_nonempty(nodes);
  require_simple(nodes, "dd_explicit");
  const auto& e = nodes.entries();
  double sum = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    double denom = 1.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (k != j) denom *= e[j].value - e[k].value;
    }
    sum += f(e[j].value) / denom;
  }
  return sum;
}

double dd_hermite_genocchi(const NodeSystem& nodes, const ScalarFunction& f,
                           const quad::QuadratureSpec& spec) {
  require_nonempty(nodes);
  const std::vector<double> x = nodes.flat();
  const int n = static_cast<int>(x.size()) - 1;
  if (n > f.max_order()) {
    throw CapabilityError(f.name() + " lacks the derivative order needed by the simplex formula");
  }
  if (n == 0) return f(x[0]);
  std::vector<double> step(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) step[static_cast<std::size_t>(k)] = x[k + 1] - x[k];
  auto integrand = [&](std::span<const double> t) {
    double arg = x[0];
    for (int k = 0; k < n; ++k) arg += t[k] * step[static_cast<std::size_t>(k)];
    return f.deriv(n, arg);
  };
  return quad::integrate_simplex(n, integrand, spec).value;
}

double dd_contour(const NodeSystem& nodes, const ScalarFunction& f, double center, double radius,
                  int points) {
  require_nonempty(nodes);
  if (!f.has_complex()) throw CapabilityError(f.name() + " has no complex extension");
  if (!(radius > 0.0)) throw GeometryError("contour radius must be positive");
  if (points < 4) throw PreconditionError("contour needs at least 4 points");
  for (const auto& e : nodes.entries()) {
    if (!f.domain().contains(e.value)) {
      std::ostringstream os;
      os.precision(17);
      os << "node " << e.value << " lies outside the domain of " << f.name();
      throw DomainError(os.str());
    }
    const double dist = std::abs(e.value - center);
    if (dist >= radius * (1.0 - 1e-8)) {
      std::ostringstream os;
      os.precision(17);
      os << "contour does not strictly enclose node " << e.value;
      throw GeometryError(os.str());
    }
  }
  if (f.singular_edge() && center - radius <= *f.singular_edge() + 1e-12 * std::max(1.0, radius)) {
    throw GeometryError("contour touches or encloses a singularity of " + f.name());
  }
  using C = std::complex<double>;
  C sum = 0.0;
  for (int k = 0; k < points; ++k) {
    const double theta = 2.0 * std::numbers::pi * (k + 0.5) / points;
    const C w = radius * C(std::cos(theta), std::sin(theta));
    const C zeta = center + w;
    C denom = 1.0;
    for (const auto& e : nodes.entries()) {
      const C d = zeta - e.value;
      for (int c = 0; c < e.multiplicity; ++c) denom *= d;
    }
    sum += f.eval_complex(zeta) * w / denom;
  }
  return (sum / static_cast<double>(points)).real();
}

ContourGeometry contour_geometry(const NodeSystem& nodes, const ScalarFunction& f) {
  require_nonempty(nodes);
  const double lo = nodes.entries().front().value;
  const double hi = nodes.entries().back().value;
  const double center = 0.5 * (lo + hi);
  const double rho = 0.5 * (hi - lo);
  if (f.singular_edge()) {
    const double reach = center - *f.singular_edge();
    if (!(reach > rho)) throw GeometryError("nodes touch the singular set of " + f.name());
    return {center, std::sqrt(std::max(rho, 0.05 * reach) * reach)};
  }
  return {center, rho + std::max(rho, 1.0)};
}

double dd_contour_auto(const NodeSystem& nodes, const ScalarFunction& f, double tolerance) {
  const ContourGeometry g = contour_geometry(nodes, f);
  double prev = dd_contour(nodes, f, g.center, g.radius, 32);
  double diff = 0.0;
  for (int points = 64; points <= 4096; points *= 2) {
    const double cur = dd_contour(nodes, f, g.center, g.radius, points);
    diff = std::abs(cur - prev);
    if (diff <= tolerance * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw ToleranceError("contour rule did not converge", prev, diff);
}

double leibniz_rhs(const NodeSystem& nodes, const ScalarFunction& f, const ScalarFunction& g) {
  const auto qf = tableau(nodes, f);
  const auto qg = tableau(nodes, g);
  const std::size_t n = qf.size() - 1;
  double sum = 0.0;
  for (std::size_t j = 0; j <= n; ++j) sum += qf[j][j] * qg[n][n - j];
  return sum;
}

ScalarFunction partial_dd(const NodeSystem& prefix, const ScalarFunction& f) {
  auto deriv = [prefix, f](int k, double x) {
    const NodeSystem merged = prefix.merge(NodeSystem({{x, k + 1}}, prefix.coalesce_tol()));
    return factorial(k) * dd_confluent(merged, f);
  };
  return ScalarFunction("dd[" + f.name() + "]", f.domain(), f.max_order(), deriv);
}

SubstitutionResult dd_substitute(const NodeSystem& prefix, const NodeSystem& nodes,
                                 const ScalarFunction& f) {
  require_nonempty(nodes);
  SubstitutionResult r{};
  r.merged = dd_confluent(prefix.merge(nodes), f);
  r.nested = prefix.empty() ? dd_confluent(nodes, f) : dd_confluent(nodes, partial_dd(prefix, f));
  return r;
}

}  // namespace dd

}  // namespace ddcalc
