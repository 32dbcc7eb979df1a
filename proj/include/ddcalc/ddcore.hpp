#pragma once

// Divided differences [x_0, ..., x_n]f with repeated nodes, plus the
// independent evaluation routes used to cross-check them.

#include <optional>
#include <vector>

#include "ddcalc/quad.hpp"
#include "ddcalc/scalar_function.hpp"

namespace ddcalc {

// Multiset of real nodes. Entries are kept sorted by value; values closer than
// the coalescing tolerance (relative, with an absolute floor of the same size
// for |x| < 1) are merged into one entry whose value is the
// multiplicity-weighted mean.
class NodeSystem {
 public:
  static constexpr double kDefaultCoalesceTol = 1e-8;

  struct Entry {
    double value;
    int multiplicity;
  };

  NodeSystem() = default;
  explicit NodeSystem(std::vector<Entry> entries, double coalesce_tol = kDefaultCoalesceTol);

  // Every value with multiplicity one before coalescing.
  static NodeSystem from_values(const std::vector<double>& values,
                                double coalesce_tol = kDefaultCoalesceTol);

  const std::vector<Entry>& entries() const { return entries_; }
  double coalesce_tol() const { return tol_; }
  bool empty() const { return entries_.empty(); }
  // n = (sum of multiplicities) - 1; -1 for the empty system.
  int order() const;
  int max_multiplicity() const;
  bool all_simple() const { return max_multiplicity() <= 1; }
  // Expanded tuple (u_0, ..., u_n), copies of a value adjacent.
  std::vector<double> flat() const;
  // Union as multisets, coalesced with this system's tolerance.
  NodeSystem merge(const NodeSystem& other) const;

 private:
  std::vector<Entry> entries_;
  double tol_ = kDefaultCoalesceTol;
};

namespace dd {

// Two-term recursion; requires pairwise distinct nodes.
double dd_recursive(const NodeSystem& nodes, const ScalarFunction& f);

// Hermite-Newton tableau seeded with f^(j)(x)/j! on repeated nodes.
double dd_confluent(const NodeSystem& nodes, const ScalarFunction& f);

// Sum of f(x_j) / prod_{k != j}(x_j - x_k); distinct nodes only. Meant for
// well separated nodes (cancels badly for clustered ones).
double dd_explicit(const NodeSystem& nodes, const ScalarFunction& f);

// Integral of f^(n)(x_0 + sum_k t_k (x_k - x_{k-1})) over the ordered simplex.
double dd_hermite_genocchi(const NodeSystem& nodes, const ScalarFunction& f,
                           const quad::QuadratureSpec& spec = {});

// Trapezoidal rule for (1/2 pi i) \oint f(z) / prod (z - x_j) dz on the circle
// |z - center| = radius, sampled at `points` equispaced points.
double dd_contour(const NodeSystem& nodes, const ScalarFunction& f, double center, double radius,
                  int points);

struct ContourGeometry {
  double center;
  double radius;
};

// Circle separating the nodes from the singular set of f, balancing the two
// geometric convergence rates of the trapezoidal rule.
ContourGeometry contour_geometry(const NodeSystem& nodes, const ScalarFunction& f);

// dd_contour on contour_geometry, doubling the point count (64 .. 4096) until
// two successive values agree to `tolerance` (relative, floor 1).
double dd_contour_auto(const NodeSystem& nodes, const ScalarFunction& f,
                       double tolerance = 1e-13);

// sum_j [u_0..u_j]f * [u_j..u_n]g over the flat tuple.
double leibniz_rhs(const NodeSystem& nodes, const ScalarFunction& f, const ScalarFunction& g);

struct SubstitutionResult {
  double merged;  // [y_0..y_p, x_0..x_q]f
  double nested;  // [x_0..x_q]g with g(x) = [y_0..y_p, x]f
};

SubstitutionResult dd_substitute(const NodeSystem& prefix, const NodeSystem& nodes,
                                 const ScalarFunction& f);

// x -> [y_0, ..., y_p, x]f as a ScalarFunction; its k-th derivative is
// k! [y_0, ..., y_p, x^{k+1}]f.
ScalarFunction partial_dd(const NodeSystem& prefix, const ScalarFunction& f);

}  // namespace dd

}  // namespace ddcalc
