#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ddcalc {

// Open real interval (lo, hi).
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x < hi; }
};

// A smooth real function that can report derivatives of every order up to
// max_order, and optionally its holomorphic extension.
//
// When a complex extension is present, `singular_edge` (if set) marks the
// right end of the set where the extension fails to be holomorphic: a
// branch cut (-inf, edge] or a pole at edge. Entire functions leave it
// empty.
class ScalarFunction {
 public:
  static constexpr int kUnbounded = std::numeric_limits<int>::max();

  using DerivFn = std::function<double(int, double)>;
  using ComplexFn = std::function<std::complex<double>(std::complex<double>)>;

  ScalarFunction(std::string name, Interval domain, int max_order, DerivFn deriv,
                 ComplexFn complex_eval = {}, std::optional<double> singular_edge = {});

  const std::string& name() const { return name_; }
  const Interval& domain() const { return domain_; }
  int max_order() const { return max_order_; }

  double operator()(double x) const { return deriv(0, x); }
  double deriv(int k, double x) const;

  bool has_complex() const { return static_cast<bool>(complex_); }
  std::complex<double> eval_complex(std::complex<double> z) const;
  const std::optional<double>& singular_edge() const { return singular_edge_; }

 private:
  std::string name_;
  Interval domain_;
  int max_order_;
  DerivFn deriv_;
  ComplexFn complex_;
  std::optional<double> singular_edge_;
};

namespace fn {

ScalarFunction exp();
ScalarFunction exp_scaled(double c);            // e^{c x}
ScalarFunction log();
ScalarFunction idm_log(int m);                  // x^m log x
ScalarFunction power(double z);                 // x^z on (0, inf)
ScalarFunction polynomial(std::vector<double> coeffs);  // c0 + c1 x + ...
ScalarFunction identity();
ScalarFunction gaussian(double width = 1.0);    // exp(-(x / width)^2)
ScalarFunction cosh_scaled(double c);           // cosh(c x)
ScalarFunction basic();                          // 1 / (1 + x)
ScalarFunction mod_log(int m);                  // L_m
ScalarFunction bernoulli();                     // x / (e^x - 1), removable at 0
ScalarFunction bernoulli_even();                // (x/2) coth(x/2)

ScalarFunction product(const ScalarFunction& f, const ScalarFunction& g);
ScalarFunction shifted(const ScalarFunction& f, double c);  // x -> f(x + c)

// Catalog lookup by name: exp, log, idmlog:m, modlog:m, gaussian, cosh,
// basic, bernoulli, poly:c0,c1,...  Throws PreconditionError on unknown names.
ScalarFunction from_name(const std::string& name);

}  // namespace fn

}  // namespace ddcalc
