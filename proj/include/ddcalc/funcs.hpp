#pragma once

// Special functions defined by half-line integrals of rational-times-power
// integrands, and their divided-difference closed forms.
//
//   M(s, z) = \int_0^inf x^{|a|+p-1-z} prod_j (1 + s_j x)^{-a_j-1} dx
//   H(s', z) = M((1, s'), z)

#include <optional>
#include <vector>

#include "ddcalc/quad.hpp"
#include "ddcalc/scalar_function.hpp"

namespace ddcalc::funcs {

struct MultiIndex {
  std::vector<int> parts;  // (a_0, ..., a_p)

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> p);

  int p() const { return static_cast<int>(parts.size()) - 1; }
  int order() const;        // |a|
  double factorial() const;  // a!
  MultiIndex prime() const;  // (0, a_1, ..., a_p)
};

struct HArgs {
  MultiIndex alpha;
  std::vector<double> s;  // p values for H, p + 1 values for M
  int m = 0;
};

// L_m(s) = (-1)^m [1^{m+1}, s] log.
double mod_log(int m, double s);

// M(s, m) = (-1)^{m+|a|+p-1} [s_0^{a_0+1}, ..., s_p^{a_p+1}] id^m log.
double m_func(const HArgs& args);
double m_func(const MultiIndex& alpha, const std::vector<double>& s, int m);

// H(s, m) = M((1, s), m).
double h_func(const HArgs& args);
double h_func(const MultiIndex& alpha, const std::vector<double>& s, int m);

// Direct quadrature of the defining integral of M (first form) and of the
// x -> 1/x transformed form; used as an independent check of m_func.
double m_func_integral(const MultiIndex& alpha, const std::vector<double>& s, double z,
                       const quad::QuadratureSpec& spec = {});
double m_func_integral_dual(const MultiIndex& alpha, const std::vector<double>& s, double z,
                            const quad::QuadratureSpec& spec = {});

// M with a = 0 for non-integer z in (-1, q), t pairwise distinct (q + 1 of
// them): (-1)^{q-1} pi / sin(pi z) [t_0, ..., t_q] id^z.
double m_func_general_z(const std::vector<double>& t, double z);

// \int_0^inf x^{z-1} (1+x)^{-m-1} dx for 0 < z < 1.
double mellin_basic(double z, int m);

// H^CM_{i,j,k}(a, b) = H with a = (i-1, j-1, k-1), p = 2, m = 0.
double hcm(int i, int j, int k, double a, double b);

// Explicit log/rational forms for (i,j,k) in {111, 121, 211, 221, 311};
// nullopt for other indices. Requires a, b, 1 pairwise distinct.
std::optional<double> hcm_closed_form(int i, int j, int k, double a, double b);

// H via the Euler-operator form: the falling-factorial polynomial of degree
// a_0 in E = sum_k s_k d/ds_k, applied numerically to the exact confluent
// divided difference d_s^{a'} [1, s_1, ..., s_p] id^m log.
double euler_operator_form(const HArgs& args, const quad::DiffSpec& spec = {});

struct IdentityPair {
  double lhs;
  double rhs;
};

// For even K: the three-quotient expression in K(a), K(b), K(a+b) and its
// rewriting [-a, b]K + [a+b, b]K - [a+b, a]K.
IdentityPair k_identity_pair(const ScalarFunction& K, double a, double b);

// s / (e^s - 1), equal to 1 at s = 0.
double bernoulli_gen(double s);
// B_j / j! for j = 0..n.
std::vector<double> bernoulli_coeffs(int n);
// Partial sum sum_{j<=n} B_j s^j / j!.
double bernoulli_series(double s, int n);

struct Factorials {
  double rising;
  double falling;
};

Factorials factorials(double a, int n);

}  // namespace ddcalc::funcs
