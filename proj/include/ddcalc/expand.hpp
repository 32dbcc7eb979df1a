#pragma once

// Noncommutative Taylor expansions written with divided-difference kernels:
//
//   f(a + b) ~ sum_n ([a^(0), ..., a^(n)] f)(b, ..., b)
//
// and the corresponding second-order expansion of f(nabla_{a+b})(x), where
// nabla_a(x) = -a x + x a.

#include <complex>
#include <vector>

#include "ddcalc/matcalc.hpp"
#include "ddcalc/quad.hpp"
#include "ddcalc/scalar_function.hpp"

namespace ddcalc::expand {

using matcalc::Complex;
using matcalc::HermitianMatrix;
using matcalc::Matrix;

// ([l_0, ..., l_n] exp)(b, ..., b).
Matrix exp_expansion_term(const HermitianMatrix& a, const Matrix& b, int n);

// e^a ([0, l_1 - l_0, ..., l_n - l_0] exp)(b, ..., b).
Matrix exp_expansion_variant_nabla(const HermitianMatrix& a, const Matrix& b, int n);

// Matrix quadrature over 1 >= s_1 >= ... >= s_n >= 0 of
// e^{(1-s_1)a} b e^{(s_1-s_2)a} b ... b e^{s_n a}.
Matrix exp_expansion_simplex(const HermitianMatrix& a, const Matrix& b, int n,
                             const quad::QuadratureSpec& spec = {});

struct ExpansionReport {
  int order = 0;
  std::vector<Matrix> terms;         // n = 0..order
  std::vector<Matrix> partial_sums;  // sum_{k <= n} terms_k
  Matrix target;                     // e^{a+b}
  std::vector<double> remainders;    // spectral norm of target - partial_sum_n
};

ExpansionReport exp_expansion_report(const HermitianMatrix& a, const HermitianMatrix& b, int order);

// ([l_0, ..., l_n] f)(b, ..., b).
Matrix taylor_term(const HermitianMatrix& a, const Matrix& b, const ScalarFunction& f, int n);

struct ParametricDerivatives {
  Matrix first;  // d/ds f(a(s, 0)) at 0
  Matrix mixed;  // d^2/(ds dt) f(a(s, t)) at 0
};

// For a(s, t) with a(0,0) = a, d_1 a, d_2 a, d_1 d_2 a given:
//   first = ([l_0, l_1] f)(d_1 a)
//   mixed = ([l_0, l_1] f)(d_1 d_2 a) + ([l_0, l_1, l_2] f)(d_1 a d_2 a + d_2 a d_1 a)
ParametricDerivatives parametric_derivatives(const HermitianMatrix& a, const Matrix& d1,
                                             const Matrix& d2, const Matrix& d12,
                                             const ScalarFunction& f);

// Same quantities for f = exp through e^a and the nabla-variable kernels
// [0, s] exp = (e^s - 1)/s and [0, s, s + t] exp.
ParametricDerivatives parametric_derivatives_exp_nabla(const HermitianMatrix& a, const Matrix& d1,
                                                       const Matrix& d2, const Matrix& d12);

// [0, s, s + t] exp, closed form away from the confluent set.
double exp_dd_0_s_st(double s, double t);

// f(nabla_a)(x).
Matrix nabla_apply(const HermitianMatrix& a, const ScalarFunction& f, const Matrix& x);

struct NablaExpansion {
  Matrix zeroth;     // f(nabla_a)(x)
  Matrix linear;     // terms with one b
  Matrix quadratic;  // terms with two b
  std::vector<Matrix> terms;  // the seven individual contractions
  Matrix total() const { return zeroth + linear + quadratic; }
};

NablaExpansion nabla_expansion_order2(const HermitianMatrix& a, const Matrix& b, const Matrix& x,
                                      const ScalarFunction& f);

struct TracePair {
  Complex lhs;
  Complex rhs;
};

// With phi = tr / dim:
//   lhs = phi(L y), L the first-order part of f(nabla_{a + eps b})(x)
//   rhs = -phi(b ([l_1 - l_0, l_1 - l_2] f)(x, y)) + phi(b ([l_0 - l_1, l_2 - l_1] f)(y, x))
TracePair trace_derivative_identity(const HermitianMatrix& a, const Matrix& b, const Matrix& x,
                                    const Matrix& y, const ScalarFunction& f);

Complex normalized_trace(const Matrix& m);

}  // namespace ddcalc::expand
