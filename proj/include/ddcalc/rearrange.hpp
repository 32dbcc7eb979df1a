#pragma once

// Matrix-scale checks of the multiplicative substitution identity
//
//   \int_0^inf f(uR_0, ..., uR_n) du = R_0^{-1} G(R_0^{-1}R_1, ..., R_0^{-1}R_n)
//
// for commuting positive matrices, and of the rearrangement identity
//
//   \int_0^inf f_0(uA) b_1 f_1(uA) ... b_p f_p(uA) du
//       = A^{-1} F(D^(1), D^(1)D^(2), ...)(b_1 ... b_p)
//
// with A = e^a, f_0(x) = x^nu (1+x)^{-a_0-1}, f_j(x) = (1+x)^{-a_j-1}.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ddcalc/funcs.hpp"
#include "ddcalc/matcalc.hpp"
#include "ddcalc/quad.hpp"

namespace ddcalc::rearrange {

using matcalc::HermitianMatrix;
using matcalc::Matrix;

struct RearrangementCase {
  funcs::MultiIndex alpha;  // (a_0, ..., a_p)
  double nu = 0.0;          // -1 < nu < |a| + p
  HermitianMatrix a;        // A = exp(a)
  std::vector<Matrix> b;    // p operands
  quad::QuadratureSpec quad{};

  // |a| + p - 1 - nu when nu is an integer, nullopt otherwise.
  std::optional<int> m() const;
  void validate() const;
};

// Matrix-valued half-line quadrature of the alternating product.
Matrix rearrangement_lhs(const RearrangementCase& c);

// A^{-1} times the modular contraction with F(s) = H(s, m). A non-integer
// nu is supported only for p = 1 and a = (0, 0), where
// F(s) = pi / sin(-pi nu) [1, s] id^{-nu}.
Matrix rearrangement_rhs(const RearrangementCase& c);

// x_0^nu prod_j (1 + x_j)^{-a_j-1}.
using MultiFn = std::function<double(std::span<const double>)>;
MultiFn osl_integrand(const funcs::MultiIndex& alpha, double nu);

// Common eigenbasis of a commuting family; values[j][i] is the eigenvalue of
// R_j on the i-th basis vector.
struct JointSpectrum {
  Matrix unitary;
  std::vector<std::vector<double>> values;
};

// Throws PreconditionError if some commutator exceeds 1e-10 (relative to
// the largest entry) or the family is not simultaneously diagonal in the
// computed basis.
JointSpectrum joint_diagonalize(const std::vector<HermitianMatrix>& R);

struct MatrixPair {
  Matrix lhs;
  Matrix rhs;
};

// lhs: Bochner quadrature of u -> f(uR_0, ..., uR_n).
// rhs: R_0^{-1} G(R_0^{-1}R_1, ...) with G evaluated per joint eigenvalue
// ratio tuple by scalar quadrature.
MatrixPair operator_substitution_check(const std::vector<HermitianMatrix>& R, const MultiFn& f,
                                       const quad::QuadratureSpec& spec = {});

// lhs: Bochner quadrature of u -> f(u, R_0, ..., R_n).
// rhs: F(R_0, ..., R_n) with F(l) = \int f(u, l) du per joint tuple.
using ParamFn = std::function<double(double, std::span<const double>)>;
MatrixPair spectral_fubini_check(const std::vector<HermitianMatrix>& R, const ParamFn& f,
                                 const quad::QuadratureSpec& spec = {});

}  // namespace ddcalc::rearrange
