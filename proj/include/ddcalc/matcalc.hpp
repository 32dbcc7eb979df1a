#pragma once

// Multi-slot functional calculus for Hermitian matrices.
//
// A kernel phi(l_0, ..., l_n) acts on operands b_1, ..., b_n through the
// eigendecomposition a = U diag(l) U*:
//
//   C~[i_0, i_n] = sum phi(l_{i_0}, ..., l_{i_n}) B_1[i_0, i_1] ... B_n[i_{n-1}, i_n]
//
// with B_k = U* b_k U, and the result is U C~ U*.

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ddcalc/scalar_function.hpp"

namespace ddcalc::matcalc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

class HermitianMatrix {
 public:
  // Throws PreconditionError unless |M - M*|_max <= 1e-12 |M|_max.
  explicit HermitianMatrix(Matrix m);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Matrix m_;
};

struct SpectralData {
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix unitary;               // columns are eigenvectors
};

// Eigen-backed Hermitian eigensolver; each eigenvector is rotated so that
// its first component of modulus > 1e-12 is real and positive.
SpectralData eigh(const HermitianMatrix& a);

// How a kernel reads the eigenvalue tuple (l_0, ..., l_n):
//   slots:   phi(l_0, ..., l_n)
//   nabla:   phi(l_1 - l_0, ..., l_n - l_{n-1})
//   modular: phi(l_1 / l_0, ..., l_n / l_0)
enum class Variables { slots, nabla, modular };

struct ContractionKernel {
  using Fn = std::function<Complex(std::span<const double>)>;

  int arity = 1;  // number of arguments of eval
  Variables variables = Variables::slots;
  Fn eval;

  static ContractionKernel slots(int arity, Fn fn);
  static ContractionKernel nabla(int arity, Fn fn);
  static ContractionKernel modular(int arity, Fn fn);
  // [l_0, ..., l_n]f in slot variables, via the confluent tableau.
  static ContractionKernel divided_difference(int n, const ScalarFunction& f);
  // prod_j f_j(l_j) in slot variables.
  static ContractionKernel product(std::vector<ScalarFunction> fs);
};

// Eigenvalues within this relative distance are grouped before kernels are
// evaluated, so confluent kernels see exactly repeated arguments.
inline constexpr double kEigenGroupTol = 1e-8;

// Slot-convention contraction. The number of operands must be arity - 1.
Matrix contract(const SpectralData& spec, const ContractionKernel& kernel,
                const std::vector<Matrix>& b);
Matrix contract(const HermitianMatrix& a, const ContractionKernel& kernel,
                const std::vector<Matrix>& b);

// Nabla-convention kernel of arity n on n operands.
Matrix contract_nabla(const HermitianMatrix& a, const ContractionKernel& kernel,
                      const std::vector<Matrix>& b);

// Modular-convention kernel F(s_1, ..., s_p) on p operands, A positive
// definite; realizes F(D^(1), D^(1)D^(2), ...) through s_j = l_j / l_0.
Matrix contract_modular(const HermitianMatrix& A, const ContractionKernel& kernel,
                        const std::vector<Matrix>& b);

struct OperandPair {
  Matrix first;   // b'_k
  Matrix second;  // b''_k
};

// Kernel g(m_0, ..., m_n) of the doubled nabla variables applied to
// (b'_1 (x) b''_1) ... (b'_n (x) b''_n) and then to x, computed as the
// (2n+2)-slot contraction with phi(l) = g(l_{n+1} - l_0, ..., l_{2n+1} - l_n)
// on b'_1 ... b'_n x b''_1 ... b''_n.
Matrix doubled_contract(const HermitianMatrix& a, const ContractionKernel& kernel,
                        const std::vector<OperandPair>& pairs, const Matrix& x);

// f(a) through the eigendecomposition.
Matrix matrix_function(const HermitianMatrix& a, const ScalarFunction& f);
Matrix matrix_function(const SpectralData& spec, const std::function<Complex(double)>& f);

double max_abs(const Matrix& m);
// Largest singular value.
double spectral_norm(const Matrix& m);

}  // namespace ddcalc::matcalc
