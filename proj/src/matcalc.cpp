#include "ddcalc/matcalc.hpp"

#include <cmath>
#include <sstream>

#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"

namespace ddcalc::matcalc {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

HermitianMatrix::HermitianMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw PreconditionError("Hermitian matrix must be square with dim >= 1");
  }
  if (!m_.allFinite()) throw PreconditionError("matrix entries must be finite");
  const double asym = max_abs(m_ - m_.adjoint());
  if (asym > 1e-12 * max_abs(m_)) {
    std::ostringstream os;
    os << "matrix is not Hermitian (|M - M*|_max = " << asym << ")";
    throw PreconditionError(os.str());
  }
}

SpectralData eigh(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  SpectralData out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < out.unitary.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.unitary.rows(); ++i) {
      const Complex c = out.unitary(i, j);
      if (std::abs(c) > 1e-12) {
        out.unitary.col(j) *= std::conj(c) / std::abs(c);
        break;
      }
    }
  }
  return out;
}

ContractionKernel ContractionKernel::slots(int arity, Fn fn) {
  return {arity, Variables::slots, std::move(fn)};
}

ContractionKernel ContractionKernel::nabla(int arity, Fn fn) {
  return {arity, Variables::nabla, std::move(fn)};
}

ContractionKernel ContractionKernel::modular(int arity, Fn fn) {
  return {arity, Variables::modular, std::move(fn)};
}

ContractionKernel ContractionKernel::divided_difference(int n, const ScalarFunction& f) {
  return slots(n + 1, [f](std::span<const double> l) -> Complex {
    return dd::dd_confluent(NodeSystem::from_values(std::vector<double>(l.begin(), l.end())), f);
  });
}

ContractionKernel ContractionKernel::product(std::vector<ScalarFunction> fs) {
  const int arity = static_cast<int>(fs.size());
  return slots(arity, [fs = std::move(fs)](std::span<const double> l) -> Complex {
    double v = 1.0;
    for (std::size_t j = 0; j < fs.size(); ++j) v *= fs[j](l[j]);
    return v;
  });
}

namespace {

struct Grouping {
  std::vector<int> group;    // per eigenvalue index
  std::vector<double> reps;  // per group, mean of its members
};

Grouping group_eigenvalues(const Eigen::VectorXd& l) {
  Grouping g;
  const Eigen::Index d = l.size();
  g.group.resize(static_cast<std::size_t>(d));
  Eigen::Index i = 0;
  while (i < d) {
    Eigen::Index j = i + 1;
    double sum = l(i);
    while (j < d && l(j) - l(j - 1) <= kEigenGroupTol * std::max(1.0, std::abs(l(j)))) {
      sum += l(j);
      ++j;
    }
    const int id = static_cast<int>(g.reps.size());
    g.reps.push_back(sum / static_cast<double>(j - i));
    for (Eigen::Index k = i; k < j; ++k) g.group[static_cast<std::size_t>(k)] = id;
    i = j;
  }
  return g;
}

void check_operands(int dim, const std::vector<Matrix>& b) {
  for (const auto& m : b) {
    if (m.rows() != dim || m.cols() != dim) {
      throw PreconditionError("operand dimensions do not match the matrix");
    }
  }
}

}  // namespace

Matrix contract(const SpectralData& spec, const ContractionKernel& kernel,
                const std::vector<Matrix>& b) {
  if (kernel.variables != Variables::slots) {
    throw PreconditionError("contract expects a slot-convention kernel");
  }
  const int n = static_cast<int>(b.size());
  if (kernel.arity != n + 1) {
    throw PreconditionError("kernel arity must equal the number of operands plus one");
  }
  const int d = static_cast<int>(spec.eigenvalues.size());
  check_operands(d, b);

  const Grouping grp = group_eigenvalues(spec.eigenvalues);
  const std::size_t G = grp.reps.size();
  std::size_t size = 1;
  for (int k = 0; k <= n; ++k) {
    if (size > 50'000'000 / G) throw PreconditionError("contraction too large");
    size *= G;
  }

  // Kernel values on every tuple of eigenvalue groups.
  std::vector<Complex> K(size);
  std::vector<std::size_t> gidx(static_cast<std::size_t>(n + 1), 0);
  std::vector<double> args(static_cast<std::size_t>(n + 1));
  for (std::size_t flat = 0; flat < size; ++flat) {
    for (int k = 0; k <= n; ++k) args[static_cast<std::size_t>(k)] = grp.reps[gidx[static_cast<std::size_t>(k)]];
    const Complex v = kernel.eval(args);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw KernelSingularityError(args);
    K[flat] = v;
    for (int k = n; k >= 0; --k) {
      if (++gidx[static_cast<std::size_t>(k)] < G) break;
      gidx[static_cast<std::size_t>(k)] = 0;
    }
  }

  const Matrix& U = spec.unitary;
  Matrix C = Matrix::Zero(d, d);
  if (n == 0) {
    for (int i = 0; i < d; ++i) C(i, i) = K[static_cast<std::size_t>(grp.group[static_cast<std::size_t>(i)])];
    return U * C * U.adjoint();
  }

  std::vector<Matrix> B;
  B.reserve(b.size());
  for (const auto& m : b) B.push_back(U.adjoint() * m * U);

  // Depth-first over (i_1, ..., i_{n-1}); the last index is a flat loop.
  auto rec = [&](auto&& self, int i0, int level, int prev, std::size_t off, Complex partial) -> void {
    const Matrix& Bk = B[static_cast<std::size_t>(level - 1)];
    if (level == n) {
      for (int j = 0; j < d; ++j) {
        const std::size_t o = off * G + static_cast<std::size_t>(grp.group[static_cast<std::size_t>(j)]);
        C(i0, j) += K[o] * partial * Bk(prev, j);
      }
      return;
    }
    for (int j = 0; j < d; ++j) {
      const Complex bij = Bk(prev, j);
      if (bij == Complex(0.0)) continue;
      self(self, i0, level + 1, j,
           off * G + static_cast<std::size_t>(grp.group[static_cast<std::size_t>(j)]), partial * bij);
    }
  };
  for (int i0 = 0; i0 < d; ++i0) {
    rec(rec, i0, 1, i0, static_cast<std::size_t>(grp.group[static_cast<std::size_t>(i0)]),
        Complex(1.0));
  }
  return U * C * U.adjoint();
}

Matrix contract(const HermitianMatrix& a, const ContractionKernel& kernel,
                const std::vector<Matrix>& b) {
  return contract(eigh(a), kernel, b);
}

Matrix contract_nabla(const HermitianMatrix& a, const ContractionKernel& kernel,
                      const std::vector<Matrix>& b) {
  if (kernel.variables != Variables::nabla) {
    throw PreconditionError("contract_nabla expects a nabla-convention kernel");
  }
  const int n = static_cast<int>(b.size());
  if (kernel.arity != n) throw PreconditionError("nabla kernel arity must equal operand count");
  auto fn = kernel.eval;
  auto slot = ContractionKernel::slots(n + 1, [fn, n](std::span<const double> l) {
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) mu[static_cast<std::size_t>(j)] = l[j + 1] - l[j];
    return fn(mu);
  });
  return contract(a, slot, b);
}

Matrix contract_modular(const HermitianMatrix& A, const ContractionKernel& kernel,
                        const std::vector<Matrix>& b) {
  if (kernel.variables != Variables::modular) {
    throw PreconditionError("contract_modular expects a modular-convention kernel");
  }
  const int p = static_cast<int>(b.size());
  if (kernel.arity != p) throw PreconditionError("modular kernel arity must equal operand count");
  const SpectralData spec = eigh(A);
  if (!(spec.eigenvalues.minCoeff() > 0.0)) {
    throw DomainError("contract_modular needs a positive definite matrix");
  }
  auto fn = kernel.eval;
  auto slot = ContractionKernel::slots(p + 1, [fn, p](std::span<const double> l) {
    std::vector<double> s(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) s[static_cast<std::size_t>(j)] = l[j + 1] / l[0];
    return fn(s);
  });
  return contract(spec, slot, b);
}

Matrix doubled_contract(const HermitianMatrix& a, const ContractionKernel& kernel,
                        const std::vector<OperandPair>& pairs, const Matrix& x) {
  const int n = static_cast<int>(pairs.size());
  if (kernel.arity != n + 1) {
    throw PreconditionError("doubled kernel arity must equal the pair count plus one");
  }
  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(2 * n + 1));
  for (const auto& pr : pairs) ops.push_back(pr.first);
  ops.push_back(x);
  for (const auto& pr : pairs) ops.push_back(pr.second);
  auto fn = kernel.eval;
  auto slot = ContractionKernel::slots(2 * n + 2, [fn, n](std::span<const double> l) {
    std::vector<double> mu(static_cast<std::size_t>(n + 1));
    for (int j = 0; j <= n; ++j) mu[static_cast<std::size_t>(j)] = l[j + n + 1] - l[j];
    return fn(mu);
  });
  return contract(a, slot, ops);
}

Matrix matrix_function(const SpectralData& spec, const std::function<Complex(double)>& f) {
  const Eigen::Index d = spec.eigenvalues.size();
  Eigen::VectorXcd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = f(spec.eigenvalues(i));
  return spec.unitary * v.asDiagonal() * spec.unitary.adjoint();
}

Matrix matrix_function(const HermitianMatrix& a, const ScalarFunction& f) {
  return matrix_function(eigh(a), [&f](double x) { return Complex(f(x)); });
}

}  // namespace ddcalc::matcalc
