#include "ddcalc/rearrange.hpp"

#include <cmath>
#include <numbers>

#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"

namespace ddcalc::rearrange {

using matcalc::Complex;

std::optional<int> RearrangementCase::m() const {
  const double r = std::round(nu);
  if (std::abs(nu - r) > 1e-12) return std::nullopt;
  return alpha.order() + alpha.p() - 1 - static_cast<int>(r);
}

void RearrangementCase::validate() const {
  const int p = alpha.p();
  if (p < 1) throw PreconditionError("rearrangement needs p >= 1");
  if (static_cast<int>(b.size()) != p) throw PreconditionError("rearrangement needs p operands");
  for (const auto& m : b) {
    if (m.rows() != a.dim() || m.cols() != a.dim()) {
      throw PreconditionError("operand dimensions do not match");
    }
  }
  if (!(nu > -1.0 && nu < alpha.order() + p)) {
    throw DomainError("nu outside the integrability strip (-1, |a| + p)");
  }
  quad.validate();
}

Matrix rearrangement_lhs(const RearrangementCase& c) {
  c.validate();
  const matcalc::SpectralData sa = matcalc::eigh(c.a);
  const Eigen::Index d = sa.eigenvalues.size();
  Eigen::VectorXd lamA(d);
  for (Eigen::Index i = 0; i < d; ++i) lamA(i) = std::exp(sa.eigenvalues(i));
  const Matrix& U = sa.unitary;
  const int p = c.alpha.p();
  // Operands in the eigenbasis of A; the f_j(uA) are then diagonal.
  std::vector<Matrix> B;
  for (const auto& m : c.b) B.push_back(U.adjoint() * m * U);
  const auto& parts = c.alpha.parts;

  auto integrand = [&](double u) -> Matrix {
    auto diag = [&](int j) {
      Eigen::VectorXcd v(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double x = u * lamA(i);
        double val = std::pow(1.0 + x, -parts[static_cast<std::size_t>(j)] - 1);
        if (j == 0) val *= std::pow(x, c.nu);
        v(i) = val;
      }
      return v;
    };
    Matrix acc = diag(0).asDiagonal() * B[0];
    for (int j = 1; j < p; ++j) acc = acc * diag(j).asDiagonal() * B[static_cast<std::size_t>(j)];
    acc = acc * diag(p).asDiagonal();
    return acc;
  };
  const Matrix inner = quad::integrate_halfline(integrand, c.quad).value;
  return U * inner * U.adjoint();
}

Matrix rearrangement_rhs(const RearrangementCase& c) {
  c.validate();
  const int p = c.alpha.p();
  const matcalc::SpectralData sa = matcalc::eigh(c.a);
  const Matrix A = matcalc::matrix_function(sa, [](double x) { return Complex(std::exp(x)); });
  const Matrix A_inv = matcalc::matrix_function(sa, [](double x) { return Complex(std::exp(-x)); });
  const HermitianMatrix Ah(0.5 * (A + A.adjoint()));

  matcalc::ContractionKernel F;
  if (const auto m = c.m()) {
    const funcs::MultiIndex alpha = c.alpha;
    const int mm = *m;
    F = matcalc::ContractionKernel::modular(p, [alpha, mm](std::span<const double> s) -> Complex {
      return funcs::h_func(alpha, std::vector<double>(s.begin(), s.end()), mm);
    });
  } else {
    if (p != 1 || c.alpha.order() != 0) {
      throw CapabilityError("non-integer nu is supported only for p = 1 and a = (0, 0)");
    }
    if (!(c.nu < 1.0)) throw DomainError("non-integer nu must satisfy -1 < nu < 1");
    const double z = -c.nu;
    const double pref = std::numbers::pi / std::sin(std::numbers::pi * z);
    const ScalarFunction power = fn::power(z);
    F = matcalc::ContractionKernel::modular(1, [pref, power](std::span<const double> s) -> Complex {
      return pref * dd::dd_confluent(NodeSystem::from_values({1.0, s[0]}), power);
    });
  }
  return A_inv * matcalc::contract_modular(Ah, F, c.b);
}

MultiFn osl_integrand(const funcs::MultiIndex& alpha, double nu) {
  if (!(nu > -1.0 && nu < alpha.order() + alpha.p())) {
    throw DomainError("nu outside the integrability strip (-1, |a| + p)");
  }
  return [parts = alpha.parts, nu](std::span<const double> x) {
    double v = std::pow(x[0], nu);
    for (std::size_t j = 0; j < parts.size(); ++j) v *= std::pow(1.0 + x[j], -parts[j] - 1);
    return v;
  };
}

JointSpectrum joint_diagonalize(const std::vector<HermitianMatrix>& R) {
  if (R.empty()) throw PreconditionError("empty matrix family");
  const int d = R[0].dim();
  for (const auto& r : R) {
    if (r.dim() != d) throw PreconditionError("family members must share the dimension");
  }
  for (std::size_t i = 0; i < R.size(); ++i) {
    for (std::size_t j = i + 1; j < R.size(); ++j) {
      const Matrix& x = R[i].matrix();
      const Matrix& y = R[j].matrix();
      const double scale = std::max(1.0, matcalc::max_abs(x) * matcalc::max_abs(y));
      if (matcalc::max_abs(x * y - y * x) > 1e-10 * scale) {
        throw PreconditionError("matrix family does not commute");
      }
    }
  }
  // A generic real combination separates distinct joint eigenvalue tuples.
  Matrix combo = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < R.size(); ++j) {
    const double cj = 1.0 + 0.6180339887498949 * static_cast<double>(j) +
                      0.1 * static_cast<double>(j * j);
    combo += cj * R[j].matrix();
  }
  const matcalc::SpectralData sd = matcalc::eigh(HermitianMatrix(0.5 * (combo + combo.adjoint())));
  JointSpectrum out{sd.unitary, {}};
  for (const auto& r : R) {
    const Matrix D = sd.unitary.adjoint() * r.matrix() * sd.unitary;
    const Matrix off = D - Matrix(D.diagonal().asDiagonal());
    if (matcalc::max_abs(off) > 1e-8 * std::max(1.0, matcalc::max_abs(r.matrix()))) {
      throw PreconditionError("family could not be diagonalized simultaneously");
    }
    std::vector<double> vals(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) vals[static_cast<std::size_t>(i)] = D(i, i).real();
    out.values.push_back(std::move(vals));
  }
  return out;
}

namespace {

void require_positive(const JointSpectrum& js) {
  for (const auto& v : js.values) {
    for (double x : v) {
      if (!(x > 0.0)) throw DomainError("family must be positive definite");
    }
  }
}

Matrix from_eigenbasis(const JointSpectrum& js, const Eigen::VectorXcd& diag) {
  return js.unitary * diag.asDiagonal() * js.unitary.adjoint();
}

}  // namespace

MatrixPair operator_substitution_check(const std::vector<HermitianMatrix>& R, const MultiFn& f,
                                       const quad::QuadratureSpec& spec) {
  const JointSpectrum js = joint_diagonalize(R);
  require_positive(js);
  const std::size_t n1 = R.size();
  const Eigen::Index d = R[0].dim();

  // Left side: one matrix-valued quadrature of the joint calculus.
  std::vector<double> x(n1);
  auto integrand = [&](double u) -> Matrix {
    Eigen::VectorXcd v(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < n1; ++j) x[j] = u * js.values[j][static_cast<std::size_t>(i)];
      v(i) = f(x);
    }
    return from_eigenbasis(js, v);
  };
  MatrixPair out;
  out.lhs = quad::integrate_halfline(integrand, spec).value;

  // Right side: G on the ratio tuples, scaled by 1 / l_0.
  Eigen::VectorXcd rhs(d);
  std::vector<double> y(n1);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double l0 = js.values[0][static_cast<std::size_t>(i)];
    std::vector<double> mu(n1);
    for (std::size_t j = 1; j < n1; ++j) mu[j] = js.values[j][static_cast<std::size_t>(i)] / l0;
    auto g = [&](double u) {
      y[0] = u;
      for (std::size_t j = 1; j < n1; ++j) y[j] = u * mu[j];
      return f(y);
    };
    rhs(i) = quad::integrate_halfline(g, spec).value / l0;
  }
  out.rhs = from_eigenbasis(js, rhs);
  return out;
}

MatrixPair spectral_fubini_check(const std::vector<HermitianMatrix>& R, const ParamFn& f,
                                 const quad::QuadratureSpec& spec) {
  const JointSpectrum js = joint_diagonalize(R);
  const std::size_t n1 = R.size();
  const Eigen::Index d = R[0].dim();
  std::vector<std::vector<double>> tuples(static_cast<std::size_t>(d), std::vector<double>(n1));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      tuples[static_cast<std::size_t>(i)][j] = js.values[j][static_cast<std::size_t>(i)];
    }
  }
  auto integrand = [&](double u) -> Matrix {
    Eigen::VectorXcd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = f(u, tuples[static_cast<std::size_t>(i)]);
    return from_eigenbasis(js, v);
  };
  MatrixPair out;
  out.lhs = quad::integrate_halfline(integrand, spec).value;
  Eigen::VectorXcd rhs(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& t = tuples[static_cast<std::size_t>(i)];
    rhs(i) = quad::integrate_halfline([&](double u) { return f(u, t); }, spec).value;
  }
  out.rhs = from_eigenbasis(js, rhs);
  return out;
}

}  // namespace ddcalc::rearrange
