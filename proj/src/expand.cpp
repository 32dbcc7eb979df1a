#include "ddcalc/expand.hpp"

#include <cmath>
#include <functional>

#include "ddcalc/ddcore.hpp"
#include "ddcalc/errors.hpp"

namespace ddcalc::expand {

using matcalc::ContractionKernel;

namespace {

// Slot kernel l -> [nodes(l)] f, where `nodes` maps the eigenvalue tuple to
// the divided-difference arguments.
using NodeMap = std::function<void(std::span<const double>, std::vector<double>&)>;

ContractionKernel dd_kernel(int arity, const ScalarFunction& f, NodeMap nodes) {
  return ContractionKernel::slots(arity, [f, nodes](std::span<const double> l) -> Complex {
    std::vector<double> args;
    nodes(l, args);
    return dd::dd_confluent(NodeSystem::from_values(args), f);
  });
}

std::vector<Matrix> copies(const Matrix& b, int n) {
  return std::vector<Matrix>(static_cast<std::size_t>(n), b);
}

void require_n(int n) {
  if (n < 0) throw PreconditionError("expansion order must be non-negative");
}

}  // namespace

Matrix exp_expansion_term(const HermitianMatrix& a, const Matrix& b, int n) {
  return taylor_term(a, b, fn::exp(), n);
}

Matrix exp_expansion_variant_nabla(const HermitianMatrix& a, const Matrix& b, int n) {
  require_n(n);
  const auto kernel = dd_kernel(n + 1, fn::exp(), [](std::span<const double> l, std::vector<double>& out) {
    out.assign(l.size(), 0.0);
    for (std::size_t j = 1; j < l.size(); ++j) out[j] = l[j] - l[0];
  });
  const matcalc::SpectralData sd = matcalc::eigh(a);
  const Matrix ea = matcalc::matrix_function(sd, [](double x) { return Complex(std::exp(x)); });
  return ea * matcalc::contract(sd, kernel, copies(b, n));
}

Matrix exp_expansion_simplex(const HermitianMatrix& a, const Matrix& b, int n,
                             const quad::QuadratureSpec& spec) {
  require_n(n);
  const matcalc::SpectralData sd = matcalc::eigh(a);
  const Matrix& U = sd.unitary;
  const Eigen::VectorXd& lam = sd.eigenvalues;
  const Matrix B = U.adjoint() * b * U;
  auto expdiag = [&](double c) {
    Eigen::VectorXcd v(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) v(i) = std::exp(c * lam(i));
    return v;
  };
  auto integrand = [&](std::span<const double> s) -> Matrix {
    double prev = 1.0;
    Matrix acc = Matrix::Identity(lam.size(), lam.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      acc = acc * expdiag(prev - s[k]).asDiagonal() * B;
      prev = s[k];
    }
    return acc * expdiag(prev).asDiagonal();
  };
  const Matrix inner = quad::integrate_simplex(n, integrand, spec).value;
  return U * inner * U.adjoint();
}

ExpansionReport exp_expansion_report(const HermitianMatrix& a, const HermitianMatrix& b, int order) {
  require_n(order);
  ExpansionReport r;
  r.order = order;
  r.target = matcalc::matrix_function(HermitianMatrix(a.matrix() + b.matrix()), fn::exp());
  Matrix sum = Matrix::Zero(a.dim(), a.dim());
  for (int n = 0; n <= order; ++n) {
    r.terms.push_back(exp_expansion_term(a, b.matrix(), n));
    sum += r.terms.back();
    r.partial_sums.push_back(sum);
    r.remainders.push_back(matcalc::spectral_norm(r.target - sum));
  }
  return r;
}

Matrix taylor_term(const HermitianMatrix& a, const Matrix& b, const ScalarFunction& f, int n) {
  require_n(n);
  return matcalc::contract(a, ContractionKernel::divided_difference(n, f), copies(b, n));
}

ParametricDerivatives parametric_derivatives(const HermitianMatrix& a, const Matrix& d1,
                                             const Matrix& d2, const Matrix& d12,
                                             const ScalarFunction& f) {
  const matcalc::SpectralData sd = matcalc::eigh(a);
  const auto k1 = ContractionKernel::divided_difference(1, f);
  const auto k2 = ContractionKernel::divided_difference(2, f);
  ParametricDerivatives r;
  r.first = matcalc::contract(sd, k1, {d1});
  r.mixed = matcalc::contract(sd, k1, {d12}) + matcalc::contract(sd, k2, {d1, d2}) +
            matcalc::contract(sd, k2, {d2, d1});
  return r;
}

double exp_dd_0_s_st(double s, double t) {
  const double st = s + t;
  if (std::min({std::abs(s), std::abs(t), std::abs(st)}) < 0.1) {
    return dd::dd_confluent(NodeSystem::from_values({0.0, s, st}), fn::exp());
  }
  return (std::exp(st) * s + t - std::exp(s) * st) / (s * t * st);
}

namespace {

double exp_dd_0_s(double s) {
  if (std::abs(s) < 1e-5) return 1.0 + s / 2.0 + s * s / 6.0;
  return std::expm1(s) / s;
}

}  // namespace

ParametricDerivatives parametric_derivatives_exp_nabla(const HermitianMatrix& a, const Matrix& d1,
                                                       const Matrix& d2, const Matrix& d12) {
  const auto k1 = ContractionKernel::nabla(1, [](std::span<const double> mu) -> Complex {
    return exp_dd_0_s(mu[0]);
  });
  const auto k2 = ContractionKernel::nabla(2, [](std::span<const double> mu) -> Complex {
    return exp_dd_0_s_st(mu[0], mu[1]);
  });
  const Matrix ea = matcalc::matrix_function(a, fn::exp());
  ParametricDerivatives r;
  r.first = ea * matcalc::contract_nabla(a, k1, {d1});
  r.mixed = ea * (matcalc::contract_nabla(a, k1, {d12}) + matcalc::contract_nabla(a, k2, {d1, d2}) +
                  matcalc::contract_nabla(a, k2, {d2, d1}));
  return r;
}

Matrix nabla_apply(const HermitianMatrix& a, const ScalarFunction& f, const Matrix& x) {
  const auto k = ContractionKernel::nabla(1, [f](std::span<const double> mu) -> Complex {
    return f(mu[0]);
  });
  return matcalc::contract_nabla(a, k, {x});
}

NablaExpansion nabla_expansion_order2(const HermitianMatrix& a, const Matrix& b, const Matrix& x,
                                      const ScalarFunction& f) {
  const matcalc::SpectralData sd = matcalc::eigh(a);
  using L = std::span<const double>;
  using V = std::vector<double>;
  auto term = [&](int arity, NodeMap nodes, std::vector<Matrix> ops) {
    return matcalc::contract(sd, dd_kernel(arity, f, std::move(nodes)), ops);
  };
  NablaExpansion r;
  r.zeroth = matcalc::contract(
      sd, ContractionKernel::slots(2, [f](L l) -> Complex { return f(l[1] - l[0]); }), {x});
  r.terms.push_back(r.zeroth);
  // Linear terms.
  r.terms.push_back(-term(3, [](L l, V& o) { o = {l[2] - l[0], l[2] - l[1]}; }, {b, x}));
  r.terms.push_back(term(3, [](L l, V& o) { o = {l[2] - l[0], l[1] - l[0]}; }, {x, b}));
  // Quadratic terms.
  r.terms.push_back(
      term(4, [](L l, V& o) { o = {l[3] - l[0], l[3] - l[1], l[3] - l[2]}; }, {b, b, x}));
  r.terms.push_back(
      term(4, [](L l, V& o) { o = {l[1] - l[0], l[2] - l[0], l[3] - l[0]}; }, {x, b, b}));
  r.terms.push_back(
      -term(4, [](L l, V& o) { o = {l[2] - l[0], l[3] - l[0], l[3] - l[1]}; }, {b, x, b}));
  r.terms.push_back(
      -term(4, [](L l, V& o) { o = {l[2] - l[0], l[2] - l[1], l[3] - l[1]}; }, {b, x, b}));
  r.linear = r.terms[1] + r.terms[2];
  r.quadratic = r.terms[3] + r.terms[4] + r.terms[5] + r.terms[6];
  return r;
}

Complex normalized_trace(const Matrix& m) {
  return m.trace() / static_cast<double>(m.rows());
}

TracePair trace_derivative_identity(const HermitianMatrix& a, const Matrix& b, const Matrix& x,
                                    const Matrix& y, const ScalarFunction& f) {
  const matcalc::SpectralData sd = matcalc::eigh(a);
  using L = std::span<const double>;
  using V = std::vector<double>;
  auto contract_dd = [&](NodeMap nodes, std::vector<Matrix> ops) {
    return matcalc::contract(sd, dd_kernel(3, f, std::move(nodes)), ops);
  };
  const Matrix linear = -contract_dd([](L l, V& o) { o = {l[2] - l[0], l[2] - l[1]}; }, {b, x}) +
                        contract_dd([](L l, V& o) { o = {l[2] - l[0], l[1] - l[0]}; }, {x, b});
  TracePair r;
  r.lhs = normalized_trace(linear * y);
  const Matrix k1 = contract_dd([](L l, V& o) { o = {l[1] - l[0], l[1] - l[2]}; }, {x, y});
  const Matrix k2 = contract_dd([](L l, V& o) { o = {l[0] - l[1], l[2] - l[1]}; }, {y, x});
  r.rhs = -normalized_trace(b * k1) + normalized_trace(b * k2);
  return r;
}

}  // namespace ddcalc::expand
