// SPDX-License-Identifier: Apache-2.0

#include "fdrelay/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fdrelay {

CVector vec(const CMatrix& a) {
  return Eigen::Map<const CVector>(a.data(), a.size());
}

CMatrix mat(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 0 || cols < 0 || rows * cols != v.size()) {
    std::ostringstream msg;
    msg << "mat: vector of length " << v.size() << " cannot be reshaped to "
        << rows << "x" << cols;
    throw DimensionMismatch(msg.str());
  }
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index br = b.rows();
  const Eigen::Index bc = b.cols();
  CMatrix out(a.rows() * br, a.cols() * bc);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    }
  }
  return out;
}

CVector solve_linear(const CMatrix& k, const CVector& b) {
  if (k.rows() != k.cols()) {
    throw DimensionMismatch("solve_linear: system matrix is not square");
  }
  if (k.rows() != b.size()) {
    throw DimensionMismatch("solve_linear: right-hand side length mismatch");
  }
  if (k.size() == 0) return CVector(0);

  const Eigen::PartialPivLU<CMatrix> lu(k);
  // rcond() is an estimate of 1/cond_1(k); a zero matrix yields 0.
  const double rcond = lu.rcond();
  if (!(rcond * kMaxConditionNumber >= 1.0)) {
    std::ostringstream msg;
    msg << "solve_linear: system is singular to tolerance (rcond=" << rcond
        << ")";
    throw SingularSystem(msg.str(), rcond);
  }
  return lu.solve(b);
}

CMatrix inverse_hpd(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("inverse_hpd: matrix is not square");
  }
  const Eigen::LDLT<CMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularSystem("inverse_hpd: matrix is not positive definite", 0.0);
  }
  const double rcond = ldlt.rcond();
  if (!(rcond * kMaxConditionNumber >= 1.0)) {
    throw SingularSystem("inverse_hpd: matrix is singular to tolerance",
                         rcond);
  }
  return ldlt.solve(CMatrix::Identity(a.rows(), a.cols()));
}

double chain_trace_expectation(std::span<const CMatrix> v_list, double sigma_sq) {
  if (v_list.size() < 2) {
    throw std::invalid_argument("chain_trace_expectation: needs at least V_1, V_2");
  }
  const Eigen::Index n = v_list.front().rows();
  double product = 1.0;
  for (const CMatrix& v : v_list) {
    if (v.rows() != n || v.cols() != n) {
      throw DimensionMismatch(
          "chain_trace_expectation: every V_j must be square with equal size");
    }
    product *= trace_gram(v);
  }
  return std::pow(sigma_sq, static_cast<double>(v_list.size() - 1)) * product;
}

double hermitian_defect(const CMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const CMatrix& a, double tol) {
  return hermitian_defect(a) <= tol;
}

}  // namespace fdrelay
