// SPDX-License-Identifier: Apache-2.0
//
// Dense complex-matrix kernels shared by every other module.
//
// Storage follows Eigen's default column-major layout. vec() stacks columns,
// so vec([[1,3],[2,4]]) == [1,2,3,4], and together with kron() this gives the
// identity vec(A X B) = (B^T (x) A) vec(X) used to turn generalized Sylvester
// equations into ordinary linear systems.

#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fdrelay {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a linear system is singular up to the configured condition
// threshold. Carries the reciprocal-condition estimate that tripped it.
class SingularSystem : public std::runtime_error {
 public:
  SingularSystem(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

// Relative condition number above which solve_linear refuses to answer.
inline constexpr double kMaxConditionNumber = 1e12;

CVector vec(const CMatrix& a);
CMatrix mat(const CVector& v, Eigen::Index rows, Eigen::Index cols);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Solves k x = b with a pivoted LU factorization. Throws SingularSystem when
// the estimated condition number of k exceeds kMaxConditionNumber.
CVector solve_linear(const CMatrix& k, const CVector& b);

// Inverse of a Hermitian positive definite matrix via LDL^T; throws
// SingularSystem when the factorization fails or is too ill-conditioned.
CMatrix inverse_hpd(const CMatrix& a);

// Closed form of E[tr{V_v prod(Delta V) prod(V^H Delta^H) V_v^H}] for
// independent Delta_j with E[vec(Delta) vec(Delta)^H] = sigma_sq I:
//   sigma_sq^(v-1) * prod_j tr(V_j V_j^H).
// v_list holds V_1..V_v in order; all must be square and the same size.
double chain_trace_expectation(std::span<const CMatrix> v_list, double sigma_sq);

// tr(A A^H), i.e. the squared Frobenius norm.
inline double trace_gram(const CMatrix& a) { return a.squaredNorm(); }

// Largest |A - A^H| entry, scaled by max(1, max|A|). Zero for exact Hermitian.
double hermitian_defect(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double tol = 1e-12);

}  // namespace fdrelay
