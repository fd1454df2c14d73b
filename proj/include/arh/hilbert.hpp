#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace arh {

/// Element of the workspace Hilbert space H: d coordinates against a fixed
/// orthonormal basis. The dimension d is a workspace parameter; every vector
/// and operator that interact must share it.
using HVector = Eigen::VectorXd;

/// Bounded linear operator on the d-dimensional coordinate space.
/// Row index = output coordinate, column index = input coordinate, so
/// apply(A, e_k) is column k of A.
using HOperator = Eigen::MatrixXd;

/// A statistical assumption of the model does not hold for the given data
/// (non-positive empirical eigenvalue, degenerate spectral gap, divergent
/// stationary series, ...). The CLI maps this to exit code 2.
class assumption_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tolerances for dense double-precision algebra at d <= ~100.
inline constexpr double kSymTol = 1e-8;     // relative symmetry tolerance
inline constexpr double kRecTol = 1e-9;     // relative reconstruction tolerance
inline constexpr double kGapFloor = 1e-12;  // absolute spectral-gap floor

/// Eigendecomposition of a symmetric operator: values sorted non-increasing,
/// eigenvector j stored as column j of `vectors` (orthonormal family, signs
/// canonicalized so each vector's first largest-magnitude coordinate is
/// positive).
struct EigenSystem {
  Eigen::VectorXd values;
  HOperator vectors;

  int dim() const { return static_cast<int>(values.size()); }
  HVector vector(int j) const { return vectors.col(j); }
};

/// Singular value decomposition A(psi_j) = sigma_j * psi_tilde_j with right
/// vectors psi_j (columns of `right_vectors`) and left vectors psi_tilde_j
/// (columns of `left_vectors`); singular values non-negative, sorted
/// non-increasing.
struct SvdSystem {
  Eigen::VectorXd singular_values;
  HOperator right_vectors;
  HOperator left_vectors;

  int dim() const { return static_cast<int>(singular_values.size()); }
  HVector right(int j) const { return right_vectors.col(j); }
  HVector left(int j) const { return left_vectors.col(j); }
};

/// Coordinate inner product <f, g> = sum_k f_k g_k, summed left to right.
double inner_product(const HVector& f, const HVector& g);

/// Rank-one operator (f (x) g) with action h -> <f, h> g.
HOperator tensor_product(const HVector& f, const HVector& g);

HVector apply(const HOperator& a, const HVector& f);

/// Operator composition a . b (apply b first).
HOperator compose(const HOperator& a, const HOperator& b);

HOperator adjoint(const HOperator& a);

/// Largest singular value (uniform norm on L(H)).
double operator_norm(const HOperator& a);

/// Hilbert-Schmidt (Frobenius) norm: sqrt of the sum of squared entries,
/// equal to the root-sum-square of the singular values.
double hs_norm(const HOperator& a);

/// Trace norm: sum of the singular values.
double trace_norm(const HOperator& a);

/// Eigendecomposition of a symmetric operator. Rejects inputs whose
/// asymmetry exceeds kSymTol relative to the operator's HS norm.
EigenSystem eigen_sym(const HOperator& a);

/// Full SVD of a square operator, sign-canonicalized (see SvdSystem).
SvdSystem svd(const HOperator& a);

}  // namespace arh
