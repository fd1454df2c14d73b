#pragma once

#include "arh/model.hpp"

#include <optional>
#include <vector>

namespace arh {

// Relative ridge floor: truncated inversion refuses eigenvalues at or below
// kRidgeFloorRel * (largest eigenvalue) rather than silently regularizing.
inline constexpr double kRidgeFloorRel = 1e-10;

/// Empirical second-order operators of a trajectory of length n:
/// c_n = (1/n) sum_i X_i (x) X_i and d_n = (1/(n-1)) sum_i X_i (x) X_{i+1},
/// plus the eigensystem of c_n.
struct EmpiricalOperators {
  HOperator c_n;
  HOperator d_n;
  int n = 0;
  EigenSystem eigen_c;
};

HOperator empirical_covariance(const Trajectory& traj);
HOperator empirical_cross_covariance(const Trajectory& traj);
EmpiricalOperators empirical_operators(const Trajectory& traj);

/// Reference vector re-signed toward the empirical one:
/// sign(<reference, empirical>) * reference, with sign(0) = +1.
HVector sign_align(const HVector& empirical, const HVector& reference);

/// Inverse-gap functional Lambda_k = sup_{j<=k} 1/(v_j - v_{j+1}) over a
/// non-increasing value sequence v (length >= k+1; pad with a trailing zero
/// to query the last level). Gaps at or below kGapFloor are degenerate.
double spectral_gap_lambda(const Eigen::VectorXd& values, int k);

/// Same functional on squared magnitudes: sup_{j<=k} 1/(v_j^2 - v_{j+1}^2).
double spectral_gap_lambda_squared(const Eigen::VectorXd& values, int k);

/// How the truncation level k_n is chosen from the empirical spectrum.
struct TruncationRule {
  enum class Kind { fixed, variance_fraction, gap_budget };
  Kind kind = Kind::fixed;
  int k = 1;       // fixed: use exactly this level
  double q = 0.9;  // variance_fraction: smallest k capturing fraction q
  double c = 1.0;  // gap_budget: largest k with k * Lambda_k <= c sqrt(n/ln n)
};

struct TruncationPlan {
  int k_n = 1;
  TruncationRule rule;
  /// Inverse-gap statistics of the empirical spectra at level k_n, when the
  /// gaps are non-degenerate.
  std::optional<double> lambda_k;
};

/// Select the truncation level for a given sample. Errors: level out of
/// range or >= n (invalid_argument); empirical eigenvalue at the level not
/// safely positive (assumption_error, "Assumption A2").
TruncationPlan select_truncation(const EmpiricalOperators& emp, const TruncationRule& rule);

enum class EstimatorKind { componentwise, diagonal_svd };

/// One retained singular triple of the estimated operator:
/// op(right_j) ~ sigma_j * left_j.
struct SvdComponent {
  double sigma = 0.0;
  HVector right;
  HVector left;
};

struct EstimatedRho {
  HOperator op;
  EstimatorKind kind = EstimatorKind::componentwise;
  int k_n = 0;
  /// diagonal_svd only: the retained triples, strongest first.
  std::vector<SvdComponent> components;
};

/// Projection onto the span of the leading k eigenvectors.
HOperator leading_projection(const EigenSystem& eig, int k);

/// Rank-k regularized inverse sum_{j<=k} (1/v_j) e_j (x) e_j. The failure
/// label names the assumption reported when v_k is not safely positive.
HOperator truncated_inverse(const EigenSystem& eig, int k, const char* failure_label);

/// Plug-in composition d_n c~_n^{-1} at truncation level k.
HOperator composition_operator(const EmpiricalOperators& emp, int k);

/// Population analogue D_X C~_X^{-1} under the same rank-k inversion rule.
HOperator population_composition(const StationaryLaw& law, int k);

/// Projected least-squares estimator pi d_n c~_n^{-1} pi of the
/// autocorrelation operator.
EstimatedRho componentwise_estimator(const EmpiricalOperators& emp, const TruncationPlan& plan);

/// Reduced-rank estimator: SVD of d_n c~_n^{-1}, keeping the k_n strongest
/// singular triples.
EstimatedRho diagonal_svd_estimator(const EmpiricalOperators& emp, const TruncationPlan& plan);

/// sup_{j<=k} || emp_j - sign_align(emp_j, true_j) || over column families.
double eigvec_alignment_error(const HOperator& emp_vectors, const HOperator& true_vectors, int k);

/// One side of a deterministic perturbation inequality.
struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Covariance eigenvector perturbation bound: the sup alignment error of the
/// leading k_n empirical eigenvectors is at most
/// 2 sqrt(2) Lambda_{k_n} ||c_n - C_X||_HS with Lambda on the true spectrum.
/// Errors: degenerate true gaps (assumption_error).
BoundReport check_eigvec_perturbation_bound(const EmpiricalOperators& emp,
                                            const StationaryLaw& law,
                                            const TruncationPlan& plan);

/// Singular-triple perturbation bounds for t_n = d_n c~_n^{-1} against the
/// true autocorrelation operator and its population composition.
struct SvdBoundReport {
  BoundReport right_vectors;    // vs 2 sqrt(2) Lambda^rho ||rho* rho - t* t||
  BoundReport left_vectors;     // vs 2 sqrt(2) Lambda^rho ||rho rho* - t t*||
  BoundReport singular_values;  // Weyl: sup_j |s_j(t_n) - s_j(t_pop)| <= ||t_n - t_pop||
  bool a4_holds = false;        // s_1(rho) + s_1(t_n) <= 1
};

SvdBoundReport check_svd_perturbation_bound(const EmpiricalOperators& emp,
                                            const StationaryLaw& law,
                                            const HOperator& true_rho,
                                            const TruncationPlan& plan);

}  // namespace arh
