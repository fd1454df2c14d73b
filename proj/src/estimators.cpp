#include "arh/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace arh {

namespace {

constexpr double kSqrt8 = 2.8284271247461903;  // 2 sqrt(2)

void require_level(int k, int d, int n, const char* op) {
  if (k < 1 || k > d) {
    throw std::invalid_argument(std::string(op) + ": truncation level " +
                                std::to_string(k) + " outside [1, " +
                                std::to_string(d) + "]");
  }
  if (n > 0 && k >= n) {
    throw std::invalid_argument(std::string(op) + ": truncation level " +
                                std::to_string(k) + " must stay below the sample size " +
                                std::to_string(n));
  }
}

// Non-increasing sequence extended with one trailing zero, so the gap at the
// last retained level is defined (values below the operator rank are zero).
Eigen::VectorXd pad_tail_zero(const Eigen::VectorXd& values) {
  Eigen::VectorXd out(values.size() + 1);
  out.head(values.size()) = values;
  out[values.size()] = 0.0;
  return out;
}

double alignment_sup(const HOperator& emp_vectors, const HOperator& true_vectors, int k) {
  double sup = 0.0;
  for (int j = 0; j < k; ++j) {
    const HVector emp = emp_vectors.col(j);
    const HVector aligned = sign_align(emp, true_vectors.col(j));
    sup = std::max(sup, (emp - aligned).norm());
  }
  return sup;
}

}  // namespace

HOperator empirical_covariance(const Trajectory& traj) {
  if (traj.n() < 2) {
    throw std::invalid_argument("empirical_covariance: trajectory must have n >= 2");
  }
  const int d = traj.dim();
  HOperator c = HOperator::Zero(d, d);
  for (const HVector& x : traj.samples) {
    if (x.size() != d) {
      throw std::invalid_argument("empirical_covariance: ragged trajectory");
    }
    c.noalias() += x * x.transpose();
  }
  c /= static_cast<double>(traj.n());
  return c;
}

HOperator empirical_cross_covariance(const Trajectory& traj) {
  if (traj.n() < 2) {
    throw std::invalid_argument("empirical_cross_covariance: trajectory must have n >= 2");
  }
  const int d = traj.dim();
  HOperator dd = HOperator::Zero(d, d);
  for (int i = 0; i + 1 < traj.n(); ++i) {
    // X_i (x) X_{i+1} maps h to <X_i, h> X_{i+1}.
    dd.noalias() += traj.samples[static_cast<std::size_t>(i + 1)] *
                    traj.samples[static_cast<std::size_t>(i)].transpose();
  }
  dd /= static_cast<double>(traj.n() - 1);
  return dd;
}

EmpiricalOperators empirical_operators(const Trajectory& traj) {
  EmpiricalOperators emp;
  emp.c_n = empirical_covariance(traj);
  emp.d_n = empirical_cross_covariance(traj);
  emp.n = traj.n();
  emp.eigen_c = eigen_sym(emp.c_n);
  return emp;
}

HVector sign_align(const HVector& empirical, const HVector& reference) {
  if (empirical.size() != reference.size()) {
    throw std::invalid_argument("sign_align: dimension mismatch");
  }
  const double s = inner_product(reference, empirical) >= 0.0 ? 1.0 : -1.0;
  return s * reference;
}

double spectral_gap_lambda(const Eigen::VectorXd& values, int k) {
  if (k < 1 || k + 1 > values.size()) {
    throw std::invalid_argument("spectral_gap_lambda: need values through index k+1");
  }
  double lambda = 0.0;
  for (int j = 0; j < k; ++j) {
    const double gap = values[j] - values[j + 1];
    if (gap <= kGapFloor) {
      throw assumption_error("spectral_gap_lambda: degenerate spectrum (gap " +
                             std::to_string(gap) + " at level " + std::to_string(j + 1) +
                             " is at or below the floor)");
    }
    lambda = std::max(lambda, 1.0 / gap);
  }
  return lambda;
}

double spectral_gap_lambda_squared(const Eigen::VectorXd& values, int k) {
  Eigen::VectorXd squared = values.cwiseProduct(values);
  return spectral_gap_lambda(squared, k);
}

TruncationPlan select_truncation(const EmpiricalOperators& emp, const TruncationRule& rule) {
  const int d = emp.eigen_c.dim();
  const Eigen::VectorXd& ev = emp.eigen_c.values;
  if (!(ev(0) > 0.0)) {
    throw assumption_error(
        "Assumption A2: empirical covariance has no positive eigenvalue");
  }
  const double ridge_floor = kRidgeFloorRel * ev(0);

  int k_n = 0;
  switch (rule.kind) {
    case TruncationRule::Kind::fixed: {
      require_level(rule.k, d, emp.n, "select_truncation");
      k_n = rule.k;
      break;
    }
    case TruncationRule::Kind::variance_fraction: {
      if (!(rule.q > 0.0) || rule.q > 1.0) {
        throw std::invalid_argument("select_truncation: variance fraction must be in (0, 1]");
      }
      const double total = std::max(ev.sum(), 0.0);
      // Relative slack so q = 1.0 lands on the last strictly positive
      // eigenvalue instead of chasing roundoff in the cumulated sum.
      const double target = rule.q * total * (1.0 - 1e-12);
      double cum = 0.0;
      for (int j = 0; j < d; ++j) {
        if (ev(j) <= ridge_floor) {
          break;  // never cross into non-positive territory
        }
        cum += ev(j);
        k_n = j + 1;
        if (cum >= target) {
          break;
        }
      }
      require_level(k_n, d, emp.n, "select_truncation");
      break;
    }
    case TruncationRule::Kind::gap_budget: {
      if (!(rule.c > 0.0)) {
        throw std::invalid_argument("select_truncation: gap budget must be positive");
      }
      const double budget =
          rule.c * std::sqrt(static_cast<double>(emp.n) / std::log(static_cast<double>(emp.n)));
      const Eigen::VectorXd padded = pad_tail_zero(ev);
      for (int k = 1; k <= d && k < emp.n; ++k) {
        if (ev(k - 1) <= ridge_floor) {
          break;
        }
        double lambda = 0.0;
        try {
          lambda = spectral_gap_lambda(padded, k);
        } catch (const assumption_error&) {
          break;  // degenerate empirical gap: stop growing
        }
        if (k * lambda > budget) {
          break;
        }
        k_n = k;
      }
      if (k_n == 0) {
        throw assumption_error(
            "select_truncation: no admissible level under the gap budget");
      }
      break;
    }
  }

  if (ev(k_n - 1) <= ridge_floor) {
    throw assumption_error("Assumption A2: empirical eigenvalue C_{n," +
                           std::to_string(k_n) + "} = " + std::to_string(ev(k_n - 1)) +
                           " is not safely positive");
  }

  TruncationPlan plan;
  plan.k_n = k_n;
  plan.rule = rule;
  try {
    plan.lambda_k = spectral_gap_lambda(pad_tail_zero(ev), k_n);
  } catch (const assumption_error&) {
    plan.lambda_k = std::nullopt;  // degenerate empirical gaps are informational here
  }
  return plan;
}

HOperator leading_projection(const EigenSystem& eig, int k) {
  require_level(k, eig.dim(), 0, "leading_projection");
  const int d = eig.dim();
  HOperator p = HOperator::Zero(d, d);
  for (int j = 0; j < k; ++j) {
    p.noalias() += eig.vectors.col(j) * eig.vectors.col(j).transpose();
  }
  return p;
}

HOperator truncated_inverse(const EigenSystem& eig, int k, const char* failure_label) {
  require_level(k, eig.dim(), 0, "truncated_inverse");
  const int d = eig.dim();
  const double top = eig.values(0);
  if (!(top > 0.0) || eig.values(k - 1) <= kRidgeFloorRel * top) {
    throw assumption_error(std::string(failure_label) + " (eigenvalue at level " +
                           std::to_string(k) + " is " + std::to_string(eig.values(k - 1)) +
                           ")");
  }
  HOperator inv = HOperator::Zero(d, d);
  for (int j = 0; j < k; ++j) {
    inv.noalias() +=
        (eig.vectors.col(j) * eig.vectors.col(j).transpose()) / eig.values(j);
  }
  return inv;
}

HOperator composition_operator(const EmpiricalOperators& emp, int k) {
  return emp.d_n * truncated_inverse(emp.eigen_c, k,
                                     "Assumption A2: empirical eigenvalue at the "
                                     "truncation level is not safely positive");
}

HOperator population_composition(const StationaryLaw& law, int k) {
  return law.d_x * truncated_inverse(law.eigen, k,
                                     "Assumption A1: population eigenvalue at the "
                                     "truncation level is not positive");
}

EstimatedRho componentwise_estimator(const EmpiricalOperators& emp, const TruncationPlan& plan) {
  const HOperator pi = leading_projection(emp.eigen_c, plan.k_n);
  EstimatedRho est;
  est.op = pi * composition_operator(emp, plan.k_n) * pi;
  est.kind = EstimatorKind::componentwise;
  est.k_n = plan.k_n;
  return est;
}

EstimatedRho diagonal_svd_estimator(const EmpiricalOperators& emp, const TruncationPlan& plan) {
  const int d = emp.eigen_c.dim();
  const HOperator t = composition_operator(emp, plan.k_n);
  const SvdSystem sys = svd(t);
  EstimatedRho est;
  est.kind = EstimatorKind::diagonal_svd;
  est.k_n = plan.k_n;
  est.op = HOperator::Zero(d, d);
  est.components.reserve(static_cast<std::size_t>(plan.k_n));
  for (int j = 0; j < plan.k_n; ++j) {
    const double sigma = sys.singular_values(j);
    est.op.noalias() += sigma * sys.left_vectors.col(j) * sys.right_vectors.col(j).transpose();
    est.components.push_back({sigma, sys.right(j), sys.left(j)});
  }
  return est;
}

double eigvec_alignment_error(const HOperator& emp_vectors, const HOperator& true_vectors, int k) {
  if (emp_vectors.rows() != true_vectors.rows()) {
    throw std::invalid_argument("eigvec_alignment_error: dimension mismatch");
  }
  if (k < 1 || k > emp_vectors.cols() || k > true_vectors.cols()) {
    throw std::invalid_argument("eigvec_alignment_error: level outside both families");
  }
  return alignment_sup(emp_vectors, true_vectors, k);
}

BoundReport check_eigvec_perturbation_bound(const EmpiricalOperators& emp,
                                            const StationaryLaw& law,
                                            const TruncationPlan& plan) {
  const int k = plan.k_n;
  // Inverse gaps are taken on the *true* covariance spectrum.
  const double lambda = spectral_gap_lambda(pad_tail_zero(law.eigen.values), k);
  BoundReport report;
  report.lhs = eigvec_alignment_error(emp.eigen_c.vectors, law.eigen.vectors, k);
  report.rhs = kSqrt8 * lambda * hs_norm(emp.c_n - law.c_x);
  report.holds = report.lhs <= report.rhs + 1e-12;
  return report;
}

SvdBoundReport check_svd_perturbation_bound(const EmpiricalOperators& emp,
                                            const StationaryLaw& law,
                                            const HOperator& true_rho,
                                            const TruncationPlan& plan) {
  const int k = plan.k_n;
  const SvdSystem rho_svd = svd(true_rho);
  // Inverse gaps of the true squared singular values, zero-padded at the tail.
  const double lambda_rho =
      spectral_gap_lambda_squared(pad_tail_zero(rho_svd.singular_values), k);

  const HOperator t_n = composition_operator(emp, k);
  const SvdSystem t_svd = svd(t_n);

  SvdBoundReport report;
  report.right_vectors.lhs = alignment_sup(t_svd.right_vectors, rho_svd.right_vectors, k);
  report.right_vectors.rhs =
      kSqrt8 * lambda_rho *
      operator_norm(true_rho.transpose() * true_rho - t_n.transpose() * t_n);
  report.right_vectors.holds = report.right_vectors.lhs <= report.right_vectors.rhs + 1e-12;

  report.left_vectors.lhs = alignment_sup(t_svd.left_vectors, rho_svd.left_vectors, k);
  report.left_vectors.rhs =
      kSqrt8 * lambda_rho *
      operator_norm(true_rho * true_rho.transpose() - t_n * t_n.transpose());
  report.left_vectors.holds = report.left_vectors.lhs <= report.left_vectors.rhs + 1e-12;

  // Weyl inequality between the empirical composition and its population
  // analogue under the shared rank-k inversion rule.
  const HOperator t_pop = population_composition(law, k);
  const Eigen::VectorXd pop_sv = Eigen::JacobiSVD<HOperator>(t_pop).singularValues();
  report.singular_values.lhs = (t_svd.singular_values - pop_sv).cwiseAbs().maxCoeff();
  report.singular_values.rhs = operator_norm(t_n - t_pop);
  report.singular_values.holds =
      report.singular_values.lhs <= report.singular_values.rhs + 1e-12;

  report.a4_holds = rho_svd.singular_values(0) + t_svd.singular_values(0) <= 1.0;
  return report;
}

}  // namespace arh
