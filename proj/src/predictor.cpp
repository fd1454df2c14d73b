#include "arh/predictor.hpp"

#include <string>

namespace arh {

HVector plug_in_predict(const EstimatedRho& est, const HVector& x_prev) {
  return apply(est.op, x_prev);
}

double oracle_gap(const EstimatedRho& est, const HOperator& true_rho, const HVector& x_prev) {
  if (true_rho.rows() != est.op.rows() || true_rho.cols() != est.op.cols()) {
    throw std::invalid_argument("oracle_gap: operator dimension mismatch");
  }
  return (apply(est.op, x_prev) - apply(true_rho, x_prev)).norm();
}

ForecastErrorSummary rolling_forecast_error(const Trajectory& traj, const EstimatedRho& est,
                                            int start_index) {
  if (traj.n() < 2) {
    throw std::invalid_argument("rolling_forecast_error: trajectory must have n >= 2");
  }
  if (start_index < 1 || start_index >= traj.n()) {
    throw std::invalid_argument("rolling_forecast_error: start index " +
                                std::to_string(start_index) + " outside [1, n-1]");
  }
  ForecastErrorSummary summary;
  double total = 0.0;
  for (int t = start_index; t < traj.n(); ++t) {
    const HVector forecast = apply(est.op, traj.samples[static_cast<std::size_t>(t - 1)]);
    total += (forecast - traj.samples[static_cast<std::size_t>(t)]).squaredNorm();
    ++summary.count;
  }
  summary.mean_sq_err = total / summary.count;
  return summary;
}

}  // namespace arh
