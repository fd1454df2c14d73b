#pragma once

#include "arh/estimators.hpp"

namespace arh {

/// One-step plug-in forecast X^_n = rho^(X_{n-1}).
HVector plug_in_predict(const EstimatedRho& est, const HVector& x_prev);

/// Distance between the plug-in forecast and the best (oracle) predictor
/// rho(X_{n-1}): || rho^(x) - rho(x) ||. This isolates estimation error;
/// the innovation term is common to both predictors.
double oracle_gap(const EstimatedRho& est, const HOperator& true_rho, const HVector& x_prev);

struct ForecastErrorSummary {
  double mean_sq_err = 0.0;  // mean of ||X^_t - X_t||^2 over the window
  int count = 0;             // number of forecasts scored
};

/// Score one-step forecasts X^_t = rho^(X_{t-1}) against the realized X_t
/// for t = start_index, ..., n-1. Requires 1 <= start_index <= n-1.
ForecastErrorSummary rolling_forecast_error(const Trajectory& traj, const EstimatedRho& est,
                                            int start_index);

}  // namespace arh
