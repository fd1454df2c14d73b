#pragma once

#include "arh/estimators.hpp"
#include "arh/predictor.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arh {

/// Per-replication error metrics collected by the Monte Carlo study.
/// `bounds` expands into one row family per deterministic inequality
/// (bound_eigvec, bound_svd_right, bound_svd_left, bound_singval) whose cell
/// values are 1 (holds) or 0 (violated).
enum class Metric {
  cov_hs,            // || c_n - C_X ||_HS
  cross_hs,          // || d_n - D_X ||_HS
  rho_trace,         // || rho~ - rho ||_trace
  rho_proj_trace,    // || rho~ - pi rho pi ||_trace (projected target)
  proj_residual_op,  // || rho - pi rho ||_op (tail not captured by pi)
  rho_hs,            // || rho~ - rho ||_HS
  rho_op,            // || rho~ - rho ||_op
  svd_rho_op,        // || rho^ - rho ||_op (reduced-rank estimator)
  eigvec_align,      // sup_{j<=k_n} || phi_nj - phi'_j ||
  svdvec_align,      // sup over retained singular vectors, both sides
  singval_sup,       // sup_{j<=k_n} | s_j(t_n) - s_j(rho) |
  pred_gap,          // || rho~(X_{n-1}) - rho(X_{n-1}) ||
  rolling_mse,       // mean || rho~(X_{t-1}) - X_t ||^2, floor = trace(C_eps)
  bounds,            // the deterministic inequality indicators
};

std::string metric_name(Metric m);
std::optional<Metric> metric_from_name(std::string_view name);
std::vector<Metric> all_metrics();

/// Row names a metric list produces in the report (bounds expands to four).
std::vector<std::string> row_schema(const std::vector<Metric>& metrics);

struct StudyConfig {
  ModelSpec model;
  std::vector<int> n_grid{100, 400, 1600, 6400};
  int replications = 50;
  std::uint64_t master_seed = 8675309;
  TruncationRule truncation{};
  /// Exponent of the ln-power in the normalized-rate diagnostic
  /// n^{1/4} / (ln n)^beta * median; must exceed 1/2.
  double beta = 1.0;
  /// Metrics to collect; empty means all.
  std::vector<Metric> metrics;

  // Pass/fail windows for the study-level checks.
  double slope_min = -0.65;
  double slope_max = -0.35;
  double decrease_ratio = 0.5;     // final median < ratio * initial median
  double rolling_mse_rtol = 0.15;  // |median - trace(C_eps)| <= rtol * trace

  void validate() const;
};

/// The default convergence study: d = 10, rho = diag(0.8 j^-2),
/// C_eps = diag(j^-2), fixed truncation at 3, n = 100 ... 6400, 50
/// replications.
StudyConfig default_study_config();

/// One cell of the raw result table.
struct CellRow {
  std::string metric;
  int n = 0;
  int rep = 0;
  double value = 0.0;
  std::string status;  // "ok" or "failed: <reason>"

  bool ok() const { return status == "ok"; }
};

/// Least-squares fit of ln(median) on ln(n).
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct MetricStats {
  int n = 0;
  int ok_count = 0;
  int failed_count = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct ConvergenceReport {
  StudyConfig config;
  /// Raw cells in canonical order: row-schema order, then n ascending, then
  /// replication ascending. Serialization of this table is byte-stable.
  std::vector<CellRow> cells;
  /// Per row name, stats for each n in ascending order (ok cells only).
  std::map<std::string, std::vector<MetricStats>> stats;
  /// Log-log rate fits where defined (>= 3 positive medians).
  std::map<std::string, RateFit> fits;
  /// Fraction of ok cells where each inequality held, per bound row.
  std::map<std::string, double> bound_pass_rates;

  const std::vector<MetricStats>* stats_for(const std::string& row) const;
  std::optional<double> median_at(const std::string& row, int n) const;
};

/// Run every (n, replication) cell of the study. Cell seeds derive from
/// (master_seed, n, rep) only, so results are independent of thread count;
/// ARH1_THREADS caps the worker pool (0 or unset = hardware concurrency).
ConvergenceReport run_study(const StudyConfig& config);

/// Thread-pool width the harness will use.
int harness_threads();

/// Fit ln(median) ~ slope * ln(n) + intercept. Requires >= 3 points with
/// positive medians.
RateFit fit_rate(const std::vector<std::pair<double, double>>& n_and_median);

/// The sequence n^{1/4} / (ln n)^beta * median over the grid.
std::vector<double> normalized_rate_values(const std::vector<std::pair<double, double>>& n_and_median,
                                           double beta);

/// True when the normalized sequence ends strictly below its first value.
bool normalized_rate_check(const std::vector<std::pair<double, double>>& n_and_median,
                           double beta);

/// One study-level acceptance check.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Evaluate the study-level checks the configured metrics support: slope
/// windows and normalized-rate decay for the covariance distances, strict
/// decrease for the operator-error and oracle-gap medians, the rolling-MSE
/// noise floor, and 100% bound pass rates.
std::vector<CheckResult> evaluate_study_checks(const ConvergenceReport& report);

/// Raw cell table as CSV (metric,n,rep,value,status), 17-significant-digit
/// values, canonical row order.
std::string report_cells_csv(const ConvergenceReport& report);

/// Human-readable summary: per-metric quartiles, rate fits, normalized
/// sequences, bound pass rates, and the check verdicts.
std::string report_summary_text(const ConvergenceReport& report,
                                const std::vector<CheckResult>& checks);

}  // namespace arh
