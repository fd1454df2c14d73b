#include "arh/harness.hpp"

#include "arh/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace arh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MetricInfo {
  Metric metric;
  const char* name;
};

constexpr MetricInfo kMetricTable[] = {
    {Metric::cov_hs, "cov_hs"},
    {Metric::cross_hs, "cross_hs"},
    {Metric::rho_trace, "rho_trace"},
    {Metric::rho_proj_trace, "rho_proj_trace"},
    {Metric::proj_residual_op, "proj_residual_op"},
    {Metric::rho_hs, "rho_hs"},
    {Metric::rho_op, "rho_op"},
    {Metric::svd_rho_op, "svd_rho_op"},
    {Metric::eigvec_align, "eigvec_align"},
    {Metric::svdvec_align, "svdvec_align"},
    {Metric::singval_sup, "singval_sup"},
    {Metric::pred_gap, "pred_gap"},
    {Metric::rolling_mse, "rolling_mse"},
    {Metric::bounds, "bounds"},
};

const char* const kBoundRows[] = {"bound_eigvec", "bound_svd_right", "bound_svd_left",
                                  "bound_singval"};

bool is_bound_row(const std::string& row) { return row.rfind("bound_", 0) == 0; }

// Linear interpolation between order statistics of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) {
    return kNaN;
  }
  const double h = p * (static_cast<double>(sorted.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) {
    return sorted.back();
  }
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct CellOutcome {
  double value = kNaN;
  std::string status = "ok";
};

struct StudyContext {
  const StudyConfig* cfg = nullptr;
  ARHModel model;
  StationaryLaw law;
  SvdSystem rho_svd;
  std::vector<Metric> metrics;
};

template <typename Fn>
CellOutcome guarded(Fn&& fn) {
  try {
    return {fn(), "ok"};
  } catch (const std::exception& e) {
    return {kNaN, std::string("failed: ") + e.what()};
  }
}

CellOutcome unavailable(const std::string& reason) {
  return {kNaN, "failed: " + reason};
}

// All metric rows for one (n, replication) cell, in row-schema order.
std::vector<CellOutcome> compute_cell(const StudyContext& ctx, int n, int rep) {
  const StudyConfig& cfg = *ctx.cfg;
  const HOperator& rho = ctx.model.rho;
  const std::uint64_t seed = derive_stream(cfg.master_seed, static_cast<std::uint64_t>(n),
                                           static_cast<std::uint64_t>(rep));
  const Trajectory traj = simulate(ctx.model, ctx.law, n, 0, seed);
  const EmpiricalOperators emp = empirical_operators(traj);

  std::optional<TruncationPlan> plan;
  std::string plan_reason;
  try {
    plan = select_truncation(emp, cfg.truncation);
  } catch (const std::exception& e) {
    plan_reason = e.what();
  }

  std::optional<EstimatedRho> tilde;
  std::optional<EstimatedRho> hat;
  std::string est_reason = plan_reason;
  if (plan) {
    try {
      tilde = componentwise_estimator(emp, *plan);
      hat = diagonal_svd_estimator(emp, *plan);
    } catch (const std::exception& e) {
      est_reason = e.what();
    }
  }

  std::vector<CellOutcome> out;
  out.reserve(row_schema(ctx.metrics).size());
  for (Metric m : ctx.metrics) {
    switch (m) {
      case Metric::cov_hs:
        out.push_back(guarded([&] { return hs_norm(emp.c_n - ctx.law.c_x); }));
        break;
      case Metric::cross_hs:
        out.push_back(guarded([&] { return hs_norm(emp.d_n - ctx.law.d_x); }));
        break;
      case Metric::rho_trace:
        out.push_back(tilde ? guarded([&] { return trace_norm(tilde->op - rho); })
                            : unavailable(est_reason));
        break;
      case Metric::rho_proj_trace:
        out.push_back(tilde ? guarded([&] {
          const HOperator pi = leading_projection(emp.eigen_c, plan->k_n);
          return trace_norm(tilde->op - pi * rho * pi);
        })
                            : unavailable(est_reason));
        break;
      case Metric::proj_residual_op:
        out.push_back(plan ? guarded([&] {
          const HOperator pi = leading_projection(emp.eigen_c, plan->k_n);
          return operator_norm(rho - pi * rho);
        })
                           : unavailable(plan_reason));
        break;
      case Metric::rho_hs:
        out.push_back(tilde ? guarded([&] { return hs_norm(tilde->op - rho); })
                            : unavailable(est_reason));
        break;
      case Metric::rho_op:
        out.push_back(tilde ? guarded([&] { return operator_norm(tilde->op - rho); })
                            : unavailable(est_reason));
        break;
      case Metric::svd_rho_op:
        out.push_back(hat ? guarded([&] { return operator_norm(hat->op - rho); })
                          : unavailable(est_reason));
        break;
      case Metric::eigvec_align:
        out.push_back(plan ? guarded([&] {
          return eigvec_alignment_error(emp.eigen_c.vectors, ctx.law.eigen.vectors, plan->k_n);
        })
                           : unavailable(plan_reason));
        break;
      case Metric::svdvec_align:
        out.push_back(hat ? guarded([&] {
          double sup = 0.0;
          for (int j = 0; j < hat->k_n; ++j) {
            const SvdComponent& comp = hat->components[static_cast<std::size_t>(j)];
            sup = std::max(sup,
                           (comp.right - sign_align(comp.right, ctx.rho_svd.right(j))).norm());
            sup = std::max(sup,
                           (comp.left - sign_align(comp.left, ctx.rho_svd.left(j))).norm());
          }
          return sup;
        })
                          : unavailable(est_reason));
        break;
      case Metric::singval_sup:
        out.push_back(hat ? guarded([&] {
          double sup = 0.0;
          for (int j = 0; j < hat->k_n; ++j) {
            sup = std::max(sup, std::abs(hat->components[static_cast<std::size_t>(j)].sigma -
                                         ctx.rho_svd.singular_values(j)));
          }
          return sup;
        })
                          : unavailable(est_reason));
        break;
      case Metric::pred_gap:
        out.push_back(tilde ? guarded([&] {
          return oracle_gap(*tilde, rho, traj.samples.back());
        })
                            : unavailable(est_reason));
        break;
      case Metric::rolling_mse:
        out.push_back(tilde ? guarded([&] {
          return rolling_forecast_error(traj, *tilde, 1).mean_sq_err;
        })
                            : unavailable(est_reason));
        break;
      case Metric::bounds: {
        if (plan) {
          out.push_back(guarded([&] {
            return check_eigvec_perturbation_bound(emp, ctx.law, *plan).holds ? 1.0 : 0.0;
          }));
          CellOutcome right, left, singval;
          try {
            const SvdBoundReport rep = check_svd_perturbation_bound(emp, ctx.law, rho, *plan);
            right = {rep.right_vectors.holds ? 1.0 : 0.0, "ok"};
            left = {rep.left_vectors.holds ? 1.0 : 0.0, "ok"};
            singval = {rep.singular_values.holds ? 1.0 : 0.0, "ok"};
          } catch (const std::exception& e) {
            right = left = singval = unavailable(e.what());
          }
          out.push_back(right);
          out.push_back(left);
          out.push_back(singval);
        } else {
          for (int i = 0; i < 4; ++i) {
            out.push_back(unavailable(plan_reason));
          }
        }
        break;
      }
    }
  }
  return out;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(harness_threads()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

std::vector<std::pair<double, double>> medians_over_grid(const ConvergenceReport& report,
                                                         const std::string& row) {
  std::vector<std::pair<double, double>> out;
  const auto* stats = report.stats_for(row);
  if (stats == nullptr) {
    return out;
  }
  for (const MetricStats& s : *stats) {
    if (s.ok_count > 0) {
      out.emplace_back(static_cast<double>(s.n), s.median);
    }
  }
  return out;
}

std::string decrease_detail(const std::vector<std::pair<double, double>>& med) {
  std::ostringstream os;
  os << "medians=";
  for (std::size_t i = 0; i < med.size(); ++i) {
    if (i > 0) {
      os << ",";
    }
    os << format_double(med[i].second);
  }
  return os.str();
}

}  // namespace

std::string metric_name(Metric m) {
  for (const MetricInfo& info : kMetricTable) {
    if (info.metric == m) {
      return info.name;
    }
  }
  throw std::invalid_argument("metric_name: unknown metric");
}

std::optional<Metric> metric_from_name(std::string_view name) {
  for (const MetricInfo& info : kMetricTable) {
    if (name == info.name) {
      return info.metric;
    }
  }
  return std::nullopt;
}

std::vector<Metric> all_metrics() {
  std::vector<Metric> out;
  for (const MetricInfo& info : kMetricTable) {
    out.push_back(info.metric);
  }
  return out;
}

std::vector<std::string> row_schema(const std::vector<Metric>& metrics) {
  std::vector<std::string> rows;
  for (Metric m : metrics) {
    if (m == Metric::bounds) {
      for (const char* row : kBoundRows) {
        rows.emplace_back(row);
      }
    } else {
      rows.push_back(metric_name(m));
    }
  }
  return rows;
}

void StudyConfig::validate() const {
  if (n_grid.size() < 2) {
    throw std::invalid_argument("study: n_grid needs at least 2 sizes");
  }
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) {
      throw std::invalid_argument("study: every n must be >= 2");
    }
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("study: n_grid must be strictly increasing");
    }
  }
  if (replications < 1) {
    throw std::invalid_argument("study: replications must be >= 1");
  }
  if (!(beta > 0.5)) {
    throw std::invalid_argument("study: beta must exceed 1/2");
  }
  if (!(slope_min <= slope_max)) {
    throw std::invalid_argument("study: slope window is empty");
  }
  if (!(decrease_ratio > 0.0) || !(decrease_ratio < 1.0)) {
    throw std::invalid_argument("study: decrease ratio must be in (0, 1)");
  }
  if (!(rolling_mse_rtol > 0.0)) {
    throw std::invalid_argument("study: rolling MSE tolerance must be positive");
  }
}

StudyConfig default_study_config() {
  StudyConfig cfg;
  cfg.model.d = 10;
  cfg.model.rho.kind = RhoSpec::Kind::diagonal;
  cfg.model.rho.singular_values.resize(10);
  cfg.model.c_eps_diag.resize(10);
  for (int j = 0; j < 10; ++j) {
    // Same expression the declarative 'diagpow:a,p' grammar evaluates, so a
    // config file spelling out the default study reproduces it bit for bit.
    cfg.model.rho.singular_values[static_cast<std::size_t>(j)] =
        0.8 * std::pow(j + 1.0, -2.0);
    cfg.model.c_eps_diag[static_cast<std::size_t>(j)] = 1.0 * std::pow(j + 1.0, -2.0);
  }
  cfg.truncation.kind = TruncationRule::Kind::fixed;
  cfg.truncation.k = 3;
  return cfg;
}

const std::vector<MetricStats>* ConvergenceReport::stats_for(const std::string& row) const {
  const auto it = stats.find(row);
  return it == stats.end() ? nullptr : &it->second;
}

std::optional<double> ConvergenceReport::median_at(const std::string& row, int n) const {
  const auto* v = stats_for(row);
  if (v == nullptr) {
    return std::nullopt;
  }
  for (const MetricStats& s : *v) {
    if (s.n == n && s.ok_count > 0) {
      return s.median;
    }
  }
  return std::nullopt;
}

int harness_threads() {
  const char* env = std::getenv("ARH1_THREADS");
  long parsed = 0;
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    parsed = std::strtol(env, &end, 10);
    if (end == nullptr || *end != '\0' || parsed < 0) {
      throw std::invalid_argument("ARH1_THREADS must be a non-negative integer");
    }
  }
  if (parsed > 0) {
    return static_cast<int>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ConvergenceReport run_study(const StudyConfig& config) {
  config.validate();

  StudyContext ctx;
  ctx.cfg = &config;
  ctx.model = build_model(config.model);
  ctx.law = stationary_law(ctx.model);
  ctx.rho_svd = svd(ctx.model.rho);
  ctx.metrics = config.metrics.empty() ? all_metrics() : config.metrics;

  const std::vector<std::string> schema = row_schema(ctx.metrics);
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t total = config.n_grid.size() * reps;

  // Each cell lands in a preassigned slot, so the result is independent of
  // scheduling; the seed depends only on (master_seed, n, rep).
  std::vector<std::vector<CellOutcome>> raw(total);
  parallel_for(total, [&](std::size_t idx) {
    const std::size_t gi = idx / reps;
    const int rep = static_cast<int>(idx % reps);
    raw[idx] = compute_cell(ctx, config.n_grid[gi], rep);
  });

  ConvergenceReport report;
  report.config = config;
  report.config.metrics = ctx.metrics;
  report.config.model = ctx.model.spec.value();  // expanded parameter lists

  report.cells.reserve(total * schema.size());
  for (std::size_t r = 0; r < schema.size(); ++r) {
    for (std::size_t gi = 0; gi < config.n_grid.size(); ++gi) {
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const CellOutcome& oc = raw[gi * reps + rep][r];
        report.cells.push_back(CellRow{schema[r], config.n_grid[gi], static_cast<int>(rep),
                                       oc.value, oc.status});
      }
    }
  }

  for (std::size_t r = 0; r < schema.size(); ++r) {
    std::vector<MetricStats> per_n;
    for (std::size_t gi = 0; gi < config.n_grid.size(); ++gi) {
      MetricStats s;
      s.n = config.n_grid[gi];
      std::vector<double> ok_values;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const CellOutcome& oc = raw[gi * reps + rep][r];
        if (oc.status == "ok") {
          ok_values.push_back(oc.value);
        } else {
          ++s.failed_count;
        }
      }
      s.ok_count = static_cast<int>(ok_values.size());
      std::sort(ok_values.begin(), ok_values.end());
      s.median = quantile_sorted(ok_values, 0.5);
      s.q25 = quantile_sorted(ok_values, 0.25);
      s.q75 = quantile_sorted(ok_values, 0.75);
      per_n.push_back(s);
    }
    report.stats[schema[r]] = std::move(per_n);
  }

  for (const std::string& row : schema) {
    if (is_bound_row(row)) {
      int qualifying = 0;
      double held = 0.0;
      for (const MetricStats& s : report.stats[row]) {
        qualifying += s.ok_count;
      }
      for (const CellRow& cell : report.cells) {
        if (cell.metric == row && cell.ok()) {
          held += cell.value;
        }
      }
      if (qualifying > 0) {
        report.bound_pass_rates[row] = held / qualifying;
      }
      continue;
    }
    const auto med = medians_over_grid(report, row);
    if (med.size() >= 3 &&
        std::all_of(med.begin(), med.end(), [](const auto& p) { return p.second > 0.0; })) {
      report.fits[row] = fit_rate(med);
    }
  }
  return report;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& n_and_median) {
  if (n_and_median.size() < 3) {
    throw std::invalid_argument("fit_rate: need at least 3 grid points");
  }
  std::vector<double> xs, ys;
  for (const auto& [n, median] : n_and_median) {
    if (!(n > 1.0) || !(median > 0.0)) {
      throw std::invalid_argument("fit_rate: sample sizes must exceed 1 and medians be positive");
    }
    xs.push_back(std::log(n));
    ys.push_back(std::log(median));
  }
  const double count = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw std::invalid_argument("fit_rate: sample sizes must be distinct");
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ss_res += resid * resid;
    }
    fit.r2 = 1.0 - ss_res / syy;
  } else {
    fit.r2 = 1.0;
  }
  return fit;
}

std::vector<double> normalized_rate_values(
    const std::vector<std::pair<double, double>>& n_and_median, double beta) {
  std::vector<double> out;
  out.reserve(n_and_median.size());
  for (const auto& [n, median] : n_and_median) {
    if (!(n > 1.0)) {
      throw std::invalid_argument("normalized_rate_values: n must exceed 1");
    }
    out.push_back(std::pow(n, 0.25) / std::pow(std::log(n), beta) * median);
  }
  return out;
}

bool normalized_rate_check(const std::vector<std::pair<double, double>>& n_and_median,
                           double beta) {
  const auto values = normalized_rate_values(n_and_median, beta);
  if (values.size() < 2) {
    throw std::invalid_argument("normalized_rate_check: need at least 2 grid points");
  }
  return values.back() < values.front();
}

std::vector<CheckResult> evaluate_study_checks(const ConvergenceReport& report) {
  const StudyConfig& cfg = report.config;
  std::vector<CheckResult> checks;

  const auto has_metric = [&](Metric m) {
    return std::find(cfg.metrics.begin(), cfg.metrics.end(), m) != cfg.metrics.end();
  };
  const auto full_grid = [&](const std::vector<std::pair<double, double>>& med) {
    return med.size() == cfg.n_grid.size();
  };

  const auto add_rate_checks = [&](const std::string& row) {
    const auto med = medians_over_grid(report, row);
    CheckResult slope_check{"slope_" + row, false, ""};
    const auto fit_it = report.fits.find(row);
    if (!full_grid(med) || fit_it == report.fits.end()) {
      slope_check.detail = "fit unavailable (missing or non-positive medians)";
    } else {
      const double slope = fit_it->second.slope;
      slope_check.pass = slope >= cfg.slope_min && slope <= cfg.slope_max;
      slope_check.detail = "slope=" + format_double(slope) + " window=[" +
                           format_double(cfg.slope_min) + "," + format_double(cfg.slope_max) +
                           "]";
    }
    checks.push_back(slope_check);

    CheckResult norm_check{"normalized_" + row, false, ""};
    if (!full_grid(med)) {
      norm_check.detail = "medians unavailable on the full grid";
    } else {
      const auto values = normalized_rate_values(med, cfg.beta);
      norm_check.pass = values.back() < values.front();
      norm_check.detail = "normalized first=" + format_double(values.front()) +
                          " last=" + format_double(values.back()) +
                          " beta=" + format_double(cfg.beta);
    }
    checks.push_back(norm_check);
  };

  const auto add_decrease_check = [&](const std::string& row, bool with_ratio) {
    CheckResult check{"decrease_" + row, false, ""};
    const auto med = medians_over_grid(report, row);
    if (!full_grid(med)) {
      check.detail = "medians unavailable on the full grid";
    } else {
      bool strictly_decreasing = true;
      for (std::size_t i = 1; i < med.size(); ++i) {
        strictly_decreasing = strictly_decreasing && med[i].second < med[i - 1].second;
      }
      check.pass = strictly_decreasing;
      check.detail = decrease_detail(med);
      if (with_ratio) {
        const bool ratio_ok = med.back().second < cfg.decrease_ratio * med.front().second;
        check.pass = check.pass && ratio_ok;
        check.detail += " ratio_target=" + format_double(cfg.decrease_ratio);
      }
    }
    checks.push_back(check);
  };

  if (has_metric(Metric::cov_hs)) {
    add_rate_checks("cov_hs");
  }
  if (has_metric(Metric::cross_hs)) {
    add_rate_checks("cross_hs");
  }
  if (has_metric(Metric::rho_trace)) {
    add_decrease_check("rho_trace", true);
  }
  if (has_metric(Metric::svd_rho_op)) {
    add_decrease_check("svd_rho_op", true);
  }
  if (has_metric(Metric::pred_gap)) {
    add_decrease_check("pred_gap", false);
  }

  if (has_metric(Metric::rolling_mse)) {
    CheckResult check{"rolling_mse_floor", false, ""};
    double floor = 0.0;
    for (double c : cfg.model.c_eps_diag) {
      floor += c;
    }
    const auto median = report.median_at("rolling_mse", cfg.n_grid.back());
    if (!median || !(floor > 0.0)) {
      check.detail = "median or noise floor unavailable";
    } else {
      const double err = std::abs(*median - floor);
      check.pass = err <= cfg.rolling_mse_rtol * floor;
      check.detail = "median=" + format_double(*median) + " floor=" + format_double(floor) +
                     " rtol=" + format_double(cfg.rolling_mse_rtol);
    }
    checks.push_back(check);
  }

  if (has_metric(Metric::bounds)) {
    for (const char* row : kBoundRows) {
      CheckResult check{std::string("holds_") + row, false, ""};
      const auto it = report.bound_pass_rates.find(row);
      int qualifying = 0;
      if (const auto* stats = report.stats_for(row)) {
        for (const MetricStats& s : *stats) {
          qualifying += s.ok_count;
        }
      }
      if (it == report.bound_pass_rates.end() || qualifying == 0) {
        check.detail = "no qualifying cells";
      } else {
        check.pass = it->second == 1.0;
        check.detail = "pass_rate=" + format_double(it->second) +
                       " qualifying=" + std::to_string(qualifying);
      }
      checks.push_back(check);
    }
  }
  return checks;
}

std::string report_cells_csv(const ConvergenceReport& report) {
  std::string out = "metric,n,rep,value,status\n";
  for (const CellRow& cell : report.cells) {
    out += cell.metric;
    out += ',';
    out += std::to_string(cell.n);
    out += ',';
    out += std::to_string(cell.rep);
    out += ',';
    if (cell.ok()) {
      out += format_double(cell.value);
    }
    out += ',';
    out += cell.status;
    out += '\n';
  }
  return out;
}

std::string report_summary_text(const ConvergenceReport& report,
                                const std::vector<CheckResult>& checks) {
  const StudyConfig& cfg = report.config;
  std::ostringstream os;
  os << "ARH(1) convergence study\n";
  os << "========================\n";
  os << "model: d=" << cfg.model.d << " rho=" << format_rho_spec(cfg.model.rho)
     << " c_eps=" << format_c_eps(cfg.model.c_eps_diag) << " law=" << format_law(cfg.model.law)
     << "\n";
  os << "study: n_grid=";
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (i > 0) {
      os << ",";
    }
    os << cfg.n_grid[i];
  }
  os << " replications=" << cfg.replications << " master_seed=" << cfg.master_seed
     << " truncation=" << format_truncation_rule(cfg.truncation)
     << " beta=" << format_double(cfg.beta) << "\n";
  os << "windows: slope=[" << format_double(cfg.slope_min) << "," << format_double(cfg.slope_max)
     << "] decrease_ratio=" << format_double(cfg.decrease_ratio)
     << " rolling_mse_rtol=" << format_double(cfg.rolling_mse_rtol) << "\n";

  for (const std::string& row : row_schema(cfg.metrics)) {
    os << "\nmetric " << row << "\n";
    const auto* stats = report.stats_for(row);
    if (stats == nullptr) {
      continue;
    }
    for (const MetricStats& s : *stats) {
      os << "  n=" << s.n << " ok=" << s.ok_count << " failed=" << s.failed_count;
      if (s.ok_count > 0) {
        os << " median=" << format_double(s.median) << " q25=" << format_double(s.q25)
           << " q75=" << format_double(s.q75);
      }
      os << "\n";
    }
    if (is_bound_row(row)) {
      const auto it = report.bound_pass_rates.find(row);
      if (it != report.bound_pass_rates.end()) {
        os << "  pass_rate=" << format_double(it->second) << "\n";
      }
      continue;
    }
    const auto fit_it = report.fits.find(row);
    if (fit_it != report.fits.end()) {
      os << "  fit: slope=" << format_double(fit_it->second.slope)
         << " intercept=" << format_double(fit_it->second.intercept)
         << " r2=" << format_double(fit_it->second.r2) << "\n";
    }
    const auto med = medians_over_grid(report, row);
    if (med.size() >= 2) {
      os << "  normalized(beta=" << format_double(cfg.beta) << "):";
      for (double v : normalized_rate_values(med, cfg.beta)) {
        os << " " << format_double(v);
      }
      os << "\n";
    }
  }

  os << "\nchecks\n";
  bool all_pass = true;
  for (const CheckResult& check : checks) {
    all_pass = all_pass && check.pass;
    os << "  " << (check.pass ? "PASS" : "FAIL") << " " << check.name << ": " << check.detail
       << "\n";
  }
  os << "overall " << (all_pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace arh
