#include "arh/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace arh {

namespace {

constexpr double kSeriesTol = 1e-12;   // relative tail cutoff for C_X series
constexpr int kSeriesMaxTerms = 10000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Haar-like random orthogonal matrix: QR of a Gaussian matrix with the sign
// ambiguity fixed by the diagonal of R, so the result is seed-deterministic.
HOperator random_orthogonal(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  HOperator g(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      g(i, j) = normal(rng);
    }
  }
  Eigen::HouseholderQR<HOperator> qr(g);
  HOperator q = qr.householderQ();
  const HOperator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

// Factor L with L L^T = C from the eigensystem of a PSD operator; tiny
// negative eigenvalues from roundoff are clamped to zero.
HOperator psd_factor(const EigenSystem& eig) {
  const int d = eig.dim();
  HOperator l = eig.vectors;
  for (int j = 0; j < d; ++j) {
    l.col(j) *= std::sqrt(std::max(eig.values[j], 0.0));
  }
  return l;
}

std::vector<double> padded_values(const std::vector<double>& values, int d, const char* what) {
  if (static_cast<int>(values.size()) > d) {
    throw std::invalid_argument(std::string(what) + ": more values (" +
                                std::to_string(values.size()) + ") than dimensions (" +
                                std::to_string(d) + ")");
  }
  std::vector<double> out(values);
  for (double v : out) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": values must be finite");
    }
  }
  out.resize(static_cast<std::size_t>(d), 0.0);
  return out;
}

}  // namespace

std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return h;
}

HOperator build_rho(const RhoSpec& spec, int d) {
  if (d < 1) {
    throw std::invalid_argument("build_rho: dimension must be >= 1");
  }
  HOperator rho;
  switch (spec.kind) {
    case RhoSpec::Kind::diagonal:
    case RhoSpec::Kind::rotated_diagonal: {
      const auto sv = padded_values(spec.singular_values, d, "build_rho");
      for (std::size_t j = 0; j < sv.size(); ++j) {
        if (sv[j] < 0.0) {
          throw std::invalid_argument("build_rho: singular values must be non-negative");
        }
        if (j > 0 && sv[j] > sv[j - 1]) {
          throw std::invalid_argument("build_rho: singular values must be non-increasing");
        }
      }
      HOperator diag = HOperator::Zero(d, d);
      for (int j = 0; j < d; ++j) {
        diag(j, j) = sv[static_cast<std::size_t>(j)];
      }
      if (spec.kind == RhoSpec::Kind::diagonal) {
        rho = diag;
      } else {
        const HOperator u = random_orthogonal(d, derive_stream(spec.rotation_seed, 1, 0));
        const HOperator v = random_orthogonal(d, derive_stream(spec.rotation_seed, 2, 0));
        rho = u * diag * v.transpose();
      }
      break;
    }
    case RhoSpec::Kind::kernel: {
      if (!(spec.target_norm > 0.0) || !std::isfinite(spec.target_norm)) {
        throw std::invalid_argument("build_rho: kernel target norm must be positive");
      }
      if (!(spec.length_scale > 0.0) || !std::isfinite(spec.length_scale)) {
        throw std::invalid_argument("build_rho: kernel length scale must be positive");
      }
      // Midpoint discretization of the Gaussian-kernel integral operator on
      // [0, 1], then scaled to the requested uniform norm.
      HOperator k(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          const double ti = (i + 0.5) / d;
          const double tj = (j + 0.5) / d;
          const double z = (ti - tj) / spec.length_scale;
          k(i, j) = std::exp(-0.5 * z * z) / d;
        }
      }
      rho = k * (spec.target_norm / operator_norm(k));
      break;
    }
  }
  if (!verify_contraction(rho, d)) {
    throw std::invalid_argument(
        "build_rho: operator is not eventually contractive (no power within the "
        "dimension has uniform norm < 1)");
  }
  return rho;
}

std::optional<int> verify_contraction(const HOperator& rho, int k_max) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw std::invalid_argument("verify_contraction: operator must be square");
  }
  HOperator power = rho;
  for (int k = 1; k <= k_max; ++k) {
    if (operator_norm(power) < 1.0) {
      return k;
    }
    power = power * rho;
  }
  return std::nullopt;
}

ARHModel make_model(HOperator rho, HOperator c_eps, InnovationLaw law) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw std::invalid_argument("make_model: rho must be square and non-empty");
  }
  if (c_eps.rows() != rho.rows() || c_eps.cols() != rho.cols()) {
    throw std::invalid_argument("make_model: rho and c_eps dimensions differ");
  }
  if (!rho.allFinite() || !c_eps.allFinite()) {
    throw std::invalid_argument("make_model: operators must be finite");
  }
  const int d = static_cast<int>(rho.rows());
  // c_eps must be a symmetric PSD covariance.
  const EigenSystem eig = eigen_sym(c_eps);  // rejects asymmetry
  const double top = std::max(eig.values(0), 0.0);
  if (eig.values(d - 1) < -1e-12 * std::max(top, 1.0)) {
    throw std::invalid_argument("make_model: c_eps is not positive semidefinite");
  }
  if (!(top > 0.0)) {
    throw std::invalid_argument("make_model: c_eps must be non-zero");
  }
  if (law.kind == InnovationKind::truncated_gaussian && law.bound < 0.0) {
    throw std::invalid_argument("make_model: truncation bound must be >= 0");
  }
  if (!verify_contraction(rho, d)) {
    throw std::invalid_argument(
        "make_model: rho is not eventually contractive within the dimension");
  }
  ARHModel model;
  model.rho = std::move(rho);
  model.c_eps = std::move(c_eps);
  model.law = law;
  model.d = d;
  return model;
}

ARHModel build_model(const ModelSpec& spec) {
  if (spec.d < 1) {
    throw std::invalid_argument("build_model: dimension must be >= 1");
  }
  HOperator rho = build_rho(spec.rho, spec.d);
  const auto diag = spec.c_eps_diag.empty()
                        ? [&] {
                            std::vector<double> v(static_cast<std::size_t>(spec.d));
                            for (int j = 0; j < spec.d; ++j) {
                              v[static_cast<std::size_t>(j)] = 1.0 / ((j + 1.0) * (j + 1.0));
                            }
                            return v;
                          }()
                        : padded_values(spec.c_eps_diag, spec.d, "build_model c_eps");
  for (double c : diag) {
    if (c < 0.0) {
      throw std::invalid_argument("build_model: innovation variances must be >= 0");
    }
  }
  HOperator c_eps = HOperator::Zero(spec.d, spec.d);
  for (int j = 0; j < spec.d; ++j) {
    c_eps(j, j) = diag[static_cast<std::size_t>(j)];
  }
  ARHModel model = make_model(std::move(rho), std::move(c_eps), spec.law);
  ModelSpec resolved = spec;
  resolved.c_eps_diag = diag;  // keep the expanded diagonal for metadata
  model.spec = std::move(resolved);
  return model;
}

StationaryLaw stationary_law(const ARHModel& model) {
  HOperator term = model.c_eps;
  HOperator c_x = model.c_eps;
  for (int k = 1;; ++k) {
    if (k > kSeriesMaxTerms) {
      throw assumption_error(
          "stationary_law: covariance series did not converge within " +
          std::to_string(kSeriesMaxTerms) + " terms");
    }
    term = model.rho * term * model.rho.transpose();
    const double tail = hs_norm(term);
    c_x += term;
    if (!std::isfinite(tail)) {
      throw assumption_error("stationary_law: covariance series diverged");
    }
    if (tail <= kSeriesTol * std::max(hs_norm(c_x), 1.0)) {
      break;
    }
  }
  c_x = 0.5 * (c_x + c_x.transpose());  // remove accumulated asymmetry noise

  StationaryLaw law;
  law.c_x = c_x;
  law.d_x = model.rho * c_x;
  law.eigen = eigen_sym(c_x);

  // The series limit satisfies C_X = rho C_X rho^* + C_eps; the truncation
  // residual must sit well below the series tolerance envelope.
  const double residual =
      hs_norm(law.c_x - model.rho * law.c_x * model.rho.transpose() - model.c_eps);
  if (residual > 1e-9 * std::max(hs_norm(law.c_x), 1.0)) {
    throw std::runtime_error("stationary_law: fixed-point residual check failed");
  }
  return law;
}

double innovation_bound(const ARHModel& model) {
  if (model.law.bound > 0.0) {
    return model.law.bound;
  }
  return 6.0 * std::sqrt(model.c_eps.trace());
}

double trajectory_bound(const ARHModel& model) {
  const double r = operator_norm(model.rho);
  if (!(r < 1.0)) {
    throw std::invalid_argument(
        "trajectory_bound: requires ||rho|| < 1 (got " + std::to_string(r) + ")");
  }
  return innovation_bound(model) / (1.0 - r);
}

Trajectory simulate(const ARHModel& model, const StationaryLaw& law, int n,
                    int burn_in, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("simulate: n must be >= 2");
  }
  if (burn_in < 0) {
    throw std::invalid_argument("simulate: burn_in must be >= 0");
  }
  const int d = model.d;
  if (law.c_x.rows() != d) {
    throw std::invalid_argument("simulate: stationary law dimension mismatch");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&](const HOperator& factor) {
    HVector z(d);
    for (int i = 0; i < d; ++i) {
      z[i] = normal(rng);
    }
    return HVector(factor * z);
  };

  const HOperator l_x = psd_factor(law.eigen);
  const HOperator l_eps = psd_factor(eigen_sym(model.c_eps));

  const bool truncated = model.law.kind == InnovationKind::truncated_gaussian;
  const double m_eps = truncated ? innovation_bound(model)
                                 : std::numeric_limits<double>::infinity();
  const double m_traj = truncated ? trajectory_bound(model)
                                  : std::numeric_limits<double>::infinity();
  const auto draw_innovation = [&] {
    HVector e = draw(l_eps);
    while (e.norm() > m_eps) {
      e = draw(l_eps);
    }
    return e;
  };

  // Exact stationary start; under the truncated law the initial draw is
  // resampled until it obeys the trajectory bound, which the recursion then
  // preserves (||rho|| * M/(1-||rho||) + M = M/(1-||rho||)).
  HVector state = draw(l_x);
  while (state.norm() > m_traj) {
    state = draw(l_x);
  }
  for (int b = 0; b < burn_in; ++b) {
    state = model.rho * state + draw_innovation();
  }

  Trajectory traj;
  traj.samples.reserve(static_cast<std::size_t>(n));
  traj.innovations.reserve(static_cast<std::size_t>(n - 1));
  traj.samples.push_back(state);
  for (int t = 1; t < n; ++t) {
    HVector eps = draw_innovation();
    state = model.rho * state + eps;
    traj.samples.push_back(state);
    traj.innovations.push_back(std::move(eps));
  }
  traj.seed = seed;
  traj.burn_in = burn_in;
  traj.model = model.spec;
  return traj;
}

Trajectory simulate(const ARHModel& model, int n, int burn_in, std::uint64_t seed) {
  return simulate(model, stationary_law(model), n, burn_in, seed);
}

}  // namespace arh
