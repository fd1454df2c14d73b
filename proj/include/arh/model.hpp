#pragma once

#include "arh/hilbert.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace arh {

/// Innovation distribution for the ARH(1) recursion.
enum class InnovationKind { gaussian, truncated_gaussian };

struct InnovationLaw {
  InnovationKind kind = InnovationKind::gaussian;
  /// Resampling bound M for truncated_gaussian; 0 selects the default
  /// M = 6 * sqrt(trace(C_eps)). Ignored for gaussian.
  double bound = 0.0;
};

/// Declarative description of an autocorrelation operator.
struct RhoSpec {
  enum class Kind { diagonal, rotated_diagonal, kernel };
  Kind kind = Kind::diagonal;
  /// diagonal / rotated_diagonal: the singular values, non-negative and
  /// non-increasing. Shorter lists are zero-padded to dimension d.
  std::vector<double> singular_values;
  /// rotated_diagonal: seed for the random orthogonal basis change.
  std::uint64_t rotation_seed = 0;
  /// kernel: Gaussian-kernel integral operator scaled to this uniform norm.
  double target_norm = 0.5;
  /// kernel: length scale of the Gaussian kernel on [0, 1].
  double length_scale = 0.2;
};

/// Declarative model description (CLI- and config-facing).
struct ModelSpec {
  int d = 25;
  RhoSpec rho;
  /// Diagonal of the innovation covariance; empty selects c_j = j^-2.
  std::vector<double> c_eps_diag;
  InnovationLaw law;
};

/// A concrete ARH(1) model X_n = rho(X_{n-1}) + eps_n. `spec` is retained
/// when the model was built from a declarative description so trajectories
/// can carry reproducible metadata.
struct ARHModel {
  HOperator rho;
  HOperator c_eps;
  InnovationLaw law;
  int d = 0;
  std::optional<ModelSpec> spec;
};

/// Second-order structure of the stationary solution: the covariance
/// C_X = sum_k rho^k C_eps (rho^k)^*, the cross-covariance D_X = rho C_X,
/// and the eigensystem of C_X.
struct StationaryLaw {
  HOperator c_x;
  HOperator d_x;
  EigenSystem eigen;
};

/// A simulated (or ingested) stretch X_0, ..., X_{n-1} of the process.
/// `innovations[t]` is the noise that produced samples[t+1]; empty for data
/// read from disk.
struct Trajectory {
  std::vector<HVector> samples;
  std::uint64_t seed = 0;
  int burn_in = 0;
  std::vector<HVector> innovations;
  std::optional<ModelSpec> model;

  int n() const { return static_cast<int>(samples.size()); }
  int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().size()); }
};

/// Deterministic per-(a, b) substream seed derived from a master seed by a
/// splitmix64 chain; distinct (a, b) pairs give independent-behaving streams.
std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// Materialize an autocorrelation operator. Errors if the result is not
/// eventually contractive within the dimension (e.g. a unit singular value
/// on the diagonal).
HOperator build_rho(const RhoSpec& spec, int d);

/// Smallest k <= k_max with ||rho^k|| < 1, or nullopt if none exists.
std::optional<int> verify_contraction(const HOperator& rho, int k_max);

/// Validate and assemble a model from explicit operators. Requires matching
/// dimensions, symmetric positive semidefinite c_eps, and eventual
/// contraction of rho.
ARHModel make_model(HOperator rho, HOperator c_eps, InnovationLaw law = {});

/// Build a model from its declarative description.
ARHModel build_model(const ModelSpec& spec);

/// Stationary covariance structure, via the geometric series
/// C_X = sum_k rho^k C_eps (rho^*)^k summed to relative tolerance 1e-12.
StationaryLaw stationary_law(const ARHModel& model);

/// Resampling bound for whole-trajectory norms under the truncated law:
/// M / (1 - ||rho||). Requires ||rho|| < 1.
double trajectory_bound(const ARHModel& model);

/// Innovation resampling bound M (the law's bound, or its default).
double innovation_bound(const ARHModel& model);

/// Draw X_0 exactly from the stationary Gaussian law, then iterate the
/// recursion; burn_in extra initial steps are discarded. Requires n >= 2.
Trajectory simulate(const ARHModel& model, const StationaryLaw& law, int n,
                    int burn_in, std::uint64_t seed);

/// Convenience overload computing the stationary law internally.
Trajectory simulate(const ARHModel& model, int n, int burn_in, std::uint64_t seed);

}  // namespace arh
