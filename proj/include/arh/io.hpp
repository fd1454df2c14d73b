#pragma once

#include "arh/harness.hpp"

#include <string>
#include <vector>

namespace arh {

/// Shortest-faithful decimal form with 17 significant digits: parsing the
/// string recovers the exact double, so serialized artifacts round-trip
/// bit-identically.
std::string format_double(double x);

/// Strict double parser (whole token must be consumed).
double parse_double(const std::string& text);

// --- declarative model grammar ------------------------------------------
//
//   rho:    diag:v1,v2,...      explicit singular values (zero-padded to d)
//           diagpow:a,p         v_j = a * j^-p for j = 1..d
//           rotdiag:seed:v1,... rotated diagonal with a seeded random basis
//           rotdiagpow:seed:a,p
//           kernel:norm[,len]   Gaussian-kernel operator scaled to the norm
//   c_eps:  diag:c1,c2,...  or  diagpow:a,p
//   law:    gaussian | tgauss | tgauss:M

RhoSpec parse_rho_spec(const std::string& text, int d);
std::string format_rho_spec(const RhoSpec& spec);

std::vector<double> parse_c_eps(const std::string& text, int d);
std::string format_c_eps(const std::vector<double>& diag);

InnovationLaw parse_law(const std::string& text);
std::string format_law(const InnovationLaw& law);

/// fixed:k | varfrac:q | gapbudget:c
TruncationRule parse_truncation_rule(const std::string& text);
std::string format_truncation_rule(const TruncationRule& rule);

/// Comma-separated metric names, or "all".
std::vector<Metric> parse_metrics(const std::string& text);
std::string format_metrics(const std::vector<Metric>& metrics);

// --- trajectory round trip ------------------------------------------------

/// CSV with header t,c0,...,c{d-1}; a JSON sidecar <path>.meta.json records
/// seed, burn-in, and the model description when available.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Reads the CSV (and the sidecar when present). Innovations are not part
/// of the on-disk format.
Trajectory read_trajectory_csv(const std::string& path);

// --- estimator round trip ---------------------------------------------------

/// JSON document: kind, k_n, d, the operator as row-major nested arrays, and
/// for the reduced-rank estimator the retained singular triples.
void write_estimator_json(const EstimatedRho& est, const std::string& path);
EstimatedRho read_estimator_json(const std::string& path);

// --- study configuration ----------------------------------------------------

/// INI-style study description with [model], [study], and [acceptance]
/// sections; unknown keys are rejected.
StudyConfig parse_study_config(const std::string& text);
StudyConfig load_study_config(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace arh
