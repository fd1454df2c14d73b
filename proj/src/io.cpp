#include "arh/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace arh {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

long long parse_int(const std::string& text, const char* what) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument(std::string(what) + ": expected an integer, got '" + text + "'");
  }
  return value;
}

std::uint64_t parse_uint64(const std::string& text, const char* what) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument(std::string(what) + ": expected an unsigned integer, got '" +
                                text + "'");
  }
  return value;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const std::string& field : split(text, ',')) {
    if (trim(field).empty()) {
      throw std::invalid_argument(std::string(what) + ": empty value in list '" + text + "'");
    }
    out.push_back(parse_double(field));
  }
  return out;
}

// v_j = a * j^-p for j = 1..d.
std::vector<double> power_sequence(double a, double p, int d) {
  std::vector<double> out(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    out[static_cast<std::size_t>(j)] = a * std::pow(j + 1.0, -p);
  }
  return out;
}

std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += format_double(values[i]);
  }
  return out;
}

json model_spec_to_json(const ModelSpec& spec) {
  json j;
  j["d"] = spec.d;
  j["rho"] = format_rho_spec(spec.rho);
  j["c_eps"] = format_c_eps(spec.c_eps_diag);
  j["law"] = format_law(spec.law);
  return j;
}

ModelSpec model_spec_from_json(const json& j) {
  ModelSpec spec;
  spec.d = j.at("d").get<int>();
  spec.rho = parse_rho_spec(j.at("rho").get<std::string>(), spec.d);
  spec.c_eps_diag = parse_c_eps(j.at("c_eps").get<std::string>(), spec.d);
  spec.law = parse_law(j.at("law").get<std::string>());
  return spec;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  if (ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument("expected a number, got '" + text + "'");
  }
  return value;
}

RhoSpec parse_rho_spec(const std::string& text, int d) {
  const std::string t = trim(text);
  const auto head_end = t.find(':');
  const std::string head = head_end == std::string::npos ? t : t.substr(0, head_end);
  const std::string rest = head_end == std::string::npos ? "" : t.substr(head_end + 1);

  RhoSpec spec;
  if (head == "diag" || head == "diagpow") {
    spec.kind = RhoSpec::Kind::diagonal;
    spec.singular_values = head == "diag"
                               ? parse_double_list(rest, "rho diag")
                               : [&] {
                                   const auto ap = parse_double_list(rest, "rho diagpow");
                                   if (ap.size() != 2) {
                                     throw std::invalid_argument(
                                         "rho diagpow: expected 'a,p', got '" + rest + "'");
                                   }
                                   return power_sequence(ap[0], ap[1], d);
                                 }();
  } else if (head == "rotdiag" || head == "rotdiagpow") {
    spec.kind = RhoSpec::Kind::rotated_diagonal;
    const auto seed_end = rest.find(':');
    if (seed_end == std::string::npos) {
      throw std::invalid_argument("rho " + head + ": expected '<seed>:<values>', got '" + rest +
                                  "'");
    }
    spec.rotation_seed = parse_uint64(rest.substr(0, seed_end), "rho rotation seed");
    const std::string values = rest.substr(seed_end + 1);
    spec.singular_values = head == "rotdiag"
                               ? parse_double_list(values, "rho rotdiag")
                               : [&] {
                                   const auto ap = parse_double_list(values, "rho rotdiagpow");
                                   if (ap.size() != 2) {
                                     throw std::invalid_argument(
                                         "rho rotdiagpow: expected 'a,p', got '" + values + "'");
                                   }
                                   return power_sequence(ap[0], ap[1], d);
                                 }();
  } else if (head == "kernel") {
    spec.kind = RhoSpec::Kind::kernel;
    const auto params = parse_double_list(rest, "rho kernel");
    if (params.empty() || params.size() > 2) {
      throw std::invalid_argument("rho kernel: expected 'norm[,length]', got '" + rest + "'");
    }
    spec.target_norm = params[0];
    if (params.size() == 2) {
      spec.length_scale = params[1];
    }
  } else {
    throw std::invalid_argument("unknown rho spec '" + text +
                                "' (expected diag:, diagpow:, rotdiag:, rotdiagpow:, kernel:)");
  }
  return spec;
}

std::string format_rho_spec(const RhoSpec& spec) {
  switch (spec.kind) {
    case RhoSpec::Kind::diagonal:
      return "diag:" + format_double_list(spec.singular_values);
    case RhoSpec::Kind::rotated_diagonal:
      return "rotdiag:" + std::to_string(spec.rotation_seed) + ":" +
             format_double_list(spec.singular_values);
    case RhoSpec::Kind::kernel:
      return "kernel:" + format_double(spec.target_norm) + "," +
             format_double(spec.length_scale);
  }
  throw std::invalid_argument("format_rho_spec: unknown kind");
}

std::vector<double> parse_c_eps(const std::string& text, int d) {
  const std::string t = trim(text);
  const auto head_end = t.find(':');
  const std::string head = head_end == std::string::npos ? t : t.substr(0, head_end);
  const std::string rest = head_end == std::string::npos ? "" : t.substr(head_end + 1);
  if (head == "diag") {
    return parse_double_list(rest, "c_eps diag");
  }
  if (head == "diagpow") {
    const auto ap = parse_double_list(rest, "c_eps diagpow");
    if (ap.size() != 2) {
      throw std::invalid_argument("c_eps diagpow: expected 'a,p', got '" + rest + "'");
    }
    return power_sequence(ap[0], ap[1], d);
  }
  throw std::invalid_argument("unknown c_eps spec '" + text +
                              "' (expected diag: or diagpow:)");
}

std::string format_c_eps(const std::vector<double>& diag) {
  if (diag.empty()) {
    return "diagpow:1,2";  // the built-in default c_j = j^-2
  }
  return "diag:" + format_double_list(diag);
}

InnovationLaw parse_law(const std::string& text) {
  const std::string t = trim(text);
  InnovationLaw law;
  if (t == "gaussian") {
    return law;
  }
  if (t == "tgauss") {
    law.kind = InnovationKind::truncated_gaussian;
    return law;
  }
  if (t.rfind("tgauss:", 0) == 0) {
    law.kind = InnovationKind::truncated_gaussian;
    law.bound = parse_double(t.substr(7));
    if (!(law.bound > 0.0)) {
      throw std::invalid_argument("law tgauss: bound must be positive");
    }
    return law;
  }
  throw std::invalid_argument("unknown innovation law '" + text +
                              "' (expected gaussian, tgauss, or tgauss:M)");
}

std::string format_law(const InnovationLaw& law) {
  if (law.kind == InnovationKind::gaussian) {
    return "gaussian";
  }
  if (law.bound > 0.0) {
    return "tgauss:" + format_double(law.bound);
  }
  return "tgauss";
}

TruncationRule parse_truncation_rule(const std::string& text) {
  const std::string t = trim(text);
  const auto head_end = t.find(':');
  if (head_end == std::string::npos) {
    throw std::invalid_argument("unknown truncation rule '" + text +
                                "' (expected fixed:k, varfrac:q, or gapbudget:c)");
  }
  const std::string head = t.substr(0, head_end);
  const std::string rest = t.substr(head_end + 1);
  TruncationRule rule;
  if (head == "fixed") {
    rule.kind = TruncationRule::Kind::fixed;
    rule.k = static_cast<int>(parse_int(rest, "truncation fixed"));
  } else if (head == "varfrac") {
    rule.kind = TruncationRule::Kind::variance_fraction;
    rule.q = parse_double(rest);
  } else if (head == "gapbudget") {
    rule.kind = TruncationRule::Kind::gap_budget;
    rule.c = parse_double(rest);
  } else {
    throw std::invalid_argument("unknown truncation rule '" + text +
                                "' (expected fixed:k, varfrac:q, or gapbudget:c)");
  }
  return rule;
}

std::string format_truncation_rule(const TruncationRule& rule) {
  switch (rule.kind) {
    case TruncationRule::Kind::fixed:
      return "fixed:" + std::to_string(rule.k);
    case TruncationRule::Kind::variance_fraction:
      return "varfrac:" + format_double(rule.q);
    case TruncationRule::Kind::gap_budget:
      return "gapbudget:" + format_double(rule.c);
  }
  throw std::invalid_argument("format_truncation_rule: unknown kind");
}

std::vector<Metric> parse_metrics(const std::string& text) {
  const std::string t = trim(text);
  if (t == "all" || t.empty()) {
    return {};
  }
  std::vector<Metric> out;
  for (const std::string& field : split(t, ',')) {
    const std::string name = trim(field);
    const auto metric = metric_from_name(name);
    if (!metric) {
      throw std::invalid_argument("unknown metric '" + name + "'");
    }
    out.push_back(*metric);
  }
  return out;
}

std::string format_metrics(const std::vector<Metric>& metrics) {
  if (metrics.empty()) {
    return "all";
  }
  std::string out;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += metric_name(metrics[i]);
  }
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  if (traj.n() < 2) {
    throw std::invalid_argument("write_trajectory_csv: trajectory must have n >= 2");
  }
  const int d = traj.dim();
  std::string out = "t";
  for (int j = 0; j < d; ++j) {
    out += ",c" + std::to_string(j);
  }
  out += '\n';
  for (int t = 0; t < traj.n(); ++t) {
    const HVector& x = traj.samples[static_cast<std::size_t>(t)];
    out += std::to_string(t);
    for (int j = 0; j < d; ++j) {
      out += ',';
      out += format_double(x[j]);
    }
    out += '\n';
  }
  write_text_file(path, out);

  json meta;
  meta["seed"] = traj.seed;
  meta["burn_in"] = traj.burn_in;
  meta["n"] = traj.n();
  meta["d"] = d;
  if (traj.model) {
    meta["model"] = model_spec_to_json(*traj.model);
  }
  write_text_file(path + ".meta.json", meta.dump(2) + "\n");
}

Trajectory read_trajectory_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) {
    throw std::invalid_argument("trajectory '" + path + "': empty file");
  }
  const auto header = split(trim(line), ',');
  if (header.size() < 2 || header[0] != "t") {
    throw std::invalid_argument("trajectory '" + path + "': header must be t,c0,c1,...");
  }
  const int d = static_cast<int>(header.size()) - 1;
  for (int j = 0; j < d; ++j) {
    if (header[static_cast<std::size_t>(j + 1)] != "c" + std::to_string(j)) {
      throw std::invalid_argument("trajectory '" + path + "': header must be t,c0,c1,...");
    }
  }

  Trajectory traj;
  int t_expected = 0;
  while (std::getline(is, line)) {
    const std::string row = trim(line);
    if (row.empty()) {
      continue;
    }
    const auto fields = split(row, ',');
    if (static_cast<int>(fields.size()) != d + 1) {
      throw std::invalid_argument("trajectory '" + path + "': row " +
                                  std::to_string(t_expected) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(d + 1));
    }
    if (parse_int(fields[0], "trajectory time index") != t_expected) {
      throw std::invalid_argument("trajectory '" + path + "': time indices must run 0,1,2,...");
    }
    HVector x(d);
    for (int j = 0; j < d; ++j) {
      x[j] = parse_double(fields[static_cast<std::size_t>(j + 1)]);
      if (!std::isfinite(x[j])) {
        throw std::invalid_argument("trajectory '" + path + "': non-finite sample at t=" +
                                    std::to_string(t_expected));
      }
    }
    traj.samples.push_back(std::move(x));
    ++t_expected;
  }
  if (traj.n() < 2) {
    throw std::invalid_argument("trajectory '" + path + "': needs at least 2 samples");
  }

  const std::string meta_path = path + ".meta.json";
  if (std::ifstream(meta_path).good()) {
    const json meta = json::parse(read_text_file(meta_path));
    traj.seed = meta.value("seed", std::uint64_t{0});
    traj.burn_in = meta.value("burn_in", 0);
    if (meta.contains("model")) {
      ModelSpec spec = model_spec_from_json(meta.at("model"));
      if (spec.d != traj.dim()) {
        throw std::invalid_argument("trajectory '" + path +
                                    "': sidecar model dimension disagrees with the CSV");
      }
      traj.model = std::move(spec);
    }
  }
  return traj;
}

void write_estimator_json(const EstimatedRho& est, const std::string& path) {
  const int d = static_cast<int>(est.op.rows());
  json j;
  j["kind"] = est.kind == EstimatorKind::componentwise ? "componentwise" : "diagonal_svd";
  j["k_n"] = est.k_n;
  j["d"] = d;
  json rows = json::array();
  for (int i = 0; i < d; ++i) {
    json row = json::array();
    for (int c = 0; c < d; ++c) {
      row.push_back(est.op(i, c));
    }
    rows.push_back(std::move(row));
  }
  j["operator"] = std::move(rows);
  if (est.kind == EstimatorKind::diagonal_svd) {
    json comps = json::array();
    for (const SvdComponent& comp : est.components) {
      json c;
      c["sigma"] = comp.sigma;
      c["right"] = std::vector<double>(comp.right.data(), comp.right.data() + comp.right.size());
      c["left"] = std::vector<double>(comp.left.data(), comp.left.data() + comp.left.size());
      comps.push_back(std::move(c));
    }
    j["components"] = std::move(comps);
  }
  write_text_file(path, j.dump(2) + "\n");
}

EstimatedRho read_estimator_json(const std::string& path) {
  const json j = json::parse(read_text_file(path));
  EstimatedRho est;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "componentwise") {
    est.kind = EstimatorKind::componentwise;
  } else if (kind == "diagonal_svd") {
    est.kind = EstimatorKind::diagonal_svd;
  } else {
    throw std::invalid_argument("estimator '" + path + "': unknown kind '" + kind + "'");
  }
  est.k_n = j.at("k_n").get<int>();
  const int d = j.at("d").get<int>();
  if (d < 1 || est.k_n < 1 || est.k_n > d) {
    throw std::invalid_argument("estimator '" + path + "': invalid dimensions");
  }
  const json& rows = j.at("operator");
  if (static_cast<int>(rows.size()) != d) {
    throw std::invalid_argument("estimator '" + path + "': operator row count mismatch");
  }
  est.op = HOperator(d, d);
  for (int i = 0; i < d; ++i) {
    const json& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<int>(row.size()) != d) {
      throw std::invalid_argument("estimator '" + path + "': operator column count mismatch");
    }
    for (int c = 0; c < d; ++c) {
      est.op(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  if (j.contains("components")) {
    for (const json& c : j.at("components")) {
      SvdComponent comp;
      comp.sigma = c.at("sigma").get<double>();
      const auto right = c.at("right").get<std::vector<double>>();
      const auto left = c.at("left").get<std::vector<double>>();
      if (static_cast<int>(right.size()) != d || static_cast<int>(left.size()) != d) {
        throw std::invalid_argument("estimator '" + path + "': component dimension mismatch");
      }
      comp.right = Eigen::Map<const HVector>(right.data(), d);
      comp.left = Eigen::Map<const HVector>(left.data(), d);
      est.components.push_back(std::move(comp));
    }
  }
  return est;
}

StudyConfig parse_study_config(const std::string& text) {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string current;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": malformed section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      if (current != "model" && current != "study" && current != "acceptance") {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unknown section [" + current + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || current.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value' inside a section");
    }
    sections[current][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  const auto known = [&](const char* section, std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : sections[section]) {
      bool found = false;
      for (const char* k : keys) {
        found = found || key == k;
      }
      if (!found) {
        throw std::invalid_argument("config: unknown key '" + key + "' in section [" + section +
                                    "]");
      }
    }
  };
  known("model", {"d", "rho", "c_eps", "law"});
  known("study", {"n_grid", "replications", "master_seed", "truncation", "beta", "metrics"});
  known("acceptance", {"slope_window", "decrease_ratio", "rolling_mse_rtol"});

  const auto get = [&](const char* section, const char* key) -> const std::string* {
    const auto sit = sections.find(section);
    if (sit == sections.end()) {
      return nullptr;
    }
    const auto kit = sit->second.find(key);
    return kit == sit->second.end() ? nullptr : &kit->second;
  };

  StudyConfig cfg = default_study_config();
  const std::string* v = nullptr;

  if ((v = get("model", "d"))) {
    cfg.model.d = static_cast<int>(parse_int(*v, "config model.d"));
  }
  // Spectra default to the standard study's power laws, re-evaluated at d.
  cfg.model.rho = parse_rho_spec((v = get("model", "rho")) ? *v : "diagpow:0.8,2", cfg.model.d);
  cfg.model.c_eps_diag =
      parse_c_eps((v = get("model", "c_eps")) ? *v : "diagpow:1,2", cfg.model.d);
  if ((v = get("model", "law"))) {
    cfg.model.law = parse_law(*v);
  }

  if ((v = get("study", "n_grid"))) {
    cfg.n_grid.clear();
    for (const std::string& field : split(*v, ',')) {
      cfg.n_grid.push_back(static_cast<int>(parse_int(field, "config study.n_grid")));
    }
  }
  if ((v = get("study", "replications"))) {
    cfg.replications = static_cast<int>(parse_int(*v, "config study.replications"));
  }
  if ((v = get("study", "master_seed"))) {
    cfg.master_seed = parse_uint64(*v, "config study.master_seed");
  }
  if ((v = get("study", "truncation"))) {
    cfg.truncation = parse_truncation_rule(*v);
  }
  if ((v = get("study", "beta"))) {
    cfg.beta = parse_double(*v);
  }
  if ((v = get("study", "metrics"))) {
    cfg.metrics = parse_metrics(*v);
  }

  if ((v = get("acceptance", "slope_window"))) {
    const auto window = parse_double_list(*v, "config acceptance.slope_window");
    if (window.size() != 2) {
      throw std::invalid_argument("config acceptance.slope_window: expected 'min,max'");
    }
    cfg.slope_min = window[0];
    cfg.slope_max = window[1];
  }
  if ((v = get("acceptance", "decrease_ratio"))) {
    cfg.decrease_ratio = parse_double(*v);
  }
  if ((v = get("acceptance", "rolling_mse_rtol"))) {
    cfg.rolling_mse_rtol = parse_double(*v);
  }

  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  return parse_study_config(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file '" + path + "'");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file '" + path + "'");
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

}  // namespace arh
