#ifndef SPARSEHCR_IO_HPP
#define SPARSEHCR_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsehcr/bounds.hpp"
#include "sparsehcr/decoders.hpp"
#include "sparsehcr/error.hpp"
#include "sparsehcr/experiments.hpp"
#include "sparsehcr/numerics.hpp"

namespace sparsehcr::io {

using Json = nlohmann::ordered_json;

/// %.17g: round-trips every double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InputIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::OutputIo, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::OutputIo, "write to '" + path + "' failed");
}

/// Text matrix: "rows cols" followed by rows*cols values in row-major order.
inline Mat parse_matrix(const std::string& text, const std::string& origin = "<input>") {
  std::istringstream in(text);
  long long rows = 0;
  long long cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
    throw Error(ErrorCode::InputIo, origin + ": expected a positive 'rows cols' header");
  }
  Mat a(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < cols; ++c) {
      std::string token;
      if (!(in >> token)) {
        throw Error(ErrorCode::InputIo, origin + ": expected " + std::to_string(rows * cols) +
                                            " values, found " + std::to_string(r * cols + c));
      }
      try {
        std::size_t used = 0;
        a(r, c) = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InputIo, origin + ": bad number '" + token + "'");
      }
    }
  }
  std::string extra;
  if (in >> extra) throw Error(ErrorCode::InputIo, origin + ": trailing data '" + extra + "'");
  return a;
}

inline std::string format_matrix(const Mat& a) {
  std::string out = std::to_string(a.rows()) + " " + std::to_string(a.cols()) + "\n";
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (c) out += ' ';
      out += format_double(a(r, c));
    }
    out += '\n';
  }
  return out;
}

inline Mat read_matrix(const std::string& path) { return parse_matrix(read_text(path), path); }

inline void write_matrix(const std::string& path, const Mat& a) { write_text(path, format_matrix(a)); }

/// A measurement vector is stored as an m x 1 matrix.
inline Vec read_vector(const std::string& path) {
  const Mat a = read_matrix(path);
  if (a.cols() != 1) throw Error(ErrorCode::InputIo, path + ": expected a single column");
  return a.col(0);
}

// ---------------------------------------------------------------------------
// JSON

/// Finite doubles as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
inline Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline Json number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

inline Json to_json(const Support& s) {
  Json j = Json::array();
  for (std::size_t i : s.indices()) j.push_back(i);
  return j;
}

inline Json to_json(const std::vector<double>& v) {
  Json j = Json::array();
  for (double x : v) j.push_back(number(x));
  return j;
}

inline Json to_json(const KsResult& r) {
  return {{"statistic", number(r.statistic)},
          {"scaled_statistic", number(r.scaled_statistic)},
          {"p_value", number(r.p_value)},
          {"critical_value", number(r.critical_value)},
          {"level", r.level},
          {"pass", r.passed}};
}

inline Json to_json(const DecodeResult& r) {
  return {{"method", r.method},
          {"support", to_json(r.support)},
          {"residual_norm_sq", number(r.residual_norm_sq)},
          {"coefficients", to_json(r.coefficients)}};
}

inline Json to_json(const HcrReport& r) {
  Json j = {{"value", number(r.value)},
            {"log_value", number(r.log_value)},
            {"argmax_support", to_json(r.argmax_support)},
            {"d_min", number(r.d_min)},
            {"d_min_support", to_json(r.d_min_support)},
            {"indistinguishable", r.indistinguishable},
            {"underflow_count", r.underflow_count},
            {"alternatives", r.alternatives}};
  if (r.per_support_terms) {
    Json terms = Json::array();
    for (const SupportTerm& t : *r.per_support_terms) {
      terms.push_back({{"support", to_json(t.support)},
                       {"numerator", number(t.numerator)},
                       {"exponent", number(t.exponent)},
                       {"value", number(t.value)},
                       {"underflow", t.underflow}});
    }
    j["per_support_terms"] = terms;
  }
  return j;
}

inline Json to_json(const BoundReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.parameters) params[k] = number(v);
  Json flags = Json::object();
  for (const auto& [k, v] : r.flags) flags[k] = v;
  return {{"name", r.name}, {"value", number(r.value)}, {"parameters", params}, {"flags", flags}};
}

inline Json to_json(const MsuffResult& r) {
  return {{"value", number(r.value)},
          {"argmax_ell", r.argmax_ell},
          {"snr_ok", r.snr_ok},
          {"terms", to_json(r.terms)}};
}

inline Json to_json(const RegimeRow& r) {
  return {{"regime", r.regime.name()},
          {"p", r.p},
          {"k", r.k},
          {"theta_min", number(r.theta_min)},
          {"necessary_scaling", r.regime.necessary_scaling()},
          {"sufficient_scaling", r.regime.sufficient_scaling()},
          {"necessary_m", number(r.necessary)},
          {"sufficient_m", r.sufficient ? to_json(*r.sufficient) : Json("unavailable")}};
}

inline Json to_json(const TrialConfig& c) {
  return {{"p", c.p},
          {"k", c.k},
          {"m", c.m},
          {"theta_min", number(c.theta_min)},
          {"sigma_sq", number(c.sigma_sq)},
          {"coefficients", to_json(c.coefficients)},
          {"trials", c.trials},
          {"base_seed", c.base_seed},
          {"decoder", to_string(c.decoder)},
          {"normalized_mce", c.normalized_mce},
          {"enumeration_cap", c.enumeration_cap}};
}

inline Json to_json(const ExperimentRecord& r) {
  return {{"config", to_json(r.config)},
          {"phi_seed", r.phi_seed},
          {"true_support", to_json(r.true_support)},
          {"empirical_p_err", number(r.empirical_p_err)},
          {"se_p_err", number(r.se_p_err)},
          {"ci_half_width_p_err", number(r.ci_half_width_p_err)},
          {"mean_rho2", number(r.mean_rho2)},
          {"empirical_bias", to_json(r.empirical_bias)},
          {"bias_norm", number(r.bias_norm)},
          {"empirical_cov_trace", number(r.empirical_cov_trace)},
          {"se_cov_trace", number(r.se_cov_trace)},
          {"d_min", number(r.d_min)},
          {"beta", number(r.beta)},
          {"hcr_bound", number(r.hcr_bound)},
          {"lemma2_bound", number(r.lemma2_bound)},
          {"theorem4_bound", number(r.theorem4_bound)},
          {"lemma1_covered", r.lemma1_covered},
          {"lemma1_violations", r.lemma1_violations}};
}

inline Json to_json(const Lemma2Check& c) {
  return {{"kind", "verify-lemma2"},
          {"record", to_json(c.record)},
          {"applicable", c.applicable},
          {"reason", c.reason},
          {"beta", number(c.beta)},
          {"bound", number(c.bound)},
          {"bound_recomputed", number(c.bound_recomputed)},
          {"slack", number(c.slack)},
          {"pass", c.applicable ? Json(c.passed) : Json(nullptr)}};
}

inline Json to_json(const HcrCheck& c) {
  return {{"kind", "verify-hcr"},
          {"record", to_json(c.record)},
          {"applicable", c.applicable},
          {"reason", c.reason},
          {"epsilon", number(c.epsilon)},
          {"threshold", number(c.threshold)},
          {"hcr_value", number(c.hcr_value)},
          {"cov_trace", number(c.cov_trace)},
          {"cov_slack", number(c.cov_slack)},
          {"theorem4_bound", number(c.theorem4_bound)},
          {"bias_norm", number(c.bias_norm)},
          {"bias_tolerance", number(c.bias_tolerance)},
          {"bias_voided", c.bias_voided},
          {"lower_ok", c.lower_ok},
          {"upper_ok", c.upper_ok},
          {"hcr_exponent", number(c.hcr_exponent)},
          {"mle_exponent", number(c.mle_exponent)},
          {"exponent_ratio", number(c.exponent_ratio)},
          {"gap_db", number(c.gap_db)},
          {"pass", c.applicable ? Json(c.passed) : Json(nullptr)}};
}

inline Json to_json(const WitnessRecord& r) {
  return {{"kind", "theorem3-witness"},
          {"p", r.p},
          {"k", r.k},
          {"m", r.m},
          {"theta_min", number(r.theta_min)},
          {"sigma_sq", number(r.sigma_sq)},
          {"seed", r.seed},
          {"trials", r.trials},
          {"support", to_json(r.support)},
          {"witness_support", to_json(r.witness_support)},
          {"witness_rho2", number(r.witness_rho2)},
          {"ks", to_json(r.ks)},
          {"mean_z", number(r.mean_z)},
          {"threshold", number(r.threshold)},
          {"condition_constant", number(r.condition_constant)},
          {"condition_holds", r.condition_holds},
          {"tail_bound", number(r.tail_bound)},
          {"empirical_tail", number(r.empirical_tail)},
          {"se_tail", number(r.se_tail)},
          {"tail_pass", r.tail_passed},
          {"fraction_below_threshold", number(r.fraction_below_threshold)},
          {"median_hcr_term", number(r.median_hcr_term)},
          {"pass", r.ks.passed && r.tail_passed}};
}

inline Json to_json(const ResidualChiSquareRecord& r) {
  return {{"kind", "residual-chi-square"},
          {"m", r.m},
          {"k", r.k},
          {"p", r.p},
          {"support", to_json(r.support)},
          {"alternative", to_json(r.alternative)},
          {"seed", r.seed},
          {"trials", r.trials},
          {"dof", r.dof},
          {"ks", to_json(r.ks)},
          {"pass", r.ks.passed}};
}

inline Json to_json(const SweepPoint& pt) {
  Json j = {{"kind", "regime-sweep"},
            {"p", pt.p},
            {"k", pt.k},
            {"theta_min", number(pt.theta_min)},
            {"base", to_string(pt.base)},
            {"formula_value", number(pt.formula_value)},
            {"snr_ok", pt.snr_ok},
            {"multiplier", number(pt.multiplier)},
            {"m", pt.m},
            {"m_clamped", pt.m_clamped}};
  j["record"] = pt.record ? to_json(*pt.record) : Json(nullptr);
  j["error"] = pt.error ? Json(*pt.error) : Json(nullptr);
  return j;
}

inline Json to_json(const IntegerMeanRecord& r) {
  return {{"kind", "integer-mean"},
          {"m", r.m},
          {"sigma_sq", number(r.sigma_sq)},
          {"trials", r.trials},
          {"seed", r.seed},
          {"mean_estimate", number(r.mean_estimate)},
          {"variance", number(r.variance)},
          {"se_variance", number(r.se_variance)},
          {"cr", number(r.cr)},
          {"hcr", number(r.hcr)},
          {"below_cr", r.below_cr},
          {"pass", r.passed}};
}

/// One compact JSON document per line.
inline std::string to_jsonl(const std::vector<Json>& records) {
  std::string out;
  for (const Json& j : records) {
    out += j.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Supports as "1;2;5" so the cell needs no quoting.
inline std::string csv_support(const Support& s) {
  std::string out;
  for (std::size_t i = 0; i < s.k(); ++i) {
    if (i) out += ';';
    out += std::to_string(s[i]);
  }
  return out;
}

inline std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

inline std::string format_csv(const CsvTable& t) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    return out + '\n';
  };
  std::string out = line(t.header);
  for (const auto& row : t.rows) out += line(row);
  return out;
}

inline std::vector<std::string> experiment_csv_header() {
  return {"p",           "k",         "m",         "theta_min",     "sigma_sq",
          "trials",      "base_seed", "decoder",   "phi_seed",      "true_support",
          "p_err",       "se_p_err",  "mean_rho2", "bias_norm",     "cov_trace",
          "se_cov_trace", "d_min",    "beta",      "hcr_bound",     "lemma2_bound",
          "theorem4_bound", "lemma1_covered", "lemma1_violations"};
}

inline std::vector<std::string> experiment_csv_row(const ExperimentRecord& r) {
  const TrialConfig& c = r.config;
  return {std::to_string(c.p),
          std::to_string(c.k),
          std::to_string(c.m),
          format_double(c.theta_min),
          format_double(c.sigma_sq),
          std::to_string(c.trials),
          std::to_string(c.base_seed),
          to_string(c.decoder),
          std::to_string(r.phi_seed),
          csv_support(r.true_support),
          format_double(r.empirical_p_err),
          format_double(r.se_p_err),
          format_double(r.mean_rho2),
          format_double(r.bias_norm),
          format_double(r.empirical_cov_trace),
          format_double(r.se_cov_trace),
          format_double(r.d_min),
          format_double(r.beta),
          csv_optional(r.hcr_bound),
          csv_optional(r.lemma2_bound),
          csv_optional(r.theorem4_bound),
          std::to_string(r.lemma1_covered),
          std::to_string(r.lemma1_violations)};
}

}  // namespace sparsehcr::io

#endif  // SPARSEHCR_IO_HPP
