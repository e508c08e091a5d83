#ifndef BELLGEO_JSON_IO_HPP_
#define BELLGEO_JSON_IO_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "bellgeo/cglmp.hpp"
#include "bellgeo/common.hpp"
#include "bellgeo/optimize.hpp"
#include "bellgeo/uparam.hpp"

namespace bellgeo {

// JSON layouts:
//   matrix        {"dim": n, "re": [...], "im": [...]}   (row-major)
//   ParamMatrix   {"d": d, "lambda": [[...], ...]}
//   settings      {"d": d, "a1": ParamMatrix, ..., "b2": ParamMatrix}

inline nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json j;
  j["dim"] = m.rows();
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re.push_back(m(i, k).real());
      im.push_back(m(i, k).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j;
}

inline CMatrix matrix_from_json(const nlohmann::json& j) {
  const int n = j.at("dim").get<int>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (static_cast<int>(re.size()) != n * n ||
      static_cast<int>(im.size()) != n * n)
    throw dimension_mismatch("matrix_from_json: entry count != dim^2");
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      m(i, k) = cplx(re[i * n + k], im[i * n + k]);
  return m;
}

inline nlohmann::json param_matrix_to_json(const ParamMatrix& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < p.d; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < p.d; ++k) row.push_back(p.lambda(i, k));
    rows.push_back(row);
  }
  return {{"d", p.d}, {"lambda", rows}};
}

inline ParamMatrix param_matrix_from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  ParamMatrix p = ParamMatrix::zero(d);
  const auto& rows = j.at("lambda");
  if (static_cast<int>(rows.size()) != d)
    throw dimension_mismatch("param_matrix_from_json: row count != d");
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d)
      throw dimension_mismatch("param_matrix_from_json: column count != d");
    for (int k = 0; k < d; ++k) p.lambda(i, k) = rows[i][k].get<double>();
  }
  return p;
}

inline nlohmann::json settings_to_json(const MeasurementSettings& s) {
  return {{"d", s.d},
          {"a1", param_matrix_to_json(s.a1)},
          {"a2", param_matrix_to_json(s.a2)},
          {"b1", param_matrix_to_json(s.b1)},
          {"b2", param_matrix_to_json(s.b2)}};
}

inline MeasurementSettings settings_from_json(const nlohmann::json& j) {
  MeasurementSettings s;
  s.d = j.at("d").get<int>();
  s.a1 = param_matrix_from_json(j.at("a1"));
  s.a2 = param_matrix_from_json(j.at("a2"));
  s.b1 = param_matrix_from_json(j.at("b1"));
  s.b2 = param_matrix_from_json(j.at("b2"));
  if (s.a1.d != s.d || s.a2.d != s.d || s.b1.d != s.d || s.b2.d != s.d)
    throw dimension_mismatch("settings_from_json: mixed dimensions");
  return s;
}

// Optimizer settings are read leniently: absent keys keep their defaults so
// config files can override just a few knobs.
inline void optimizer_config_from_json(const nlohmann::json& j,
                                       OptimizerConfig& cfg) {
  if (j.contains("restarts")) cfg.restarts = j["restarts"].get<int>();
  if (j.contains("max_iterations"))
    cfg.max_iterations = j["max_iterations"].get<int>();
  if (j.contains("f_tolerance")) cfg.f_tolerance = j["f_tolerance"].get<double>();
  if (j.contains("x_tolerance")) cfg.x_tolerance = j["x_tolerance"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("initial_step"))
    cfg.initial_step = j["initial_step"].get<double>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
}

inline nlohmann::json optimizer_config_to_json(const OptimizerConfig& cfg) {
  return {{"restarts", cfg.restarts},
          {"max_iterations", cfg.max_iterations},
          {"f_tolerance", cfg.f_tolerance},
          {"x_tolerance", cfg.x_tolerance},
          {"seed", cfg.seed},
          {"initial_step", cfg.initial_step},
          {"threads", cfg.threads}};
}

}  // namespace bellgeo

#endif  // BELLGEO_JSON_IO_HPP_
