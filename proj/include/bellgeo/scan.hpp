#ifndef BELLGEO_SCAN_HPP_
#define BELLGEO_SCAN_HPP_

#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bellgeo/common.hpp"
#include "bellgeo/entgeo.hpp"
#include "bellgeo/json_io.hpp"
#include "bellgeo/optimize.hpp"
#include "bellgeo/qstate.hpp"
#include "bellgeo/rng.hpp"

namespace bellgeo {

inline constexpr const char* kVersion = "1.0.0";

enum class ScanTask : unsigned {
  Positivity = 1u << 0,
  Ppt = 1u << 1,
  Witness = 1u << 2,
  Cglmp = 1u << 3,
  Concurrence = 1u << 4,
};

inline unsigned operator|(ScanTask a, ScanTask b) {
  return static_cast<unsigned>(a) | static_cast<unsigned>(b);
}
inline bool has_task(unsigned tasks, ScanTask t) {
  return (tasks & static_cast<unsigned>(t)) != 0;
}

struct ScanAxis {
  double lo = 0.0;
  double hi = 1.0;
  int n = 2;  // >= 2 grid points, endpoints included
};

enum class ScanFormat { Csv, Json };

struct ScanJob {
  StateFamily family = StateFamily::Isotropic;
  std::vector<ScanAxis> axes;  // arity must match the family
  unsigned tasks = 0;
  OptimizerConfig optimizer;
  std::string output;  // dataset path; metadata sidecar at output + ".meta.json"
  ScanFormat format = ScanFormat::Csv;
};

struct ScanRecord {
  std::vector<double> coords;
  std::optional<double> min_eig;
  std::optional<double> ppt_min_eig;
  std::vector<double> witness_values;
  std::optional<double> max_i_d;
  std::optional<double> nu_star;
  std::optional<double> cm2_lb;
  std::string error;  // ';'-joined per-task failures
};

namespace detail {

// Locale-independent shortest-roundtrip-style formatting at 17 significant
// digits; byte-stable across reruns.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void append_error(std::string& err, const std::string& what) {
  if (!err.empty()) err += ';';
  err += what;
}

}  // namespace detail

inline std::vector<std::vector<double>> grid_points(
    const std::vector<ScanAxis>& axes) {
  for (const auto& a : axes)
    if (a.n < 2)
      throw invalid_coordinates("grid_points: axis resolution must be >= 2");
  std::size_t total = 1;
  for (const auto& a : axes) total *= static_cast<std::size_t>(a.n);
  std::vector<std::vector<double>> pts;
  pts.reserve(total);
  std::vector<int> idx(axes.size(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    std::vector<double> x(axes.size());
    std::size_t rem = p;
    // row-major: last axis fastest
    for (std::size_t k = axes.size(); k-- > 0;) {
      const int i = static_cast<int>(rem % axes[k].n);
      rem /= axes[k].n;
      x[k] = axes[k].lo + (axes[k].hi - axes[k].lo) * i / (axes[k].n - 1);
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

inline ScanRecord scan_point(const ScanJob& job,
                             const std::vector<double>& coords,
                             std::size_t index) {
  ScanRecord rec;
  rec.coords = coords;
  const int d = family_local_dim(job.family);
  CMatrix rho;
  try {
    rho = family_state(job.family, coords, d);
  } catch (const std::exception& e) {
    rec.error = e.what();
    return rec;
  }
  if (has_task(job.tasks, ScanTask::Positivity))
    rec.min_eig = min_eigenvalue(rho);
  if (has_task(job.tasks, ScanTask::Ppt))
    rec.ppt_min_eig = is_ppt(rho, d, d).min_eigenvalue;
  if (has_task(job.tasks, ScanTask::Witness)) {
    try {
      if (job.family == StateFamily::Tetra2)
        rec.witness_values =
            boundary_values(job.family, BoundaryKind::Octahedron, coords);
      else
        rec.witness_values =
            boundary_values(job.family, BoundaryKind::Witness, coords);
    } catch (const std::exception& e) {
      detail::append_error(rec.error, e.what());
    }
  }
  OptimizerConfig cfg = job.optimizer;
  cfg.seed = derive_seed(job.optimizer.seed, index);
  if (has_task(job.tasks, ScanTask::Cglmp)) {
    try {
      const MaxBellResult r = maximize_bell(rho, d, cfg);
      rec.max_i_d = r.value;
      if (r.value > 2e-12) rec.nu_star = 2.0 / r.value;
    } catch (const std::exception& e) {
      detail::append_error(rec.error, e.what());
    }
  }
  if (has_task(job.tasks, ScanTask::Concurrence)) {
    try {
      OptimizerConfig ccfg = cfg;
      ccfg.seed = derive_seed(job.optimizer.seed, index ^ 0x636f6e63ULL);
      rec.cm2_lb = m_concurrence_lower_bound(rho, d, ccfg).lower_bound;
    } catch (const std::exception& e) {
      detail::append_error(rec.error, e.what());
    }
  }
  return rec;
}

// One record per grid point, row-major; per-point failures are recorded in
// the record and the scan continues. Points run on a worker pool but the
// output order and per-point seeds are schedule-independent.
inline std::vector<ScanRecord> run_scan(const ScanJob& job) {
  if (static_cast<int>(job.axes.size()) != family_arity(job.family))
    throw parameter_count_error("run_scan: axis count != family arity");
  const std::vector<std::vector<double>> pts = grid_points(job.axes);
  std::vector<ScanRecord> out(pts.size());
  const int threads = std::max(1, job.optimizer.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      out[i] = scan_point(job, pts[i], i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < pts.size(); i = next++)
          out[i] = scan_point(job, pts[i], i);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

// CSV schema (fixed): alpha,beta,gamma,min_eig,ppt_min_eig,witness_1,
// witness_2,max_i_d,nu_star,cm2_lb,error. Nulls are empty fields; for
// families with three witness functions, witness_2 holds the minimum over
// the remaining permutations.
inline std::string scan_records_to_csv(const std::vector<ScanRecord>& recs) {
  std::string s =
      "alpha,beta,gamma,min_eig,ppt_min_eig,witness_1,witness_2,max_i_d,"
      "nu_star,cm2_lb,error\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string();
  };
  for (const auto& r : recs) {
    for (int k = 0; k < 3; ++k) {
      if (k < static_cast<int>(r.coords.size()))
        s += detail::format_double(r.coords[k]);
      s += ',';
    }
    s += opt(r.min_eig) + ',' + opt(r.ppt_min_eig) + ',';
    if (!r.witness_values.empty()) s += detail::format_double(r.witness_values[0]);
    s += ',';
    if (r.witness_values.size() >= 2) {
      double w = r.witness_values[1];
      for (std::size_t k = 2; k < r.witness_values.size(); ++k)
        w = std::min(w, r.witness_values[k]);
      s += detail::format_double(w);
    }
    s += ',';
    s += opt(r.max_i_d) + ',' + opt(r.nu_star) + ',' + opt(r.cm2_lb) + ',';
    s += r.error;  // errors contain no commas by construction of messages
    s += '\n';
  }
  return s;
}

inline nlohmann::json scan_records_to_json(
    const std::vector<ScanRecord>& recs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : recs) {
    nlohmann::json j;
    j["coords"] = r.coords;
    auto put = [&](const char* key, const std::optional<double>& v) {
      if (v)
        j[key] = *v;
      else
        j[key] = nullptr;
    };
    put("min_eig", r.min_eig);
    put("ppt_min_eig", r.ppt_min_eig);
    j["witness_values"] = r.witness_values;
    put("max_i_d", r.max_i_d);
    put("nu_star", r.nu_star);
    put("cm2_lb", r.cm2_lb);
    j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline nlohmann::json scan_metadata(const ScanJob& job, std::size_t records,
                                    std::size_t failures,
                                    double wall_seconds) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& a : job.axes)
    grid.push_back({{"lo", a.lo}, {"hi", a.hi}, {"n", a.n}});
  return {{"version", kVersion},
          {"family", family_name(job.family)},
          {"grid", grid},
          {"tasks", job.tasks},
          {"optimizer", optimizer_config_to_json(job.optimizer)},
          {"format", job.format == ScanFormat::Csv ? "csv" : "json"},
          {"records", records},
          {"failures", failures},
          {"wall_seconds", wall_seconds}};
}

// Run the job and write dataset plus metadata sidecar. The sidecar is
// written even if some points failed. Returns the records.
inline std::vector<ScanRecord> run_scan_to_file(const ScanJob& job) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<ScanRecord> recs = run_scan(job);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::size_t failures = 0;
  for (const auto& r : recs)
    if (!r.error.empty()) ++failures;

  {
    std::ofstream f(job.output, std::ios::binary);
    if (!f)
      throw numerical_error("run_scan_to_file: cannot open output file " +
                            job.output);
    if (job.format == ScanFormat::Csv)
      f << scan_records_to_csv(recs);
    else
      f << scan_records_to_json(recs).dump(2) << '\n';
  }
  {
    std::ofstream f(job.output + ".meta.json", std::ios::binary);
    if (f) f << scan_metadata(job, recs.size(), failures, wall).dump(2) << '\n';
  }
  return recs;
}

}  // namespace bellgeo

#endif  // BELLGEO_SCAN_HPP_
