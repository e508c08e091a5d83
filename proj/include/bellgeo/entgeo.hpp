#ifndef BELLGEO_ENTGEO_HPP_
#define BELLGEO_ENTGEO_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellgeo/common.hpp"
#include "bellgeo/optimize.hpp"
#include "bellgeo/qstate.hpp"
#include "bellgeo/rng.hpp"
#include "bellgeo/uparam.hpp"

namespace bellgeo {

// ---------------------------------------------------------------------------
// PPT test
// ---------------------------------------------------------------------------

struct PptResult {
  bool ppt = false;
  double min_eigenvalue = 0.0;
};

inline PptResult is_ppt(const CMatrix& rho, int dA, int dB) {
  const CMatrix pt = partial_transpose(rho, dA, dB);
  const double min_eig = min_eigenvalue(pt);
  return {min_eig >= -kPsdTol, min_eig};
}

// ---------------------------------------------------------------------------
// Closed-form boundary functions
// ---------------------------------------------------------------------------

enum class BoundaryKind {
  Positivity,
  Ppt,
  Witness,
  CglmpSphere,
  CglmpPlane,
  Octahedron,
  Cylinder
};

// Sphere conjectured for the line-family CGLMP boundary (all-positive
// octant) and the planes it degenerates into when one weight is negative.
inline double cglmp_sphere_radius() {
  return (413.0 * std::sqrt(3.0) - 558.0) / 156.0;
}
inline double cglmp_sphere_center() {
  return (-361.0 + 186.0 * std::sqrt(3.0)) / 156.0;
}
// Plane offset q in 2 gamma - alpha - beta = q (and permutations); equals
// twice the isotropic boundary weight.
inline double cglmp_plane_offset() { return 6.0 * std::sqrt(3.0) - 9.0; }

namespace detail {

inline void require_arity(const std::vector<double>& p, std::size_t n,
                          const char* what) {
  if (p.size() != n)
    throw parameter_count_error(std::string(what) +
                                ": wrong point arity for family");
}

inline double line_witness_poly(double a, double b, double g) {
  // symmetric in (b, g); the "a" slot is the distinguished weight
  return 40 * a * a + a * (17 * b + 17 * g - 14) + 4 * b * b +
         g * (4 * g - 5) - b * (19 * g + 5) + 1;
}

}  // namespace detail

// All boundary functions of the given kind for the family, evaluated at the
// point. Sign convention: every value is positive strictly inside the
// property region (positive / PPT / separable / non-violating) and zero on
// its boundary.
inline std::vector<double> boundary_values(StateFamily family,
                                           BoundaryKind kind,
                                           const std::vector<double>& p) {
  using detail::require_arity;
  const bool qutrit = family != StateFamily::Tetra2;

  switch (kind) {
    case BoundaryKind::Positivity: {
      require_arity(p, family_arity(family), "boundary_values");
      if (!qutrit) {
        const double c1 = p[0], c2 = p[1], c3 = p[2];
        return {1 + c1 + c2 - c3, 1 + c1 - c2 + c3, 1 - c1 + c2 + c3,
                1 - c1 - c2 - c3};
      }
      // Bell-basis eigenvalues: mixing weight m and p_i + m
      double m = 1.0;
      for (double v : p) m -= v;
      m /= 9.0;
      std::vector<double> out{m};
      for (double v : p) out.push_back(v + m);
      return out;
    }

    case BoundaryKind::Ppt:
      require_arity(p, family_arity(family), "boundary_values");
      switch (family) {
        case StateFamily::Isotropic:
          // two-parameter polynomial restricted to beta = 0: -(8a^2+2a-1)
          return {-(8 * p[0] * p[0] + 2 * p[0] - 1)};
        case StateFamily::TwoParam: {
          const double a = p[0], b = p[1];
          return {-(8 * a * a + 8 * b * b - 11 * a * b + 2 * a + 2 * b - 1)};
        }
        case StateFamily::Line: {
          const double a = p[0], b = p[1], g = p[2];
          return {-(8 * a * a + 8 * b * b + 8 * g * g + 2 * a + 2 * b +
                    2 * g - 11 * a * b - 11 * a * g - 11 * b * g - 1)};
        }
        case StateFamily::Tetra2: {
          double s = 1.0;
          for (double v : p) s -= std::abs(v);
          return {s};  // PPT octahedron
        }
        case StateFamily::Offline:
          throw invalid_coordinates(
              "boundary_values: no closed-form PPT boundary for the "
              "off-line family");
      }
      break;

    case BoundaryKind::Witness:
      require_arity(p, family_arity(family), "boundary_values");
      switch (family) {
        case StateFamily::TwoParam: {
          const double a = p[0], b = p[1];
          return {4 * a * a - 5 * a + 40 * b * b + (17 * a - 14) * b + 1,
                  4 * b * b - 5 * b + 40 * a * a + (17 * b - 14) * a + 1};
        }
        case StateFamily::Line:
          return {detail::line_witness_poly(p[0], p[1], p[2]),
                  detail::line_witness_poly(p[1], p[0], p[2]),
                  detail::line_witness_poly(p[2], p[0], p[1])};
        default:
          throw invalid_coordinates(
              "boundary_values: no published witness boundary for this "
              "family");
      }

    case BoundaryKind::CglmpSphere: {
      require_arity(p, 3, "boundary_values");
      const double c = cglmp_sphere_center();
      double dist2 = 0.0;
      for (double v : p) dist2 += (v - c) * (v - c);
      // positive inside the sphere = non-violating side
      return {cglmp_sphere_radius() - std::sqrt(dist2)};
    }

    case BoundaryKind::CglmpPlane: {
      require_arity(p, 3, "boundary_values");
      const double q = cglmp_plane_offset();
      return {q + p[1] + p[2] - 2 * p[0], q + p[0] + p[2] - 2 * p[1],
              q + p[0] + p[1] - 2 * p[2]};
    }

    case BoundaryKind::Octahedron: {
      require_arity(p, 3, "boundary_values");
      return {1.0 - std::abs(p[0]) - std::abs(p[1]) - std::abs(p[2])};
    }

    case BoundaryKind::Cylinder: {
      require_arity(p, 3, "boundary_values");
      const double c1 = p[0], c2 = p[1], c3 = p[2];
      return {1 - c1 * c1 - c2 * c2, 1 - c1 * c1 - c3 * c3,
              1 - c2 * c2 - c3 * c3};
    }
  }
  throw invalid_coordinates("boundary_values: unknown boundary kind");
}

// Signed distance surrogate: minimum over the kind's boundary functions
// (positive strictly inside the property region).
inline double boundary_value(StateFamily family, BoundaryKind kind,
                             const std::vector<double>& p) {
  const std::vector<double> v = boundary_values(family, kind, p);
  return *std::min_element(v.begin(), v.end());
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class TriState { Yes, No, NotApplicable };

struct Classification {
  bool positive = false;
  double min_eig = 0.0;
  bool ppt = false;
  double ppt_min_eig = 0.0;
  TriState witness_separable = TriState::NotApplicable;
  std::vector<double> witness_values;
  bool bound_entangled = false;
  TriState cglmp_violating = TriState::NotApplicable;
  double cglmp_margin = 0.0;  // max I_d - 2 (valid unless NotApplicable)
  std::string cglmp_error;
};

inline Classification classify(StateFamily family,
                               const std::vector<double>& point,
                               const OptimizerConfig& cfg) {
  const int d = family_local_dim(family);
  const CMatrix rho = family_state(family, point, d);
  Classification c;
  c.min_eig = min_eigenvalue(rho);
  c.positive = c.min_eig >= -kPsdTol;
  const PptResult ppt = is_ppt(rho, d, d);
  c.ppt = ppt.ppt;
  c.ppt_min_eig = ppt.min_eigenvalue;

  switch (family) {
    case StateFamily::TwoParam:
    case StateFamily::Line:
      c.witness_values = boundary_values(family, BoundaryKind::Witness, point);
      break;
    case StateFamily::Isotropic:
      // witness polynomial of the two-parameter family at beta = 0
      c.witness_values =
          boundary_values(StateFamily::TwoParam, BoundaryKind::Witness,
                          {point[0], 0.0});
      break;
    case StateFamily::Tetra2:
      // PPT octahedron is the exact separability boundary for two qubits
      c.witness_values =
          boundary_values(family, BoundaryKind::Octahedron, point);
      break;
    case StateFamily::Offline:
      break;  // no published witness; stays NotApplicable
  }
  if (!c.witness_values.empty()) {
    const double w =
        *std::min_element(c.witness_values.begin(), c.witness_values.end());
    c.witness_separable = w >= 0.0 ? TriState::Yes : TriState::No;
  }
  c.bound_entangled = c.ppt && c.witness_separable == TriState::No;

  try {
    const MaxBellResult r = maximize_bell(rho, d, cfg);
    c.cglmp_margin = r.value - 2.0;
    c.cglmp_violating = c.cglmp_margin > 0.0 ? TriState::Yes : TriState::No;
  } catch (const std::exception& e) {
    c.cglmp_violating = TriState::NotApplicable;
    c.cglmp_error = e.what();
  }
  return c;
}

// ---------------------------------------------------------------------------
// m-concurrence
// ---------------------------------------------------------------------------

// Antisymmetric two-level generator sigma_{k,l} = -i|k><l| + i|l><k|.
inline CMatrix sigma_generator(int d, int k, int l) {
  if (k >= l) throw index_order_error("sigma_generator: requires k < l");
  if (l >= d) throw invalid_dimension("sigma_generator: index out of range");
  CMatrix s = CMatrix::Zero(d, d);
  s(k, l) = cplx(0, -1);
  s(l, k) = cplx(0, 1);
  return s;
}

struct ConcurrenceResult {
  double lower_bound = 0.0;  // best over local unitaries
  double raw_bound = 0.0;    // in the input basis
  ParamMatrix ua, ub;        // Reduced parameters of the best rotation
};

namespace detail {

// X for one generator pair via the 4x4 block of rho on the computational
// sub-basis {|kA kB>, |kA lB>, |lA kB>, |lA lB>}, where sigma x sigma acts
// as sigma_y x sigma_y: the nonzero eigenvalues of rho S rho* S equal those
// of R Y R* Y with R the extracted block.
inline double concurrence_pair_x(const CMatrix& rho, int d, int kA, int lA,
                                 int kB, int lB) {
  const int idx[4] = {kA * d + kB, kA * d + lB, lA * d + kB, lA * d + lB};
  Eigen::Matrix4cd r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = rho(idx[i], idx[j]);
  Eigen::Matrix4cd y = Eigen::Matrix4cd::Zero();
  y(0, 3) = -1;
  y(1, 2) = 1;
  y(2, 1) = 1;
  y(3, 0) = -1;
  const Eigen::Matrix4cd m = r * y * r.conjugate() * y;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m, false);
  double x[4];
  for (int i = 0; i < 4; ++i) {
    const cplx ev = es.eigenvalues()(i);
    if (ev.real() < -1e-9 || std::abs(ev.imag()) > 1e-9)
      throw numerical_degeneracy(
          "concurrence: eigenvalue of rho S rho* S strays off the "
          "nonnegative real axis");
    x[i] = std::sqrt(std::max(ev.real(), 0.0));
  }
  std::sort(x, x + 4, std::greater<double>());
  return std::max(x[0] - x[1] - x[2] - x[3], 0.0);
}

inline double concurrence_raw_sum(const CMatrix& rho, int d) {
  double total = 0.0;
  for (int kA = 0; kA < d; ++kA)
    for (int lA = kA + 1; lA < d; ++lA)
      for (int kB = 0; kB < d; ++kB)
        for (int lB = kB + 1; lB < d; ++lB) {
          const double x = concurrence_pair_x(rho, d, kA, lA, kB, lB);
          total += x * x;
        }
  return total;
}

}  // namespace detail

// Sum of X^2 over all generator pairs in the given basis (the basis-
// dependent lower bound on C_m^2 before local-unitary optimization). On a
// degeneracy error the state is re-symmetrized once and retried.
inline double m_concurrence_raw_bound(const CMatrix& rho, int d) {
  if (rho.rows() != d * d || rho.cols() != d * d)
    throw dimension_mismatch("m_concurrence_raw_bound: dim(rho) != d^2");
  try {
    return detail::concurrence_raw_sum(rho, d);
  } catch (const numerical_degeneracy&) {
    const CMatrix sym = 0.5 * (rho + rho.adjoint());
    return detail::concurrence_raw_sum(sym, d);
  }
}

// C_m^2 of a pure state: sum over generator pairs of |<psi| S |psi*>|^2;
// equals (4/3) S_L(Tr_A psi) at d = 3.
inline double m_concurrence_pure(const CVector& psi, int d) {
  if (psi.size() != d * d)
    throw dimension_mismatch("m_concurrence_pure: dim(psi) != d^2");
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw numerical_error("m_concurrence_pure: state vector not normalized");
  const CVector conj = psi.conjugate();
  double total = 0.0;
  for (int kA = 0; kA < d; ++kA)
    for (int lA = kA + 1; lA < d; ++lA) {
      const CMatrix sa = sigma_generator(d, kA, lA);
      for (int kB = 0; kB < d; ++kB)
        for (int lB = kB + 1; lB < d; ++lB) {
          const CMatrix s = tensor(sa, sigma_generator(d, kB, lB));
          const cplx ov = psi.dot(s * conj);  // <psi| S |psi*>
          total += std::norm(ov);
        }
    }
  return total;
}

// Best lower bound on C_m^2 over local unitaries U_A x U_B (2(d^2-d)
// Reduced parameters; 12 at d = 3), Nelder-Mead with restarts. The identity
// rotation is always included as a start, so lower_bound >= raw_bound.
// Extra warm starts (packed [U_A params | U_B params]) may be supplied.
inline ConcurrenceResult m_concurrence_lower_bound(
    const CMatrix& rho, int d, const OptimizerConfig& cfg,
    const std::vector<std::vector<double>>& warm_starts = {}) {
  if (rho.rows() != d * d || rho.cols() != d * d)
    throw dimension_mismatch("m_concurrence_lower_bound: dim(rho) != d^2");
  const int nper = parameter_count(d, UForm::Reduced);

  auto rotated = [&](const std::vector<double>& x) {
    const ParamMatrix pa =
        unpack_reduced(d, std::span<const double>(x.data(), nper));
    const ParamMatrix pb =
        unpack_reduced(d, std::span<const double>(x.data() + nper, nper));
    const CMatrix k = tensor(composite_unitary(pa, UForm::Reduced),
                             composite_unitary(pb, UForm::Reduced));
    return CMatrix(k * rho * k.adjoint());
  };
  auto objective = [&](const std::vector<double>& x) {
    return -m_concurrence_raw_bound(rotated(x), d);
  };

  ConcurrenceResult result;
  result.raw_bound = m_concurrence_raw_bound(rho, d);

  std::vector<std::vector<double>> starts;
  starts.emplace_back(2 * nper, 0.0);  // identity rotation
  for (const auto& w : warm_starts) {
    if (static_cast<int>(w.size()) != 2 * nper)
      throw parameter_count_error(
          "m_concurrence_lower_bound: warm start has wrong length");
    starts.push_back(w);
  }
  Rng rng(cfg.seed);
  for (int r = static_cast<int>(starts.size()); r < cfg.restarts; ++r)
    starts.push_back(detail::random_settings_start(d, 2, rng));

  double best = result.raw_bound;
  std::vector<double> best_x(2 * nper, 0.0);
  for (const auto& x0 : starts) {
    auto [x, f] = nelder_mead(objective, x0, cfg);
    if (-f > best) {
      best = -f;
      best_x = std::move(x);
    }
  }
  result.lower_bound = best;
  result.ua = unpack_reduced(
      d, std::span<const double>(best_x.data(), nper));
  result.ub = unpack_reduced(
      d, std::span<const double>(best_x.data() + nper, nper));
  return result;
}

// Closed-form C_m^2 of the line state rho_line(alpha, beta/2, beta/2)
// inside its positivity triangle.
inline double m_concurrence_line_analytic(double alpha, double beta) {
  if (alpha >= 0.25 + beta / 8.0) {
    const double t = std::max(0.0, 8 * alpha - beta - 2);
    return t * t / 27.0;
  }
  const double t = std::max(0.0, 5 * beta - 4 * alpha - 2);
  return 2.0 * t * t / 27.0;
}

}  // namespace bellgeo

#endif  // BELLGEO_ENTGEO_HPP_
