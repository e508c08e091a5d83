#ifndef BELLGEO_UPARAM_HPP_
#define BELLGEO_UPARAM_HPP_

#include <cmath>
#include <span>
#include <vector>

#include "bellgeo/common.hpp"

namespace bellgeo {

// Composite parameterization of U(d): an ordered product of two-level
// rotation/phase factors, optionally followed by d diagonal global phases.
// The d x d angle matrix is read as: entry (m, n) with m < n is the rotation
// of the factor acting on span{|m>, |n>}; entry (n, m) is the companion
// relative phase; diagonal entries are the global phases (Full form only).

enum class UForm { Full, Reduced };

struct ParamMatrix {
  int d = 0;
  RMatrix lambda;  // d x d angles in radians

  static ParamMatrix zero(int d) { return {d, RMatrix::Zero(d, d)}; }
};

inline int parameter_count(int d, UForm form) {
  if (d < 2) throw invalid_dimension("parameter_count: d must be >= 2");
  return form == UForm::Full ? d * d : d * d - d;
}

// Identity outside span{|m>, |n>}; inside:
//   [ e^{i phase} cos(rot)   -e^{i phase} sin(rot) ]
//   [        sin(rot)                cos(rot)      ]
inline CMatrix elementary_factor(int d, int m, int n, double rot,
                                 double phase) {
  if (m >= n) throw index_order_error("elementary_factor: requires m < n");
  if (n >= d) throw invalid_dimension("elementary_factor: index out of range");
  CMatrix f = CMatrix::Identity(d, d);
  const double c = std::cos(rot), s = std::sin(rot);
  const cplx ph = std::polar(1.0, phase);
  f(m, m) = ph * c;
  f(m, n) = -ph * s;
  f(n, m) = s;
  f(n, n) = c;
  return f;
}

// Ordered product over m = 0..d-2, n = m+1..d-1 (leftmost factor first) of
// the two-level factors, times the diagonal phase block for the Full form.
// Factors are applied as rank-2 column updates; each touches only columns
// m and n of the accumulator.
inline CMatrix composite_unitary(const ParamMatrix& p, UForm form) {
  const int d = p.d;
  if (d < 2) throw invalid_dimension("composite_unitary: d must be >= 2");
  CMatrix u = CMatrix::Identity(d, d);
  for (int m = 0; m < d - 1; ++m)
    for (int n = m + 1; n < d; ++n) {
      const double c = std::cos(p.lambda(m, n)), s = std::sin(p.lambda(m, n));
      const cplx ph = std::polar(1.0, p.lambda(n, m));
      // (U F): col_m' = ph*c*col_m + s*col_n ; col_n' = -ph*s*col_m + c*col_n
      for (int i = 0; i < d; ++i) {
        const cplx um = u(i, m), un = u(i, n);
        u(i, m) = ph * c * um + s * un;
        u(i, n) = -ph * s * um + c * un;
      }
    }
  if (form == UForm::Full)
    for (int l = 0; l < d; ++l)
      u.col(l) *= std::polar(1.0, p.lambda(l, l));
  return u;
}

namespace detail {

inline double wrap_two_pi(double x) {
  double y = std::fmod(x, kTwoPi);
  return y < 0 ? y + kTwoPi : y;
}

// Triangle-wave fold of a rotation angle into [0, pi/2]. The fold keeps the
// elementary factor fixed up to column signs provided the companion phase is
// shifted by pi on the reflecting segments; `phase_shift` reports whether
// that shift applies.
inline double fold_rotation(double x, bool& phase_shift) {
  double y = wrap_two_pi(x);
  phase_shift = false;
  if (y <= kPi / 2) return y;
  if (y <= kPi) {
    phase_shift = true;
    return kPi - y;
  }
  if (y <= 1.5 * kPi) return y - kPi;
  phase_shift = true;
  return kTwoPi - y;
}

}  // namespace detail

// Wrap phases mod 2 pi and fold rotations into [0, pi/2]; idempotent.
inline ParamMatrix canonicalize(const ParamMatrix& p) {
  ParamMatrix out = p;
  const int d = p.d;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      if (m < n) {
        bool shift = false;
        out.lambda(m, n) = detail::fold_rotation(p.lambda(m, n), shift);
        if (shift) out.lambda(n, m) = p.lambda(n, m) + kPi;
      } else if (m == n) {
        out.lambda(m, m) = detail::wrap_two_pi(p.lambda(m, m));
      }
    }
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < m; ++n)
      out.lambda(m, n) = detail::wrap_two_pi(out.lambda(m, n));
  return out;
}

// Flat vector layout of the Reduced parameters, used as the optimizer's
// variable space: for each factor in product order, [rotation, phase].
inline std::vector<double> pack_reduced(const ParamMatrix& p) {
  std::vector<double> x;
  x.reserve(parameter_count(p.d, UForm::Reduced));
  for (int m = 0; m < p.d - 1; ++m)
    for (int n = m + 1; n < p.d; ++n) {
      x.push_back(p.lambda(m, n));
      x.push_back(p.lambda(n, m));
    }
  return x;
}

inline ParamMatrix unpack_reduced(int d, std::span<const double> x) {
  if (static_cast<int>(x.size()) != parameter_count(d, UForm::Reduced))
    throw parameter_count_error("unpack_reduced: wrong parameter count");
  ParamMatrix p = ParamMatrix::zero(d);
  std::size_t i = 0;
  for (int m = 0; m < d - 1; ++m)
    for (int n = m + 1; n < d; ++n) {
      p.lambda(m, n) = x[i++];
      p.lambda(n, m) = x[i++];
    }
  return p;
}

}  // namespace bellgeo

#endif  // BELLGEO_UPARAM_HPP_
