#ifndef BELLGEO_QSTATE_HPP_
#define BELLGEO_QSTATE_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "bellgeo/common.hpp"

namespace bellgeo {

// ---------------------------------------------------------------------------
// Weyl operators and generalized Bell projectors
// ---------------------------------------------------------------------------

// W_{kl} = sum_s exp(2 pi i s k / d) |s><(s+l) mod d|. Unitary, periodic in
// both indices with period d (indices are reduced mod d).
inline CMatrix weyl_operator(int d, int k, int l) {
  if (d < 2) throw invalid_dimension("weyl_operator: d must be >= 2");
  k = mod(k, d);
  l = mod(l, d);
  CMatrix w = CMatrix::Zero(d, d);
  for (int s = 0; s < d; ++s)
    w(s, mod(s + l, d)) = std::polar(1.0, kTwoPi * s * k / d);
  return w;
}

// |Omega_{k,l}> = (W_{k,l} x 1) |Omega_{0,0}>, with |Omega_{0,0}> the
// maximally entangled state (1/sqrt(d)) sum_s |s>|s>.
inline CVector bell_vector(int d, int k, int l) {
  if (d < 2) throw invalid_dimension("bell_vector: d must be >= 2");
  const CMatrix w = weyl_operator(d, k, l);
  CVector v = CVector::Zero(d * d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t) v(t * d + s) += norm * w(t, s);
  return v;
}

inline CMatrix bell_projector(int d, int k, int l) {
  const CVector v = bell_vector(d, k, l);
  return v * v.adjoint();
}

// ---------------------------------------------------------------------------
// Magic simplex coordinates
// ---------------------------------------------------------------------------

struct SimplexCoordinates {
  int d = 0;
  RMatrix weights;  // d x d, entry (k, l) = c_{k,l}

  static SimplexCoordinates uniform(int d) {
    SimplexCoordinates c;
    c.d = d;
    c.weights = RMatrix::Constant(d, d, 1.0 / (d * d));
    return c;
  }

  double total() const { return weights.sum(); }

  // Strict membership in the simplex: nonnegative weights summing to one.
  bool is_simplex_member(double tol = kTraceTol) const {
    return std::abs(total() - 1.0) <= tol && weights.minCoeff() >= -tol;
  }
};

// rho = sum_{k,l} c_{k,l} P_{k,l}; diagonal in the Bell basis with the
// weights as eigenvalues. Weights must sum to one; negative individual
// weights are allowed (state families probe the positivity boundary).
inline CMatrix simplex_state(const SimplexCoordinates& c) {
  if (c.d < 2) throw invalid_dimension("simplex_state: d must be >= 2");
  if (std::abs(c.total() - 1.0) > 1e-9)
    throw invalid_coordinates("simplex_state: weights must sum to 1");
  CMatrix rho = CMatrix::Zero(c.d * c.d, c.d * c.d);
  for (int k = 0; k < c.d; ++k)
    for (int l = 0; l < c.d; ++l) {
      if (c.weights(k, l) == 0.0) continue;
      rho += c.weights(k, l) * bell_projector(c.d, k, l);
    }
  return rho;
}

// ---------------------------------------------------------------------------
// Named state families
// ---------------------------------------------------------------------------

enum class StateFamily { Isotropic, TwoParam, Line, Offline, Tetra2 };

inline int family_arity(StateFamily f) {
  switch (f) {
    case StateFamily::Isotropic: return 1;
    case StateFamily::TwoParam: return 2;
    default: return 3;
  }
}

inline int family_local_dim(StateFamily f) {
  return f == StateFamily::Tetra2 ? 2 : 3;
}

inline const char* family_name(StateFamily f) {
  switch (f) {
    case StateFamily::Isotropic: return "isotropic";
    case StateFamily::TwoParam: return "two-param";
    case StateFamily::Line: return "line";
    case StateFamily::Offline: return "offline";
    case StateFamily::Tetra2: return "tetra2";
  }
  return "?";
}

inline bool parse_family(const std::string& s, StateFamily& out) {
  if (s == "isotropic") out = StateFamily::Isotropic;
  else if (s == "two-param" || s == "twoparam") out = StateFamily::TwoParam;
  else if (s == "line") out = StateFamily::Line;
  else if (s == "offline" || s == "off-line") out = StateFamily::Offline;
  else if (s == "tetra2") out = StateFamily::Tetra2;
  else return false;
  return true;
}

// Hermitian trace-1 member of the named family. Positivity is NOT enforced;
// scans walk the positivity boundary itself. Qutrit families are mixtures of
// the identity and Bell projectors; Tetra2 is the two-qubit Bell-diagonal
// state 1/4 (1x1 + sum_i c_i sigma_i x sigma_i).
inline CMatrix family_state(StateFamily f, const std::vector<double>& params,
                            int d) {
  if (static_cast<int>(params.size()) != family_arity(f))
    throw parameter_count_error("family_state: wrong parameter count for " +
                                std::string(family_name(f)));
  if (d != family_local_dim(f))
    throw invalid_dimension("family_state: family " +
                            std::string(family_name(f)) + " requires d=" +
                            std::to_string(family_local_dim(f)));

  if (f == StateFamily::Tetra2) {
    const double c1 = params[0], c2 = params[1], c3 = params[2];
    CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, cplx(0, -1), cplx(0, 1), 0;
    sz << 1, 0, 0, -1;
    CMatrix rho = CMatrix::Identity(4, 4);
    rho += c1 * tensor(sx, sx) + c2 * tensor(sy, sy) + c3 * tensor(sz, sz);
    return 0.25 * rho;
  }

  double mix = 1.0;
  for (double p : params) mix -= p;
  CMatrix rho = (mix / 9.0) * CMatrix::Identity(9, 9);
  switch (f) {
    case StateFamily::Isotropic:
      rho += params[0] * bell_projector(3, 0, 0);
      break;
    case StateFamily::TwoParam:
      rho += params[0] * bell_projector(3, 0, 0);
      rho += params[1] * bell_projector(3, 0, 1);
      break;
    case StateFamily::Line:
      rho += params[0] * bell_projector(3, 0, 0);
      rho += params[1] * bell_projector(3, 0, 1);
      rho += params[2] * bell_projector(3, 0, 2);
      break;
    case StateFamily::Offline:
      rho += params[0] * bell_projector(3, 0, 0);
      rho += params[1] * bell_projector(3, 0, 1);
      rho += params[2] * bell_projector(3, 1, 0);
      break;
    default: break;
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Bipartite primitives
// ---------------------------------------------------------------------------

// Transposition of the second tensor factor.
inline CMatrix partial_transpose(const CMatrix& rho, int dA, int dB) {
  if (rho.rows() != dA * dB || rho.cols() != dA * dB)
    throw dimension_mismatch("partial_transpose: dim(rho) != dA*dB");
  CMatrix out(rho.rows(), rho.cols());
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j)
      out.block(i * dB, j * dB, dB, dB) =
          rho.block(i * dB, j * dB, dB, dB).transpose();
  return out;
}

enum class Subsystem { A, B };

inline CMatrix partial_trace(const CMatrix& rho, int dA, int dB,
                             Subsystem keep) {
  if (rho.rows() != dA * dB || rho.cols() != dA * dB)
    throw dimension_mismatch("partial_trace: dim(rho) != dA*dB");
  if (keep == Subsystem::A) {
    CMatrix out = CMatrix::Zero(dA, dA);
    for (int i = 0; i < dA; ++i)
      for (int j = 0; j < dA; ++j)
        out(i, j) = rho.block(i * dB, j * dB, dB, dB).trace();
    return out;
  }
  CMatrix out = CMatrix::Zero(dB, dB);
  for (int i = 0; i < dA; ++i)
    out += rho.block(i * dB, i * dB, dB, dB);
  return out;
}

// ---------------------------------------------------------------------------
// Phase space symmetries of the simplex
// ---------------------------------------------------------------------------

// (k, l) = M (k', l') + (j, r) mod d, with det M = 1 or d-1 mod d.
struct PhaseSpaceMap {
  int m = 1, n = 0, p = 0, q = 1;  // matrix M, row-major
  int j = 0, r = 0;                // translation

  int det_mod(int d) const { return mod(m * q - n * p, d); }
};

inline SimplexCoordinates phase_space_transform(const SimplexCoordinates& c,
                                                const PhaseSpaceMap& map) {
  const int d = c.d;
  const int det = map.det_mod(d);
  if (det != 1 && det != d - 1)
    throw symmetry_violation(
        "phase_space_transform: det M mod d must be 1 or d-1");
  SimplexCoordinates out;
  out.d = d;
  out.weights = RMatrix::Zero(d, d);
  for (int kp = 0; kp < d; ++kp)
    for (int lp = 0; lp < d; ++lp) {
      const int k = mod(map.m * kp + map.n * lp + map.j, d);
      const int l = mod(map.p * kp + map.q * lp + map.r, d);
      out.weights(kp, lp) = c.weights(k, l);
    }
  return out;
}

}  // namespace bellgeo

#endif  // BELLGEO_QSTATE_HPP_
