#ifndef BELLGEO_CGLMP_HPP_
#define BELLGEO_CGLMP_HPP_

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "bellgeo/common.hpp"
#include "bellgeo/uparam.hpp"

namespace bellgeo {

// Measurement bases for one CGLMP evaluation: A1, A2 on the first party,
// B1, B2 on the second, each a Reduced composite parameterization (column x
// of the unitary is the eigenvector for outcome x).
struct MeasurementSettings {
  int d = 0;
  ParamMatrix a1, a2, b1, b2;

  static MeasurementSettings zero(int d) {
    return {d, ParamMatrix::zero(d), ParamMatrix::zero(d),
            ParamMatrix::zero(d), ParamMatrix::zero(d)};
  }
};

// P(A_a = x, B_b = y); slice (a, b) at probs[2*a + b] (a, b in {0, 1} for
// settings 1, 2), outcome pair at row x, column y.
struct JointProbabilityTable {
  int d = 0;
  std::array<RMatrix, 4> probs;

  const RMatrix& slice(int a, int b) const { return probs[2 * a + b]; }
};

struct BellOperator {
  int d = 0;
  CMatrix matrix;  // d^2 x d^2, Hermitian, traceless
  MeasurementSettings settings;
};

namespace detail {

// Coefficient tables c[2a+b](x, y) of the I_d expansion: for each setting
// pair, I_d = sum_{x,y} c(x, y) P(A_a = x, B_b = y). Terms follow the
// CGLMP grouping P(A1=B1+k) + P(B1=A2+k+1) + P(A2=B2+k) + P(B2=A1+k)
// minus the shifted partners, weighted by 1 - 2k/(d-1).
inline std::array<RMatrix, 4> cglmp_coefficients(int d) {
  std::array<RMatrix, 4> c;
  for (auto& m : c) m = RMatrix::Zero(d, d);
  RMatrix& c11 = c[0];
  RMatrix& c12 = c[1];
  RMatrix& c21 = c[2];
  RMatrix& c22 = c[3];
  for (int k = 0; k < d / 2; ++k) {
    const double w = 1.0 - 2.0 * k / (d - 1);
    for (int j = 0; j < d; ++j) {
      // P(A_a = B_b + k): x = j + k, y = j.  P(B_b = A_a + k): x = j,
      // y = j + k.
      c11(mod(j + k, d), j) += w;            // P(A1 = B1 + k)
      c11(mod(j - k - 1, d), j) -= w;        // P(A1 = B1 - k - 1)
      c21(j, mod(j + k + 1, d)) += w;        // P(B1 = A2 + k + 1)
      c21(j, mod(j - k, d)) -= w;            // P(B1 = A2 - k)
      c22(mod(j + k, d), j) += w;            // P(A2 = B2 + k)
      c22(mod(j - k - 1, d), j) -= w;        // P(A2 = B2 - k - 1)
      c12(j, mod(j + k, d)) += w;            // P(B2 = A1 + k)
      c12(j, mod(j - k - 1, d)) -= w;        // P(B2 = A1 - k - 1)
    }
  }
  return c;
}

}  // namespace detail

inline JointProbabilityTable joint_probabilities(const CMatrix& rho,
                                                 const MeasurementSettings& s) {
  const int d = s.d;
  if (rho.rows() != d * d || rho.cols() != d * d)
    throw dimension_mismatch("joint_probabilities: dim(rho) != d^2");
  const CMatrix ua1 = composite_unitary(s.a1, UForm::Reduced);
  const CMatrix ua2 = composite_unitary(s.a2, UForm::Reduced);
  const CMatrix ub1 = composite_unitary(s.b1, UForm::Reduced);
  const CMatrix ub2 = composite_unitary(s.b2, UForm::Reduced);
  JointProbabilityTable t;
  t.d = d;
  const CMatrix* ua[2] = {&ua1, &ua2};
  const CMatrix* ub[2] = {&ub1, &ub2};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const CMatrix k = tensor(*ua[a], *ub[b]);
      const CVector diag = (k.adjoint() * rho * k).diagonal();
      RMatrix p(d, d);
      double sum = 0.0;
      for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) {
          const double v = diag(x * d + y).real();
          if (v < -1e-12)
            throw numerical_error(
                "joint_probabilities: negative probability beyond noise "
                "floor");
          p(x, y) = v;
          sum += v;
        }
      if (std::abs(sum - 1.0) > 1e-10)
        throw numerical_error(
            "joint_probabilities: probabilities do not sum to 1");
      t.probs[2 * a + b] = std::move(p);
    }
  return t;
}

inline double cglmp_value(const CMatrix& rho, const MeasurementSettings& s) {
  const JointProbabilityTable t = joint_probabilities(rho, s);
  const auto c = detail::cglmp_coefficients(s.d);
  double i = 0.0;
  for (int ab = 0; ab < 4; ++ab)
    i += (c[ab].array() * t.probs[ab].array()).sum();
  return i;
}

inline BellOperator bell_operator(const MeasurementSettings& s) {
  const int d = s.d;
  const auto c = detail::cglmp_coefficients(d);
  const CMatrix ua1 = composite_unitary(s.a1, UForm::Reduced);
  const CMatrix ua2 = composite_unitary(s.a2, UForm::Reduced);
  const CMatrix ub1 = composite_unitary(s.b1, UForm::Reduced);
  const CMatrix ub2 = composite_unitary(s.b2, UForm::Reduced);
  const CMatrix* ua[2] = {&ua1, &ua2};
  const CMatrix* ub[2] = {&ub1, &ub2};
  CMatrix b = CMatrix::Zero(d * d, d * d);
  for (int a = 0; a < 2; ++a)
    for (int bi = 0; bi < 2; ++bi) {
      const CMatrix k = tensor(*ua[a], *ub[bi]);
      CVector diag(d * d);
      for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) diag(x * d + y) = c[2 * a + bi](x, y);
      b += k * diag.asDiagonal() * k.adjoint();
    }
  return {d, std::move(b), s};
}

// Best-found maximum of I_d, attained on a non-maximally entangled state
// for d >= 3 (no analytic optimality proof exists; treated as best-found).
inline double cglmp_analytic_max(int d) {
  if (d < 2) throw invalid_dimension("cglmp_analytic_max: d must be >= 2");
  double s = 0.0;
  for (int k = 0; k < d / 2; ++k) {
    const double w = 1.0 - 2.0 * k / (d - 1);
    const double sp = std::sin(kPi * (k + 0.25) / d);
    const double sm = std::sin(-kPi * (k + 0.75) / d);
    s += w * (1.0 / (sp * sp) - 1.0 / (sm * sm));
  }
  return 2.0 / (static_cast<double>(d) * d) * s;
}

// Exhaustive maximum of I_d over deterministic local strategies
// (a1, a2, b1, b2) in {0..d-1}^4; the local-realistic bound. All
// coefficients are multiples of 1/(d-1), so the enumeration runs on
// integer tables scaled by d-1 and the result is exact in floating point.
inline double local_bound_bruteforce(int d, int max_d = 4) {
  if (d < 2) throw invalid_dimension("local_bound_bruteforce: d must be >= 2");
  if (d > max_d)
    throw invalid_dimension(
        "local_bound_bruteforce: d exceeds the enumeration size guard");
  std::array<Eigen::MatrixXi, 4> c;
  for (auto& m : c) m = Eigen::MatrixXi::Zero(d, d);
  for (int k = 0; k < d / 2; ++k) {
    const int w = d - 1 - 2 * k;  // (d-1) * (1 - 2k/(d-1))
    for (int j = 0; j < d; ++j) {
      c[0](mod(j + k, d), j) += w;
      c[0](mod(j - k - 1, d), j) -= w;
      c[2](j, mod(j + k + 1, d)) += w;
      c[2](j, mod(j - k, d)) -= w;
      c[3](mod(j + k, d), j) += w;
      c[3](mod(j - k - 1, d), j) -= w;
      c[1](j, mod(j + k, d)) += w;
      c[1](j, mod(j - k - 1, d)) -= w;
    }
  }
  long best = std::numeric_limits<long>::min();
  for (int a1 = 0; a1 < d; ++a1)
    for (int a2 = 0; a2 < d; ++a2)
      for (int b1 = 0; b1 < d; ++b1)
        for (int b2 = 0; b2 < d; ++b2) {
          const long v = c[0](a1, b1) + c[1](a1, b2) + c[2](a2, b1) +
                         c[3](a2, b2);
          if (v > best) best = v;
        }
  return static_cast<double>(best) / (d - 1);
}

// Horodecki criterion for Bell-diagonal two-qubit states with correlation
// vector (c1, c2, c3): max CHSH value 2 sqrt(l1 + l2) with l1, l2 the two
// largest of {c1^2, c2^2, c3^2}.
inline double chsh_horodecki_max(double c1, double c2, double c3) {
  double u[3] = {c1 * c1, c2 * c2, c3 * c3};
  double lo = std::min({u[0], u[1], u[2]});
  return 2.0 * std::sqrt(u[0] + u[1] + u[2] - lo);
}

}  // namespace bellgeo

#endif  // BELLGEO_CGLMP_HPP_
