#ifndef BELLGEO_COMMON_HPP_
#define BELLGEO_COMMON_HPP_

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bellgeo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Numerical tolerances used across the library.
inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
// min eigenvalue >= -kPsdTol counts as positive semidefinite (eigen-solver
// noise floor).
inline constexpr double kPsdTol = 1e-10;

struct invalid_dimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct dimension_mismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct invalid_coordinates : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct symmetry_violation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct parameter_count_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct index_order_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Internal-consistency failure of a numerical routine (broken unitary,
// unnormalized input, negative probability beyond noise floor, ...).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct optimizer_abort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct no_violation_direction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_degeneracy : numerical_error {
  using numerical_error::numerical_error;
};

inline int mod(int a, int d) {
  int r = a % d;
  return r < 0 ? r + d : r;
}

inline bool is_hermitian(const CMatrix& m, double tol = kHermiticityTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline bool is_density_matrix(const CMatrix& m, double psd_tol = kPsdTol) {
  if (!is_hermitian(m)) return false;
  if (std::abs(m.trace().real() - 1.0) > kTraceTol) return false;
  return min_eigenvalue(m) >= -psd_tol;
}

inline CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace bellgeo

#endif  // BELLGEO_COMMON_HPP_
