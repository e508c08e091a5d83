#include <catch2/catch_amalgamated.hpp>

#include "bellgeo/qstate.hpp"
#include "bellgeo/rng.hpp"

using namespace bellgeo;

namespace {

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

CMatrix random_density(int n, Rng& rng) {
  CMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("weyl operators") {
  SECTION("W_00 is the identity") {
    REQUIRE(max_abs_diff(weyl_operator(3, 0, 0), CMatrix::Identity(3, 3)) ==
            0.0);
  }
  SECTION("W_10 is the clock matrix") {
    const cplx w = std::polar(1.0, kTwoPi / 3);
    CMatrix expect = CMatrix::Zero(3, 3);
    expect(0, 0) = 1;
    expect(1, 1) = w;
    expect(2, 2) = w * w;
    REQUIRE(max_abs_diff(weyl_operator(3, 1, 0), expect) < 1e-15);
  }
  SECTION("W_01 is the cyclic shift |s><s+1|") {
    CMatrix expect = CMatrix::Zero(3, 3);
    expect(0, 1) = 1;
    expect(1, 2) = 1;
    expect(2, 0) = 1;
    REQUIRE(max_abs_diff(weyl_operator(3, 0, 1), expect) == 0.0);
  }
  SECTION("unitary") {
    for (int d : {2, 3, 5})
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const CMatrix w = weyl_operator(d, k, l);
          REQUIRE(max_abs_diff(w.adjoint() * w, CMatrix::Identity(d, d)) <
                  1e-12);
        }
  }
  SECTION("index periodicity is bit-exact") {
    for (int d : {2, 3, 4}) {
      REQUIRE(weyl_operator(d, 1 + d, 1) == weyl_operator(d, 1, 1));
      REQUIRE(weyl_operator(d, 1, 1 + d) == weyl_operator(d, 1, 1));
      REQUIRE(weyl_operator(d, -1, 0) == weyl_operator(d, d - 1, 0));
    }
  }
  SECTION("dimension check") {
    REQUIRE_THROWS_AS(weyl_operator(1, 0, 0), invalid_dimension);
  }
}

TEST_CASE("bell projectors") {
  SECTION("P_00 at d=2 projects onto (|00>+|11>)/sqrt(2)") {
    CVector phi = CVector::Zero(4);
    phi(0) = phi(3) = 1 / std::sqrt(2.0);
    REQUIRE(max_abs_diff(bell_projector(2, 0, 0), phi * phi.adjoint()) <
            1e-15);
  }
  SECTION("orthonormality Tr(P_kl P_mn) = delta") {
    const int d = 3;
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n) {
            const double overlap =
                (bell_projector(d, k, l) * bell_projector(d, m, n))
                    .trace()
                    .real();
            const double expect = (k == m && l == n) ? 1.0 : 0.0;
            REQUIRE(std::abs(overlap - expect) < 1e-10);
          }
  }
  SECTION("projector periodicity P_kl = P_{k+d, l+d}") {
    REQUIRE(max_abs_diff(bell_projector(3, 1, 2), bell_projector(3, 4, 5)) <
            1e-12);
  }
  SECTION("completeness sums to identity") {
    for (int d : {2, 3, 4}) {
      CMatrix sum = CMatrix::Zero(d * d, d * d);
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) sum += bell_projector(d, k, l);
      REQUIRE(max_abs_diff(sum, CMatrix::Identity(d * d, d * d)) < 1e-10);
    }
  }
  SECTION("reduced states are maximally mixed") {
    const CMatrix p = bell_projector(3, 1, 2);
    REQUIRE(max_abs_diff(partial_trace(p, 3, 3, Subsystem::A),
                         CMatrix::Identity(3, 3) / 3.0) < 1e-12);
    REQUIRE(max_abs_diff(partial_trace(p, 3, 3, Subsystem::B),
                         CMatrix::Identity(3, 3) / 3.0) < 1e-12);
  }
}

TEST_CASE("simplex states") {
  SECTION("uniform weights give the maximally mixed state") {
    const CMatrix rho = simplex_state(SimplexCoordinates::uniform(3));
    REQUIRE(max_abs_diff(rho, CMatrix::Identity(9, 9) / 9.0) < 1e-12);
  }
  SECTION("single vertex gives the projector") {
    SimplexCoordinates c;
    c.d = 3;
    c.weights = RMatrix::Zero(3, 3);
    c.weights(0, 0) = 1.0;
    REQUIRE(max_abs_diff(simplex_state(c), bell_projector(3, 0, 0)) < 1e-14);
  }
  SECTION("eigenvalues equal the weight multiset") {
    Rng rng(3);
    SimplexCoordinates c;
    c.d = 3;
    c.weights = RMatrix::Zero(3, 3);
    double total = 0;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) total += c.weights(k, l) = rng.uniform();
    c.weights /= total;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(simplex_state(c),
                                              Eigen::EigenvaluesOnly);
    std::vector<double> eigs(es.eigenvalues().data(),
                             es.eigenvalues().data() + 9);
    std::vector<double> weights(c.weights.data(), c.weights.data() + 9);
    std::sort(eigs.begin(), eigs.end());
    std::sort(weights.begin(), weights.end());
    for (int i = 0; i < 9; ++i)
      REQUIRE(std::abs(eigs[i] - weights[i]) < 1e-12);
  }
  SECTION("weights must sum to one") {
    SimplexCoordinates c;
    c.d = 2;
    c.weights = RMatrix::Constant(2, 2, 0.3);
    REQUIRE_THROWS_AS(simplex_state(c), invalid_coordinates);
  }
  SECTION("strict membership check") {
    SimplexCoordinates c = SimplexCoordinates::uniform(3);
    REQUIRE(c.is_simplex_member());
    c.weights(0, 0) += 0.1;
    c.weights(1, 1) -= 0.1;
    REQUIRE(c.is_simplex_member());  // still normalized and nonnegative
    c.weights(1, 1) = -0.1;
    c.weights(0, 0) = 1.0 - c.weights.sum() + c.weights(0, 0);
    REQUIRE_FALSE(c.is_simplex_member());
  }
}

TEST_CASE("state families") {
  SECTION("isotropic at alpha=0 is maximally mixed") {
    REQUIRE(max_abs_diff(family_state(StateFamily::Isotropic, {0.0}, 3),
                         CMatrix::Identity(9, 9) / 9.0) < 1e-15);
  }
  SECTION("line state at the cone tip has min eigenvalue 0") {
    const CMatrix rho =
        family_state(StateFamily::Line, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 3);
    REQUIRE(std::abs(min_eigenvalue(rho)) < 1e-12);
    REQUIRE(is_density_matrix(rho));
  }
  SECTION("tetra2 (-1,-1,-1) is the singlet projector") {
    CVector psi = CVector::Zero(4);
    psi(1) = 1 / std::sqrt(2.0);
    psi(2) = -1 / std::sqrt(2.0);
    REQUIRE(max_abs_diff(family_state(StateFamily::Tetra2, {-1, -1, -1}, 2),
                         psi * psi.adjoint()) < 1e-15);
  }
  SECTION("wrong arity raises") {
    REQUIRE_THROWS_AS(family_state(StateFamily::Line, {0.1, 0.2}, 3),
                      parameter_count_error);
    REQUIRE_THROWS_AS(family_state(StateFamily::Isotropic, {0.1, 0.2}, 3),
                      parameter_count_error);
  }
  SECTION("wrong dimension raises") {
    REQUIRE_THROWS_AS(family_state(StateFamily::Line, {0.1, 0.2, 0.3}, 2),
                      invalid_dimension);
  }
  SECTION("line family round-trips through simplex coordinates") {
    const double a = 0.21, b = 0.13, g = 0.05;
    const double m = (1 - a - b - g) / 9;
    SimplexCoordinates c;
    c.d = 3;
    c.weights = RMatrix::Constant(3, 3, m);
    c.weights(0, 0) += a;
    c.weights(0, 1) += b;
    c.weights(0, 2) += g;
    REQUIRE(max_abs_diff(simplex_state(c),
                         family_state(StateFamily::Line, {a, b, g}, 3)) <
            1e-12);
  }
  SECTION("family metadata") {
    REQUIRE(family_arity(StateFamily::Isotropic) == 1);
    REQUIRE(family_arity(StateFamily::TwoParam) == 2);
    REQUIRE(family_arity(StateFamily::Offline) == 3);
    REQUIRE(family_local_dim(StateFamily::Tetra2) == 2);
    StateFamily f;
    REQUIRE(parse_family("two-param", f));
    REQUIRE(f == StateFamily::TwoParam);
    REQUIRE_FALSE(parse_family("nonesuch", f));
  }
}

TEST_CASE("partial transpose") {
  Rng rng(5);
  SECTION("product states keep their spectrum") {
    const CMatrix ra = random_density(3, rng);
    const CMatrix rb = random_density(3, rng);
    const CMatrix rho = tensor(ra, rb);
    REQUIRE(max_abs_diff(partial_transpose(rho, 3, 3),
                         tensor(ra, rb.transpose())) < 1e-14);
  }
  SECTION("P_00 at d=3 has min eigenvalue -1/3") {
    const CMatrix pt = partial_transpose(bell_projector(3, 0, 0), 3, 3);
    REQUIRE(std::abs(min_eigenvalue(pt) + 1.0 / 3) < 1e-12);
  }
  SECTION("involution is bit-exact") {
    const CMatrix rho = random_density(9, rng);
    REQUIRE(partial_transpose(partial_transpose(rho, 3, 3), 3, 3) == rho);
  }
  SECTION("dimension mismatch raises") {
    REQUIRE_THROWS_AS(partial_transpose(CMatrix::Identity(5, 5), 2, 2),
                      dimension_mismatch);
  }
}

TEST_CASE("partial trace") {
  Rng rng(6);
  SECTION("maximally entangled reduction") {
    REQUIRE(max_abs_diff(
                partial_trace(bell_projector(3, 0, 0), 3, 3, Subsystem::A),
                CMatrix::Identity(3, 3) / 3.0) < 1e-14);
  }
  SECTION("product factors are recovered") {
    const CMatrix ra = random_density(2, rng);
    const CMatrix rb = random_density(3, rng);
    const CMatrix rho = tensor(ra, rb);
    REQUIRE(max_abs_diff(partial_trace(rho, 2, 3, Subsystem::A), ra) < 1e-14);
    REQUIRE(max_abs_diff(partial_trace(rho, 2, 3, Subsystem::B), rb) < 1e-14);
  }
  SECTION("trace is preserved") {
    const CMatrix rho = random_density(9, rng);
    REQUIRE(std::abs(
                partial_trace(rho, 3, 3, Subsystem::B).trace().real() - 1.0) <
            1e-12);
  }
}

TEST_CASE("phase space transformations") {
  SECTION("identity map returns the input") {
    const SimplexCoordinates c = SimplexCoordinates::uniform(3);
    const SimplexCoordinates out = phase_space_transform(c, PhaseSpaceMap{});
    REQUIRE((out.weights - c.weights).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("translation moves a concentrated weight") {
    SimplexCoordinates c;
    c.d = 3;
    c.weights = RMatrix::Zero(3, 3);
    c.weights(0, 0) = 1.0;
    PhaseSpaceMap map;
    map.r = 1;  // (k,l) = (k', l'+1): weight lands where l'+1 = 0
    const SimplexCoordinates out = phase_space_transform(c, map);
    REQUIRE(out.weights(0, 2) == 1.0);
    REQUIRE(out.total() == 1.0);
  }
  SECTION("spectrum of the state is preserved") {
    Rng rng(7);
    SimplexCoordinates c;
    c.d = 3;
    c.weights = RMatrix::Zero(3, 3);
    double total = 0;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) total += c.weights(k, l) = rng.uniform();
    c.weights /= total;
    PhaseSpaceMap map;
    map.m = 2;
    map.n = 1;
    map.p = 1;
    map.q = 1;  // det = 1 mod 3
    map.j = 1;
    map.r = 2;
    REQUIRE(map.det_mod(3) == 1);
    Eigen::SelfAdjointEigenSolver<CMatrix> e1(simplex_state(c),
                                              Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<CMatrix> e2(
        simplex_state(phase_space_transform(c, map)), Eigen::EigenvaluesOnly);
    RVector v1 = e1.eigenvalues(), v2 = e2.eigenvalues();
    std::sort(v1.data(), v1.data() + 9);
    std::sort(v2.data(), v2.data() + 9);
    REQUIRE((v1 - v2).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("disallowed determinant raises") {
    PhaseSpaceMap map;
    map.m = 0;
    map.q = 0;  // det 0
    REQUIRE_THROWS_AS(
        phase_space_transform(SimplexCoordinates::uniform(3), map),
        symmetry_violation);
  }
}
