#include <catch2/catch_amalgamated.hpp>

#include "bellgeo/optimize.hpp"
#include "bellgeo/rng.hpp"
#include "bellgeo/uparam.hpp"

using namespace bellgeo;

namespace {

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

ParamMatrix random_params(int d, Rng& rng) {
  ParamMatrix p = ParamMatrix::zero(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) p.lambda(i, j) = rng.uniform(0, kTwoPi);
  return p;
}

}  // namespace

TEST_CASE("elementary factor") {
  SECTION("zero angles give the identity") {
    REQUIRE(max_abs_diff(elementary_factor(3, 0, 2, 0, 0),
                         CMatrix::Identity(3, 3)) == 0.0);
  }
  SECTION("d=2 quarter rotation matches the displayed matrix") {
    const double s = 1 / std::sqrt(2.0);
    CMatrix expect(2, 2);
    expect << s, -s, s, s;
    REQUIRE(max_abs_diff(elementary_factor(2, 0, 1, kPi / 4, 0), expect) <
            1e-15);
  }
  SECTION("unitary for random angles") {
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
      const CMatrix f = elementary_factor(4, 1, 3, rng.uniform(0, kTwoPi),
                                          rng.uniform(0, kTwoPi));
      REQUIRE(max_abs_diff(f * f.adjoint(), CMatrix::Identity(4, 4)) < 1e-14);
    }
  }
  SECTION("index order is enforced") {
    REQUIRE_THROWS_AS(elementary_factor(3, 2, 1, 0.1, 0.2),
                      index_order_error);
    REQUIRE_THROWS_AS(elementary_factor(3, 1, 3, 0.1, 0.2),
                      invalid_dimension);
  }
}

TEST_CASE("composite unitary") {
  SECTION("all angles zero give the identity") {
    for (int d : {2, 3, 5})
      REQUIRE(max_abs_diff(
                  composite_unitary(ParamMatrix::zero(d), UForm::Reduced),
                  CMatrix::Identity(d, d)) == 0.0);
  }
  SECTION("d=2 reduced equals the single elementary factor") {
    ParamMatrix p = ParamMatrix::zero(2);
    p.lambda(0, 1) = 0.7;
    p.lambda(1, 0) = 1.9;
    REQUIRE(max_abs_diff(composite_unitary(p, UForm::Reduced),
                         elementary_factor(2, 0, 1, 0.7, 1.9)) < 1e-15);
  }
  SECTION("diagonal-only full form is the phase matrix") {
    ParamMatrix p = ParamMatrix::zero(3);
    p.lambda(0, 0) = 0.3;
    p.lambda(1, 1) = 1.1;
    p.lambda(2, 2) = 2.5;
    CMatrix expect = CMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
      expect(i, i) = std::polar(1.0, p.lambda(i, i));
    REQUIRE(max_abs_diff(composite_unitary(p, UForm::Full), expect) < 1e-15);
  }
  SECTION("full equals reduced times the diagonal phase block") {
    Rng rng(2);
    const ParamMatrix p = random_params(4, rng);
    CMatrix phases = CMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      phases(i, i) = std::polar(1.0, p.lambda(i, i));
    REQUIRE(max_abs_diff(composite_unitary(p, UForm::Full),
                         composite_unitary(p, UForm::Reduced) * phases) <
            1e-13);
  }
  SECTION("matches the explicit ordered product of factors") {
    Rng rng(3);
    const int d = 4;
    const ParamMatrix p = random_params(d, rng);
    CMatrix u = CMatrix::Identity(d, d);
    for (int m = 0; m < d - 1; ++m)
      for (int n = m + 1; n < d; ++n)
        u = u * elementary_factor(d, m, n, p.lambda(m, n), p.lambda(n, m));
    REQUIRE(max_abs_diff(composite_unitary(p, UForm::Reduced), u) < 1e-13);
  }
  SECTION("unitarity over random draws") {
    Rng rng(4);
    for (int d = 2; d <= 8; ++d)
      for (int t = 0; t < 100; ++t) {
        const CMatrix u = composite_unitary(random_params(d, rng),
                                            t % 2 ? UForm::Full
                                                  : UForm::Reduced);
        REQUIRE(max_abs_diff(u.adjoint() * u, CMatrix::Identity(d, d)) <
                1e-12);
      }
  }
  SECTION("subspace invariance of partial products") {
    // factors with first index >= m act as the identity on span{|0..m-1>}
    Rng rng(5);
    const int d = 5;
    const ParamMatrix p = random_params(d, rng);
    for (int m = 1; m < d - 1; ++m) {
      CMatrix u = CMatrix::Identity(d, d);
      for (int mm = m; mm < d - 1; ++mm)
        for (int n = mm + 1; n < d; ++n)
          u = u * elementary_factor(d, mm, n, p.lambda(mm, n),
                                    p.lambda(n, mm));
      REQUIRE(max_abs_diff(u.block(0, 0, m, m), CMatrix::Identity(m, m)) <
              1e-12);
      REQUIRE(u.block(m, 0, d - m, m).cwiseAbs().maxCoeff() < 1e-12);
      REQUIRE(u.block(0, m, m, d - m).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("parameter counts") {
  REQUIRE(parameter_count(2, UForm::Full) == 4);
  REQUIRE(parameter_count(3, UForm::Reduced) == 6);
  REQUIRE(parameter_count(2, UForm::Reduced) == 2);
  REQUIRE(parameter_count(8, UForm::Full) == 64);
  REQUIRE_THROWS_AS(parameter_count(1, UForm::Full), invalid_dimension);
}

TEST_CASE("canonicalize") {
  SECTION("in-range input is unchanged") {
    ParamMatrix p = ParamMatrix::zero(3);
    p.lambda(0, 1) = 0.3;   // rotation in [0, pi/2]
    p.lambda(1, 0) = 4.0;   // phase in [0, 2 pi]
    p.lambda(2, 2) = 1.0;
    const ParamMatrix q = canonicalize(p);
    REQUIRE((q.lambda - p.lambda).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("phases wrap mod 2 pi") {
    ParamMatrix p = ParamMatrix::zero(2);
    p.lambda(1, 0) = kTwoPi + 0.3;
    const ParamMatrix q = canonicalize(p);
    REQUIRE(q.lambda(1, 0) == Catch::Approx(0.3).margin(1e-12));
  }
  SECTION("rotations fold into [0, pi/2] keeping the factor up to column "
          "signs") {
    Rng rng(6);
    for (int t = 0; t < 200; ++t) {
      ParamMatrix p = ParamMatrix::zero(2);
      p.lambda(0, 1) = rng.uniform(-10, 10);
      p.lambda(1, 0) = rng.uniform(-10, 10);
      const ParamMatrix q = canonicalize(p);
      REQUIRE(q.lambda(0, 1) >= 0.0);
      REQUIRE(q.lambda(0, 1) <= kPi / 2 + 1e-12);
      const CMatrix f0 = composite_unitary(p, UForm::Reduced);
      const CMatrix f1 = composite_unitary(q, UForm::Reduced);
      // columns agree up to an overall sign each
      for (int c = 0; c < 2; ++c) {
        const double plus = (f0.col(c) - f1.col(c)).cwiseAbs().maxCoeff();
        const double minus = (f0.col(c) + f1.col(c)).cwiseAbs().maxCoeff();
        REQUIRE(std::min(plus, minus) < 1e-12);
      }
    }
  }
  SECTION("idempotent") {
    Rng rng(7);
    ParamMatrix p = ParamMatrix::zero(4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) p.lambda(i, j) = rng.uniform(-20, 20);
    const ParamMatrix q = canonicalize(p);
    const ParamMatrix q2 = canonicalize(q);
    REQUIRE((q.lambda - q2.lambda).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pack/unpack round trip") {
  Rng rng(8);
  const int d = 4;
  ParamMatrix p = ParamMatrix::zero(d);
  for (int m = 0; m < d - 1; ++m)
    for (int n = m + 1; n < d; ++n) {
      p.lambda(m, n) = rng.uniform(0, kPi / 2);
      p.lambda(n, m) = rng.uniform(0, kTwoPi);
    }
  const std::vector<double> x = pack_reduced(p);
  REQUIRE(static_cast<int>(x.size()) == parameter_count(d, UForm::Reduced));
  const ParamMatrix q = unpack_reduced(d, x);
  REQUIRE((q.lambda - p.lambda).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE_THROWS_AS(unpack_reduced(3, x), parameter_count_error);
}

TEST_CASE("reduced form reaches every orthonormal basis up to column phases") {
  Rng rng(9);
  for (int d : {2, 3}) {
    // random target basis from orthonormalizing a random complex matrix
    CMatrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        g(i, j) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const CMatrix v = Eigen::HouseholderQR<CMatrix>(g).householderQ();

    auto objective = [&](const std::vector<double>& x) {
      const CMatrix u = composite_unitary(unpack_reduced(d, x), UForm::Reduced);
      double s = 0;
      for (int i = 0; i < d; ++i) s += std::norm(v.col(i).dot(u.col(i)));
      return -s;
    };
    OptimizerConfig cfg;
    cfg.max_iterations = 4000;
    cfg.f_tolerance = 1e-14;
    cfg.x_tolerance = 1e-12;
    double best = -1e300;
    Rng starts(10);
    for (int t = 0; t < 8; ++t) {
      std::vector<double> x0(parameter_count(d, UForm::Reduced));
      for (auto& w : x0) w = starts.uniform(0, kTwoPi);
      auto [x, f] = nelder_mead(objective, x0, cfg);
      best = std::max(best, -f);
    }
    REQUIRE(best == Catch::Approx(d).margin(1e-6));
  }
}
