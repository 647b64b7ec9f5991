#include "doctest.h"

#include <Eigen/LU>

#include "hitchin/errors.hpp"
#include "hitchin/sov.hpp"
#include "oracles.hpp"

using namespace hitchin;
using oracle::cplx;

namespace {

const RootSystem kD2{Family::D, 2};

double max_diff(const HamiltonianVector& a, const HamiltonianVector& b) {
  return (a.flat() - b.flat()).cwiseAbs().maxCoeff();
}

// Residual of the written-out so(4) equations, scaled like the library's.
double so4_residual(const HamiltonianVector& h, const SpectralDivisor& d) {
  const Eigen::VectorXcd f = h.flat();
  const std::vector<cplx> hv(f.data(), f.data() + 6);
  double worst = 0.0, scale = 1.0;
  for (const auto& p : d.points) {
    worst = std::max(worst, std::abs(oracle::so4_R(hv, p.lambda, p.at.x)));
    const cplx x = p.at.x, l = p.lambda;
    const double mag = std::pow(std::abs(l), 4) + std::abs(hv[3] + x * hv[4] + x * x * hv[5]) * std::norm(l) +
                       std::norm(hv[0] + x * hv[1] + x * x * hv[2]);
    scale = std::max(scale, 1.0 + mag);
  }
  return worst / scale;
}

// Divisor for λ⁴ + c λ² = 0 on the nonzero sheets, at fixed x.
SpectralDivisor pure_quadratic_divisor(const HyperellipticCurve& curve, cplx c) {
  SpectralDivisor d;
  const cplx lam = std::sqrt(-c);
  for (int k = 0; k < 6; ++k) {
    const cplx x(-0.7 + 0.28 * k, 0.35 - 0.1 * k);
    d.points.push_back({k % 2 ? lam : -lam, lift_x(curve, x)[k % 2]});
  }
  return d;
}

}  // namespace

TEST_CASE("sampler: determinism, membership, separation") {
  const auto a = sample_instance(kD2, 2, 17), b = sample_instance(kD2, 2, 17);
  REQUIRE(a.divisor.size() == 6);
  for (size_t i = 0; i < 6; ++i) {
    CHECK(a.divisor.points[i].lambda == b.divisor.points[i].lambda);
    CHECK(a.divisor.points[i].at.x == b.divisor.points[i].at.x);
    CHECK(a.divisor.points[i].at.y == b.divisor.points[i].at.y);
  }
  const SpectralCurveModel model(kD2, a.curve, a.h);
  for (size_t i = 0; i < 6; ++i) {
    const auto& p = a.divisor.points[i];
    CHECK(std::abs(model.eval(p.lambda, p.at)) <= 1e-10 * model.scale_at(p.lambda, p.at));
    CHECK(a.curve.contains(p.at));
    for (size_t j = i + 1; j < 6; ++j) CHECK(std::abs(p.at.x - a.divisor.points[j].at.x) > 1e-8);
  }
  const auto r = residuals(model, a.divisor);
  CHECK(r.scaled_max <= 1e-10);
}

TEST_CASE("sampler condition bound") {
  SampleOptions so;
  so.max_condition = 100.0;
  for (std::uint64_t seed : {3u, 9u, 14u}) {
    const auto inst = sample_instance(kD2, 2, seed, so);
    const SpectralCurveModel model(kD2, inst.curve, inst.h);
    // independent: SVD of the explicit so(4) Jacobian
    Eigen::MatrixXcd j(6, 6);
    const Eigen::VectorXcd h = model.h().flat();
    for (int i = 0; i < 6; ++i) {
      const auto& p = inst.divisor.points[static_cast<size_t>(i)];
      const cplx x = p.at.x, pf = h(0) + x * h(1) + x * x * h(2), l2 = p.lambda * p.lambda;
      j.row(i) << 2.0 * pf, 2.0 * x * pf, 2.0 * x * x * pf, l2, l2 * x, l2 * x * x;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(j);
    CHECK(svd.singularValues()(0) / svd.singularValues()(5) <= 100.0 * (1.0 + 1e-9));
    CHECK(divisor_condition(model, inst.divisor) == doctest::Approx(svd.singularValues()(0) / svd.singularValues()(5)));
  }
}

TEST_CASE("residuals") {
  const auto inst = sample_instance(kD2, 2, 5);
  const auto zero = residuals(kD2, inst.curve, HamiltonianVector::zeros(kD2, 2), inst.divisor);
  double l4 = 0.0;
  for (const auto& p : inst.divisor.points) l4 = std::max(l4, std::pow(std::abs(p.lambda), 4));
  CHECK(zero.max == doctest::Approx(l4).epsilon(1e-12));
  CHECK(zero.scaled_max == doctest::Approx(l4 / zero.scale));
  CHECK(zero.scaled_max > 0.0);
  // negating the Pfaffian block changes nothing
  const auto plus = residuals(kD2, inst.curve, inst.h, inst.divisor);
  const HamiltonianVector neg = inst.h.with_pfaffian_negated();
  const Eigen::VectorXcd nf = neg.flat();
  std::vector<cplx> nv(nf.data(), nf.data() + 6);
  for (size_t i = 0; i < 6; ++i) {
    const auto& p = inst.divisor.points[i];
    CHECK(std::abs(std::abs(oracle::so4_R(nv, p.lambda, p.at.x)) - plus.values[i]) <= 1e-12 * plus.scale);
  }
}

TEST_CASE("radical pipeline: stage invariants") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = sample_instance(kD2, 2, seed);
    const So4Elimination el(inst.divisor);
    const Eigen::VectorXcd h = inst.h.flat();

    // stage 1: H4..H6 from the linear rows reproduce the truth
    const Eigen::Vector3cd h456 = el.h456(h.head<3>());
    CHECK((h456 - h.tail<3>()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + h.cwiseAbs().maxCoeff()));

    // stage 3: diagonal
    const auto& dg = el.diagonalized();
    CHECK(dg.stage == EliminationStage::Diagonalized);
    const double na = dg.a.cwiseAbs().maxCoeff();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) CHECK(std::abs(dg.a(i, j)) <= 1e-12 * na);

    // stage 4: equal right sides
    const auto eq = el.equalized();
    CHECK(std::abs(eq.rhs(0) - eq.rhs(1)) <= 1e-12 * std::abs(eq.rhs(0)));
    CHECK(std::abs(eq.rhs(0) - eq.rhs(2)) <= 1e-12 * std::abs(eq.rhs(0)));

    // the truth satisfies every stage's system
    auto check_state = [&](const EliminationState& s) {
      const Eigen::Vector3cd sq(h(0) * h(0), h(1) * h(1), h(2) * h(2));
      const Eigen::Vector3cd cross(h(0) * h(1), h(0) * h(2), h(1) * h(2));
      const Eigen::Vector3cd lhs = s.a * sq + s.b * cross;
      CHECK((lhs - s.rhs).cwiseAbs().maxCoeff() <=
            1e-9 * (1.0 + s.rhs.cwiseAbs().maxCoeff() + (s.a.cwiseAbs().maxCoeff() + s.b.cwiseAbs().maxCoeff()) *
                                                             std::pow(h.head<3>().cwiseAbs().maxCoeff(), 2)));
    };
    check_state(el.quadratic());
    check_state(el.diagonalized());
    check_state(el.homogenized());
    CHECK(el.homogenized().rhs.cwiseAbs().maxCoeff() == std::abs(el.homogenized().rhs(el.pivot())));

    // stage 7: each role's quartic vanishes at the true ratio
    for (int role = 0; role < 3; ++role) {
      if (std::abs(h(role)) < 1e-3) continue;
      const ComplexPoly q = el.quartic(role);
      if (q.is_zero()) continue;
      const int w = role == 2 ? 1 : 2;  // t_w: the larger of the other two indices
      const cplx t = h(w) / h(role);
      double mag = 0.0;
      for (int k = 0; k <= q.degree(); ++k) mag += std::abs(q[k]) * std::pow(std::abs(t), k);
      CHECK(std::abs(q(t)) <= 1e-8 * mag);
    }
  }
}

TEST_CASE("radical pipeline: roundtrip and Newton agreement") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto inst = sample_instance(kD2, 2, seed);
    const SolutionSet s = solve_so4_radicals(inst.curve, inst.divisor);
    CHECK(s.method == "radicals");
    double best = 1e300;
    for (const Candidate& c : s.candidates) {
      CHECK(c.residual <= 1e-8);
      CHECK(so4_residual(c.h, inst.divisor) <= 1e-8);
      best = std::min(best, max_diff(c.h, inst.h));
    }
    // six points generally lie on several D2 spectral curves; the generator
    // is one of the candidates, not necessarily the first
    CHECK(best <= 1e-7);

    Eigen::VectorXcd seedv = inst.h.flat();
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 6; ++k) seedv(k) += 1e-3 * oracle::random_in_disk(rng) / std::sqrt(6.0);
    const SolutionSet n = solve_newton(kD2, inst.curve, inst.divisor, HamiltonianVector::from_flat(kD2, 2, seedv));
    REQUIRE(n.candidates.size() == 1);
    CHECK(max_diff(n.best().h, inst.h) <= 1e-9);
    double to_newton = 1e300;
    for (const Candidate& c : s.candidates) to_newton = std::min(to_newton, max_diff(c.h, n.best().h));
    CHECK(to_newton <= 1e-7);
  }
}

TEST_CASE("radical pipeline: pure degree-2 block goes through the homogeneous branch") {
  const HyperellipticCurve curve(ComplexPoly(oracle::expand_roots({-1.0, -0.4, 0.3, cplx(0.1, 0.8), cplx(0.2, -0.9)})));
  const SpectralDivisor d = pure_quadratic_divisor(curve, 1.0);
  const So4Elimination el(d);
  CHECK(el.homogeneous_system());
  CHECK(el.rank_deficient());
  const SolutionSet s = solve_so4_radicals(curve, d);
  const Eigen::VectorXcd want = (Eigen::VectorXcd(6) << 0, 0, 0, 1, 0, 0).finished();
  CHECK((s.best().h.flat() - want).cwiseAbs().maxCoeff() <= 1e-9);

  // λ² = -1 at six points only asks for q ≡ 1 + pf², so the divisor fixes H
  // up to (a, b, 0, 1 + a², 2ab, b²); the pipeline reports the a = b = 0 member
  for (cplx a : {cplx(0.3, 0.1), cplx(-1.0, 0.5)}) {
    const cplx b(0.2, -0.7);
    const Eigen::VectorXcd other = (Eigen::VectorXcd(6) << a, b, 0, 1.0 + a * a, 2.0 * a * b, b * b).finished();
    CHECK(so4_residual(HamiltonianVector::from_flat(kD2, 2, other), d) <= 1e-12);
  }
}

TEST_CASE("radical pipeline: degenerate divisors") {
  const HyperellipticCurve curve(ComplexPoly(oracle::expand_roots({-1.0, -0.4, 0.3, cplx(0.1, 0.8), cplx(0.2, -0.9)})));
  SpectralDivisor zero;
  for (int k = 0; k < 6; ++k) zero.points.push_back({0.0, lift_x(curve, cplx(-0.6 + 0.25 * k, 0.1))[0]});
  try {
    solve_so4_radicals(curve, zero);
    FAIL("expected DegenerateDivisor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDivisor);
  }

  auto inst = sample_instance(kD2, 2, 8);
  inst.divisor.points[4] = inst.divisor.points[1];  // repeated x
  CHECK_THROWS_AS(So4Elimination{inst.divisor}, Error);

  SpectralDivisor five = sample_instance(kD2, 2, 8).divisor;
  five.points.pop_back();
  CHECK_THROWS_AS(solve_so4_radicals(curve, five), Error);
}

TEST_CASE("Newton: fixed point and divergence") {
  const auto inst = sample_instance(kD2, 2, 41);
  const SolutionSet s = solve_newton(kD2, inst.curve, inst.divisor, inst.h);
  CHECK(max_diff(s.best().h, inst.h) <= 1e-14);

  SolverOptions few;
  few.max_iterations = 1;
  Eigen::VectorXcd far = inst.h.flat();
  far(0) += 2.0;  // the Pfaffian block enters quadratically, so one step cannot land
  far(2) -= 1.5;
  CHECK_THROWS_AS(solve_newton(kD2, inst.curve, inst.divisor, HamiltonianVector::from_flat(kD2, 2, far), few), Error);
}

TEST_CASE("Newton at rank 3") {
  const RootSystem d3{Family::D, 3};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto inst = sample_instance(d3, 2, seed);
    REQUIRE(inst.divisor.size() == 15);
    Eigen::VectorXcd start = inst.h.flat();
    std::mt19937_64 rng(seed + 77);
    for (int k = 0; k < start.size(); ++k) start(k) += 1e-4 * oracle::random_in_disk(rng);
    const SolutionSet s = solve_newton(d3, inst.curve, inst.divisor, HamiltonianVector::from_flat(d3, 2, start));
    CHECK(max_diff(s.best().h, inst.h) <= 1e-8);
  }
}
