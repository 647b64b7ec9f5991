#include "doctest.h"

#include <Eigen/LU>
#include <algorithm>

#include "hitchin/canonicity.hpp"
#include "hitchin/errors.hpp"
#include "oracles.hpp"

using namespace hitchin;
using oracle::cplx;

namespace {

const RootSystem kD2{Family::D, 2};

SampledInstance conditioned(std::uint64_t seed) {
  SampleOptions so;
  so.max_condition = 100.0;
  return sample_instance(kD2, 2, seed, so);
}

cplx basepoint_of(const SampledInstance& inst) {
  return default_angle_basepoint(SpectralCurveModel(kD2, inst.curve, inst.h));
}

// Brute-force real symplectic form, written independently of the library:
// ω(u, v) = Re Σ_i (dλ_i(u) dx̃_i(v) - dλ_i(v) dx̃_i(u)) for the holomorphic
// form Σ dλ ∧ dx̃ in real coordinates (Re z, Im z) ordered as the library's
// columns (Re λ, Re x̃, Im λ, Im x̃).
Eigen::MatrixXd real_omega(int n) {
  const int m = 4 * n;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
  auto dz = [&](int col, int k, bool is_x) {  // complex differential of coordinate k at basis vector col
    const int re = (is_x ? n : 0) + k, im = 2 * n + (is_x ? n : 0) + k;
    if (col == re) return cplx(1.0, 0.0);
    if (col == im) return cplx(0.0, 1.0);
    return cplx(0.0);
  };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) s += dz(a, k, false) * dz(b, k, true) - dz(b, k, false) * dz(a, k, true);
      w(a, b) = s.real();
    }
  return w;
}

}  // namespace

TEST_CASE("real symplectic form matches the holomorphic two-form") {
  for (int n : {1, 3, 6}) CHECK((real_symplectic_form(n) - real_omega(n)).cwiseAbs().maxCoeff() == 0.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(8, 8);
  CHECK(symplectic_defect_of(m) == 0.0);
  m(0, 1) = 1e-3;
  CHECK(symplectic_defect_of(m) > 0.0);
}

TEST_CASE("canonical chart") {
  const auto inst = conditioned(1);
  const cplx x0 = basepoint_of(inst);
  const SpectralCurveModel model(kD2, inst.curve, inst.h);
  const auto obs = angle_obstacles(model);
  const CanonicalChart chart = canonical_chart(inst.curve, inst.divisor, x0, obs);
  REQUIRE(chart.pairs.size() == 6);
  const auto pc = inst.curve.p().coeffs();
  const std::vector<cplx> p(pc.begin(), pc.end());
  for (size_t i = 0; i < 6; ++i) {
    CHECK(chart.pairs[i].lambda == inst.divisor.points[i].lambda);
    // re-integration reproduces x̃
    CHECK(std::abs(abelian_integral(inst.curve, chart.paths[i], chart.y_base[i], 0) - chart.pairs[i].x_tilde) < 1e-9);
    // and an independent Simpson integration agrees
    CHECK(std::abs(oracle::abelian_simpson(p, chart.paths[i].waypoints, chart.y_base[i], 0) - chart.pairs[i].x_tilde) <
          1e-8);
    // the path really ends on y_i
    CHECK(std::abs(continue_y(inst.curve, chart.paths[i], chart.y_base[i]) - inst.divisor.points[i].at.y) < 1e-10);
  }

  // all points at the basepoint
  SpectralDivisor at_base;
  const CurvePoint b = lift_x(inst.curve, x0)[0];
  for (int k = 0; k < 6; ++k) at_base.points.push_back({model.lambda_fiber(b)[0], b});
  for (const auto& cp : canonical_chart(inst.curve, at_base, x0, obs).pairs) CHECK(cp.x_tilde == cplx(0.0));
}

TEST_CASE("x̃ moves by δx / y") {
  const auto inst = conditioned(2);
  const auto& p = inst.divisor.points[0];
  const double h = 1e-5;
  for (cplx dir : {cplx(1, 0), cplx(0, 1)}) {
    // central difference of x̃ across the point
    const XPath fwd{{p.at.x, p.at.x + h * dir}, 1e-3}, bwd{{p.at.x, p.at.x - h * dir}, 1e-3};
    const cplx dxt = abelian_integral(inst.curve, fwd, p.at.y, 0, 1e-13) - abelian_integral(inst.curve, bwd, p.at.y, 0, 1e-13);
    CHECK(std::abs(dxt / (2.0 * h * dir) - 1.0 / p.at.y) <= 1e-5 * std::abs(1.0 / p.at.y));
  }
}

TEST_CASE("x̃ inversion") {
  const auto inst = conditioned(3);
  for (const auto& p : inst.divisor.points) {
    for (cplx delta : {cplx(1e-4, 0), cplx(0, -2e-5), cplx(3e-5, 3e-5)}) {
      const CurvePoint q = invert_x_tilde(inst.curve, p.at, delta);
      CHECK(inst.curve.contains(q));
      const XPath seg{{p.at.x, q.x}, 1e-3};
      CHECK(std::abs(abelian_integral(inst.curve, seg, p.at.y, 0, 1e-13) - delta) <= 1e-11);
      CHECK(std::abs(continue_y(inst.curve, seg, p.at.y) - q.y) < 1e-12 * (1.0 + std::abs(q.y)));
    }
    CHECK(invert_x_tilde(inst.curve, p.at, 0.0).x == p.at.x);
  }
}

TEST_CASE("Hamiltonian block against implicit differentiation") {
  const auto inst = conditioned(4);
  const cplx x0 = basepoint_of(inst);
  const CanonicalMap map(kD2, inst.curve, inst.divisor, x0, inst.h);
  const Eigen::MatrixXd jac = real_jacobian(map, 1e-5);
  const Eigen::MatrixXcd fd = complex_h_block(jac, 6);

  // Independent oracle: so(4) partials written out, dx = y dx̃.
  const Eigen::VectorXcd h = map.model().h().flat();
  Eigen::MatrixXcd a(6, 6), rhs = Eigen::MatrixXcd::Zero(6, 12);
  for (int i = 0; i < 6; ++i) {
    const auto& pt = inst.divisor.points[static_cast<size_t>(i)];
    const cplx x = pt.at.x, l = pt.lambda;
    const cplx pf = h(0) + x * h(1) + x * x * h(2), q = h(3) + x * h(4) + x * x * h(5);
    a.row(i) << 2.0 * pf, 2.0 * x * pf, 2.0 * x * x * pf, l * l, l * l * x, l * l * x * x;
    const cplx dl = 4.0 * l * l * l + 2.0 * l * q;
    const cplx dx = 2.0 * pf * (h(1) + 2.0 * x * h(2)) + l * l * (h(4) + 2.0 * x * h(5));
    rhs(i, i) = -dl;
    rhs(i, 6 + i) = -dx * pt.at.y;
  }
  const Eigen::MatrixXcd want = a.partialPivLu().solve(rhs);
  CHECK((fd - want).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + want.cwiseAbs().maxCoeff()));
  CHECK((implicit_h_jacobian(map.model(), inst.divisor) - want).cwiseAbs().maxCoeff() <=
        1e-10 * (1.0 + want.cwiseAbs().maxCoeff()));
}

TEST_CASE("symplectic defect and its step-halving trend") {
  for (std::uint64_t seed : {0u, 1u}) {
    const auto inst = conditioned(seed);
    const cplx x0 = basepoint_of(inst);
    const CanonicalMap map(kD2, inst.curve, inst.divisor, x0, inst.h);
    const SymplecticReport r = symplectic_defect(map, 1e-5);
    CHECK(r.defect <= 1e-3);
    REQUIRE(r.halving_ratios.size() == 2);
    for (double q : r.halving_ratios) {
      CHECK(q >= 2.0);
      CHECK(q <= 8.0);
    }
    // the same number from the brute-force form
    const Eigen::MatrixXd w = real_omega(6);
    const Eigen::MatrixXd d = r.jacobian.transpose() * w * r.jacobian - w;
    CHECK(d.cwiseAbs().rowwise().sum().maxCoeff() == doctest::Approx(r.defect).epsilon(1e-12));
  }
}

TEST_CASE("relabeling and constant shifts leave the defect unchanged") {
  const auto inst = conditioned(5);
  const cplx x0 = basepoint_of(inst);
  const CanonicalMap map(kD2, inst.curve, inst.divisor, x0, inst.h);
  const Eigen::MatrixXd jac = real_jacobian(map, 1e-5);
  const double d0 = symplectic_defect_of(jac);

  SampledInstance shuffled = inst;
  std::vector<int> perm{3, 0, 5, 1, 4, 2};
  for (size_t i = 0; i < 6; ++i) shuffled.divisor.points[i] = inst.divisor.points[static_cast<size_t>(perm[i])];
  const CanonicalMap map2(kD2, inst.curve, shuffled.divisor, x0, inst.h);
  CHECK(std::abs(symplectic_defect_of(real_jacobian(map2, 1e-5)) - d0) <= 1e-10);

  // φ + c: the Jacobian is built from differences, so a constant never enters
  const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(12);
  const Eigen::VectorXcd base = map.evaluate(zero);
  CHECK((base.tail(6) - map.base_angles().phi).cwiseAbs().maxCoeff() <= 1e-13);  // summation order only
}

TEST_CASE("conjugacy residual") {
  const auto inst = conditioned(6);
  const cplx x0 = basepoint_of(inst);
  const SpectralCurveModel model(kD2, inst.curve, inst.h);
  const Eigen::MatrixXd c = conjugacy_residual(model, inst.divisor, x0);
  const double scale = divisor_scale(model, inst.divisor);
  CHECK(c.maxCoeff() <= 1e-5 * scale);

  // doubling the quadrature tolerance degrades the entries by a bounded factor
  CanonicityOptions loose;
  loose.angle.tol_quad = 2e-9;
  const Eigen::MatrixXd c2 = conjugacy_residual(model, inst.divisor, x0, loose);
  CHECK(c2.maxCoeff() <= std::max(10.0 * c.maxCoeff(), 1e-9));
}

TEST_CASE("conjugacy at a Pfaffian root") {
  // Where H1 + x H2 + x² H3 = 0, R'_{H_1} vanishes and entry (i, 1) reduces to
  // |∂φ_1/∂x̃_i|. Such x is a collision point of the λ = 0 sheets, so it is in
  // the obstacle list; the point sits on a nonzero sheet, which the collision
  // does not touch, and its own root is dropped from the obstacles here.
  const auto inst = conditioned(7);
  const SpectralCurveModel model(kD2, inst.curve, inst.h);
  const Eigen::VectorXcd h = model.h().flat();
  const auto zs = quadratic_roots(h(0), h(1), h(2));
  const cplx x0 = basepoint_of(inst);
  int checked = 0;
  for (cplx xr : zs) {
    std::vector<cplx> obs;
    for (cplx o : angle_obstacles(model))
      if (std::abs(o - xr) > 1e-9) obs.push_back(o);
    const CurvePoint pt = lift_x(inst.curve, xr)[0];
    const auto fib = model.lambda_fiber(pt);
    const cplx lam = *std::max_element(fib.begin(), fib.end(), [](cplx u, cplx v) { return std::abs(u) < std::abs(v); });
    PathPlan plan;
    try {
      plan = plan_point(model, {lam, pt}, x0, obs);
    } catch (const Error& e) {
      MESSAGE("skipped Pfaffian root: " << e.what());
      continue;
    }
    CHECK(std::abs(integrand(model, 0, lam, pt)) <= 1e-12);
    const auto& w = plan.path.waypoints;
    const cplx dir = (w.back() - w[w.size() - 2]) / std::abs(w.back() - w[w.size() - 2]);
    const double step = 1e-5;
    auto phi_at = [&](double t) {
      PathPlan p = plan;
      p.path.waypoints.back() = w.back() + t * dir;
      return angle_coordinates_on_paths(model, {p}, x0).phi;
    };
    // ∂/∂x̃ = y ∂/∂x
    const cplx d1 = pt.y * (phi_at(step)(0) - phi_at(-step)(0)) / (2.0 * step * dir);
    CHECK(std::abs(d1) <= 1e-5);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("map rejects an inconsistent H") {
  const auto inst = conditioned(8);
  Eigen::VectorXcd bad = inst.h.flat();
  bad(0) += 0.1;
  CHECK_THROWS_AS(CanonicalMap(kD2, inst.curve, inst.divisor, basepoint_of(inst),
                               HamiltonianVector::from_flat(kD2, 2, bad)),
                  Error);
}
