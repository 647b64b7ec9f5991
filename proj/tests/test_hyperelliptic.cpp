#include "doctest.h"

#include <numbers>

#include "hitchin/errors.hpp"
#include "hitchin/hyperelliptic.hpp"
#include "oracles.hpp"

using namespace hitchin;
using oracle::cplx;

namespace {

const double kPi = std::numbers::pi;

HyperellipticCurve x5_plus_1() { return HyperellipticCurve(ComplexPoly{1.0, 0.0, 0.0, 0.0, 0.0, 1.0}); }
HyperellipticCurve x5_minus_x() { return HyperellipticCurve(ComplexPoly{0.0, -1.0, 0.0, 0.0, 0.0, 1.0}); }

// Closed polygon approximating a circle.
XPath circle(cplx center, double r, int n = 64) {
  XPath p;
  for (int k = 0; k <= n; ++k) p.waypoints.push_back(center + r * std::polar(1.0, 2.0 * kPi * k / n));
  p.waypoints.back() = p.waypoints.front();
  p.clearance = 1e-3;
  return p;
}

std::vector<cplx> coeffs(const HyperellipticCurve& c) { return {c.p().coeffs().begin(), c.p().coeffs().end()}; }

}  // namespace

TEST_CASE("curve validation") {
  CHECK(x5_plus_1().genus() == 2);
  CHECK(HyperellipticCurve(ComplexPoly(oracle::expand_roots({1, 2, 3, 4, 5, 6, 7}))).genus() == 3);
  CHECK_THROWS_AS(HyperellipticCurve(ComplexPoly{1.0, 0.0, 0.0, 1.0}), Error);                  // degree 3
  CHECK_THROWS_AS(HyperellipticCurve(ComplexPoly{1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0}), Error);  // even degree
  CHECK_THROWS_AS(HyperellipticCurve(ComplexPoly(oracle::expand_roots({1, 1, 2, 3, 4}))), Error);  // repeated root
}

TEST_CASE("branch points") {
  std::vector<cplx> fifth;
  for (int k = 0; k < 5; ++k) fifth.push_back(std::polar(1.0, kPi * (2 * k + 1) / 5.0));
  CHECK(oracle::matched_distance(branch_points(x5_plus_1()), fifth) < 1e-12);
  CHECK(oracle::matched_distance(branch_points(x5_minus_x()), {0.0, 1.0, -1.0, cplx(0, 1), cplx(0, -1)}) < 1e-12);
  const HyperellipticCurve planted(ComplexPoly(oracle::expand_roots({1, 2, 3, 4, 5})));
  const auto bp = branch_points(planted);
  CHECK(oracle::matched_distance(bp, {1.0, 2.0, 3.0, 4.0, 5.0}) < 1e-9);
  CHECK(bp == planted.branch_points());
}

TEST_CASE("lift_x") {
  const auto l = lift_x(x5_plus_1(), 0.0);
  CHECK(l[0].y == cplx(1.0));
  CHECK(l[1].y == cplx(-1.0));
  CHECK_THROWS_AS(lift_x(x5_plus_1(), -1.0), Error);
  try {
    lift_x(x5_plus_1(), -1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AtBranchPoint);
  }
  const auto m = lift_x(x5_minus_x(), 2.0);
  CHECK(std::abs(m[0].y - std::sqrt(30.0)) < 1e-14);
  CHECK(std::abs(m[1].y + std::sqrt(30.0)) < 1e-14);
  CHECK(x5_minus_x().contains(m[1]));
  CHECK(!x5_minus_x().contains({2.0, 5.0}));
}

TEST_CASE("basepoint and clearance defaults") {
  const auto c = x5_plus_1();
  CHECK(c.default_clearance() == doctest::Approx(1e-2 * c.branch_diameter()));
  // at distance >= 1 from the convex hull, hence from every branch point
  for (cplx b : c.branch_points()) CHECK(std::abs(c.default_basepoint() - b) >= 1.0);
}

TEST_CASE("plan_path") {
  const auto c = x5_plus_1();
  const std::vector<cplx> none;
  const XPath direct = plan_path(c, 0.0, 0.5, none);
  CHECK(direct.waypoints.size() == 2);

  const std::vector<cplx> obs{cplx(0.25, 0.0)};
  const XPath around = plan_path(c, 0.0, 0.5, obs, 0.1);
  CHECK(around.waypoints.front() == cplx(0.0));
  CHECK(around.waypoints.back() == cplx(0.5));
  CHECK(path_distance(around, obs[0]) >= 0.1 - 1e-12);
  for (cplx b : c.branch_points()) CHECK(path_distance(around, b) >= 0.1 - 1e-12);
  CHECK(around.waypoints.size() <= 2 + 17);

  // endpoint within clearance of a branch point
  const cplx b0 = c.branch_points()[0];
  CHECK_THROWS_AS(plan_path(c, b0 + 1e-4, 0.0, none), Error);
}

TEST_CASE("continue_y: identity, monodromy and reversal") {
  const auto c = x5_plus_1();
  const XPath constant{{0.0, 0.0}, 1e-3};
  CHECK(continue_y(c, constant, 1.0) == cplx(1.0));

  // one branch point inside (x = -1), the others at distance >= 0.6
  const XPath one = circle(-1.0, 0.3);
  const cplx y0 = lift_x(c, one.start())[0].y;
  CHECK(std::abs(continue_y(c, one, y0) + y0) < 1e-12 * std::abs(y0) + 1e-14);

  // two branch points e^{±iπ/5} inside
  const XPath two = circle(std::cos(kPi / 5.0), 0.75);
  const cplx y1 = lift_x(c, two.start())[0].y;
  CHECK(std::abs(continue_y(c, two, y1) - y1) < 1e-12 * std::abs(y1));

  // none inside
  const XPath zero = circle(3.0, 0.5);
  const cplx y2 = lift_x(c, zero.start())[0].y;
  CHECK(std::abs(continue_y(c, zero, y2) - y2) < 1e-12 * std::abs(y2));
}

TEST_CASE("abelian integrals against a Simpson oracle") {
  const auto c = x5_plus_1();
  const XPath path{{cplx(2.0, 0.5), cplx(0.0, 1.5), cplx(-0.3, 0.2)}, 1e-2};
  const cplx y0 = lift_x(c, path.start())[0].y;
  for (int k = 0; k < 2; ++k) {
    const cplx got = abelian_integral(c, path, y0, k);
    const cplx want = oracle::abelian_simpson(coeffs(c), path.waypoints, y0, k);
    CHECK(std::abs(got - want) < 1e-9);
  }
  CHECK_THROWS_AS(abelian_integral(c, path, y0, 2), Error);  // not holomorphic for g = 2
}

TEST_CASE("abelian integral laws") {
  const auto c = x5_plus_1();
  const XPath zero{{cplx(2.0, 0.0), cplx(2.0, 0.0)}, 1e-2};
  CHECK(abelian_integral(c, zero, lift_x(c, 2.0)[0].y, 0) == cplx(0.0));

  const XPath fwd{{cplx(2.0, 0.0), cplx(0.3, 0.4)}, 1e-2};
  const cplx y0 = lift_x(c, fwd.start())[0].y;
  const XPath there_and_back = fwd.then(fwd.reversed());
  CHECK(std::abs(abelian_integral(c, there_and_back, y0, 0)) < 1e-9);

  // additivity at an intermediate point
  const XPath first{{cplx(2.0, 0.0), cplx(1.0, 1.0)}, 1e-2};
  const XPath second{{cplx(1.0, 1.0), cplx(0.3, 0.4)}, 1e-2};
  const cplx y_mid = continue_y(c, first, y0);
  const cplx whole = abelian_integral(c, first.then(second), y0, 1);
  const cplx parts = abelian_integral(c, first, y0, 1) + abelian_integral(c, second, y_mid, 1);
  CHECK(std::abs(whole - parts) < 1e-9);

  // homotopic paths: two routes between the same points not separated by a branch point
  const XPath upper{{cplx(2.0, 0.0), cplx(2.0, 1.0), cplx(0.3, 0.4)}, 1e-2};
  const XPath lower{{cplx(2.0, 0.0), cplx(1.2, -0.1), cplx(0.3, 0.4)}, 1e-2};
  CHECK(std::abs(abelian_integral(c, upper, y0, 0) - abelian_integral(c, lower, y0, 0)) < 1e-8);

  // a loop around one branch point picks up a nonzero period, stable under deformation
  const XPath loop_a = circle(-1.0, 0.3), loop_b = circle(-1.0, 0.45, 96);
  const XPath to_a{{cplx(2.0, 0.0), loop_a.start()}, 1e-2}, to_b{{cplx(2.0, 0.0), loop_b.start()}, 1e-2};
  auto around = [&](const XPath& to, const XPath& loop) {
    return abelian_integral(c, to.then(loop).then(to.reversed()), y0, 0);
  };
  const cplx pa = around(to_a, loop_a), pb = around(to_b, loop_b);
  CHECK(std::abs(pa) > 1e-2);
  CHECK(std::abs(pa - pb) < 1e-8);
}

TEST_CASE("YSheet follows the sheet along a path") {
  const auto c = x5_minus_x();
  YSheet s(c, lift_x(c, 2.0)[1], 1e-12);
  s.advance_to(cplx(2.0, 1.0));
  s.advance_to(cplx(0.5, 1.5));
  const cplx want = [&] {
    cplx y = lift_x(c, 2.0)[1].y;
    for (int i = 1; i <= 20000; ++i) {
      const double t = i / 20000.0;
      const cplx x = t <= 0.5 ? cplx(2.0, 2.0 * t) : cplx(2.0 - 3.0 * (t - 0.5), 1.0 + (t - 0.5));
      const cplx r = std::sqrt(c.eval(x));
      y = std::abs(r - y) < std::abs(r + y) ? r : -r;
    }
    return y;
  }();
  CHECK(std::abs(s.y() - want) < 1e-12);
}
