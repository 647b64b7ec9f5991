#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "hitchin/polyalg.hpp"
#include "hitchin/quadrature.hpp"

namespace hitchin {

/// A point (x, y) with y^2 = P(x).
struct CurvePoint {
  cplx x;
  cplx y;
};

/// The base curve y^2 = P(x), deg P = 2g + 1 >= 5, P squarefree.
/// Immutable after construction; construction throws InvalidCurve.
class HyperellipticCurve {
 public:
  explicit HyperellipticCurve(ComplexPoly p);

  const ComplexPoly& p() const { return p_; }
  const ComplexPoly& dp() const { return dp_; }
  int genus() const { return genus_; }
  /// Roots of P, lexicographically ordered.
  const std::vector<cplx>& branch_points() const { return branch_; }

  cplx eval(cplx x) const { return p_(x); }
  /// |y^2 - P(x)| <= tol · (1 + |P(x)|)
  bool contains(const CurvePoint& pt, double tol = 1e-9) const;

  cplx branch_center() const;
  double branch_radius() const;
  double branch_diameter() const;
  /// 1e-2 × diameter of the branch-point set.
  double default_clearance() const;
  /// A real-offset point at distance >= 1 from the convex hull of the branch points.
  cplx default_basepoint() const;

 private:
  ComplexPoly p_;
  ComplexPoly dp_;
  int genus_ = 0;
  std::vector<cplx> branch_;
};

std::vector<cplx> branch_points(const HyperellipticCurve& curve);

/// The two lifts (x, ±sqrt(P(x))), principal root first. Throws AtBranchPoint
/// within 1e-10 of a branch point.
std::array<CurvePoint, 2> lift_x(const HyperellipticCurve& curve, cplx x);

/// Piecewise-linear path in the x-plane.
struct XPath {
  std::vector<cplx> waypoints;
  double clearance = 0.0;

  cplx start() const { return waypoints.front(); }
  cplx end() const { return waypoints.back(); }
  double length() const;
  XPath reversed() const;
  /// This path followed by `next` (which must start where this one ends).
  XPath then(const XPath& next) const;
};

/// Minimum distance from any point of the polyline to `c`.
double path_distance(const XPath& path, cplx c);

/// Straight segment from `from` to `to` when it keeps `clearance` from every
/// branch point and obstacle; otherwise detours around each offending obstacle
/// cluster along circular arcs (<= 16 waypoints per cluster). Obstacles closer
/// than their arc radii are merged into one enclosing disk first.
/// Throws PathBlocked if an endpoint is within clearance of an obstacle or
/// inside a cluster disk that must be circumvented.
XPath plan_path(const HyperellipticCurve& curve, cplx from, cplx to, std::span<const cplx> obstacles,
                std::optional<double> clearance = std::nullopt);

/// Analytic continuation of y = sqrt(P(x)) along straight moves. Each step
/// keeps the square root closer to a first-order predictor and is halved
/// until that choice is unambiguous.
class YSheet {
 public:
  YSheet(const HyperellipticCurve& curve, CurvePoint start, double min_step);

  void advance_to(cplx x1);
  cplx x() const { return x_; }
  cplx y() const { return y_; }
  const HyperellipticCurve& curve() const { return *curve_; }

 private:
  const HyperellipticCurve* curve_;
  cplx x_;
  cplx y_;
  double min_step_;
};

/// y at the end of `path`, continued from y_start. Throws ContinuationStalled
/// when the step shrinks below 1e-12 of the path length.
cplx continue_y(const HyperellipticCurve& curve, const XPath& path, cplx y_start);

/// ∫ x^k dx / y along `path` with y continued from y_start, 0 <= k <= g - 1.
cplx abelian_integral(const HyperellipticCurve& curve, const XPath& path, cplx y_start, int k,
                      double tol = 1e-10);

}  // namespace hitchin
