#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hitchin/quadrature.hpp"
#include "hitchin/sov.hpp"
#include "hitchin/spectral.hpp"

namespace hitchin {

/// R'_{H_j} / (y R'_λ) at a point of the spectral curve. Throws
/// NearDiscriminant when |R'_λ| <= 1e-12 · scale.
cplx integrand(const SpectralCurveModel& model, int j, cplx lambda, const CurvePoint& pt);
/// All N components at once (they share R'_λ and y).
Eigen::VectorXcd integrand_all(const SpectralCurveModel& model, cplx lambda, const CurvePoint& pt);

struct AngleOptions {
  double tol_quad = 1e-9;
  std::optional<double> clearance;  // default: the curve's
  double match_tol = 1e-6;          // endpoint matching of λ
  int threads = 0;
};

/// Integration path for one divisor point, with the sheet data it starts on.
struct PathPlan {
  XPath path;
  cplx y_base;
  cplx lambda_base;
  std::optional<PanelLayout> layout;  // frozen panels, if any
};

struct PathRecord {
  PathPlan plan;
  PanelLayout layout;            // panels actually used
  Eigen::VectorXcd contribution; // -∫ integrand dx along this path
  cplx lambda_end;
  cplx y_end;
};

/// φ with the basepoint and per-point path records it depends on.
struct AngleVector {
  Eigen::VectorXcd phi;
  cplx basepoint;
  std::vector<PathRecord> paths;
};

/// One quadrature node of a trace: global t in [0, 1] along the path.
struct TraceRow {
  int path = 0;
  double t = 0.0;
  cplx x, y, lambda;
  Eigen::VectorXcd values;
};

/// Obstacles for integration paths: discriminant points and branch points.
/// Throws DegenerateModel for a degenerate model.
std::vector<cplx> angle_obstacles(const SpectralCurveModel& model);

/// The curve's default basepoint, pushed outward until it clears every
/// obstacle and sits over a fiber without near-collisions.
cplx default_angle_basepoint(const SpectralCurveModel& model);

/// Sheet data and path for one divisor point: plans around the obstacles,
/// picks the base lift of y landing on y_i and the unique fiber root at the
/// basepoint whose continuation lands on λ_i. Zero-length when x_i = x0.
PathPlan plan_point(const SpectralCurveModel& model, const SpectralPoint& point, cplx basepoint,
                    const std::vector<cplx>& obstacles, const AngleOptions& opts = {});

/// φ_j = -Σ_i ∫_{x0}^{x_i} R'_{H_j} / (y R'_λ) dx. Throws DegenerateModel,
/// NearDiscriminant, SheetMatchFailed, PathBlocked.
AngleVector angle_coordinates(const SpectralCurveModel& model, const SpectralDivisor& divisor, cplx basepoint,
                              const AngleOptions& opts = {}, std::vector<TraceRow>* trace = nullptr);

/// Same integrals on caller-supplied plans (one per divisor point).
AngleVector angle_coordinates_on_paths(const SpectralCurveModel& model, const std::vector<PathPlan>& plans,
                                       cplx basepoint, const AngleOptions& opts = {},
                                       std::vector<TraceRow>* trace = nullptr);

/// CSV with columns path, t, x_re, x_im, y_re, y_im, lambda_re, lambda_im,
/// integrand_j_re, integrand_j_im for j = 1..N; 17 significant digits.
/// N is taken from the rows unless `components` is given (an empty trace
/// still gets the full header).
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows, int components = -1);

}  // namespace hitchin
