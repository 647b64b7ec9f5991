#include "hitchin/angle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "hitchin/errors.hpp"
#include "hitchin/parallel.hpp"

namespace hitchin {

Eigen::VectorXcd integrand_all(const SpectralCurveModel& model, cplx lambda, const CurvePoint& pt) {
  const SpectralPartials d = model.partials(lambda, pt);
  if (!(std::abs(d.d_lambda) > 1e-12 * model.scale_at(lambda, pt)))
    throw Error(ErrorCode::NearDiscriminant, "R'_λ vanishes at x = (" + std::to_string(pt.x.real()) + ", " +
                                                 std::to_string(pt.x.imag()) + ")");
  return d.d_h / (pt.y * d.d_lambda);
}

cplx integrand(const SpectralCurveModel& model, int j, cplx lambda, const CurvePoint& pt) {
  if (j < 0 || j >= model.h().size()) throw Error(ErrorCode::InvalidArgument, "integrand index out of range");
  return integrand_all(model, lambda, pt)(j);
}

std::vector<cplx> angle_obstacles(const SpectralCurveModel& model) {
  if (model.degenerate())
    throw Error(ErrorCode::DegenerateModel, "every λ-fiber is degenerate; angle integrals are undefined");
  return x_discriminant_points(model).points;
}

namespace {

double fiber_gap(const std::vector<cplx>& fib) {
  double gap = std::numeric_limits<double>::infinity(), big = 0.0;
  for (size_t i = 0; i < fib.size(); ++i) {
    big = std::max(big, std::abs(fib[i]));
    for (size_t j = i + 1; j < fib.size(); ++j) gap = std::min(gap, std::abs(fib[i] - fib[j]));
  }
  return gap / (1.0 + big);
}

double clearance_of(const SpectralCurveModel& model, const AngleOptions& opts) {
  return opts.clearance.value_or(model.base().default_clearance());
}

}  // namespace

cplx default_angle_basepoint(const SpectralCurveModel& model) {
  const auto obstacles = angle_obstacles(model);
  const HyperellipticCurve& curve = model.base();
  const cplx center = curve.branch_center();
  const double clear = curve.default_clearance();
  cplx x0 = curve.default_basepoint();
  cplx dir = x0 - center;
  dir = std::abs(dir) > 0.0 ? dir / std::abs(dir) : cplx(1.0);
  for (int k = 0; k < 200; ++k, x0 += 0.25 * dir) {
    if (std::any_of(obstacles.begin(), obstacles.end(), [&](cplx o) { return std::abs(o - x0) < 5.0 * clear; }))
      continue;
    if (fiber_gap(model.lambda_fiber(lift_x(curve, x0)[0])) < 1e-3) continue;
    return x0;
  }
  throw Error(ErrorCode::PathBlocked, "no admissible basepoint found");
}

PathPlan plan_point(const SpectralCurveModel& model, const SpectralPoint& point, cplx basepoint,
                    const std::vector<cplx>& obstacles, const AngleOptions& opts) {
  const HyperellipticCurve& curve = model.base();
  const double clear = clearance_of(model, opts);
  if (!curve.contains(point.at)) throw Error(ErrorCode::InvalidArgument, "divisor point is not on the base curve");
  if (point.at.x == basepoint) return PathPlan{XPath{{basepoint, basepoint}, clear}, point.at.y, point.lambda, {}};

  for (const cplx d : obstacles)
    if (std::abs(d - point.at.x) < 1e-6)
      throw Error(ErrorCode::NearDiscriminant, "divisor point lies within 1e-6 of the discriminant locus");

  XPath path = plan_path(curve, basepoint, point.at.x, obstacles, clear);
  const cplx y0 = lift_x(curve, basepoint)[0].y;
  const cplx y_end = continue_y(curve, path, y0);
  const double ytol = 1e-6 * (1.0 + std::abs(point.at.y));
  cplx y_base;
  if (std::abs(y_end - point.at.y) <= ytol)
    y_base = y0;
  else if (std::abs(-y_end - point.at.y) <= ytol)
    y_base = -y0;
  else
    throw Error(ErrorCode::SheetMatchFailed, "continued y matches neither lift of the divisor point");

  const auto fiber = model.lambda_fiber({basepoint, y_base});
  int matches = 0;
  cplx lambda_base = 0.0;
  for (const cplx l0 : fiber) {
    cplx end;
    try {
      end = continue_lambda(model, path, y_base, l0);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SheetCollision || e.code() == ErrorCode::ContinuationStalled) continue;
      throw;
    }
    if (std::abs(end - point.lambda) <= opts.match_tol * (1.0 + std::abs(point.lambda))) {
      ++matches;
      lambda_base = l0;
    }
  }
  if (matches != 1)
    throw Error(ErrorCode::SheetMatchFailed,
                std::to_string(matches) + " continued fiber roots land on λ_i (expected exactly one)");
  return PathPlan{std::move(path), y_base, lambda_base, {}};
}

AngleVector angle_coordinates_on_paths(const SpectralCurveModel& model, const std::vector<PathPlan>& plans,
                                       cplx basepoint, const AngleOptions& opts, std::vector<TraceRow>* trace) {
  if (model.degenerate())
    throw Error(ErrorCode::DegenerateModel, "every λ-fiber is degenerate; angle integrals are undefined");
  const int n = model.h().size();
  const int m = static_cast<int>(plans.size());
  std::vector<PathRecord> records(static_cast<size_t>(m));
  std::vector<std::vector<TraceRow>> traces(static_cast<size_t>(m));

  parallel_for(
      m,
      [&](int i) {
        const PathPlan& plan = plans[static_cast<size_t>(i)];
        PathRecord& rec = records[static_cast<size_t>(i)];
        rec.plan = plan;
        const XPath& path = plan.path;
        const double len = path.length();
        LambdaSheet sheet(model, {plan.lambda_base, {path.start(), plan.y_base}}, 1e-12 * std::max(len, 1e-300));
        auto f = [&](const LambdaSheet& s) { return integrand_all(model, s.lambda(), s.point()); };

        std::vector<double> cum{0.0};
        for (size_t k = 1; k < path.waypoints.size(); ++k)
          cum.push_back(cum.back() + std::abs(path.waypoints[k] - path.waypoints[k - 1]));
        NodeObserver<LambdaSheet> observer = [&](int seg, double t, const LambdaSheet& s,
                                                 const Eigen::VectorXcd& v) {
          const double seg_len = cum[static_cast<size_t>(seg) + 1] - cum[static_cast<size_t>(seg)];
          const double tg = len > 0.0 ? (cum[static_cast<size_t>(seg)] + t * seg_len) / len : 0.0;
          traces[static_cast<size_t>(i)].push_back({i, tg, s.x(), s.y(), s.lambda(), v});
        };

        const auto res = integrate_along(path.waypoints, sheet, f, n, QuadratureOptions{opts.tol_quad},
                                         plan.layout ? &*plan.layout : nullptr, trace ? &observer : nullptr);
        rec.layout = res.layout;
        rec.contribution = -res.value;
        rec.lambda_end = res.end.lambda();
        rec.y_end = res.end.y();
      },
      opts.threads);

  AngleVector out;
  out.basepoint = basepoint;
  out.phi = Eigen::VectorXcd::Zero(n);
  for (const PathRecord& r : records) out.phi += r.contribution;  // fixed order
  out.paths = std::move(records);
  if (trace)
    for (auto& t : traces) trace->insert(trace->end(), t.begin(), t.end());
  return out;
}

AngleVector angle_coordinates(const SpectralCurveModel& model, const SpectralDivisor& divisor, cplx basepoint,
                              const AngleOptions& opts, std::vector<TraceRow>* trace) {
  const auto obstacles = angle_obstacles(model);
  const int m = static_cast<int>(divisor.size());
  std::vector<PathPlan> plans(static_cast<size_t>(m));
  parallel_for(
      m,
      [&](int i) {
        plans[static_cast<size_t>(i)] =
            plan_point(model, divisor.points[static_cast<size_t>(i)], basepoint, obstacles, opts);
      },
      opts.threads);
  return angle_coordinates_on_paths(model, plans, basepoint, opts, trace);
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows, int components) {
  const int n = components >= 0 ? components : rows.empty() ? 0 : static_cast<int>(rows.front().values.size());
  os << "path,t,x_re,x_im,y_re,y_im,lambda_re,lambda_im";
  for (int j = 1; j <= n; ++j) os << ",integrand_" << j << "_re,integrand_" << j << "_im";
  os << '\n';
  const auto old = os.precision(17);
  for (const TraceRow& r : rows) {
    os << r.path << ',' << r.t << ',' << r.x.real() << ',' << r.x.imag() << ',' << r.y.real() << ',' << r.y.imag()
       << ',' << r.lambda.real() << ',' << r.lambda.imag();
    for (int j = 0; j < r.values.size(); ++j) os << ',' << r.values(j).real() << ',' << r.values(j).imag();
    os << '\n';
  }
  os.precision(old);
}

}  // namespace hitchin
