#include "hitchin/hyperelliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hitchin/errors.hpp"

namespace hitchin {

HyperellipticCurve::HyperellipticCurve(ComplexPoly p) : p_(std::move(p)) {
  const int deg = p_.degree();
  if (deg < 5 || deg % 2 == 0)
    throw Error(ErrorCode::InvalidCurve,
                "P must have odd degree >= 5, got degree " + std::to_string(deg));
  genus_ = (deg - 1) / 2;
  dp_ = p_.derivative();
  branch_ = companion_roots(p_);

  double rmax = 1.0;
  for (const cplx e : branch_) rmax = std::max(rmax, std::abs(e));
  for (size_t i = 0; i < branch_.size(); ++i)
    for (size_t j = i + 1; j < branch_.size(); ++j)
      if (std::abs(branch_[i] - branch_[j]) <= 1e-8 * rmax)
        throw Error(ErrorCode::InvalidCurve, "P is not squarefree (repeated branch point)");
}

bool HyperellipticCurve::contains(const CurvePoint& pt, double tol) const {
  const cplx px = p_(pt.x);
  return std::abs(pt.y * pt.y - px) <= tol * (1.0 + std::abs(px));
}

cplx HyperellipticCurve::branch_center() const {
  cplx c = 0.0;
  for (const cplx e : branch_) c += e;
  return c / static_cast<double>(branch_.size());
}

double HyperellipticCurve::branch_radius() const {
  const cplx c = branch_center();
  double r = 0.0;
  for (const cplx e : branch_) r = std::max(r, std::abs(e - c));
  return r;
}

double HyperellipticCurve::branch_diameter() const {
  double d = 0.0;
  for (const cplx a : branch_)
    for (const cplx b : branch_) d = std::max(d, std::abs(a - b));
  return d;
}

double HyperellipticCurve::default_clearance() const { return 1e-2 * branch_diameter(); }

cplx HyperellipticCurve::default_basepoint() const {
  return branch_center() + cplx(branch_radius() + 1.0, 0.0);
}

std::vector<cplx> branch_points(const HyperellipticCurve& curve) { return curve.branch_points(); }

std::array<CurvePoint, 2> lift_x(const HyperellipticCurve& curve, cplx x) {
  for (const cplx e : curve.branch_points())
    if (std::abs(x - e) <= 1e-10) throw Error(ErrorCode::AtBranchPoint, "x is a branch point");
  const cplx y = std::sqrt(curve.eval(x));
  return {CurvePoint{x, y}, CurvePoint{x, -y}};
}

double XPath::length() const {
  double len = 0.0;
  for (size_t i = 1; i < waypoints.size(); ++i) len += std::abs(waypoints[i] - waypoints[i - 1]);
  return len;
}

XPath XPath::reversed() const {
  XPath r = *this;
  std::reverse(r.waypoints.begin(), r.waypoints.end());
  return r;
}

XPath XPath::then(const XPath& next) const {
  if (std::abs(end() - next.start()) > 1e-14 * (1.0 + std::abs(end())))
    throw Error(ErrorCode::InvalidArgument, "paths do not join");
  XPath out = *this;
  out.clearance = std::min(clearance, next.clearance);
  out.waypoints.insert(out.waypoints.end(), next.waypoints.begin() + 1, next.waypoints.end());
  return out;
}

namespace {

double segment_distance(cplx a, cplx b, cplx c) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(c - a);
  const double s = std::clamp(std::real((c - a) * std::conj(d)) / len2, 0.0, 1.0);
  return std::abs(a + s * d - c);
}

struct Disk {
  cplx center;
  double radius;                   // encloses member obstacles' clearance disks
  std::vector<cplx> members;
};

constexpr int kArcIntervals = 15;  // <= 16 waypoints on a half-turn

double arc_radius(const Disk& d) { return d.radius / std::cos(std::numbers::pi / (2 * kArcIntervals)); }

std::vector<Disk> cluster(std::span<const cplx> obstacles, double clear) {
  const double base = 1.2 * clear;
  std::vector<Disk> disks;
  for (const cplx o : obstacles) disks.push_back({o, base, {o}});
  const double margin = 0.1 * clear;
  for (bool merged = true; merged;) {
    merged = false;
    for (size_t i = 0; i < disks.size() && !merged; ++i) {
      for (size_t j = i + 1; j < disks.size() && !merged; ++j) {
        const double dist = std::abs(disks[i].center - disks[j].center);
        if (dist >= arc_radius(disks[i]) + arc_radius(disks[j]) + margin) continue;
        Disk& a = disks[i];
        const Disk& b = disks[j];
        Disk m;
        if (dist + b.radius <= a.radius) {
          m = a;
        } else if (dist + a.radius <= b.radius) {
          m = b;
        } else {
          m.radius = 0.5 * (dist + a.radius + b.radius);
          m.center = a.center + (m.radius - a.radius) * (b.center - a.center) / dist;
        }
        m.members = a.members;
        m.members.insert(m.members.end(), b.members.begin(), b.members.end());
        a = std::move(m);
        disks.erase(disks.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
      }
    }
  }
  return disks;
}

}  // namespace

double path_distance(const XPath& path, cplx c) {
  if (path.waypoints.size() == 1) return std::abs(path.waypoints[0] - c);
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < path.waypoints.size(); ++i)
    d = std::min(d, segment_distance(path.waypoints[i - 1], path.waypoints[i], c));
  return d;
}

XPath plan_path(const HyperellipticCurve& curve, cplx from, cplx to, std::span<const cplx> obstacles,
                std::optional<double> clearance) {
  const double clear = clearance.value_or(curve.default_clearance());
  if (!(clear > 0.0)) throw Error(ErrorCode::InvalidArgument, "clearance must be positive");

  std::vector<cplx> obs(curve.branch_points());
  obs.insert(obs.end(), obstacles.begin(), obstacles.end());

  for (const cplx o : obs) {
    if (std::abs(from - o) <= clear) throw Error(ErrorCode::PathBlocked, "start point within clearance of an obstacle");
    if (std::abs(to - o) <= clear) throw Error(ErrorCode::PathBlocked, "end point within clearance of an obstacle");
  }

  XPath path{{from, to}, clear};
  const bool clears = std::none_of(obs.begin(), obs.end(),
                                   [&](cplx o) { return segment_distance(from, to, o) < clear; });
  if (clears) return path;

  const cplx d = to - from;
  const double len = std::abs(d);
  struct Detour {
    double s_in, s_out;
    std::vector<cplx> pts;
  };
  std::vector<Detour> detours;
  for (const Disk& disk : cluster(obs, clear)) {
    const bool needed = std::any_of(disk.members.begin(), disk.members.end(), [&](cplx m) {
      return segment_distance(from, to, m) < clear;
    });
    if (!needed) continue;
    const double ra = arc_radius(disk);
    if (std::abs(from - disk.center) <= ra || std::abs(to - disk.center) <= ra)
      throw Error(ErrorCode::PathBlocked, "endpoint lies inside an obstacle cluster");

    const double sc = std::real((disk.center - from) * std::conj(d)) / (len * len);
    const cplx foot = from + sc * d;
    const double perp = std::abs(foot - disk.center);
    const double half = std::sqrt(std::max(ra * ra - perp * perp, 0.0)) / len;
    const double s_in = sc - half, s_out = sc + half;
    const cplx p_in = from + s_in * d, p_out = from + s_out * d;

    cplx side = foot - disk.center;
    if (std::abs(side) < 1e-12 * ra) side = cplx(0.0, 1.0) * d;
    const double th_in = std::arg(p_in - disk.center);
    const double th_out = std::arg(p_out - disk.center);
    const double th_side = std::arg(side);
    // Sweep from th_in to th_out through th_side.
    auto wrap = [](double a) {
      while (a < 0) a += 2 * std::numbers::pi;
      while (a >= 2 * std::numbers::pi) a -= 2 * std::numbers::pi;
      return a;
    };
    double sweep = wrap(th_out - th_in);
    if (wrap(th_side - th_in) > sweep) sweep -= 2 * std::numbers::pi;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / (std::numbers::pi / kArcIntervals))));

    Detour det{s_in, s_out, {}};
    det.pts.push_back(p_in);
    for (int k = 1; k < n; ++k)
      det.pts.push_back(disk.center + ra * std::polar(1.0, th_in + sweep * k / n));
    det.pts.push_back(p_out);
    detours.push_back(std::move(det));
  }
  std::sort(detours.begin(), detours.end(), [](const Detour& a, const Detour& b) { return a.s_in < b.s_in; });

  path.waypoints = {from};
  for (const Detour& det : detours) path.waypoints.insert(path.waypoints.end(), det.pts.begin(), det.pts.end());
  path.waypoints.push_back(to);
  return path;
}

YSheet::YSheet(const HyperellipticCurve& curve, CurvePoint start, double min_step)
    : curve_(&curve), x_(start.x), y_(start.y), min_step_(min_step) {}

void YSheet::advance_to(cplx x1) {
  double shrink = 1.0;
  while (x_ != x1) {
    const cplx slope = curve_->dp()(x_) / (2.0 * y_);
    const cplx remaining = x1 - x_;
    // predicted relative change of y per step at most 1/4
    const double cap = 0.25 * std::abs(y_) / std::max(std::abs(slope), 1e-300);
    const double len = std::min(std::abs(remaining), cap) * shrink;
    const cplx target = len >= std::abs(remaining) ? x1 : x_ + remaining * (len / std::abs(remaining));
    if (target != x1 && len < min_step_) throw Error(ErrorCode::ContinuationStalled, "y continuation step underflow");
    const cplx pred = y_ + slope * (target - x_);
    const cplx s = std::sqrt(curve_->eval(target));
    const cplx chosen = (std::abs(s - pred) <= std::abs(-s - pred)) ? s : -s;
    if (std::abs(chosen - pred) <= 0.25 * std::abs(chosen) && chosen != cplx(0.0)) {
      x_ = target;
      y_ = chosen;
      shrink = std::min(1.0, 2.0 * shrink);
    } else {
      shrink *= 0.5;
      if (len * 0.5 < min_step_) throw Error(ErrorCode::ContinuationStalled, "y continuation step underflow");
    }
  }
}

cplx continue_y(const HyperellipticCurve& curve, const XPath& path, cplx y_start) {
  if (!curve.contains({path.start(), y_start}))
    throw Error(ErrorCode::InvalidArgument, "y_start does not lie over the path start");
  YSheet sheet(curve, {path.start(), y_start}, 1e-12 * std::max(path.length(), 1e-300));
  for (const cplx w : path.waypoints) sheet.advance_to(w);
  return sheet.y();
}

cplx abelian_integral(const HyperellipticCurve& curve, const XPath& path, cplx y_start, int k, double tol) {
  if (k < 0 || k > curve.genus() - 1)
    throw Error(ErrorCode::InvalidArgument, "only holomorphic differentials x^k dx/y, 0 <= k <= g-1");
  if (!curve.contains({path.start(), y_start}))
    throw Error(ErrorCode::InvalidArgument, "y_start does not lie over the path start");
  YSheet sheet(curve, {path.start(), y_start}, 1e-12 * std::max(path.length(), 1e-300));
  auto f = [k](const YSheet& s) {
    Eigen::VectorXcd v(1);
    cplx xk = 1.0;
    for (int i = 0; i < k; ++i) xk *= s.x();
    v(0) = xk / s.y();
    return v;
  };
  const auto res = integrate_along(path.waypoints, sheet, f, 1, QuadratureOptions{tol});
  return res.value(0);
}

}  // namespace hitchin
