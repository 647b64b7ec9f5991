#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "hitchin/errors.hpp"
#include "hitchin/polyalg.hpp"

namespace hitchin {

/// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
/// Index 0..6 are the positive nodes (descending), index 7 is the origin;
/// Gauss nodes are the odd indices.
struct GaussKronrod15 {
  static const std::array<double, 8> nodes;
  static const std::array<double, 8> kronrod_weights;
  static const std::array<double, 4> gauss_weights;
};

/// One quadrature panel, in the local coordinate t in [0, 1] of a path segment.
struct Panel {
  int segment = 0;
  double t0 = 0.0;
  double t1 = 1.0;
};

/// Accepted panels of an adaptive run, in path order. Reusing a layout makes
/// the integral a smooth function of the integrand's parameters, which
/// finite-difference probes depend on.
struct PanelLayout {
  std::vector<Panel> panels;
  int segments = 0;
};

struct QuadratureOptions {
  double tol = 1e-10;
  long max_panels = 1L << 20;
};

/// Result of integrating a vector-valued integrand along a polyline.
template <class State>
struct PathIntegral {
  Eigen::VectorXcd value;
  PanelLayout layout;
  State end;
  double max_integrand = 0.0;
};

/// Node callback for traces: segment index, local t, continuation state,
/// integrand values at that node. Only nodes of accepted panels are reported,
/// in path order.
template <class State>
using NodeObserver = std::function<void(int, double, const State&, const Eigen::VectorXcd&)>;

/// Integrates f(state) dx along the polyline `waypoints`, where `state`
/// carries analytic continuation (a sheet of y, λ, ...) and is advanced
/// monotonically along the path. State needs `void advance_to(cplx)`.
///
/// Adaptive mode bisects panels until the Kronrod-Gauss difference is below
/// tol · max|f| · panel length; panels are processed left to right so the
/// continuation state is always carried forward. With `frozen`, exactly the
/// given panels are used for the segments they cover and any further
/// segments get a single panel.
template <class State, class Integrand>
PathIntegral<State> integrate_along(const std::vector<cplx>& waypoints, State state, Integrand&& f,
                                    int dim, const QuadratureOptions& opts, const PanelLayout* frozen = nullptr,
                                    const NodeObserver<State>* observer = nullptr) {
  using Vec = Eigen::VectorXcd;
  const auto& xk = GaussKronrod15::nodes;
  const auto& wk = GaussKronrod15::kronrod_weights;
  const auto& wg = GaussKronrod15::gauss_weights;

  PathIntegral<State> out{Vec(), PanelLayout{}, state, 0.0};
  const int nseg = static_cast<int>(waypoints.size()) - 1;
  out.layout.segments = std::max(nseg, 0);

  struct NodeRecord {
    double t;
    State st;
    Vec val;
  };

  Vec sum = Vec::Zero(dim);
  long panel_count = 0;

  // Evaluates one panel starting from `st` (at t0); returns end state at t1.
  auto eval_panel = [&](int seg, double t0, double t1, State st, Vec& kron, double& err,
                        std::vector<NodeRecord>* records) -> State {
    const cplx a = waypoints[seg], b = waypoints[seg + 1];
    const cplx dxdt = b - a;
    const double tm = 0.5 * (t0 + t1), hr = 0.5 * (t1 - t0);
    Vec gauss;
    bool first = true;
    // 15 nodes in increasing t
    for (int idx = 0; idx < 15; ++idx) {
      const int k = idx < 8 ? idx : 14 - idx;
      const double sign = idx < 7 ? -1.0 : 1.0;
      const double t = tm + sign * hr * xk[k];
      st.advance_to(a + t * dxdt);
      Vec v = f(st);
      if (first) {
        kron = Vec::Zero(v.size());
        gauss = Vec::Zero(v.size());
        first = false;
      }
      out.max_integrand = std::max(out.max_integrand, v.cwiseAbs().maxCoeff());
      kron += wk[k] * v;
      if (k % 2 == 1) gauss += wg[k / 2] * v;
      if (records) records->push_back({t, st, v});
    }
    st.advance_to(a + t1 * dxdt);
    const cplx jac = hr * dxdt;
    kron *= jac;
    gauss *= jac;
    err = (kron - gauss).cwiseAbs().maxCoeff();
    return st;
  };

  auto accept = [&](int seg, double t0, double t1, const Vec& kron, std::vector<NodeRecord>& records) {
    sum += kron;
    out.layout.panels.push_back({seg, t0, t1});
    if (observer)
      for (const auto& r : records) (*observer)(seg, r.t, r.st, r.val);
  };

  std::function<State(int, double, double, State)> adaptive = [&](int seg, double t0, double t1,
                                                                   State st) -> State {
    if (++panel_count > opts.max_panels)
      throw Error(ErrorCode::QuadratureNotConverged, "panel budget exhausted");
    Vec kron;
    double err = 0.0;
    std::vector<NodeRecord> records;
    State end = eval_panel(seg, t0, t1, st, kron, err, observer ? &records : nullptr);
    const double seg_len = std::abs(waypoints[seg + 1] - waypoints[seg]);
    const double budget = opts.tol * std::max(out.max_integrand, 1e-300) * seg_len * (t1 - t0);
    if (err <= budget || !std::isfinite(err) || (t1 - t0) < 1e-15) {
      if (!std::isfinite(err))
        throw Error(ErrorCode::QuadratureNotConverged, "non-finite integrand on path");
      if (err > budget) throw Error(ErrorCode::QuadratureNotConverged, "panel width underflow");
      accept(seg, t0, t1, kron, records);
      return end;
    }
    const double tm = 0.5 * (t0 + t1);
    State mid = adaptive(seg, t0, tm, st);
    return adaptive(seg, tm, t1, mid);
  };

  size_t next_frozen = 0;
  for (int seg = 0; seg < nseg; ++seg) {
    if (waypoints[seg + 1] == waypoints[seg]) continue;
    if (frozen && seg < frozen->segments) {
      while (next_frozen < frozen->panels.size() && frozen->panels[next_frozen].segment == seg) {
        const Panel& p = frozen->panels[next_frozen++];
        Vec kron;
        double err = 0.0;
        std::vector<NodeRecord> records;
        state = eval_panel(seg, p.t0, p.t1, state, kron, err, observer ? &records : nullptr);
        accept(seg, p.t0, p.t1, kron, records);
      }
    } else if (frozen) {
      Vec kron;
      double err = 0.0;
      std::vector<NodeRecord> records;
      state = eval_panel(seg, 0.0, 1.0, state, kron, err, observer ? &records : nullptr);
      accept(seg, 0.0, 1.0, kron, records);
    } else {
      state = adaptive(seg, 0.0, 1.0, state);
    }
  }
  out.value = std::move(sum);
  out.end = state;
  return out;
}

}  // namespace hitchin
