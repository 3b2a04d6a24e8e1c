#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cartan/gauge.hpp"
#include "cartan/geometries.hpp"

namespace cartan {

// Probe thresholds. Fixed defaults; the CLI exposes them as flags. Set once
// before launching jobs; runs only read them.
struct FlowLimits {
  double escape_norm = 1e8;
  double boundary_margin = 1e-10;
  double step_collapse = 1e-12;
};

inline FlowLimits& flow_limits() {
  static FlowLimits limits;
  return limits;
}

enum class ProbeOutcome { reached_tmax, escaped, step_collapse };

inline const char* to_string(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::reached_tmax: return "reached_tmax";
    case ProbeOutcome::escaped: return "escaped";
    default: return "step_collapse";
  }
}

struct ProbeReport {
  ProbeOutcome outcome = ProbeOutcome::reached_tmax;
  double t_end = 0.0;          // escape/collapse time, or tmax
  double state_norm = 0.0;     // at the end
  double max_monitor_drift = 0.0;
  std::string detail;
};

struct FlowTrajectory {
  std::vector<std::string> state_names;
  std::vector<std::string> monitor_names;
  std::vector<double> times;
  std::vector<VectorXd> states;
  std::vector<VectorXd> monitors;
  VectorXd state_min, state_max;  // componentwise over every step, not just recorded ones
  ProbeReport report;

  const VectorXd& end_state() const { return states.back(); }
};

namespace detail {

// RK4 with recursive halving inside each output step. The right-hand side may
// throw DomainError/SolderingSingular; that stops integration at the edge.
template <class F>
struct GuardedIntegrator {
  F rhs;
  std::function<double(const VectorXd&)> boundary_margin;  // may be empty

  // returns false when integration must stop; fills report
  bool advance(double& t, VectorXd& y, double h, ProbeReport& rep) {
    double remaining = h;
    double sub = h;
    while (remaining > 1e-15 * std::max(1.0, std::abs(t))) {
      sub = std::min(sub, remaining);
      if (sub < flow_limits().step_collapse) {
        rep.outcome = ProbeOutcome::step_collapse;
        rep.t_end = t;
        rep.state_norm = y.cwiseAbs().maxCoeff();
        rep.detail = "required step below " + fmt17(flow_limits().step_collapse);
        return false;
      }
      VectorXd ynew;
      bool ok = true;
      try {
        VectorXd k1 = rhs(t, y);
        VectorXd k2 = rhs(t + 0.5 * sub, y + 0.5 * sub * k1);
        VectorXd k3 = rhs(t + 0.5 * sub, y + 0.5 * sub * k2);
        VectorXd k4 = rhs(t + sub, y + sub * k3);
        ynew = y + sub / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!ynew.allFinite()) ok = false;
        double motion = (ynew - y).cwiseAbs().maxCoeff();
        if (motion > 0.5 * std::max(1.0, y.cwiseAbs().maxCoeff())) ok = false;
      } catch (const DomainError&) {
        ok = false;
      } catch (const SolderingSingular&) {
        ok = false;
      }
      if (!ok) {
        sub *= 0.5;
        continue;
      }
      t += sub;
      remaining -= sub;
      y = ynew;
      sub = std::min(sub * 2.0, h);
      double nrm = y.cwiseAbs().maxCoeff();
      if (nrm > flow_limits().escape_norm) {
        rep.outcome = ProbeOutcome::escaped;
        rep.t_end = t;
        rep.state_norm = nrm;
        rep.detail = "state norm above " + fmt17(flow_limits().escape_norm);
        return false;
      }
      if (boundary_margin) {
        double m = boundary_margin(y);
        if (m < flow_limits().boundary_margin) {
          rep.outcome = ProbeOutcome::escaped;
          rep.t_end = t;
          rep.state_norm = nrm;
          rep.detail = "chart boundary margin " + fmt17(m);
          return false;
        }
      }
    }
    return true;
  }
};

template <class F, class M>
FlowTrajectory run_flow(F&& rhs, std::function<double(const VectorXd&)> margin, VectorXd y0,
                        double t0, double tmax, double h, M&& monitor,
                        std::vector<std::string> state_names,
                        std::vector<std::string> monitor_names, std::size_t record_every = 1) {
  if (record_every == 0) record_every = 1;
  FlowTrajectory traj;
  traj.state_names = std::move(state_names);
  traj.monitor_names = std::move(monitor_names);
  GuardedIntegrator<F> integ{std::forward<F>(rhs), std::move(margin)};
  double t = t0;
  VectorXd y = std::move(y0);
  traj.times.push_back(t);
  traj.states.push_back(y);
  traj.state_min = y;
  traj.state_max = y;
  VectorXd mon0 = monitor(t, y);
  traj.monitors.push_back(mon0);
  traj.report.outcome = ProbeOutcome::reached_tmax;
  const auto nsteps = static_cast<std::size_t>(std::ceil((tmax - t0) / h - 1e-12));
  bool stopped = false;
  for (std::size_t s = 0; s < nsteps; ++s) {
    double target = (s + 1 == nsteps) ? tmax : t0 + (static_cast<double>(s) + 1.0) * h;
    if (!integ.advance(t, y, target - t, traj.report)) {
      stopped = true;
      break;
    }
    t = target;
    traj.state_min = traj.state_min.cwiseMin(y);
    traj.state_max = traj.state_max.cwiseMax(y);
    VectorXd mon = monitor(t, y);
    for (int c = 0; c < mon.size(); ++c)
      traj.report.max_monitor_drift =
          std::max(traj.report.max_monitor_drift, std::abs(mon[c] - mon0[c]));
    if ((s + 1) % record_every == 0 || s + 1 == nsteps) {
      traj.times.push_back(t);
      traj.states.push_back(y);
      traj.monitors.push_back(std::move(mon));
    }
  }
  if (stopped && traj.times.back() != t) {
    // a partial step still moves the state; keep the last resolved point
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.monitors.push_back(monitor(t, y));
    traj.state_min = traj.state_min.cwiseMin(y);
    traj.state_max = traj.state_max.cwiseMax(y);
  }
  if (traj.report.outcome == ProbeOutcome::reached_tmax) {
    traj.report.t_end = t;
    traj.report.state_norm = y.cwiseAbs().maxCoeff();
  }
  return traj;
}

}  // namespace detail

struct FlowState {
  VectorXd x;
  double phi = 0.0;
};

/// Flow of the constant vector field with omega-value A = a_coords, in the
/// trivialized bundle coordinates (x, phi). Failures become probe outcomes.
inline FlowTrajectory constant_flow(const CartanGauge& gauge, const VectorXd& a_coords,
                                    const FlowState& start, double tmax, double h,
                                    std::size_t record_every = 1) {
  const bool fibered = gauge.model.structure_group_dim() == 1;
  const int d = gauge.chart_dim;
  VectorXd y0(d + (fibered ? 1 : 0));
  y0.head(d) = start.x;
  if (fibered) y0[d] = start.phi;
  ChartDomain dom = gauge.domain;
  CartanGauge g = gauge;
  VectorXd a = a_coords;
  auto rhs2 = [g, d, fibered, a](double, const VectorXd& y) {
    VelocitySolution v = solve_velocity(g, y.head(d), fibered ? y[d] : 0.0, a);
    VectorXd dy(y.size());
    dy.head(d) = v.xdot;
    if (fibered) dy[d] = v.phidot;
    return dy;
  };
  auto margin = [dom, d](const VectorXd& y) { return dom.boundary_margin(y.head(d)); };
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) names.push_back("x" + std::to_string(i + 1));
  if (fibered) names.push_back("phi");
  return detail::run_flow(rhs2, margin, y0, 0.0, tmax, h,
                          [](double, const VectorXd&) { return VectorXd(); }, names, {},
                          record_every);
}

/// Unit-speed geodesic as the constant flow with A = (0, cos alpha, sin alpha).
inline FlowTrajectory geodesic_flow(const CartanGauge& gauge, const VectorXd& start_x,
                                    double alpha0, double tmax, double h,
                                    std::size_t record_every = 1) {
  if (gauge.model.structure_group_dim() != 1 || gauge.chart_dim != 2)
    throw BadParams("geodesic_flow needs an SO(2)-fibered surface gauge");
  VectorXd a = VectorXd::Zero(gauge.model.algebra->dim());
  a[gauge.model.solder_indices[0]] = std::cos(alpha0);
  a[gauge.model.solder_indices[1]] = std::sin(alpha0);
  FlowState st;
  st.x = start_x;
  st.phi = 0.0;
  return constant_flow(gauge, a, st, tmax, h, record_every);
}

/// Dedicated surface-of-revolution spiral in the arclength normalization:
/// dz = cos(phi) ds, dtheta = -e^{-lambda} sin(phi) ds,
/// dphi = (c0 - lambda' sin(phi)) ds. State carries the running integral of
/// e^lambda dz so the finite-time identity can be monitored:
/// sin phi(t) = e^{lambda0-lambda} sin phi0 + c0 e^{-lambda} * integral.
inline FlowTrajectory revolution_spiral(const Profile& lambda, double c0, const VectorXd& start,
                                        double tmax, double h,
                                        const ChartDomain* domain = nullptr,
                                        std::size_t record_every = 1) {
  VectorXd y0(4);
  y0 << start[0], start[1], start[2], 0.0;  // z, theta, phi, accumulated integral
  double lam0 = lambda(start[0]);
  double sin0 = std::sin(start[2]);
  Profile lam = lambda;
  auto rhs = [lam, c0](double, const VectorXd& y) {
    double lp = lam.deriv(y[0]);
    VectorXd dy(4);
    double c = std::cos(y[2]), s = std::sin(y[2]);
    dy[0] = c;
    dy[1] = -std::exp(-lam(y[0])) * s;
    dy[2] = c0 - lp * s;
    dy[3] = std::exp(lam(y[0])) * c;  // e^lambda dz/ds
    return dy;
  };
  std::function<double(const VectorXd&)> margin;
  if (domain) {
    ChartDomain dom = *domain;
    margin = [dom](const VectorXd& y) {
      VectorXd x(2);
      x << y[0], y[1];
      return dom.boundary_margin(x);
    };
  } else if (lambda.has_bounds()) {
    double zlo = lambda.zmin(), zhi = lambda.zmax();
    margin = [zlo, zhi](const VectorXd& y) { return std::min(y[0] - zlo, zhi - y[0]); };
  }
  auto monitor = [lam, lam0, sin0, c0](double, const VectorXd& y) {
    double lz = lam(y[0]);
    VectorXd m(2);
    m[0] = std::exp(lz) * std::sin(y[2]);  // Clairault integral
    double predicted = std::exp(lam0 - lz) * sin0 + c0 * std::exp(-lz) * y[3];
    m[1] = std::sin(y[2]) - predicted;     // finite-time identity residual
    return m;
  };
  return detail::run_flow(rhs, margin, y0, 0.0, tmax, h, monitor,
                          {"z", "theta", "phi", "int_elam_dz"}, {"I", "identity_residual"},
                          record_every);
}

/// Geodesics of dx dy/(x^2+y^2) (punctured plane) or dx dy + (1/2) f(x) dy^2.
/// Monitors: the Killing integral I = xdot + f(x) ydot (f family; 0 for the
/// punctured-plane metric where it does not apply) and the Lagrangian value.
inline FlowTrajectory lorentz_geodesic(const LorentzFamily& fam, const VectorXd& start,
                                       double tmax, double h,
                                       std::size_t record_every = 1) {
  VectorXd y0 = start;  // x, y, xdot, ydot
  ChartDomain dom = fam.domain;
  auto margin = [dom](const VectorXd& y) {
    VectorXd x(2);
    x << y[0], y[1];
    return dom.boundary_margin(x);
  };
  if (fam.clifton_pohl) {
    auto rhs = [](double, const VectorXd& y) {
      double q = y[0] * y[0] + y[1] * y[1];
      VectorXd dy(4);
      dy[0] = y[2];
      dy[1] = y[3];
      dy[2] = 2.0 * y[0] * y[2] * y[2] / q;
      dy[3] = 2.0 * y[1] * y[3] * y[3] / q;
      return dy;
    };
    auto monitor = [](double, const VectorXd& y) {
      VectorXd m(2);
      m[0] = 0.0;
      m[1] = y[2] * y[3] / (y[0] * y[0] + y[1] * y[1]);
      return m;
    };
    return detail::run_flow(rhs, margin, y0, 0.0, tmax, h, monitor,
                            {"x", "y", "xdot", "ydot"}, {"I", "lagrangian"}, record_every);
  }
  Profile f = fam.f;
  auto rhs = [f](double, const VectorXd& y) {
    double fv = f(y[0]), fp = f.deriv(y[0]);
    VectorXd dy(4);
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = -fp * y[2] * y[3] - 0.5 * fv * fp * y[3] * y[3];
    dy[3] = 0.5 * fp * y[3] * y[3];
    return dy;
  };
  auto monitor = [f](double, const VectorXd& y) {
    VectorXd m(2);
    m[0] = y[2] + f(y[0]) * y[3];
    m[1] = y[2] * y[3] + 0.5 * f(y[0]) * y[3] * y[3];
    return m;
  };
  return detail::run_flow(rhs, margin, y0, 0.0, tmax, h, monitor, {"x", "y", "xdot", "ydot"},
                          {"I", "lagrangian"}, record_every);
}

inline const ProbeReport& blow_up_probe(const FlowTrajectory& traj) { return traj.report; }

}  // namespace cartan
