#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cartan/flows.hpp"
#include "cartan/gauge.hpp"
#include "cartan/geometries.hpp"
#include "cartan/lie_equation.hpp"

namespace cartan {

/// Base-chart curve with velocity; parametric or interpolated samples.
struct ChartCurve {
  int chart_dim = 2;
  double t0 = 0.0, t1 = 1.0;
  std::function<VectorXd(double)> position;
  std::function<VectorXd(double)> velocity;
};

inline ChartCurve curve_from_samples(const std::vector<double>& times,
                                     const std::vector<VectorXd>& points, InterpOrder order) {
  if (times.size() != points.size() || times.size() < 2) throw BadParams("bad curve samples");
  const int d = static_cast<int>(points[0].size());
  auto tables = std::make_shared<std::vector<Table1D>>();
  for (int c = 0; c < d; ++c) {
    std::vector<double> col(times.size());
    for (std::size_t r = 0; r < times.size(); ++r) col[r] = points[r][c];
    tables->push_back(Table1D(times, col, order));
  }
  ChartCurve curve;
  curve.chart_dim = d;
  curve.t0 = times.front();
  curve.t1 = times.back();
  curve.position = [tables, d](double t) {
    VectorXd x(d);
    for (int c = 0; c < d; ++c) x[c] = (*tables)[static_cast<std::size_t>(c)](t);
    return x;
  };
  curve.velocity = [tables, d](double t) {
    VectorXd v(d);
    for (int c = 0; c < d; ++c) v[c] = (*tables)[static_cast<std::size_t>(c)].deriv(t);
    return v;
  };
  return curve;
}

inline ChartCurve curve_from_csv(const std::string& path, InterpOrder order) {
  CsvDoc doc = read_csv_file(path);
  std::vector<double> times;
  std::vector<VectorXd> pts;
  for (const auto& row : doc.rows) {
    if (row.size() < 3) throw IoError("curve csv needs t,x1,x2 columns");
    times.push_back(row[0]);
    VectorXd p(static_cast<int>(row.size()) - 1);
    for (std::size_t c = 1; c < row.size(); ++c) p[static_cast<long>(c) - 1] = row[c];
    pts.push_back(p);
  }
  return curve_from_samples(times, pts, order);
}

inline ChartCurve segment_curve(const VectorXd& a, const VectorXd& b) {
  ChartCurve c;
  c.chart_dim = static_cast<int>(a.size());
  c.t0 = 0.0;
  c.t1 = 1.0;
  c.position = [a, b](double t) { return VectorXd((1.0 - t) * a + t * b); };
  c.velocity = [a, b](double) { return VectorXd(b - a); };
  return c;
}

inline ChartCurve circle_curve(const VectorXd& center, double radius) {
  ChartCurve c;
  c.chart_dim = 2;
  c.t0 = 0.0;
  c.t1 = 2.0 * M_PI;
  c.position = [center, radius](double t) {
    VectorXd x(2);
    x << center[0] + radius * std::cos(t), center[1] + radius * std::sin(t);
    return x;
  };
  c.velocity = [radius](double t) {
    VectorXd v(2);
    v << -radius * std::sin(t), radius * std::cos(t);
    return v;
  };
  return c;
}

/// First coordinate fixed, second running once around [0, 2pi]: sphere
/// latitudes, cone loops, cylinder circles.
inline ChartCurve latitude_curve(double c0) {
  ChartCurve c;
  c.chart_dim = 2;
  c.t0 = 0.0;
  c.t1 = 2.0 * M_PI;
  c.position = [c0](double t) {
    VectorXd x(2);
    x << c0, t;
    return x;
  };
  c.velocity = [](double) {
    VectorXd v(2);
    v << 0.0, 1.0;
    return v;
  };
  return c;
}

/// "segment:x0,y0,x1,y1" | "circle:cx,cy,r" | "latitude:c" | a csv path.
inline ChartCurve parse_curve(const std::string& spec, InterpOrder order = InterpOrder::cubic) {
  auto colon = spec.find(':');
  std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
  auto nums = [&](int expected) {
    std::vector<double> out;
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (static_cast<int>(out.size()) != expected)
      throw BadParams("curve '" + kind + "' expects " + std::to_string(expected) + " numbers");
    return out;
  };
  if (kind == "segment") {
    auto v = nums(4);
    VectorXd a(2), b(2);
    a << v[0], v[1];
    b << v[2], v[3];
    return segment_curve(a, b);
  }
  if (kind == "circle") {
    auto v = nums(3);
    VectorXd c(2);
    c << v[0], v[1];
    return circle_curve(c, v[2]);
  }
  if (kind == "latitude") {
    auto v = nums(1);
    return latitude_curve(v[0]);
  }
  return curve_from_csv(spec, order);
}

inline bool is_closed(const ChartCurve& curve, const ChartDomain& domain, double tol = 1e-9) {
  VectorXd d = domain.wrap_diff(curve.position(curve.t1), curve.position(curve.t0));
  return d.cwiseAbs().maxCoeff() < tol;
}

/// A(t) = sum_i xdot_i(t) A_i(x(t)) on the h = 1 section.
inline DarbouxSignal development_signal(const CartanGauge& gauge, const ChartCurve& curve) {
  CartanGauge g = gauge;
  ChartCurve c = curve;
  return DarbouxSignal::from_function(*gauge.model.algebra, [g, c](double t) {
    VectorXd x = c.position(t);
    VectorXd v = c.velocity(t);
    auto a = g.coeffs_at(x);
    VectorXd out = VectorXd::Zero(g.model.algebra->dim());
    for (int i = 0; i < g.chart_dim; ++i) out += v[i] * a[static_cast<std::size_t>(i)];
    return out;
  });
}

inline GroupTrajectory develop(const CartanGauge& gauge, const ChartCurve& curve, double h,
                               Method method = Method::rkmk4) {
  DarbouxSignal sig = development_signal(gauge, curve);
  GroupElement id{gauge.model.algebra,
                  MatrixXd::Identity(gauge.model.algebra->matrix_size(),
                                     gauge.model.algebra->matrix_size())};
  return solve(sig, id, curve.t0, curve.t1, method, h);
}

struct HolonomyResult {
  GroupElement element;
  double rotation_angle = 0.0;     // principal value in (-pi, pi]
  double winding_angle = 0.0;      // accumulated continuously along the development
  double translation_defect = 0.0;
};

namespace detail {

inline double principal_angle(const MatrixXd& g) { return std::atan2(g(0, 1), g(0, 0)); }

inline double wrap_pi(double a) {
  double w = std::remainder(a, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

}  // namespace detail

inline HolonomyResult holonomy(const CartanGauge& gauge, const ChartCurve& loop, double h,
                               Method method = Method::rkmk4) {
  if (!is_closed(loop, gauge.domain)) throw LoopNotClosed("curve endpoints differ");
  GroupTrajectory traj = develop(gauge, loop, h, method);
  HolonomyResult res;
  res.element = GroupElement{gauge.model.algebra, traj.endpoint()};
  const MatrixXd& e = traj.endpoint();
  res.rotation_angle = detail::principal_angle(e);
  double acc = 0.0, prev = 0.0;
  for (std::size_t i = 1; i < traj.matrices.size(); ++i) {
    double cur = detail::principal_angle(traj.matrices[i]);
    acc += detail::wrap_pi(cur - prev);
    prev = cur;
  }
  res.winding_angle = acc;
  const int m = gauge.model.algebra->matrix_size();
  double td = 0.0;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      if (r < 2 && c < 2) continue;
      td = std::max(td, std::abs(e(r, c) - (r == c ? 1.0 : 0.0)));
    }
  res.translation_defect = td;
  return res;
}

/// State trajectory on the trivialized bundle: chart coordinates plus the
/// fiber angle when the structure group is SO(2).
struct BundleTrajectory {
  bool has_fiber = false;
  bool complete = false;
  std::string diagnostic;
  std::vector<double> times;
  std::vector<VectorXd> states;  // x..., then phi if fibered

  VectorXd end_x(int d) const { return states.back().head(d); }
  double end_phi() const { return states.back()[states.back().size() - 1]; }
};

/// Integrate omega(xdot, phidot) = A(t) pointwise with RK4; stops with a
/// partial trajectory at chart or soldering failures.
inline BundleTrajectory antidevelop(const CartanGauge& gauge, const DarbouxSignal& signal,
                                    const VectorXd& start_x, double start_phi, double t0,
                                    double t1, double h) {
  const bool fibered = gauge.model.structure_group_dim() == 1;
  const int d = gauge.chart_dim;
  BundleTrajectory traj;
  traj.has_fiber = fibered;
  VectorXd y(d + (fibered ? 1 : 0));
  y.head(d) = start_x;
  if (fibered) y[d] = start_phi;
  gauge.domain.require_inside(start_x);
  traj.times.push_back(t0);
  traj.states.push_back(y);
  auto rhs = [&](double t, const VectorXd& s) {
    VelocitySolution v = solve_velocity(gauge, s.head(d), fibered ? s[d] : 0.0,
                                        signal.coords(t));
    VectorXd dy(s.size());
    dy.head(d) = v.xdot;
    if (fibered) dy[d] = v.phidot;
    return dy;
  };
  double t = t0;
  const auto nsteps = static_cast<std::size_t>(std::ceil((t1 - t0) / h - 1e-12));
  for (std::size_t s = 0; s < nsteps; ++s) {
    double target = (s + 1 == nsteps) ? t1 : t0 + (static_cast<double>(s) + 1.0) * h;
    double dt = target - t;
    try {
      VectorXd k1 = rhs(t, y);
      VectorXd k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
      VectorXd k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
      VectorXd k4 = rhs(t + dt, y + dt * k3);
      VectorXd ynew = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!gauge.domain.inside(ynew.head(d))) throw DomainError("left chart domain");
      y = ynew;
    } catch (const Error& err) {
      traj.diagnostic = err.what();
      return traj;
    }
    t = target;
    traj.times.push_back(t);
    traj.states.push_back(y);
  }
  traj.complete = true;
  return traj;
}

/// Roll surface A over surface B along a curve in A's chart: antidevelop B's
/// gauge along A's development signal, matching soldering and connection
/// along the motion. States carry the contact point on B and the relative
/// frame rotation.
inline BundleTrajectory roll(const SurfaceMetric& surf_a, const SurfaceMetric& surf_b,
                             const ChartCurve& curve, const VectorXd& start_b, double angle0,
                             double h) {
  if (surf_a.signature != Signature::riemannian || surf_b.signature != Signature::riemannian)
    throw BadParams("roll needs riemannian surfaces");
  CartanGauge ga = levi_civita_gauge(surf_a);
  CartanGauge gb = levi_civita_gauge(surf_b);
  DarbouxSignal sig = development_signal(ga, curve);
  return antidevelop(gb, sig, start_b, angle0, curve.t0, curve.t1, h);
}

struct ParallelogramSample {
  double eps = 0.0;
  VectorXd estimate;   // algebra coordinates of the epsilon^2 defect
  VectorXd reference;  // curvature contracted with the two directions
  double abs_error = 0.0;
  double rel_error = 0.0;
};

namespace detail {

inline void advance_constant_fixed(const CartanGauge& gauge, const VectorXd& a_coords,
                                   VectorXd& x, double& phi, double duration, int substeps) {
  const bool fibered = gauge.model.structure_group_dim() == 1;
  const int d = gauge.chart_dim;
  double dt = duration / substeps;
  for (int s = 0; s < substeps; ++s) {
    auto f = [&](const VectorXd& xx, double ph) {
      VelocitySolution v = solve_velocity(gauge, xx, ph, a_coords);
      VectorXd dy(d + 1);
      dy.head(d) = v.xdot;
      dy[d] = fibered ? v.phidot : 0.0;
      return dy;
    };
    VectorXd k1 = f(x, phi);
    VectorXd k2 = f(x + 0.5 * dt * k1.head(d), phi + 0.5 * dt * k1[d]);
    VectorXd k3 = f(x + 0.5 * dt * k2.head(d), phi + 0.5 * dt * k2[d]);
    VectorXd k4 = f(x + dt * k3.head(d), phi + dt * k3[d]);
    VectorXd dy = dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x += dy.head(d);
    phi += dy[d];
  }
}

}  // namespace detail

/// Flow around the commutator square e^{-eps B} e^{-eps A} e^{eps B} e^{eps A}
/// closed up by e^{-lambda_AB}; the net displacement read through omega,
/// divided by eps^2, estimates the curvature contracted with (A, B).
inline std::vector<ParallelogramSample> parallelogram_probe(
    const CartanGauge& gauge, const VectorXd& x, const VectorXd& a_coords,
    const VectorXd& b_coords, const std::vector<double>& eps_list, int leg_substeps = 64) {
  const LieAlgebra& alg = *gauge.model.algebra;
  CurvatureValue kv = curvature(gauge, x);
  VectorXd u(gauge.chart_dim), v(gauge.chart_dim);
  for (int s = 0; s < gauge.chart_dim; ++s) {
    u[s] = a_coords[gauge.model.solder_indices[static_cast<std::size_t>(s)]];
    v[s] = b_coords[gauge.model.solder_indices[static_cast<std::size_t>(s)]];
  }
  VectorXd reference = kv.contract(u, v);

  std::vector<ParallelogramSample> out;
  for (double eps : eps_list) {
    // temporal leg order realizing the commutator square: constant-field flows
    // compose like right translations, so the B leg runs first
    VectorXd xx = x;
    double phi = 0.0;
    detail::advance_constant_fixed(gauge, b_coords, xx, phi, eps, leg_substeps);
    detail::advance_constant_fixed(gauge, a_coords, xx, phi, eps, leg_substeps);
    detail::advance_constant_fixed(gauge, b_coords, xx, phi, -eps, leg_substeps);
    detail::advance_constant_fixed(gauge, a_coords, xx, phi, -eps, leg_substeps);
    MatrixXd am = alg.materialize(a_coords), bm = alg.materialize(b_coords);
    MatrixXd closure = expm(MatrixXd(eps * bm)) * expm(MatrixXd(eps * am)) *
                       expm(MatrixXd(-eps * bm)) * expm(MatrixXd(-eps * am));
    VectorXd lambda = alg.project_checked(logm_near_identity(closure));
    detail::advance_constant_fixed(gauge, VectorXd(-lambda), xx, phi, 1.0, leg_substeps);

    VectorXd dx = gauge.domain.wrap_diff(xx, x);
    VectorXd displacement = read_displacement(gauge, x, 0.0, dx, phi);
    ParallelogramSample smp;
    smp.eps = eps;
    smp.estimate = displacement / (eps * eps);
    smp.reference = reference;
    smp.abs_error = (smp.estimate - reference).cwiseAbs().maxCoeff();
    double refn = reference.cwiseAbs().maxCoeff();
    smp.rel_error = refn > 0.0 ? smp.abs_error / refn : smp.abs_error;
    out.push_back(std::move(smp));
  }
  return out;
}

}  // namespace cartan
