#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cartan/flows.hpp"

using namespace cartan;

namespace {

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

VectorXd vec3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

VectorXd vec4(double a, double b, double c, double d) {
  VectorXd v(4);
  v << a, b, c, d;
  return v;
}

SurfaceMetric surface(const std::string& name, const GeometryParams& params = {}) {
  return std::get<SurfaceMetric>(builtin_geometry(name, params));
}

GeometryParams revolution_params(std::vector<double> coeffs, double zmin = -10,
                                 double zmax = 10) {
  GeometryParams p;
  p.lambda = Profile::from_poly(coeffs);
  p.values["zmin"] = {zmin};
  p.values["zmax"] = {zmax};
  return p;
}

}  // namespace

TEST_CASE("constant flows") {
  SUBCASE("pure rotation keeps the base point still") {
    CartanGauge g = levi_civita_gauge(surface("sphere_polar"));
    FlowState st;
    st.x = vec2(1.0, 0.3);
    st.phi = 0.2;
    FlowTrajectory traj = constant_flow(g, vec3(1.0, 0.0, 0.0), st, 2.0, 1e-3);
    REQUIRE(traj.report.outcome == ProbeOutcome::reached_tmax);
    for (std::size_t i = 0; i < traj.times.size(); i += 500) {
      CHECK((traj.states[i].head(2) - st.x).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(traj.states[i][2] - (0.2 + traj.times[i])) < 1e-12);
    }
  }
  SUBCASE("tan-plane diagonal field escapes at pi/2") {
    CartanGauge g = coframing_gauge(surface("tan_plane"));
    FlowState st;
    st.x = vec2(0.0, 0.0);
    FlowTrajectory traj = constant_flow(g, vec2(1.0, 1.0), st, 10.0, 1e-3);
    CHECK(traj.report.outcome == ProbeOutcome::escaped);
    CHECK(std::abs(traj.report.t_end - M_PI / 2.0) < 0.01);
    // matches (tan t, tan t) while it lasts
    for (std::size_t i = 0; i < traj.times.size(); i += 200) {
      double t = traj.times[i];
      if (t > 1.4) break;
      CHECK(std::abs(traj.states[i][0] - std::tan(t)) < 1e-6);
      CHECK(std::abs(traj.states[i][1] - std::tan(t)) < 1e-6);
    }
  }
  SUBCASE("tan-plane horizontal field is complete") {
    CartanGauge g = coframing_gauge(surface("tan_plane"));
    FlowState st;
    st.x = vec2(0.0, 0.0);
    FlowTrajectory traj = constant_flow(g, vec2(1.0, 0.0), st, 100.0, 1e-3);
    CHECK(traj.report.outcome == ProbeOutcome::reached_tmax);
    CHECK(std::abs(traj.end_state()[0] - 100.0) < 1e-6);  // y = 0 keeps the rate at 1
  }
  SUBCASE("rescaling a constant field reparameterizes its flow") {
    CartanGauge g = levi_civita_gauge(surface("sphere_polar"));
    FlowState st;
    st.x = vec2(1.1, -0.4);
    VectorXd a = vec3(0.3, 0.8, -0.5);
    FlowTrajectory once = constant_flow(g, a, st, 2.0, 1e-3);
    FlowTrajectory twice = constant_flow(g, VectorXd(2.0 * a), st, 1.0, 5e-4);
    REQUIRE(once.times.size() == twice.times.size());
    for (std::size_t i = 0; i < once.times.size(); i += 100)
      CHECK((once.states[i] - twice.states[i]).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("geodesic flows") {
  SUBCASE("euclidean geodesics are straight with unit speed") {
    CartanGauge g = levi_civita_gauge(surface("euclidean"));
    FlowTrajectory traj = geodesic_flow(g, vec2(0.0, 0.0), 0.7, 5.0, 1e-3);
    REQUIRE(traj.report.outcome == ProbeOutcome::reached_tmax);
    CHECK(std::abs(traj.end_state()[0] - 5.0 * std::cos(0.7)) < 1e-9);
    CHECK(std::abs(traj.end_state()[1] - 5.0 * std::sin(0.7)) < 1e-9);
  }
  SUBCASE("sphere equator returns and passes the antipode") {
    CartanGauge g = levi_civita_gauge(surface("sphere_polar"));
    FlowTrajectory traj = geodesic_flow(g, vec2(M_PI / 2.0, 0.0), M_PI / 2.0, 2.0 * M_PI, 1e-3);
    REQUIRE(traj.report.outcome == ProbeOutcome::reached_tmax);
    for (std::size_t i = 0; i < traj.times.size(); i += 700) {
      CHECK(std::abs(traj.states[i][0] - M_PI / 2.0) < 1e-9);
      CHECK(std::abs(traj.states[i][1] - traj.times[i]) < 1e-8);
    }
  }
  SUBCASE("hyperbolic geodesic from (0,1) heading +x stays on the unit circle") {
    CartanGauge g = levi_civita_gauge(surface("hyperbolic_half_plane"));
    FlowTrajectory traj = geodesic_flow(g, vec2(0.0, 1.0), 0.0, 2.0, 1e-3);
    REQUIRE(traj.report.outcome == ProbeOutcome::reached_tmax);
    for (std::size_t i = 0; i < traj.times.size(); i += 250) {
      double x = traj.states[i][0], y = traj.states[i][1];
      CHECK(std::abs(x * x + y * y - 1.0) < 1e-5);
    }
  }
}

TEST_CASE("revolution spirals") {
  SUBCASE("meridians run straight up the profile") {
    Profile lam = Profile::from_poly({0.1, 0.2, -0.3});
    FlowTrajectory traj = revolution_spiral(lam, 0.0, vec3(0.1, 0.7, 0.0), 3.0, 1e-3);
    REQUIRE(traj.report.outcome == ProbeOutcome::reached_tmax);
    CHECK(std::abs(traj.end_state()[0] - (0.1 + 3.0)) < 1e-10);
    CHECK(std::abs(traj.end_state()[1] - 0.7) < 1e-12);
    CHECK(std::abs(traj.end_state()[2]) < 1e-12);
  }
  SUBCASE("latitudes at critical heights are geodesics") {
    // lambda = 0.3 z^2 has lambda'(0) = 0
    Profile lam = Profile::from_poly({0.0, 0.0, 0.3});
    FlowTrajectory traj = revolution_spiral(lam, 0.0, vec3(0.0, 0.2, M_PI / 2.0), 4.0, 1e-3);
    REQUIRE(traj.report.outcome == ProbeOutcome::reached_tmax);
    CHECK(std::abs(traj.end_state()[0]) < 1e-10);
    CHECK(std::abs(traj.end_state()[2] - M_PI / 2.0) < 1e-10);
    CHECK(std::abs(traj.end_state()[1] - (0.2 - 4.0 * std::exp(-lam(0.0)))) < 1e-9);
  }
  SUBCASE("clairault integral is conserved on geodesics") {
    Profile lam = Profile::from_poly({0.0, 0.15, -0.6, 0.0, -0.2});
    FlowTrajectory traj = revolution_spiral(lam, 0.0, vec3(0.1, 0.0, 1.1), 100.0, 1e-3);
    REQUIRE(traj.report.outcome == ProbeOutcome::reached_tmax);
    CHECK(traj.report.max_monitor_drift < 1e-8);
  }
  SUBCASE("finite-time identity holds along non-geodesic spirals") {
    Profile lam = Profile::from_poly({0.0, 0.1, -0.4});
    FlowTrajectory traj = revolution_spiral(lam, 0.7, vec3(0.2, 0.0, 0.4), 20.0, 1e-3);
    REQUIRE(traj.report.outcome == ProbeOutcome::reached_tmax);
    double worst = 0.0;
    for (const auto& m : traj.monitors) worst = std::max(worst, std::abs(m[1]));
    CHECK(worst < 1e-6);
    // the identity also holds between interior sample pairs via the running
    // integral: sin(phi_b) - e^{la-lb} sin(phi_a) - c0 e^{-lb} (L_b - L_a)
    for (std::size_t a = 100; a + 100 < traj.states.size(); a += 4999) {
      std::size_t b = a + 100;
      double la = lam(traj.states[a][0]), lb = lam(traj.states[b][0]);
      double resid = std::sin(traj.states[b][2]) -
                     std::exp(la - lb) * std::sin(traj.states[a][2]) -
                     0.7 * std::exp(-lb) * (traj.states[b][3] - traj.states[a][3]);
      CHECK(std::abs(resid) < 1e-6);
    }
  }
  SUBCASE("dedicated spiral matches the gauge-route constant flow") {
    std::vector<double> coeffs{0.0, 0.1, -0.4};
    Profile lam = Profile::from_poly(coeffs);
    double c0 = 0.5;
    VectorXd start = vec3(0.2, 0.3, 0.9);
    FlowTrajectory dedicated = revolution_spiral(lam, c0, start, 5.0, 1e-3);
    CartanGauge g = levi_civita_gauge(surface("revolution", revolution_params(coeffs)));
    FlowState st;
    st.x = vec2(start[0], start[1]);
    st.phi = start[2];
    FlowTrajectory via_gauge = constant_flow(g, vec3(c0, 1.0, 0.0), st, 5.0, 1e-3);
    REQUIRE(dedicated.times.size() == via_gauge.times.size());
    for (std::size_t i = 0; i < dedicated.times.size(); i += 333) {
      CHECK(std::abs(dedicated.states[i][0] - via_gauge.states[i][0]) < 1e-9);
      CHECK(std::abs(dedicated.states[i][1] - via_gauge.states[i][1]) < 1e-9);
      CHECK(std::abs(dedicated.states[i][2] - via_gauge.states[i][2]) < 1e-9);
    }
  }
  SUBCASE("bounded profiles stop at the chart edge") {
    std::vector<double> z{-1.0, 0.0, 1.0}, v{0.0, 0.0, 0.0};
    Profile lam = Profile::from_table(z, v);
    FlowTrajectory traj = revolution_spiral(lam, 0.0, vec3(0.0, 0.0, 0.0), 10.0, 1e-3);
    CHECK(traj.report.outcome == ProbeOutcome::escaped);
    CHECK(std::abs(traj.report.t_end - 1.0) < 0.01);
  }
}

TEST_CASE("lorentz geodesics") {
  SUBCASE("clifton-pohl null geodesic blows up in finite time") {
    LorentzFamily fam = std::get<LorentzFamily>(builtin_geometry("clifton_pohl", {}));
    FlowTrajectory traj = lorentz_geodesic(fam, vec4(1.0, 0.0, 1.0, 0.0), 1.05, 1e-4);
    CHECK(traj.report.outcome == ProbeOutcome::escaped);
    CHECK(traj.report.t_end < 1.01);
    double worst_rel = 0.0, worst_energy = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      double t = traj.times[i];
      if (t > 0.9) break;
      double want = 1.0 / (1.0 - t);
      worst_rel = std::max(worst_rel, std::abs(traj.states[i][0] - want) / want);
      worst_energy = std::max(worst_energy, std::abs(traj.monitors[i][1]));
    }
    CHECK(worst_rel < 1e-5);
    CHECK(worst_energy < 1e-7);
    CHECK(std::abs(traj.states.back()[1]) < 1e-12);  // stays on the axis
  }
  SUBCASE("flat lorentz plane has straight geodesics and exact integral") {
    GeometryParams p;
    p.f = Profile::from_poly({0.0});
    LorentzFamily fam = std::get<LorentzFamily>(builtin_geometry("lorentz_f", p));
    FlowTrajectory traj = lorentz_geodesic(fam, vec4(0.0, 0.0, 0.3, -0.8), 10.0, 1e-3);
    CHECK(traj.report.outcome == ProbeOutcome::reached_tmax);
    CHECK(std::abs(traj.end_state()[0] - 3.0) < 1e-9);
    CHECK(std::abs(traj.end_state()[1] + 8.0) < 1e-9);
    CHECK(traj.report.max_monitor_drift < 1e-12);
  }
  SUBCASE("first-kind null geodesics of the f family blow up where f vanishes") {
    GeometryParams p;
    p.f = Profile::from_poly({1.0, 0.0, -1.0});  // f(x) = 1 - x^2
    LorentzFamily fam = std::get<LorentzFamily>(builtin_geometry("lorentz_f", p));
    // null start of the first kind: xdot = -f(x) ydot / 2
    double ydot0 = 1.0;
    FlowTrajectory traj = lorentz_geodesic(fam, vec4(0.0, 0.0, -0.5 * ydot0, ydot0), 3.0, 1e-4);
    CHECK(traj.report.outcome == ProbeOutcome::escaped);
    double i0 = traj.monitors.front()[0];
    CHECK(std::abs(i0 - 0.5) < 1e-14);
    // first-integral relations hold on the resolved region; the last steps
    // before the blow-up are outside any fixed-step accuracy budget
    std::size_t checked = 0;
    for (std::size_t i = 0; i < traj.times.size(); i += 200) {
      double x = traj.states[i][0], xd = traj.states[i][2], yd = traj.states[i][3];
      if (std::abs(yd) > 50.0) break;
      double f = 1.0 - x * x;
      CHECK(std::abs(traj.monitors[i][0] - i0) < 1e-8);
      CHECK(std::abs(xd + i0) < 1e-8);
      CHECK(std::abs(f * yd - 2.0 * i0) < 1e-7);
      ++checked;
    }
    CHECK(checked > 50);
  }
}

TEST_CASE("polar chart degeneracy collapses the step") {
  // unit-speed run into the pole: the soldering condition number blows up
  // before the hard boundary, so the probe reports step collapse near pi/2
  CartanGauge g = levi_civita_gauge(surface("sphere_polar"));
  FlowTrajectory traj = geodesic_flow(g, vec2(M_PI / 2.0, 0.0), 0.0, 3.0, 1e-3);
  CHECK(traj.report.outcome == ProbeOutcome::step_collapse);
  CHECK(std::abs(traj.report.t_end - M_PI / 2.0) < 1e-4);
  CHECK(traj.end_state()[0] < M_PI);
}

TEST_CASE("clifton can flows reach tmax") {
  SurfaceMetric can = surface("clifton_can");
  CartanGauge g = coframing_gauge(can);
  FlowState st;
  st.x = vec2(0.5, 0.0);
  FlowTrajectory traj = constant_flow(g, vec2(1.0, 0.0), st, 200.0, 1e-3);
  CHECK(traj.report.outcome == ProbeOutcome::reached_tmax);
  CHECK(blow_up_probe(traj).outcome == ProbeOutcome::reached_tmax);
  double zmin = 1e9, zmax = -1e9;
  for (const auto& s : traj.states) {
    zmin = std::min(zmin, s[0]);
    zmax = std::max(zmax, s[0]);
  }
  // trapped between invariant circles of the rotating frame
  CHECK(zmin > 1.0 / (1.5 * M_PI));
  CHECK(zmax < 0.75);
}
