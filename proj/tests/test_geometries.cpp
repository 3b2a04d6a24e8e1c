#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cartan/geometries.hpp"

using namespace cartan;

namespace {

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

SurfaceMetric surface(const std::string& name, const GeometryParams& params = {}) {
  return std::get<SurfaceMetric>(builtin_geometry(name, params));
}

GeometryParams revolution_params(std::vector<double> coeffs) {
  GeometryParams p;
  p.lambda = Profile::from_poly(coeffs);
  p.values["zmin"] = {-10.0};
  p.values["zmax"] = {10.0};
  return p;
}

// Independent conformal-factor oracle: for e = w(x,y) I the curvature is
// -(laplacian of log w)/w^2, evaluated here with central differences.
double conformal_curvature_oracle(const std::function<double(double, double)>& w, double x,
                                  double y) {
  auto logw = [&](double a, double b) { return std::log(w(a, b)); };
  double h = 1e-4;
  double lap = (logw(x + h, y) + logw(x - h, y) + logw(x, y + h) + logw(x, y - h) -
                4.0 * logw(x, y)) /
               (h * h);
  return -lap / (w(x, y) * w(x, y));
}

}  // namespace

TEST_CASE("builtin coframes") {
  SUBCASE("euclidean is the identity") {
    SurfaceMetric m = surface("euclidean");
    CHECK(max_abs(m.coframe_at(vec2(3.0, -2.0)) - MatrixXd::Identity(2, 2)) == 0.0);
  }
  SUBCASE("revolution with lambda = 0 is the flat cylinder") {
    SurfaceMetric m = surface("revolution", revolution_params({0.0}));
    CHECK(max_abs(m.coframe_at(vec2(1.3, 0.4)) - MatrixXd::Identity(2, 2)) == 0.0);
  }
  SUBCASE("disk coframe scales by sqrt(1 - r^2)") {
    SurfaceMetric m = surface("disk_extendability");
    CHECK(max_abs(m.coframe_at(vec2(0.0, 0.0)) - MatrixXd::Identity(2, 2)) == 0.0);
    MatrixXd e = m.coframe_at(vec2(0.6, 0.0));
    CHECK(e(0, 0) == doctest::Approx(0.8));
    CHECK(e(1, 1) == doctest::Approx(0.8));
  }
  SUBCASE("unknown names and bad parameters are rejected") {
    CHECK_THROWS_AS(builtin_geometry("moebius", {}), UnknownGeometry);
    GeometryParams p;
    p.values["beta"] = {-1.0};
    CHECK_THROWS_AS(builtin_geometry("cone", p), BadParams);
  }
}

TEST_CASE("levi-civita connection components") {
  SUBCASE("euclidean has gamma = 0") {
    CartanGauge g = levi_civita_gauge(surface("euclidean"));
    auto a = g.coeffs_at(vec2(0.4, 1.7));
    CHECK(a[0][0] == 0.0);
    CHECK(a[1][0] == 0.0);
  }
  SUBCASE("revolution has gamma = -lambda' e^lambda dtheta") {
    GeometryParams p = revolution_params({0.1, -0.3, 0.2});
    SurfaceMetric m = surface("revolution", p);
    CartanGauge g = levi_civita_gauge(m);
    double z = 0.7;
    Poly lam{{0.1, -0.3, 0.2}};
    Poly dlam = lam.derivative();
    auto a = g.coeffs_at(vec2(z, 1.0));
    CHECK(std::abs(a[0][0]) < 1e-12);
    CHECK(a[1][0] == doctest::Approx(-dlam(z) * std::exp(lam(z))).epsilon(1e-10));
  }
  SUBCASE("hyperbolic half plane has gamma = -dx/y") {
    CartanGauge g = levi_civita_gauge(surface("hyperbolic_half_plane"));
    double x = 0.3, y = 2.0;
    auto a = g.coeffs_at(vec2(x, y));
    CHECK(a[0][0] == doctest::Approx(-1.0 / y).epsilon(1e-10));
    CHECK(std::abs(a[1][0]) < 1e-12);
  }
}

TEST_CASE("gauss curvature catalog") {
  SUBCASE("euclidean vanishes") {
    CHECK(std::abs(gauss_curvature(surface("euclidean"), vec2(1.0, 2.0))) < 1e-10);
  }
  SUBCASE("sphere is +1 across the chart") {
    SurfaceMetric m = surface("sphere_polar");
    for (double th : {0.25, 1.0, 1.8, 2.85})
      CHECK(std::abs(gauss_curvature(m, vec2(th, 0.3)) - 1.0) < 1e-5);
  }
  SUBCASE("hyperbolic half plane is -1 up to large heights") {
    SurfaceMetric m = surface("hyperbolic_half_plane");
    for (double y : {0.5, 1.0, 4.0, 10.0})
      CHECK(std::abs(gauss_curvature(m, vec2(-0.7, y)) + 1.0) < 1e-5);
  }
  SUBCASE("cone is flat away from the tip") {
    GeometryParams p;
    p.values["beta"] = {0.75};
    SurfaceMetric m = surface("cone", p);
    CHECK(std::abs(gauss_curvature(m, vec2(1.0, 0.5))) < 1e-6);
  }
  SUBCASE("revolution matches -(lambda'' + lambda'^2)") {
    std::vector<double> coeffs{0.0, 0.2, -0.4, 0.05};
    SurfaceMetric m = surface("revolution", revolution_params(coeffs));
    Poly lam{coeffs};
    Poly d1 = lam.derivative();
    Poly d2 = d1.derivative();
    for (double z : {-1.0, -0.2, 0.3, 0.9, 1.6}) {
      double want = -(d2(z) + d1(z) * d1(z));
      CHECK(std::abs(gauss_curvature(m, vec2(z, 0.1)) - want) < 1e-5);
    }
  }
  SUBCASE("disk metric against the conformal oracle") {
    SurfaceMetric m = surface("disk_extendability");
    auto w = [](double x, double y) { return std::sqrt(1.0 - x * x - y * y); };
    for (double r : {0.0, 0.3, 0.5}) {
      double got = gauss_curvature(m, vec2(r, 0.0));
      double want = conformal_curvature_oracle(w, r, 0.0);
      CHECK(std::abs(got - want) < 1e-4);
      // closed form of the oracle: 2/(1-r^2)^3
      CHECK(got == doctest::Approx(2.0 / std::pow(1.0 - r * r, 3)).epsilon(1e-5));
    }
  }
  SUBCASE("conformal-scale combination is constant on the disk") {
    SurfaceMetric m = surface("disk_extendability");
    for (double r : {0.0, 0.3, 0.6, 0.9}) {
      double k = gauss_curvature(m, vec2(r, 0.0));
      CHECK(k * std::pow(1.0 - r * r, 3) == doctest::Approx(2.0).epsilon(1e-3));
    }
  }
}

TEST_CASE("gauge curvature route agrees with gauss_curvature") {
  Rng rng(23);
  struct Entry {
    SurfaceMetric m;
    double lo0, hi0, lo1, hi1;
  };
  GeometryParams conep;
  conep.values["beta"] = {0.6};
  std::vector<Entry> entries;
  entries.push_back({surface("euclidean"), -2, 2, -2, 2});
  entries.push_back({surface("hyperbolic_half_plane"), -2, 2, 0.4, 5});
  entries.push_back({surface("sphere_polar"), 0.3, 2.8, -3, 3});
  entries.push_back({surface("revolution", revolution_params({0.0, 0.1, -0.2})), -1, 1, -3, 3});
  entries.push_back({surface("disk_extendability"), -0.6, 0.6, -0.6, 0.6});
  entries.push_back({surface("cone", conep), 0.5, 3.0, 0.5, 5.0});
  for (auto& e : entries) {
    CartanGauge g = levi_civita_gauge(e.m);
    for (int rep = 0; rep < 20; ++rep) {
      VectorXd x = vec2(rng.uniform(e.lo0, e.hi0), rng.uniform(e.lo1, e.hi1));
      if (!e.m.domain.inside(x)) continue;
      double direct = gauss_curvature(e.m, x);
      double via_gauge = curvature(g, x).scalar_K;
      CAPTURE(e.m.name);
      CHECK(std::abs(direct - via_gauge) < 1e-5 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("torsion-free gauges have no solder curvature") {
  Rng rng(31);
  for (const char* name : {"sphere_polar", "hyperbolic_half_plane", "disk_extendability"}) {
    SurfaceMetric m = surface(name);
    CartanGauge g = levi_civita_gauge(m);
    for (int rep = 0; rep < 5; ++rep) {
      VectorXd x = name == std::string("sphere_polar")
                       ? vec2(rng.uniform(0.4, 2.7), rng.uniform(-3.0, 3.0))
                   : name == std::string("hyperbolic_half_plane")
                       ? vec2(rng.uniform(-1.0, 1.0), rng.uniform(0.5, 3.0))
                       : vec2(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
      CurvatureValue k = curvature(g, x);
      CHECK(std::abs(k.k(1, 0, 1)) < 1e-6);
      CHECK(std::abs(k.k(2, 0, 1)) < 1e-6);
    }
  }
}

TEST_CASE("trivial-group coframings") {
  SUBCASE("tan plane") {
    SurfaceMetric m = surface("tan_plane");
    CHECK(m.structure_group == StructureGroup::trivial);
    MatrixXd e = m.coframe_at(vec2(1.0, 2.0));
    CHECK(e(0, 0) == doctest::Approx(1.0 / 5.0));
    CHECK(e(1, 1) == doctest::Approx(1.0 / 2.0));
    CartanGauge g = coframing_gauge(m);
    CHECK(g.model.structure_group_dim() == 0);
    CHECK(validate(g, vec2(0.0, 0.0)).invertible);
  }
  SUBCASE("clifton can rotates the cylinder frame") {
    SurfaceMetric m = surface("clifton_can");
    MatrixXd e = m.coframe_at(vec2(1.0, 0.0));  // phi(1) = 1
    CHECK(e(0, 0) == doctest::Approx(std::cos(1.0)));
    CHECK(e(0, 1) == doctest::Approx(std::sin(1.0)));
    CHECK(e.determinant() == doctest::Approx(1.0));
    CHECK_THROWS_AS(m.coframe_at(vec2(-0.1, 0.0)), DomainError);
  }
}

TEST_CASE("geometry spec parsing") {
  auto [name, params] = parse_geometry_spec(
      "# comment\n"
      "name = revolution\n"
      "param.lambda = 0,0,-0.5\n"
      "param.zmin = -2\n"
      "param.zmax = 2\n");
  CHECK(name == "revolution");
  REQUIRE(params.lambda.has_value());
  CHECK((*params.lambda)(1.0) == doctest::Approx(-0.5));
  SurfaceMetric m = surface(name, params);
  CHECK(m.domain.hi[0] == doctest::Approx(2.0));
  CHECK_THROWS_AS(parse_geometry_spec("param.x = 1\n"), BadParams);
}

TEST_CASE("tabulated profile with derivatives") {
  std::vector<double> z, v;
  for (int i = 0; i <= 60; ++i) {
    double t = -1.5 + 0.05 * i;
    z.push_back(t);
    v.push_back(0.3 * t * t - 0.1 * t);
  }
  Profile p = Profile::from_table(z, v);
  CHECK(p(0.4) == doctest::Approx(0.3 * 0.16 - 0.04).epsilon(1e-6));
  CHECK(p.deriv(0.4) == doctest::Approx(0.6 * 0.4 - 0.1).epsilon(1e-4));
  CHECK(p.deriv2(0.4) == doctest::Approx(0.6).epsilon(2e-2));
  CHECK(p.has_bounds());
  CHECK(p.zmin() == doctest::Approx(-1.5));
}
