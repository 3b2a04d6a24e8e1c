#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cartan/frames.hpp"

using namespace cartan;

namespace {

FrenetData constant_data(double k, double t, double s1) {
  FrenetData d;
  d.k = [k](double) { return k; };
  d.t = [t](double) { return t; };
  d.s0 = 0.0;
  d.s1 = s1;
  return d;
}

}  // namespace

TEST_CASE("unit circle closes after 2 pi") {
  SpaceCurve c = frenet_reconstruct(constant_data(1.0, 0.0, 2.0 * M_PI), 1e-3);
  CHECK((c.x.back() - c.x.front()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(max_abs(c.frame.back() - c.frame.front()) < 1e-8);
  // radius 1 about the center (0, 1, 0)
  VectorXd center(3);
  center << 0.0, 1.0, 0.0;
  for (std::size_t i = 0; i < c.x.size(); i += 500)
    CHECK(std::abs((c.x[i] - center).norm() - 1.0) < 1e-9);
  // planar: third coordinate stays zero
  for (std::size_t i = 0; i < c.x.size(); i += 500) CHECK(std::abs(c.x[i][2]) < 1e-12);
}

TEST_CASE("helices have the predicted radius about the screw axis") {
  for (auto [k, t] : {std::pair{1.0, 0.5}, std::pair{2.0, 1.0}}) {
    SpaceCurve c = frenet_reconstruct(constant_data(k, t, 12.0), 1e-3);
    double w2 = k * k + t * t;
    // screw axis of the constant motion: through (omega x v)/|omega|^2 along
    // omega = (t, 0, k), with v = e1
    VectorXd omega(3), axis_point(3);
    omega << t, 0.0, k;
    axis_point << 0.0, k / w2, 0.0;
    VectorXd u = omega.normalized();
    double want = k / w2;
    for (std::size_t i = 0; i < c.x.size(); i += 997) {
      VectorXd d = c.x[i] - axis_point;
      VectorXd perp = d - d.dot(u) * u;
      CHECK(std::abs(perp.norm() - want) < 1e-6);
    }
  }
}

TEST_CASE("reflected initial frame mirrors the curve") {
  FrenetData data = constant_data(1.0, 0.0, 3.0);
  SpaceCurve plain = frenet_reconstruct(data, 1e-3);
  FrenetData mirrored = data;
  mirrored.initial_pose = MatrixXd::Identity(4, 4);
  mirrored.initial_pose(2, 2) = -1.0;
  SpaceCurve flipped = frenet_reconstruct(mirrored, 1e-3);
  for (std::size_t i = 0; i < plain.x.size(); i += 400) {
    CHECK(std::abs(plain.x[i][0] - flipped.x[i][0]) < 1e-12);
    CHECK(std::abs(plain.x[i][1] - flipped.x[i][1]) < 1e-12);
    CHECK(std::abs(plain.x[i][2] + flipped.x[i][2]) < 1e-12);
  }
}

TEST_CASE("rigid motions act exactly on reconstructions") {
  FrenetData data;
  data.k = [](double s) { return 1.0 + 0.3 * std::sin(s); };
  data.t = [](double s) { return 0.4 * std::cos(0.5 * s); };
  data.s0 = 0.0;
  data.s1 = 4.0;
  SpaceCurve base = frenet_reconstruct(data, 1e-3);

  const LieAlgebra& se3 = builtin_algebra("se3");
  VectorXd c(6);
  c << 0.3, -0.8, 0.5, 1.0, -2.0, 0.7;
  MatrixXd g = exp(se3, element(se3, c), 1.0).matrix;
  FrenetData moved = data;
  moved.initial_pose = g;
  SpaceCurve image = frenet_reconstruct(moved, 1e-3);
  for (std::size_t i = 0; i < base.x.size(); i += 333) {
    VectorXd want = g.topLeftCorner(3, 3) * base.x[i] + g.topRightCorner(3, 1);
    CHECK((image.x[i] - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("unit speed and frame orthonormality hold along the curve") {
  FrenetData data;
  data.k = [](double s) { return 1.2 + 0.5 * std::cos(s); };
  data.t = [](double s) { return 0.3 * std::sin(s); };
  data.s0 = 0.0;
  data.s1 = 20.0;
  SpaceCurve c = frenet_reconstruct(data, 1e-3);
  double worst_orth = 0.0;
  for (std::size_t i = 0; i < c.frame.size(); i += 100) {
    MatrixXd f = c.frame[i];
    worst_orth = std::max(worst_orth, max_abs(f.transpose() * f - MatrixXd::Identity(3, 3)));
  }
  CHECK(worst_orth < 1e-9);
  double worst_speed = 0.0;
  for (std::size_t i = 1; i + 1 < c.x.size(); i += 50) {
    double ds = c.s[i + 1] - c.s[i - 1];
    worst_speed = std::max(worst_speed, std::abs((c.x[i + 1] - c.x[i - 1]).norm() / ds - 1.0));
  }
  CHECK(worst_speed < 1e-6);
}

TEST_CASE("curvature too small is rejected") {
  CHECK_THROWS_AS(frenet_reconstruct(constant_data(1e-9, 0.0, 1.0), 1e-2), CurvatureTooSmall);
  FrenetData dips;
  dips.k = [](double s) { return 1.0 - s; };  // hits zero at s = 1
  dips.t = [](double) { return 0.0; };
  dips.s0 = 0.0;
  dips.s1 = 2.0;
  CHECK_THROWS_AS(frenet_reconstruct(dips, 1e-2), CurvatureTooSmall);
}

TEST_CASE("curvature and torsion extraction") {
  SUBCASE("circle of radius 2") {
    std::vector<double> s;
    std::vector<VectorXd> x;
    int n = 10000;
    for (int i = 0; i < n; ++i) {
      double si = 4.0 * M_PI * i / (n - 1);  // arclength on radius 2: angle = s/2
      s.push_back(si);
      VectorXd p(3);
      p << 2.0 * std::cos(si / 2.0), 2.0 * std::sin(si / 2.0), 0.0;
      x.push_back(p);
    }
    CurvatureTorsionSamples out = curvature_torsion(s, x);
    for (std::size_t i = 0; i < out.k.size(); i += 1000) {
      CHECK(std::abs(out.k[i] - 0.5) < 1e-6);
      REQUIRE(out.torsion_defined[i]);
      CHECK(std::abs(out.t[i]) < 1e-6);
    }
  }
  SUBCASE("straight lines flag the degenerate branch") {
    std::vector<double> s;
    std::vector<VectorXd> x;
    for (int i = 0; i < 50; ++i) {
      s.push_back(0.1 * i);
      VectorXd p(3);
      p << 0.1 * i, 0.2 * i, -0.05 * i;
      x.push_back(p);
    }
    CurvatureTorsionSamples out = curvature_torsion(s, x);
    for (std::size_t i = 0; i < out.k.size(); ++i) {
      CHECK(out.k[i] < 1e-10);
      CHECK_FALSE(out.torsion_defined[i]);
    }
  }
  SUBCASE("helix round trip recovers its data") {
    SpaceCurve c = frenet_reconstruct(constant_data(1.0, 0.5, 10.0), 1e-3);
    CurvatureTorsionSamples out = curvature_torsion(c);
    double worst_k = 0.0, worst_t = 0.0;
    for (std::size_t i = 0; i < out.k.size(); ++i) {
      worst_k = std::max(worst_k, std::abs(out.k[i] - 1.0));
      REQUIRE(out.torsion_defined[i]);
      worst_t = std::max(worst_t, std::abs(out.t[i] - 0.5));
    }
    CHECK(worst_k < 1e-4);
    CHECK(worst_t < 1e-4);
  }
  SUBCASE("too few samples are rejected") {
    std::vector<double> s{0, 0.1, 0.2};
    std::vector<VectorXd> x(3, VectorXd::Zero(3));
    CHECK_THROWS_AS(curvature_torsion(s, x), DegenerateCurve);
  }
}

TEST_CASE("varying-profile round trip") {
  FrenetData data;
  data.k = [](double s) { return 1.0 + 0.25 * std::sin(0.7 * s); };
  data.t = [](double s) { return 0.5 + 0.2 * std::cos(s); };
  data.s0 = 0.0;
  data.s1 = 8.0;
  SpaceCurve c = frenet_reconstruct(data, 1e-3);
  CurvatureTorsionSamples out = curvature_torsion(c);
  double worst = 0.0;
  for (std::size_t i = 0; i < out.s.size(); ++i) {
    worst = std::max(worst, std::abs(out.k[i] - data.k(out.s[i])));
    worst = std::max(worst, std::abs(out.t[i] - data.t(out.s[i])));
  }
  CHECK(worst < 1e-4);
}
