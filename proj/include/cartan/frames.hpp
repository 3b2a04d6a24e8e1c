#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "cartan/lie_equation.hpp"

namespace cartan {

inline constexpr double frenet_k_min = 1e-8;

/// Curvature/torsion profiles over an arclength range, plus the starting pose
/// as a rigid motion (4x4, frame block and base point).
struct FrenetData {
  std::function<double(double)> k;
  std::function<double(double)> t;
  double s0 = 0.0, s1 = 1.0;
  MatrixXd initial_pose = MatrixXd::Identity(4, 4);
};

struct SpaceCurve {
  std::vector<double> s;
  std::vector<VectorXd> x;       // base points, R^3
  std::vector<MatrixXd> frame;   // orthonormal frames, columns T, N, B
};

/// Integrate the moving frame: the signal has the skew rotation block
/// ((0,-k,0),(k,0,-t),(0,t,0)) and translation part e1, so the base point
/// moves along the first frame vector at unit speed.
inline SpaceCurve frenet_reconstruct(const FrenetData& data, double h) {
  const LieAlgebra& se3 = builtin_algebra("se3");
  {
    const auto nchecks = static_cast<std::size_t>(std::ceil((data.s1 - data.s0) / h)) + 1;
    for (std::size_t i = 0; i < nchecks; ++i) {
      double s = std::min(data.s0 + static_cast<double>(i) * h, data.s1);
      if (!(data.k(s) >= frenet_k_min))
        throw CurvatureTooSmall("curvature below " + fmt17(frenet_k_min) + " at s = " + fmt17(s));
    }
  }
  auto kf = data.k;
  auto tf = data.t;
  DarbouxSignal sig = DarbouxSignal::from_function(se3, [kf, tf](double s) {
    VectorXd c = VectorXd::Zero(6);
    // rotation block on (L1, L2, L3): omega = (t, 0, k)
    c[0] = tf(s);
    c[2] = kf(s);
    c[3] = 1.0;  // translation along the first frame vector
    return c;
  });
  GroupElement g0{&se3, data.initial_pose};
  GroupTrajectory traj = solve(sig, g0, data.s0, data.s1, Method::rkmk4, h);
  SpaceCurve curve;
  curve.s = traj.times;
  for (const auto& g : traj.matrices) {
    curve.x.push_back(g.topRightCorner(3, 1));
    curve.frame.push_back(g.topLeftCorner(3, 3));
  }
  return curve;
}

struct CurvatureTorsionSamples {
  std::vector<double> s;
  std::vector<double> k;
  std::vector<double> t;              // valid where torsion_defined
  std::vector<bool> torsion_defined;  // false flags the degenerate branch
};

/// Discrete Frenet data from uniformly sampled points: k = |x' x x''| and
/// t = det(x',x'',x''')/|x' x x''|^2 with 4th-order centered stencils.
/// Torsion is reported only where k > 10 k_min.
inline CurvatureTorsionSamples curvature_torsion(const std::vector<double>& s,
                                                 const std::vector<VectorXd>& x) {
  const std::size_t n = s.size();
  if (n != x.size() || n < 7) throw DegenerateCurve("need at least 7 uniform samples");
  double h = s[1] - s[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(s[i] - s[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw BadParams("curvature_torsion expects uniform arclength samples");

  CurvatureTorsionSamples out;
  auto cross = [](const VectorXd& a, const VectorXd& b) {
    VectorXd c(3);
    c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
    return c;
  };
  for (std::size_t i = 3; i + 3 < n; ++i) {
    VectorXd d1 = (-x[i + 2] + 8.0 * x[i + 1] - 8.0 * x[i - 1] + x[i - 2]) / (12.0 * h);
    VectorXd d2 = (-x[i + 2] + 16.0 * x[i + 1] - 30.0 * x[i] + 16.0 * x[i - 1] - x[i - 2]) /
                  (12.0 * h * h);
    VectorXd d3 = (-x[i + 3] + 8.0 * x[i + 2] - 13.0 * x[i + 1] + 13.0 * x[i - 1] -
                   8.0 * x[i - 2] + x[i - 3]) /
                  (8.0 * h * h * h);
    VectorXd c12 = cross(d1, d2);
    double kv = c12.norm();
    out.s.push_back(s[i]);
    out.k.push_back(kv);
    if (kv > 10.0 * frenet_k_min) {
      out.t.push_back(c12.dot(d3) / (kv * kv));
      out.torsion_defined.push_back(true);
    } else {
      out.t.push_back(0.0);
      out.torsion_defined.push_back(false);
    }
  }
  return out;
}

inline CurvatureTorsionSamples curvature_torsion(const SpaceCurve& curve) {
  return curvature_torsion(curve.s, curve.x);
}

}  // namespace cartan
