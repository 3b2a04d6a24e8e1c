#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "cartan/errors.hpp"

namespace cartan {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline MatrixXd rot2(double theta) {
  MatrixXd r(2, 2);
  r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return r;
}

// exp of a 3x3 skew matrix by Rodrigues' formula.
inline MatrixXd exp_skew3(const MatrixXd& w) {
  double x = w(2, 1), y = w(0, 2), z = w(1, 0);
  double th = std::sqrt(x * x + y * y + z * z);
  MatrixXd id = MatrixXd::Identity(3, 3);
  if (th < 1e-12) return id + w + 0.5 * w * w;
  double a = std::sin(th) / th;
  double b = (1.0 - std::cos(th)) / (th * th);
  return id + a * w + b * w * w;
}

// V(w) = sum_k w^k/(k+1)! for skew w of size 2 or 3; exp([[w,v],[0,0]]) = [[exp w, Vv],[0,1]].
inline MatrixXd se_translation_factor(const MatrixXd& w) {
  const auto n = w.rows();
  double th;
  if (n == 2) {
    th = std::abs(w(1, 0));
  } else {
    th = std::sqrt(w(2, 1) * w(2, 1) + w(0, 2) * w(0, 2) + w(1, 0) * w(1, 0));
  }
  MatrixXd id = MatrixXd::Identity(n, n);
  if (th < 1e-6) return id + 0.5 * w + w * w / 6.0 + w * w * w / 24.0;
  double b = (1.0 - std::cos(th)) / (th * th);
  double c = (th - std::sin(th)) / (th * th * th);
  return id + b * w + c * w * w;
}

// Scaling-and-squaring with diagonal Pade order 6; squarings chosen so the
// scaled norm is below 1/4.
inline MatrixXd expm_pade(const MatrixXd& a) {
  const auto n = a.rows();
  double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int s = 0;
  if (nrm > 0.25) s = static_cast<int>(std::ceil(std::log2(nrm / 0.25)));
  MatrixXd x = a / std::pow(2.0, s);

  // c_k = (12-k)! 6! / (12! k! (6-k)!)
  double c[7];
  c[0] = 1.0;
  for (int k = 1; k <= 6; ++k) c[k] = c[k - 1] * (7.0 - k) / (k * (13.0 - k));

  MatrixXd x2 = x * x;
  MatrixXd even = c[0] * MatrixXd::Identity(n, n) + c[2] * x2;
  MatrixXd odd = c[1] * MatrixXd::Identity(n, n) + c[3] * x2;
  MatrixXd x4 = x2 * x2;
  even += c[4] * x4;
  odd += c[5] * x4;
  even += c[6] * x4 * x2;
  odd = x * odd;

  MatrixXd num = even + odd;
  MatrixXd den = even - odd;
  MatrixXd r = den.partialPivLu().solve(num);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

// Matrix exponential with closed forms for rotation and rigid-motion shapes.
inline MatrixXd expm(const MatrixXd& a) {
  const auto n = a.rows();
  auto is_zero = [&](double v) { return std::abs(v) < 1e-300; };
  if (n == 2 && is_zero(a(0, 0)) && is_zero(a(1, 1)) && std::abs(a(0, 1) + a(1, 0)) < 1e-300) {
    return rot2(a(0, 1));
  }
  if (n == 3 && max_abs(a + a.transpose()) < 1e-300) {
    return exp_skew3(a);
  }
  if ((n == 3 || n == 4) && a.row(n - 1).cwiseAbs().maxCoeff() < 1e-300) {
    MatrixXd w = a.topLeftCorner(n - 1, n - 1);
    if (max_abs(w + w.transpose()) < 1e-300) {
      MatrixXd g = MatrixXd::Identity(n, n);
      g.topLeftCorner(n - 1, n - 1) = (n == 4) ? exp_skew3(w) : rot2(w(0, 1));
      g.topRightCorner(n - 1, 1) = se_translation_factor(w) * a.topRightCorner(n - 1, 1);
      return g;
    }
  }
  return expm_pade(a);
}

// log of a matrix near the identity, by the Mercator series.
inline MatrixXd logm_near_identity(const MatrixXd& g) {
  const auto n = g.rows();
  MatrixXd x = g - MatrixXd::Identity(n, n);
  if (max_abs(x) > 0.5) throw SingularMatrixError("logm: matrix too far from identity");
  MatrixXd term = x;
  MatrixXd acc = x;
  for (int k = 2; k <= 60; ++k) {
    term = term * x;
    acc += (k % 2 == 0 ? -1.0 : 1.0) / k * term;
    if (max_abs(term) < 1e-18) break;
  }
  return acc;
}

inline double condition_number(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

inline MatrixXd invert_checked(const MatrixXd& m, const char* what) {
  Eigen::FullPivLU<MatrixXd> lu(m);
  if (!lu.isInvertible()) throw SingularMatrixError(std::string(what) + ": singular matrix");
  return lu.inverse();
}

// Deterministic pseudo-random stream for property tests and sweeps.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  double uniform(double lo, double hi) {
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    double u = static_cast<double>(state_ >> 11) / 9007199254740992.0;
    return lo + (hi - lo) * u;
  }

 private:
  std::uint64_t state_;
};

}  // namespace cartan
