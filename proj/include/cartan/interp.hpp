#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cartan/errors.hpp"

namespace cartan {

// Polynomial in the monomial basis, c[0] + c[1] x + ...
struct Poly {
  std::vector<double> coeff;

  double operator()(double x) const {
    double v = 0.0;
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) v = v * x + *it;
    return v;
  }
  Poly derivative() const {
    Poly d;
    for (std::size_t k = 1; k < coeff.size(); ++k) d.coeff.push_back(k * coeff[k]);
    return d;
  }
};

// Natural cubic spline through (x_i, y_i), strictly increasing x.
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw BadParams("spline needs >= 2 matched samples");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw BadParams("spline abscissae must strictly increase");
    m_.assign(n, 0.0);
    if (n == 2) return;
    // Tridiagonal solve for second derivatives, natural end conditions.
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    b[0] = 1.0;
    b[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0;
      b[i] = 2.0 * (h0 + h1);
      c[i] = h1;
      d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < n; ++i) {
      double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
  }

  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }

  double operator()(double x) const { return eval(x, 0); }
  double deriv(double x) const { return eval(x, 1); }
  double deriv2(double x) const { return eval(x, 2); }

 private:
  double eval(double x, int order) const {
    const std::size_t n = x_.size();
    std::size_t i = segment(x);
    double h = x_[i + 1] - x_[i];
    double t = x - x_[i];
    double u = x_[i + 1] - x;
    (void)n;
    switch (order) {
      case 0:
        return (m_[i] * u * u * u + m_[i + 1] * t * t * t) / (6.0 * h) +
               (y_[i] / h - m_[i] * h / 6.0) * u + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * t;
      case 1:
        return (-m_[i] * u * u + m_[i + 1] * t * t) / (2.0 * h) -
               (y_[i] / h - m_[i] * h / 6.0) + (y_[i + 1] / h - m_[i + 1] * h / 6.0);
      default:
        return (m_[i] * u + m_[i + 1] * t) / h;
    }
  }

  std::size_t segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
  }

  std::vector<double> x_, y_, m_;
};

enum class InterpOrder { piecewise_constant, linear, cubic };

// Scalar-valued table interpolant over strictly increasing abscissae.
class Table1D {
 public:
  Table1D() = default;
  Table1D(std::vector<double> x, std::vector<double> y, InterpOrder order)
      : x_(std::move(x)), y_(std::move(y)), order_(order) {
    if (x_.size() != y_.size() || x_.size() < 1) throw BadParams("table needs matched samples");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw BadParams("table abscissae must strictly increase");
    if (order_ == InterpOrder::cubic && x_.size() >= 3) spline_ = CubicSpline(x_, y_);
  }

  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }

  double operator()(double x) const {
    if (x_.size() == 1) return y_[0];
    switch (order_) {
      case InterpOrder::piecewise_constant: {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        return y_[std::min(i, x_.size() - 1)];
      }
      case InterpOrder::linear: {
        std::size_t i = segment(x);
        double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
        return (1.0 - t) * y_[i] + t * y_[i + 1];
      }
      default:
        if (x_.size() < 3) {  // degenerate cubic falls back to linear
          std::size_t i = segment(x);
          double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
          return (1.0 - t) * y_[i] + t * y_[i + 1];
        }
        return spline_(x);
    }
  }

  double deriv(double x) const {
    if (x_.size() == 1) return 0.0;
    switch (order_) {
      case InterpOrder::piecewise_constant:
        return 0.0;
      case InterpOrder::linear: {
        std::size_t i = segment(x);
        return (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
      }
      default:
        if (x_.size() < 3) {
          std::size_t i = segment(x);
          return (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        }
        return spline_.deriv(x);
    }
  }

  double deriv2(double x) const {
    if (order_ == InterpOrder::cubic && x_.size() >= 3) return spline_.deriv2(x);
    return 0.0;
  }

 private:
  std::size_t segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
  }

  std::vector<double> x_, y_;
  InterpOrder order_ = InterpOrder::linear;
  CubicSpline spline_;
};

// Catmull-Rom bicubic interpolation on a uniform rectangular grid.
class BicubicGrid {
 public:
  BicubicGrid() = default;
  BicubicGrid(double x0, double x1, double y0, double y1, std::size_t nx, std::size_t ny,
              std::vector<double> values)  // row-major over y (outer) then x
      : x0_(x0), x1_(x1), y0_(y0), y1_(y1), nx_(nx), ny_(ny), v_(std::move(values)) {
    if (nx_ < 2 || ny_ < 2 || v_.size() != nx_ * ny_) throw BadParams("bad grid shape");
  }

  double operator()(double x, double y) const {
    double fx = (x - x0_) / (x1_ - x0_) * (nx_ - 1);
    double fy = (y - y0_) / (y1_ - y0_) * (ny_ - 1);
    auto ix = clamp_index(fx, nx_);
    auto iy = clamp_index(fy, ny_);
    double tx = fx - ix, ty = fy - iy;
    double rows[4];
    for (int j = -1; j <= 2; ++j) {
      double p[4];
      for (int i = -1; i <= 2; ++i) p[i + 1] = at(ix + i, iy + j);
      rows[j + 1] = catmull(p, tx);
    }
    return catmull(rows, ty);
  }

 private:
  static double catmull(const double p[4], double t) {
    return p[1] + 0.5 * t * (p[2] - p[0] +
                             t * (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3] +
                                  t * (3.0 * (p[1] - p[2]) + p[3] - p[0])));
  }
  static long clamp_index(double f, std::size_t n) {
    long i = static_cast<long>(std::floor(f));
    return std::max(0l, std::min(i, static_cast<long>(n) - 2));
  }
  double at(long i, long j) const {
    i = std::max(0l, std::min(i, static_cast<long>(nx_) - 1));
    j = std::max(0l, std::min(j, static_cast<long>(ny_) - 1));
    return v_[static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i)];
  }

  double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<double> v_;
};

}  // namespace cartan
