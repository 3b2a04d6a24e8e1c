#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cartan/csv.hpp"
#include "cartan/errors.hpp"
#include "cartan/interp.hpp"
#include "cartan/lie_algebra.hpp"

namespace cartan {

enum class Method { lie_euler, rkmk4 };

inline Method parse_method(const std::string& s) {
  if (s == "lie_euler") return Method::lie_euler;
  if (s == "rkmk4") return Method::rkmk4;
  throw BadParams("unknown method '" + s + "'");
}

/// Time-dependent algebra element A(t), the left logarithmic derivative of the
/// group path to be reconstructed. Either a callable or a tabulated sample set
/// with a chosen interpolation order.
struct DarbouxSignal {
  const LieAlgebra* algebra = nullptr;
  std::function<VectorXd(double)> coords;

  static DarbouxSignal from_function(const LieAlgebra& alg,
                                     std::function<VectorXd(double)> fn) {
    return {&alg, std::move(fn)};
  }

  static DarbouxSignal tabulated(const LieAlgebra& alg, const std::vector<double>& times,
                                 const std::vector<VectorXd>& samples, InterpOrder order) {
    const int n = alg.dim();
    if (times.size() != samples.size() || times.empty()) throw BadParams("bad signal table");
    auto tables = std::make_shared<std::vector<Table1D>>();
    for (int c = 0; c < n; ++c) {
      std::vector<double> col(times.size());
      for (std::size_t r = 0; r < times.size(); ++r) col[r] = samples[r][c];
      tables->push_back(Table1D(times, col, order));
    }
    double tlo = times.front(), thi = times.back();
    return {&alg, [tables, n, tlo, thi](double t) {
              double tc = std::min(std::max(t, tlo), thi);
              VectorXd v(n);
              for (int c = 0; c < n; ++c) v[c] = (*tables)[static_cast<std::size_t>(c)](tc);
              return v;
            }};
  }

  static DarbouxSignal from_csv(const LieAlgebra& alg, const std::string& path,
                                InterpOrder order) {
    CsvDoc doc = read_csv_file(path);
    std::vector<double> times;
    std::vector<VectorXd> samples;
    for (const auto& row : doc.rows) {
      if (static_cast<int>(row.size()) != alg.dim() + 1)
        throw IoError("signal csv needs t plus " + std::to_string(alg.dim()) + " coordinates");
      times.push_back(row[0]);
      VectorXd v(alg.dim());
      for (int c = 0; c < alg.dim(); ++c) v[c] = row[static_cast<std::size_t>(c) + 1];
      samples.push_back(v);
    }
    return tabulated(alg, times, samples, order);
  }
};

struct GroupTrajectory {
  const LieAlgebra* algebra = nullptr;
  std::vector<double> times;
  std::vector<MatrixXd> matrices;
  std::vector<double> defects;

  const MatrixXd& endpoint() const { return matrices.back(); }
};

inline double constraint_defect(const GroupElement& g) {
  return g.algebra->predicate().defect(g.matrix);
}

namespace detail {

inline MatrixXd comm(const MatrixXd& a, const MatrixXd& b) { return a * b - b * a; }

// Truncated inverse differential of exp: A + 1/2 [u,A] + 1/12 [u,[u,A]].
inline MatrixXd dexpinv(const MatrixXd& u, const MatrixXd& a) {
  MatrixXd ua = comm(u, a);
  return a + 0.5 * ua + comm(u, ua) / 12.0;
}

}  // namespace detail

/// Integrate g^{-1} dg/dt = A(t) with g(t0) = g0 by left updates
/// g <- g exp(step); the trajectory stays in the group to exp accuracy.
inline GroupTrajectory solve(const DarbouxSignal& signal, const GroupElement& g0, double t0,
                             double t1, Method method, double h) {
  if (!(h > 0.0)) throw BadParams("step size must be positive");
  if (!(t1 > t0)) throw BadParams("need t1 > t0");
  const LieAlgebra& alg = *signal.algebra;
  auto a_mat = [&](double t) { return alg.materialize(signal.coords(t)); };

  GroupTrajectory traj;
  traj.algebra = &alg;
  MatrixXd g = g0.matrix;
  double t = t0;
  traj.times.push_back(t);
  traj.matrices.push_back(g);
  traj.defects.push_back(alg.predicate().defect(g));

  const auto nsteps = static_cast<std::size_t>(std::ceil((t1 - t0) / h - 1e-12));
  for (std::size_t s = 0; s < nsteps; ++s) {
    double dt = std::min(h, t1 - t);
    // boundary stages sample just inside the step, so signal jumps aligned
    // with step boundaries resolve to the correct one-sided limits even when
    // the accumulated step target overshoots the breakpoint by an ulp
    double nudge = 1e-9 * dt;
    MatrixXd theta;
    if (method == Method::lie_euler) {
      theta = dt * a_mat(t + nudge);
    } else {
      MatrixXd k1 = a_mat(t + nudge);
      MatrixXd k2 = detail::dexpinv(0.5 * dt * k1, a_mat(t + 0.5 * dt));
      MatrixXd k3 = detail::dexpinv(0.5 * dt * k2, a_mat(t + 0.5 * dt));
      MatrixXd k4 = detail::dexpinv(dt * k3, a_mat(t + dt - nudge));
      theta = dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (theta.norm() > 10.0)
      throw StepTooLarge("exp argument norm " + std::to_string(theta.norm()) +
                         " exceeds 10; refine h");
    g = g * expm(theta);
    t = (s + 1 == nsteps) ? t1 : t0 + (static_cast<double>(s) + 1.0) * h;
    traj.times.push_back(t);
    traj.matrices.push_back(g);
    traj.defects.push_back(alg.predicate().defect(g));
  }
  return traj;
}

inline CsvDoc trajectory_csv(const GroupTrajectory& traj) {
  CsvDoc doc;
  const int m = traj.algebra->matrix_size();
  doc.header.push_back("t");
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      doc.header.push_back("g" + std::to_string(r) + std::to_string(c));
  doc.header.push_back("defect");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row;
    row.push_back(traj.times[i]);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) row.push_back(traj.matrices[i](r, c));
    row.push_back(traj.defects[i]);
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

}  // namespace cartan
