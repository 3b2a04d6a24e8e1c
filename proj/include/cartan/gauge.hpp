#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cartan/csv.hpp"
#include "cartan/errors.hpp"
#include "cartan/interp.hpp"
#include "cartan/lie_algebra.hpp"

namespace cartan {

/// Chart rectangle with optional interior predicate (for non-rectangular
/// domains) and per-coordinate periods (0 = not periodic). Boundaries are
/// hard: evaluation outside is an error, never an extrapolation.
struct ChartDomain {
  VectorXd lo, hi;
  std::vector<double> period;
  std::function<double(const VectorXd&)> margin_fn;  // optional signed interior margin

  static ChartDomain unbounded(int d) {
    ChartDomain dom;
    dom.lo = VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
    dom.hi = VectorXd::Constant(d, std::numeric_limits<double>::infinity());
    dom.period.assign(static_cast<std::size_t>(d), 0.0);
    return dom;
  }

  int dim() const { return static_cast<int>(lo.size()); }

  /// Distance to the nearest hard boundary; +inf when unconstrained.
  double boundary_margin(const VectorXd& x) const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim(); ++i) {
      if (period[static_cast<std::size_t>(i)] > 0.0) continue;  // periodic: no edge
      if (std::isfinite(lo[i])) m = std::min(m, x[i] - lo[i]);
      if (std::isfinite(hi[i])) m = std::min(m, hi[i] - x[i]);
    }
    if (margin_fn) m = std::min(m, margin_fn(x));
    return m;
  }

  bool inside(const VectorXd& x) const { return boundary_margin(x) >= 0.0; }

  void require_inside(const VectorXd& x) const {
    if (!inside(x)) throw DomainError("point outside chart domain");
  }

  /// Componentwise difference with periodic coordinates reduced to (-p/2, p/2].
  VectorXd wrap_diff(const VectorXd& a, const VectorXd& b) const {
    VectorXd d = a - b;
    for (int i = 0; i < dim(); ++i) {
      double p = period[static_cast<std::size_t>(i)];
      if (p > 0.0) d[i] = d[i] - p * std::round(d[i] / p);
    }
    return d;
  }
};

/// A pair (g, H) given by index sets: h_indices span the structure algebra,
/// solder_indices a complement representing g/h.
struct InfinitesimalModel {
  const LieAlgebra* algebra = nullptr;
  std::vector<int> h_indices;
  std::vector<int> solder_indices;

  InfinitesimalModel() = default;
  InfinitesimalModel(const LieAlgebra& alg, std::vector<int> h_idx)
      : algebra(&alg), h_indices(std::move(h_idx)) {
    std::vector<bool> in_h(static_cast<std::size_t>(alg.dim()), false);
    for (int i : h_indices) in_h[static_cast<std::size_t>(i)] = true;
    for (int i = 0; i < alg.dim(); ++i)
      if (!in_h[static_cast<std::size_t>(i)]) solder_indices.push_back(i);
    // h must close under bracket
    for (std::size_t a = 0; a < h_indices.size(); ++a)
      for (std::size_t b = a + 1; b < h_indices.size(); ++b) {
        VectorXd c = alg.project_checked(
            alg.basis(h_indices[a]) * alg.basis(h_indices[b]) -
            alg.basis(h_indices[b]) * alg.basis(h_indices[a]));
        for (int s : solder_indices)
          if (std::abs(c[s]) > 1e-10)
            throw BadParams("h indices do not span a subalgebra");
      }
  }

  int structure_group_dim() const { return static_cast<int>(h_indices.size()); }
  int solder_dim() const { return static_cast<int>(solder_indices.size()); }
};

inline InfinitesimalModel surface_model(const std::string& algebra_name) {
  return InfinitesimalModel(builtin_algebra(algebra_name), {0});
}

inline InfinitesimalModel trivial_model(const LieAlgebra& alg) {
  return InfinitesimalModel(alg, {});
}

using GaugeCoeffFn = std::function<std::vector<VectorXd>(const VectorXd&)>;
// partials[i][j] = d A_i / d x_j, algebra coordinates
using GaugePartialsFn = std::function<std::vector<std::vector<VectorXd>>(const VectorXd&)>;

/// A Cartan connection in a coordinate chart: eta = A_i(x) dx^i with A_i
/// valued in the model algebra, evaluated on the h = 1 section.
struct CartanGauge {
  InfinitesimalModel model;
  int chart_dim = 0;
  ChartDomain domain;
  GaugeCoeffFn coeff;
  GaugePartialsFn partials;  // empty: use central differences with h_fd
  double h_fd = 1e-5;

  std::vector<VectorXd> coeffs_at(const VectorXd& x) const {
    domain.require_inside(x);
    auto a = coeff(x);
    if (static_cast<int>(a.size()) != chart_dim)
      throw DomainError("gauge coefficient callable returned wrong arity");
    return a;
  }

  std::vector<std::vector<VectorXd>> partials_at(const VectorXd& x) const {
    if (partials) return partials(x);
    std::vector<std::vector<VectorXd>> out(
        static_cast<std::size_t>(chart_dim),
        std::vector<VectorXd>(static_cast<std::size_t>(chart_dim)));
    for (int j = 0; j < chart_dim; ++j) {
      double hj = std::max(h_fd, h_fd * std::abs(x[j]));
      VectorXd xp = x, xm = x;
      xp[j] += hj;
      xm[j] -= hj;
      auto ap = coeffs_at(xp);
      auto am = coeffs_at(xm);
      for (int i = 0; i < chart_dim; ++i)
        out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            (ap[static_cast<std::size_t>(i)] - am[static_cast<std::size_t>(i)]) / (2.0 * hj);
    }
    return out;
  }
};

struct SolderReport {
  bool invertible = false;
  double condition = std::numeric_limits<double>::infinity();
  MatrixXd solder;   // rows: solder basis components, columns: chart directions
  MatrixXd inverse;  // valid when invertible
};

inline SolderReport validate(const CartanGauge& gauge, const VectorXd& x) {
  const int d = gauge.chart_dim;
  std::vector<VectorXd> a;
  try {
    a = gauge.coeffs_at(x);
  } catch (const SolderingSingular&) {
    // coefficient construction already degenerate (e.g. a collapsing coframe)
    SolderReport rep;
    rep.solder = MatrixXd::Zero(d, d);
    return rep;
  }
  SolderReport rep;
  rep.solder.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int s = 0; s < d; ++s)
      rep.solder(s, i) =
          a[static_cast<std::size_t>(i)][gauge.model.solder_indices[static_cast<std::size_t>(s)]];
  Eigen::JacobiSVD<MatrixXd> svd(rep.solder, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  rep.condition = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
  rep.invertible = smin > 1e-300 && rep.condition < 1e8;
  if (rep.invertible) rep.inverse = rep.solder.inverse();
  return rep;
}

/// Algebra-valued antisymmetric form on g/h: k[m][a][b] with a,b solder slots.
struct CurvatureValue {
  const InfinitesimalModel* model = nullptr;
  int d = 0;
  std::vector<VectorXd> pairs;  // lexicographic (a<b)
  double scalar_K = std::numeric_limits<double>::quiet_NaN();

  double k(int m, int a, int b) const {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
      std::swap(a, b);
      sign = -1.0;
    }
    std::size_t p = static_cast<std::size_t>(a) * d - static_cast<std::size_t>(a) * (a + 1) / 2 +
                    static_cast<std::size_t>(b - a - 1);
    return sign * pairs[p][m];
  }

  /// Contraction with two solder-coordinate vectors, algebra valued.
  VectorXd contract(const VectorXd& u, const VectorXd& v) const {
    VectorXd out = VectorXd::Zero(model->algebra->dim());
    std::size_t p = 0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b, ++p) out += (u[a] * v[b] - u[b] * v[a]) * pairs[p];
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : pairs) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
  }
};

/// Curvature 2-form F = d eta + 1/2 [eta,eta], re-expressed on the soldering
/// bivectors; for surface models scalar_K is the h-component on sigma1^sigma2.
inline CurvatureValue curvature(const CartanGauge& gauge, const VectorXd& x) {
  SolderReport rep = validate(gauge, x);
  if (!rep.invertible) throw SolderingSingular("soldering matrix not invertible at chart point");
  const int d = gauge.chart_dim;
  const LieAlgebra& alg = *gauge.model.algebra;
  auto a = gauge.coeffs_at(x);
  auto da = gauge.partials_at(x);

  std::vector<std::vector<VectorXd>> f(static_cast<std::size_t>(d),
                                       std::vector<VectorXd>(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      MatrixXd ai = alg.materialize(a[static_cast<std::size_t>(i)]);
      MatrixXd aj = alg.materialize(a[static_cast<std::size_t>(j)]);
      VectorXd br = alg.project_checked(ai * aj - aj * ai);
      f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          da[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] -
          da[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] + br;
    }

  CurvatureValue kv;
  kv.model = &gauge.model;
  kv.d = d;
  const MatrixXd& sinv = rep.inverse;
  for (int aidx = 0; aidx < d; ++aidx)
    for (int b = aidx + 1; b < d; ++b) {
      VectorXd acc = VectorXd::Zero(alg.dim());
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          acc += f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                 (sinv(i, aidx) * sinv(j, b) - sinv(j, aidx) * sinv(i, b));
      kv.pairs.push_back(acc);
    }
  if (gauge.model.structure_group_dim() == 1 && d == 2)
    kv.scalar_K = kv.pairs[0][gauge.model.h_indices[0]];
  return kv;
}

/// Model change eta' = phi(eta): phi must carry h onto the target's h
/// (intertwining brackets) and the solder complement onto the target's.
inline CartanGauge mutate(const CartanGauge& gauge, const MatrixXd& phi,
                          const InfinitesimalModel& target) {
  const LieAlgebra& src = *gauge.model.algebra;
  const LieAlgebra& dst = *target.algebra;
  const int n = src.dim();
  if (dst.dim() != n || phi.rows() != n || phi.cols() != n)
    throw MutationInvalid("mutation map must be square of the common dimension");
  if (gauge.model.structure_group_dim() != target.structure_group_dim())
    throw MutationInvalid("structure group dimensions differ");

  auto col = [&](int i) { return VectorXd(phi.col(i)); };
  // h -> h' bijectively, nothing leaking into the solder part
  MatrixXd hblock(target.structure_group_dim(), gauge.model.structure_group_dim());
  for (std::size_t a = 0; a < gauge.model.h_indices.size(); ++a) {
    VectorXd im = col(gauge.model.h_indices[a]);
    for (int s : target.solder_indices)
      if (std::abs(im[s]) > 1e-10) throw MutationInvalid("h does not map into target h");
    for (std::size_t b = 0; b < target.h_indices.size(); ++b)
      hblock(static_cast<long>(b), static_cast<long>(a)) = im[target.h_indices[b]];
  }
  if (gauge.model.structure_group_dim() > 0 &&
      std::abs(hblock.determinant()) < 1e-12)
    throw MutationInvalid("h block not bijective");
  // solder -> solder' bijectively
  MatrixXd sblock(target.solder_dim(), gauge.model.solder_dim());
  for (std::size_t a = 0; a < gauge.model.solder_indices.size(); ++a) {
    VectorXd im = col(gauge.model.solder_indices[a]);
    for (int hidx : target.h_indices)
      if (std::abs(im[hidx]) > 1e-10)
        throw MutationInvalid("solder complement does not map into target complement");
    for (std::size_t b = 0; b < target.solder_indices.size(); ++b)
      sblock(static_cast<long>(b), static_cast<long>(a)) = im[target.solder_indices[b]];
  }
  if (std::abs(sblock.determinant()) < 1e-12)
    throw MutationInvalid("solder block not bijective");
  // phi intertwines h-brackets
  for (std::size_t a = 0; a < gauge.model.h_indices.size(); ++a)
    for (std::size_t b = a + 1; b < gauge.model.h_indices.size(); ++b) {
      int i = gauge.model.h_indices[a], j = gauge.model.h_indices[b];
      MatrixXd bi = src.basis(i), bj = src.basis(j);
      VectorXd lhs = phi * src.project_checked(bi * bj - bj * bi);
      MatrixXd mi = dst.materialize(col(i)), mj = dst.materialize(col(j));
      VectorXd rhs = dst.project_checked(mi * mj - mj * mi);
      if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-10)
        throw MutationInvalid("mutation does not intertwine h brackets");
    }

  CartanGauge out;
  out.model = target;
  out.chart_dim = gauge.chart_dim;
  out.domain = gauge.domain;
  out.h_fd = gauge.h_fd;
  GaugeCoeffFn base = gauge.coeff;
  int d = gauge.chart_dim;
  out.coeff = [base, phi, d](const VectorXd& x) {
    auto a = base(x);
    std::vector<VectorXd> ap(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      ap[static_cast<std::size_t>(i)] = phi * a[static_cast<std::size_t>(i)];
    return ap;
  };
  if (gauge.partials) {
    GaugePartialsFn basep = gauge.partials;
    out.partials = [basep, phi, d](const VectorXd& x) {
      auto pa = basep(x);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          pa[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
              phi * pa[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      return pa;
    };
  }
  return out;
}

/// State velocity solving omega(xdot, phidot) = A on the trivialized bundle,
/// with omega = omega_H + Ad_{h^-1} eta and h = exp(phi J). Supports trivial
/// and SO(2) structure groups.
struct VelocitySolution {
  VectorXd xdot;
  double phidot = 0.0;
};

inline VelocitySolution solve_velocity(const CartanGauge& gauge, const VectorXd& x, double phi,
                                       const VectorXd& a_coords) {
  SolderReport rep = validate(gauge, x);
  if (!rep.invertible) throw SolderingSingular("soldering matrix not invertible");
  const auto& model = gauge.model;
  VelocitySolution sol;
  if (model.structure_group_dim() == 0) {
    VectorXd rhs(gauge.chart_dim);
    for (int s = 0; s < gauge.chart_dim; ++s)
      rhs[s] = a_coords[model.solder_indices[static_cast<std::size_t>(s)]];
    sol.xdot = rep.inverse * rhs;
    return sol;
  }
  if (model.structure_group_dim() != 1 || gauge.chart_dim != 2)
    throw BadParams("only trivial and SO(2) structure groups are supported");
  double a1 = a_coords[model.solder_indices[0]];
  double a2 = a_coords[model.solder_indices[1]];
  double c = std::cos(phi), s = std::sin(phi);
  VectorXd rhs(2);
  rhs << c * a1 + s * a2, c * a2 - s * a1;  // e^{-i phi}(a1 + i a2)
  sol.xdot = rep.inverse * rhs;
  auto a = gauge.coeffs_at(x);
  double gamma_dot = 0.0;
  for (int i = 0; i < 2; ++i)
    gamma_dot += a[static_cast<std::size_t>(i)][model.h_indices[0]] * sol.xdot[i];
  sol.phidot = a_coords[model.h_indices[0]] - gamma_dot;
  return sol;
}

/// Inverse of solve_velocity's linearization at (x, phi): read an algebra value
/// from a small state displacement through omega at the point.
inline VectorXd read_displacement(const CartanGauge& gauge, const VectorXd& x, double phi,
                                  const VectorXd& dx, double dphi) {
  const auto& model = gauge.model;
  const LieAlgebra& alg = *model.algebra;
  auto a = gauge.coeffs_at(x);
  VectorXd eta = VectorXd::Zero(alg.dim());
  for (int i = 0; i < gauge.chart_dim; ++i) eta += a[static_cast<std::size_t>(i)] * dx[i];
  VectorXd out = VectorXd::Zero(alg.dim());
  if (model.structure_group_dim() == 0) {
    out = eta;
    return out;
  }
  if (model.structure_group_dim() != 1 || gauge.chart_dim != 2)
    throw BadParams("only trivial and SO(2) structure groups are supported");
  double s1 = eta[model.solder_indices[0]];
  double s2 = eta[model.solder_indices[1]];
  double c = std::cos(phi), s = std::sin(phi);
  out[model.solder_indices[0]] = c * s1 - s * s2;  // e^{+i phi}(s1 + i s2)
  out[model.solder_indices[1]] = c * s2 + s * s1;
  out[model.h_indices[0]] = dphi + eta[model.h_indices[0]];
  return out;
}

/// Load a gauge whose coefficients are bicubic interpolants over a uniform
/// rectangular grid. Metadata keys: algebra, h (space separated indices),
/// bounds = "x0 x1 y0 y1", shape = "nx ny"; rows hold 2*n values per node,
/// row-major with y outer.
inline CartanGauge gauge_from_table(const std::string& path) {
  CsvDoc doc = read_csv_file(path);
  auto meta = [&](const std::string& key) -> std::string {
    for (const auto& [k, v] : doc.meta)
      if (k == key) return v;
    throw IoError("gauge table missing metadata key '" + key + "'");
  };
  const LieAlgebra& alg = builtin_algebra(meta("algebra"));
  std::vector<int> h_idx;
  {
    std::stringstream ss(meta("h"));
    int v;
    while (ss >> v) h_idx.push_back(v);
  }
  double x0, x1, y0, y1;
  {
    std::stringstream ss(meta("bounds"));
    if (!(ss >> x0 >> x1 >> y0 >> y1)) throw IoError("bad bounds metadata");
  }
  std::size_t nx, ny;
  {
    std::stringstream ss(meta("shape"));
    if (!(ss >> nx >> ny)) throw IoError("bad shape metadata");
  }
  const int n = alg.dim();
  if (doc.rows.size() != nx * ny) throw IoError("gauge table row count != nx*ny");
  auto grids = std::make_shared<std::vector<BicubicGrid>>();
  for (int comp = 0; comp < 2 * n; ++comp) {
    std::vector<double> vals(nx * ny);
    for (std::size_t r = 0; r < nx * ny; ++r) {
      if (static_cast<int>(doc.rows[r].size()) != 2 * n)
        throw IoError("gauge table row arity != 2*dim");
      vals[r] = doc.rows[r][static_cast<std::size_t>(comp)];
    }
    grids->push_back(BicubicGrid(x0, x1, y0, y1, nx, ny, std::move(vals)));
  }

  CartanGauge g;
  g.model = InfinitesimalModel(alg, h_idx);
  g.chart_dim = 2;
  g.domain = ChartDomain::unbounded(2);
  g.domain.lo << x0, y0;
  g.domain.hi << x1, y1;
  g.coeff = [grids, n](const VectorXd& x) {
    std::vector<VectorXd> a(2, VectorXd::Zero(n));
    for (int i = 0; i < 2; ++i)
      for (int c = 0; c < n; ++c)
        a[static_cast<std::size_t>(i)][c] =
            (*grids)[static_cast<std::size_t>(i * n + c)](x[0], x[1]);
    return a;
  };
  return g;
}

}  // namespace cartan
