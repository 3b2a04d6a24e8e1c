#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cartan/errors.hpp"
#include "cartan/linalg.hpp"

namespace cartan {

/// Membership monitor for the matrix group attached to an algebra. Families:
/// an orthogonality block (with metric signature), unit determinant, and a
/// fixed bottom row; defect is the worst violation across the active ones.
struct GroupPredicate {
  int orth_size = 0;
  std::vector<double> signature;  // diagonal metric for the orthogonality block
  bool unit_det = false;
  std::vector<double> bottom_row;

  double defect(const MatrixXd& g) const {
    double d = 0.0;
    if (orth_size > 0) {
      MatrixXd b = g.topLeftCorner(orth_size, orth_size);
      MatrixXd s = MatrixXd::Zero(orth_size, orth_size);
      for (int i = 0; i < orth_size; ++i)
        s(i, i) = signature.empty() ? 1.0 : signature[static_cast<std::size_t>(i)];
      d = std::max(d, max_abs(b.transpose() * s * b - s));
    }
    if (unit_det) d = std::max(d, std::abs(g.determinant() - 1.0));
    if (!bottom_row.empty()) {
      for (std::size_t j = 0; j < bottom_row.size(); ++j)
        d = std::max(d, std::abs(g(g.rows() - 1, static_cast<long>(j)) - bottom_row[j]));
    }
    return d;
  }
};

class StructureConstants;

/// A matrix Lie algebra: named basis of m x m matrices plus the membership
/// predicate of the associated group. Basis independence and bracket closure
/// are verified at construction.
class LieAlgebra {
 public:
  LieAlgebra(std::string name, std::vector<MatrixXd> basis, GroupPredicate pred)
      : name_(std::move(name)), basis_(std::move(basis)), pred_(std::move(pred)) {
    if (basis_.empty()) throw BadParams("empty basis");
    m_ = static_cast<int>(basis_[0].rows());
    n_ = static_cast<int>(basis_.size());
    vec_basis_.resize(m_ * m_, n_);
    for (int i = 0; i < n_; ++i) {
      if (basis_[static_cast<std::size_t>(i)].rows() != m_ ||
          basis_[static_cast<std::size_t>(i)].cols() != m_)
        throw BadParams("basis matrices must share one square size");
      vec_basis_.col(i) = Eigen::Map<const VectorXd>(basis_[static_cast<std::size_t>(i)].data(),
                                                     m_ * m_);
    }
    MatrixXd gram = vec_basis_.transpose() * vec_basis_;
    if (std::abs(gram.determinant()) < 1e-12)
      throw BadParams("basis matrices are not linearly independent");
    qr_ = std::make_shared<Eigen::ColPivHouseholderQR<MatrixXd>>(vec_basis_);
  }

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  int matrix_size() const { return m_; }
  const MatrixXd& basis(int i) const { return basis_[static_cast<std::size_t>(i)]; }
  const GroupPredicate& predicate() const { return pred_; }

  MatrixXd materialize(const VectorXd& coords) const {
    MatrixXd m = MatrixXd::Zero(m_, m_);
    for (int i = 0; i < n_; ++i) m += coords[i] * basis_[static_cast<std::size_t>(i)];
    return m;
  }

  /// Least-squares coordinates of a matrix on the basis; residual reported.
  VectorXd project(const MatrixXd& m, double* residual = nullptr) const {
    VectorXd v = Eigen::Map<const VectorXd>(m.data(), m_ * m_);
    VectorXd c = qr_->solve(v);
    if (residual) *residual = (vec_basis_ * c - v).cwiseAbs().maxCoeff();
    return c;
  }

  VectorXd project_checked(const MatrixXd& m, double tol = 1e-10) const {
    double res = 0.0;
    VectorXd c = project(m, &res);
    if (res > tol)
      throw BasisClosureError(name_ + ": matrix lies outside basis span, residual " +
                              std::to_string(res));
    return c;
  }

 private:
  std::string name_;
  std::vector<MatrixXd> basis_;
  GroupPredicate pred_;
  int n_ = 0, m_ = 0;
  MatrixXd vec_basis_;
  std::shared_ptr<Eigen::ColPivHouseholderQR<MatrixXd>> qr_;
};

struct AlgebraElement {
  const LieAlgebra* algebra = nullptr;
  VectorXd coords;

  MatrixXd matrix() const { return algebra->materialize(coords); }
};

struct GroupElement {
  const LieAlgebra* algebra = nullptr;
  MatrixXd matrix;
};

inline AlgebraElement element(const LieAlgebra& alg, const VectorXd& coords) {
  if (coords.size() != alg.dim()) throw BadParams("coordinate length != algebra dimension");
  return {&alg, coords};
}

inline AlgebraElement basis_element(const LieAlgebra& alg, int i) {
  VectorXd c = VectorXd::Zero(alg.dim());
  c[i] = 1.0;
  return {&alg, c};
}

/// c[k][i][j] with [e_i,e_j] = sum_k c[k][i][j] e_k; antisymmetry in (i,j) is
/// exact by storage (only i<j kept, mirrored on read).
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int n) : n_(n), store_(static_cast<std::size_t>(n) * pairs(), 0.0) {}

  int dim() const { return n_; }

  double c(int k, int i, int j) const {
    if (i == j) return 0.0;
    if (i < j) return store_[idx(k, i, j)];
    return -store_[idx(k, j, i)];
  }

  void set(int k, int i, int j, double v) {
    if (i == j) {
      if (v != 0.0) throw BadParams("c[k][i][i] must vanish");
      return;
    }
    if (i < j)
      store_[idx(k, i, j)] = v;
    else
      store_[idx(k, j, i)] = -v;
  }

  double max_abs_diff(const StructureConstants& o) const {
    double d = 0.0;
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) d = std::max(d, std::abs(c(k, i, j) - o.c(k, i, j)));
    return d;
  }

 private:
  std::size_t pairs() const { return static_cast<std::size_t>(n_) * (n_ - 1) / 2; }
  std::size_t idx(int k, int i, int j) const {
    // position of (i,j), i<j, in lexicographic order
    std::size_t p = static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i + 1) / 2 +
                    static_cast<std::size_t>(j - i - 1);
    return static_cast<std::size_t>(k) * pairs() + p;
  }

  int n_ = 0;
  std::vector<double> store_;
};

inline AlgebraElement bracket(const LieAlgebra& alg, const AlgebraElement& x,
                              const AlgebraElement& y) {
  if (x.algebra != &alg || y.algebra != &alg) throw BadParams("bracket: algebra mismatch");
  MatrixXd a = x.matrix(), b = y.matrix();
  return {&alg, alg.project_checked(a * b - b * a)};
}

inline StructureConstants structure_constants(const LieAlgebra& alg) {
  const int n = alg.dim();
  StructureConstants sc(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      MatrixXd comm = alg.basis(i) * alg.basis(j) - alg.basis(j) * alg.basis(i);
      VectorXd c = alg.project_checked(comm);
      for (int k = 0; k < n; ++k) sc.set(k, i, j, c[k]);
    }
  return sc;
}

/// Max over (i,j,k,l) of |sum_m c^m_ij c^l_mk + cyclic|; zero iff the
/// constants define a Lie algebra.
inline double jacobi_defect(const StructureConstants& sc) {
  const int n = sc.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m)
            s += sc.c(m, i, j) * sc.c(l, m, k) + sc.c(m, j, k) * sc.c(l, m, i) +
                 sc.c(m, k, i) * sc.c(l, m, j);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

inline GroupElement exp(const LieAlgebra& alg, const AlgebraElement& a, double t = 1.0) {
  return {&alg, expm(MatrixXd(t * a.matrix()))};
}

inline AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& a) {
  if (g.algebra != a.algebra) throw BadParams("adjoint: algebra mismatch");
  const LieAlgebra& alg = *g.algebra;
  MatrixXd ginv = invert_checked(g.matrix, "adjoint");
  return {&alg, alg.project_checked(g.matrix * a.matrix() * ginv)};
}

/// Constants of the same algebra in the basis e'_i = sum_j P_ji e_j.
inline StructureConstants transform_constants(const StructureConstants& sc, const MatrixXd& p) {
  const int n = sc.dim();
  if (p.rows() != n || p.cols() != n) throw BadParams("transform_constants: bad matrix size");
  if (std::abs(p.determinant()) <= 1e-12)
    throw SingularMatrixError("transform_constants: basis change not invertible");
  MatrixXd pinv = p.inverse();
  StructureConstants out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            double cab = 0.0;
            for (int m = 0; m < n; ++m) cab += pinv(k, m) * sc.c(m, a, b);
            s += cab * p(a, i) * p(b, j);
          }
        out.set(k, i, j, s);
      }
  return out;
}

using GroupChart = std::function<MatrixXd(const VectorXd&)>;

/// Max-norm of d(omega) + 1/2 [omega,omega] on coordinate bivectors, with
/// omega = g^{-1} dg evaluated by central differences of step h. Order h^2
/// small for genuine group charts.
inline double maurer_cartan_defect(const GroupChart& chart, const VectorXd& point, double h) {
  const int d = static_cast<int>(point.size());
  auto omega = [&](const VectorXd& u, int j) {
    MatrixXd g = chart(u);
    MatrixXd ginv = invert_checked(g, "maurer_cartan_defect");
    VectorXd up = u, um = u;
    up[j] += h;
    um[j] -= h;
    return MatrixXd(ginv * (chart(up) - chart(um)) / (2.0 * h));
  };
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      VectorXd uip = point, uim = point, ujp = point, ujm = point;
      uip[i] += h;
      uim[i] -= h;
      ujp[j] += h;
      ujm[j] -= h;
      MatrixXd di_wj = (omega(uip, j) - omega(uim, j)) / (2.0 * h);
      MatrixXd dj_wi = (omega(ujp, i) - omega(ujm, i)) / (2.0 * h);
      MatrixXd wi = omega(point, i), wj = omega(point, j);
      worst = std::max(worst, max_abs(di_wj - dj_wi + wi * wj - wj * wi));
    }
  return worst;
}

namespace detail {

inline MatrixXd unit(int m, int r, int c) {
  MatrixXd e = MatrixXd::Zero(m, m);
  e(r, c) = 1.0;
  return e;
}

inline std::map<std::string, LieAlgebra> make_builtin_algebras() {
  std::map<std::string, LieAlgebra> reg;
  auto E = unit;

  reg.emplace("abelian2",
              LieAlgebra("abelian2", {E(2, 0, 0), E(2, 1, 1)}, GroupPredicate{}));

  reg.emplace("heis3", LieAlgebra("heis3", {E(3, 0, 1), E(3, 1, 2), E(3, 0, 2)},
                                  GroupPredicate{0, {}, true, {0, 0, 1}}));

  reg.emplace("aff1",
              LieAlgebra("aff1", {E(2, 0, 0), E(2, 0, 1)}, GroupPredicate{0, {}, false, {0, 1}}));

  MatrixXd j_ccw = E(3, 1, 0) - E(3, 0, 1);  // [J,e1] = e2 flavor
  reg.emplace("se2", LieAlgebra("se2", {j_ccw, E(3, 0, 2), E(3, 1, 2)},
                                GroupPredicate{2, {}, false, {0, 0, 1}}));

  MatrixXd l1 = E(3, 2, 1) - E(3, 1, 2);
  MatrixXd l2 = E(3, 0, 2) - E(3, 2, 0);
  MatrixXd l3 = E(3, 1, 0) - E(3, 0, 1);
  reg.emplace("so3", LieAlgebra("so3", {l1, l2, l3}, GroupPredicate{3, {}, true, {}}));

  auto pad4 = [&](const MatrixXd& w) {
    MatrixXd a = MatrixXd::Zero(4, 4);
    a.topLeftCorner(3, 3) = w;
    return a;
  };
  reg.emplace("se3",
              LieAlgebra("se3",
                         {pad4(l1), pad4(l2), pad4(l3), E(4, 0, 3), E(4, 1, 3), E(4, 2, 3)},
                         GroupPredicate{3, {}, false, {0, 0, 0, 1}}));

  MatrixXd x = E(2, 0, 1);
  MatrixXd hh = E(2, 0, 0) - E(2, 1, 1);
  MatrixXd y = E(2, 1, 0);
  reg.emplace("sl2", LieAlgebra("sl2", {x, hh, y}, GroupPredicate{0, {}, true, {}}));

  // Surface models share the rotation generator with [J,P1] = -P2, [J,P2] = P1,
  // so the flat model satisfies d sigma^1 = -gamma ^ sigma^2, d sigma^2 = gamma ^ sigma^1.
  MatrixXd j_cw = E(3, 0, 1) - E(3, 1, 0);
  reg.emplace("e2", LieAlgebra("e2", {j_cw, E(3, 0, 2), E(3, 1, 2)},
                               GroupPredicate{2, {}, false, {0, 0, 1}}));
  reg.emplace("o3", LieAlgebra("o3", {j_cw, E(3, 0, 2) - E(3, 2, 0), E(3, 1, 2) - E(3, 2, 1)},
                               GroupPredicate{3, {}, true, {}}));
  reg.emplace("o21", LieAlgebra("o21", {j_cw, E(3, 0, 2) + E(3, 2, 0), E(3, 1, 2) + E(3, 2, 1)},
                                GroupPredicate{3, {1, 1, -1}, true, {}}));
  return reg;
}

}  // namespace detail

inline const std::map<std::string, LieAlgebra>& builtin_algebra_registry() {
  static const std::map<std::string, LieAlgebra> reg = detail::make_builtin_algebras();
  return reg;
}

inline const LieAlgebra& builtin_algebra(const std::string& name) {
  const auto& reg = builtin_algebra_registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw UnknownGeometry("no builtin algebra named '" + name + "'");
  return it->second;
}

inline std::vector<std::string> builtin_algebra_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : builtin_algebra_registry()) names.push_back(k);
  return names;
}

/// The 3-dimensional system d s1 = 2 s1^s2, d s2 = -g ^ s1 - (1/3) s1^s2,
/// d g = -g ^ ((1/3) s1 + 2 s2), encoded as constants in the basis dual to
/// (s1, s2, g): [e1,e2] = -2 e1 + (1/3) e2, [e1,e3] = -e2 - (1/3) e3,
/// [e2,e3] = -2 e3.
inline StructureConstants affine_surface_constants() {
  StructureConstants sc(3);
  sc.set(0, 0, 1, -2.0);
  sc.set(1, 0, 1, 1.0 / 3.0);
  sc.set(1, 0, 2, -1.0);
  sc.set(2, 0, 2, -1.0 / 3.0);
  sc.set(2, 1, 2, -2.0);
  return sc;
}

struct NamedChart {
  int param_dim;
  GroupChart chart;
};

inline NamedChart builtin_chart(const std::string& name) {
  if (name == "heis3") {
    return {3, [](const VectorXd& u) {
              MatrixXd g = MatrixXd::Identity(3, 3);
              g(0, 1) = u[0];
              g(1, 2) = u[1];
              g(0, 2) = u[2];
              return g;
            }};
  }
  if (name == "se2") {
    return {3, [](const VectorXd& u) {
              MatrixXd g = MatrixXd::Identity(3, 3);
              g(0, 0) = std::cos(u[0]);
              g(0, 1) = -std::sin(u[0]);
              g(1, 0) = std::sin(u[0]);
              g(1, 1) = std::cos(u[0]);
              g(0, 2) = u[1];
              g(1, 2) = u[2];
              return g;
            }};
  }
  if (name == "abelian2") {
    return {2, [](const VectorXd& u) {
              MatrixXd g = MatrixXd::Zero(2, 2);
              g(0, 0) = std::exp(u[0]);
              g(1, 1) = std::exp(u[1]);
              return g;
            }};
  }
  if (name == "sl2") {
    return {3, [](const VectorXd& u) {
              const LieAlgebra& alg = builtin_algebra("sl2");
              VectorXd c(3);
              c << u[0], u[1], u[2];
              return expm(alg.materialize(c));
            }};
  }
  throw UnknownGeometry("no builtin chart named '" + name + "'");
}

}  // namespace cartan
