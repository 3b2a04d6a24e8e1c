#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cartan/errors.hpp"
#include "cartan/gauge.hpp"
#include "cartan/interp.hpp"

namespace cartan {

enum class Signature { riemannian, lorentz };
enum class StructureGroup { so2, trivial };

/// Scalar profile of one variable with two derivatives: polynomial, cubic
/// table, or c/z (for the rotating-frame can).
class Profile {
 public:
  static Profile from_poly(const std::vector<double>& coeffs) {
    Profile p;
    p.kind_ = Kind::poly;
    p.poly_ = Poly{coeffs};
    p.d1_ = p.poly_.derivative();
    p.d2_ = p.d1_.derivative();
    return p;
  }
  static Profile from_table(std::vector<double> z, std::vector<double> v) {
    Profile p;
    p.kind_ = Kind::table;
    p.table_ = Table1D(std::move(z), std::move(v), InterpOrder::cubic);
    return p;
  }
  static Profile inverse(double scale) {
    Profile p;
    p.kind_ = Kind::inv;
    p.scale_ = scale;
    return p;
  }

  double operator()(double z) const {
    switch (kind_) {
      case Kind::poly: return poly_(z);
      case Kind::table: return table_(z);
      default: return scale_ / z;
    }
  }
  double deriv(double z) const {
    switch (kind_) {
      case Kind::poly: return d1_(z);
      case Kind::table: return table_.deriv(z);
      default: return -scale_ / (z * z);
    }
  }
  double deriv2(double z) const {
    switch (kind_) {
      case Kind::poly: return d2_(z);
      case Kind::table: return table_.deriv2(z);
      default: return 2.0 * scale_ / (z * z * z);
    }
  }

  bool has_bounds() const { return kind_ == Kind::table; }
  double zmin() const { return table_.xmin(); }
  double zmax() const { return table_.xmax(); }

 private:
  enum class Kind { poly, table, inv };
  Kind kind_ = Kind::poly;
  Poly poly_, d1_, d2_;
  Table1D table_;
  double scale_ = 1.0;
};

/// Oriented 2D geometry as an orthonormal coframe on a chart:
/// sigma^i = e_ij dx^j.
struct SurfaceMetric {
  std::string name;
  ChartDomain domain;
  Signature signature = Signature::riemannian;
  StructureGroup structure_group = StructureGroup::so2;
  std::function<MatrixXd(const VectorXd&)> coframe;
  // (d e / d x1, d e / d x2); empty -> central differences
  std::function<std::pair<MatrixXd, MatrixXd>(const VectorXd&)> coframe_partials;
  double h_fd = 1e-5;

  MatrixXd coframe_at(const VectorXd& x) const {
    domain.require_inside(x);
    return coframe(x);
  }

  std::pair<MatrixXd, MatrixXd> partials_at(const VectorXd& x) const {
    if (coframe_partials) return coframe_partials(x);
    std::pair<MatrixXd, MatrixXd> out;
    for (int j = 0; j < 2; ++j) {
      double hj = std::max(h_fd, h_fd * std::abs(x[j]));
      VectorXd xp = x, xm = x;
      xp[j] += hj;
      xm[j] -= hj;
      MatrixXd d = (coframe_at(xp) - coframe_at(xm)) / (2.0 * hj);
      (j == 0 ? out.first : out.second) = d;
    }
    return out;
  }
};

/// Lorentz surfaces handled through their geodesic ODEs: either the fixed
/// punctured-plane metric dx dy/(x^2+y^2) or dx dy + (1/2) f(x) dy^2.
struct LorentzFamily {
  std::string name;
  bool clifton_pohl = false;
  Profile f;  // used when !clifton_pohl
  ChartDomain domain;
};

using GeometryObject = std::variant<SurfaceMetric, LorentzFamily>;

struct GeometryParams {
  std::map<std::string, std::vector<double>> values;  // scalars are length-1
  std::optional<Profile> lambda;  // revolution profile
  std::optional<Profile> phi;     // can profile; default 1/z
  std::optional<Profile> f;       // lorentz family profile

  double scalar(const std::string& key, double dflt) const {
    auto it = values.find(key);
    if (it == values.end()) return dflt;
    if (it->second.size() != 1) throw BadParams("param '" + key + "' expects one number");
    return it->second[0];
  }
  bool has(const std::string& key) const { return values.count(key) > 0; }
};

namespace detail {

inline ChartDomain plane_domain() { return ChartDomain::unbounded(2); }

}  // namespace detail

inline GeometryObject builtin_geometry(const std::string& name, const GeometryParams& params) {
  using detail::plane_domain;
  if (name == "euclidean") {
    SurfaceMetric m;
    m.name = name;
    m.domain = plane_domain();
    m.coframe = [](const VectorXd&) { return MatrixXd::Identity(2, 2); };
    m.coframe_partials = [](const VectorXd&) {
      return std::make_pair(MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 2));
    };
    return m;
  }
  if (name == "hyperbolic_half_plane") {
    SurfaceMetric m;
    m.name = name;
    m.domain = plane_domain();
    m.domain.lo[1] = 0.0;
    m.coframe = [](const VectorXd& x) {
      MatrixXd e = MatrixXd::Zero(2, 2);
      e(0, 0) = 1.0 / x[1];
      e(1, 1) = 1.0 / x[1];
      return e;
    };
    m.coframe_partials = [](const VectorXd& x) {
      MatrixXd dy = MatrixXd::Zero(2, 2);
      dy(0, 0) = -1.0 / (x[1] * x[1]);
      dy(1, 1) = dy(0, 0);
      return std::make_pair(MatrixXd::Zero(2, 2), dy);
    };
    return m;
  }
  if (name == "sphere_polar") {
    SurfaceMetric m;
    m.name = name;
    m.domain = plane_domain();
    m.domain.lo[0] = 0.0;
    m.domain.hi[0] = M_PI;
    m.domain.period[1] = 2.0 * M_PI;
    m.coframe = [](const VectorXd& x) {
      MatrixXd e = MatrixXd::Zero(2, 2);
      e(0, 0) = 1.0;
      e(1, 1) = std::sin(x[0]);
      return e;
    };
    m.coframe_partials = [](const VectorXd& x) {
      MatrixXd dth = MatrixXd::Zero(2, 2);
      dth(1, 1) = std::cos(x[0]);
      return std::make_pair(dth, MatrixXd::Zero(2, 2));
    };
    return m;
  }
  if (name == "revolution") {
    if (!params.lambda) throw BadParams("revolution needs a lambda profile");
    Profile lam = *params.lambda;
    SurfaceMetric m;
    m.name = name;
    m.domain = plane_domain();
    if (lam.has_bounds()) {
      m.domain.lo[0] = lam.zmin();
      m.domain.hi[0] = lam.zmax();
    }
    if (params.has("zmin")) m.domain.lo[0] = params.scalar("zmin", 0.0);
    if (params.has("zmax")) m.domain.hi[0] = params.scalar("zmax", 0.0);
    m.domain.period[1] = 2.0 * M_PI;
    m.coframe = [lam](const VectorXd& x) {
      MatrixXd e = MatrixXd::Zero(2, 2);
      e(0, 0) = 1.0;
      e(1, 1) = std::exp(lam(x[0]));
      return e;
    };
    m.coframe_partials = [lam](const VectorXd& x) {
      MatrixXd dz = MatrixXd::Zero(2, 2);
      dz(1, 1) = lam.deriv(x[0]) * std::exp(lam(x[0]));
      return std::make_pair(dz, MatrixXd::Zero(2, 2));
    };
    return m;
  }
  if (name == "disk_extendability") {
    SurfaceMetric m;
    m.name = name;
    m.domain = plane_domain();
    m.domain.margin_fn = [](const VectorXd& x) { return 1.0 - std::hypot(x[0], x[1]); };
    m.coframe = [](const VectorXd& x) {
      double w = std::sqrt(std::max(0.0, 1.0 - x[0] * x[0] - x[1] * x[1]));
      return MatrixXd(w * MatrixXd::Identity(2, 2));
    };
    return m;
  }
  if (name == "cone") {
    double beta = params.scalar("beta", 1.0);
    if (!(beta > 0.0)) throw BadParams("cone needs beta > 0");
    SurfaceMetric m;
    m.name = name;
    m.domain = plane_domain();
    m.domain.lo[0] = 0.0;
    m.domain.period[1] = 2.0 * M_PI;
    m.coframe = [beta](const VectorXd& x) {
      MatrixXd e = MatrixXd::Zero(2, 2);
      e(0, 0) = 1.0;
      e(1, 1) = beta * x[0];
      return e;
    };
    m.coframe_partials = [beta](const VectorXd&) {
      MatrixXd dr = MatrixXd::Zero(2, 2);
      dr(1, 1) = beta;
      return std::make_pair(dr, MatrixXd::Zero(2, 2));
    };
    return m;
  }
  if (name == "tan_plane") {
    SurfaceMetric m;
    m.name = name;
    m.domain = plane_domain();
    m.structure_group = StructureGroup::trivial;
    m.coframe = [](const VectorXd& x) {
      MatrixXd e = MatrixXd::Zero(2, 2);
      e(0, 0) = 1.0 / (1.0 + x[1] * x[1]);
      e(1, 1) = 1.0 / (1.0 + x[0] * x[0]);
      return e;
    };
    return m;
  }
  if (name == "clifton_can") {
    Profile phi = params.phi ? *params.phi : Profile::inverse(1.0);
    SurfaceMetric m;
    m.name = name;
    m.domain = plane_domain();
    m.domain.lo[0] = 0.0;
    m.domain.period[1] = 2.0 * M_PI;
    m.structure_group = StructureGroup::trivial;
    m.coframe = [phi](const VectorXd& x) {
      double c = std::cos(phi(x[0])), s = std::sin(phi(x[0]));
      MatrixXd e(2, 2);
      e << c, s, -s, c;
      return e;
    };
    return m;
  }
  if (name == "clifton_pohl") {
    LorentzFamily fam;
    fam.name = name;
    fam.clifton_pohl = true;
    fam.domain = plane_domain();
    fam.domain.margin_fn = [](const VectorXd& x) { return std::hypot(x[0], x[1]); };
    return fam;
  }
  if (name == "lorentz_f") {
    if (!params.f) throw BadParams("lorentz_f needs an f profile");
    LorentzFamily fam;
    fam.name = name;
    fam.clifton_pohl = false;
    fam.f = *params.f;
    fam.domain = plane_domain();
    return fam;
  }
  throw UnknownGeometry("no builtin geometry named '" + name + "'");
}

namespace detail {

// gamma = p sigma^1 + q sigma^2 solving d sigma^1 = -gamma^sigma^2,
// d sigma^2 = gamma^sigma^1; returns gamma's chart components (gamma_1, gamma_2).
inline VectorXd connection_components(const SurfaceMetric& metric, const VectorXd& x) {
  MatrixXd e = metric.coframe_at(x);
  double det = e.determinant();
  if (std::abs(det) < 1e-12) throw SolderingSingular("coframe singular at chart point");
  auto [d1, d2] = metric.partials_at(x);
  double cap1 = d1(0, 1) - d2(0, 0);  // d sigma^1 coefficient on dx1^dx2
  double cap2 = d1(1, 1) - d2(1, 0);
  double p = -cap1 / det;
  double q = -cap2 / det;
  VectorXd g(2);
  g[0] = p * e(0, 0) + q * e(1, 0);
  g[1] = p * e(0, 1) + q * e(1, 1);
  return g;
}

}  // namespace detail

/// Torsion-free e2-model gauge of a Riemannian coframe; coefficients are
/// A_i = (gamma_i, e_1i, e_2i) on the (J, P1, P2) basis.
inline CartanGauge levi_civita_gauge(const SurfaceMetric& metric) {
  if (metric.signature != Signature::riemannian)
    throw BadParams("levi_civita_gauge needs a riemannian metric");
  if (metric.structure_group != StructureGroup::so2)
    throw BadParams("levi_civita_gauge needs structure group SO(2)");
  CartanGauge g;
  g.model = surface_model("e2");
  g.chart_dim = 2;
  g.domain = metric.domain;
  g.h_fd = metric.h_fd;
  SurfaceMetric m = metric;
  g.coeff = [m](const VectorXd& x) {
    MatrixXd e = m.coframe_at(x);
    VectorXd gamma = detail::connection_components(m, x);
    std::vector<VectorXd> a(2, VectorXd::Zero(3));
    for (int i = 0; i < 2; ++i) {
      a[static_cast<std::size_t>(i)][0] = gamma[i];
      a[static_cast<std::size_t>(i)][1] = e(0, i);
      a[static_cast<std::size_t>(i)][2] = e(1, i);
    }
    return a;
  };
  return g;
}

/// Coframing gauge over the abelian translation model (trivial structure group).
inline CartanGauge coframing_gauge(const SurfaceMetric& metric) {
  if (metric.structure_group != StructureGroup::trivial)
    throw BadParams("coframing_gauge needs trivial structure group");
  CartanGauge g;
  g.model = trivial_model(builtin_algebra("abelian2"));
  g.chart_dim = 2;
  g.domain = metric.domain;
  g.h_fd = metric.h_fd;
  SurfaceMetric m = metric;
  g.coeff = [m](const VectorXd& x) {
    MatrixXd e = m.coframe_at(x);
    std::vector<VectorXd> a(2, VectorXd::Zero(2));
    for (int i = 0; i < 2; ++i) {
      a[static_cast<std::size_t>(i)][0] = e(0, i);
      a[static_cast<std::size_t>(i)][1] = e(1, i);
    }
    return a;
  };
  return g;
}

inline CartanGauge surface_gauge(const SurfaceMetric& metric) {
  return metric.structure_group == StructureGroup::so2 ? levi_civita_gauge(metric)
                                                       : coframing_gauge(metric);
}

/// K with d gamma = K sigma^1 ^ sigma^2, by central differences of the
/// Levi-Civita connection components.
inline double gauss_curvature(const SurfaceMetric& metric, const VectorXd& x) {
  MatrixXd e = metric.coframe_at(x);
  double det = e.determinant();
  if (std::abs(det) < 1e-12) throw SolderingSingular("coframe singular at chart point");
  double dgamma = 0.0;
  for (int j = 0; j < 2; ++j) {
    double hj = std::max(metric.h_fd, metric.h_fd * std::abs(x[j]));
    VectorXd xp = x, xm = x;
    xp[j] += hj;
    xm[j] -= hj;
    VectorXd gp = detail::connection_components(metric, xp);
    VectorXd gm = detail::connection_components(metric, xm);
    // accumulate d1 gamma_2 - d2 gamma_1
    if (j == 0) dgamma += (gp[1] - gm[1]) / (2.0 * hj);
    if (j == 1) dgamma -= (gp[0] - gm[0]) / (2.0 * hj);
  }
  return dgamma / det;
}

/// Parse the geometry spec text format: `name = <builtin>` plus
/// `param.<key> = <numbers or path>` lines.
inline std::pair<std::string, GeometryParams> parse_geometry_spec(const std::string& text);

namespace detail {

inline std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::stringstream ts(tok);
    double v;
    if (!(ts >> v)) throw BadParams("expected a number, got '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

inline Profile profile_from_file(const std::string& path) {
  CsvDoc doc = read_csv_file(path);
  std::vector<double> z, v;
  for (const auto& row : doc.rows) {
    if (row.size() != 2) throw IoError("profile file needs two columns");
    z.push_back(row[0]);
    v.push_back(row[1]);
  }
  return Profile::from_table(std::move(z), std::move(v));
}

}  // namespace detail

inline Profile profile_from_file(const std::string& path) {
  return detail::profile_from_file(path);
}

inline std::pair<std::string, GeometryParams> parse_geometry_spec(const std::string& text) {
  std::string name;
  GeometryParams params;
  std::stringstream ss(text);
  std::string line;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(ss, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw BadParams("geometry spec line needs key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "name") {
      name = val;
    } else if (key.rfind("param.", 0) == 0) {
      std::string pkey = key.substr(6);
      bool numeric = !val.empty() && (std::isdigit(static_cast<unsigned char>(val[0])) ||
                                      val[0] == '-' || val[0] == '+' || val[0] == '.');
      if ((pkey == "lambda" || pkey == "phi" || pkey == "f") && !numeric) {
        Profile p = detail::profile_from_file(val);
        if (pkey == "lambda") params.lambda = p;
        if (pkey == "phi") params.phi = p;
        if (pkey == "f") params.f = p;
      } else if (pkey == "lambda" || pkey == "phi" || pkey == "f") {
        Profile p = Profile::from_poly(detail::parse_numbers(val));
        if (pkey == "lambda") params.lambda = p;
        if (pkey == "phi") params.phi = p;
        if (pkey == "f") params.f = p;
      } else {
        params.values[pkey] = detail::parse_numbers(val);
      }
    } else {
      throw BadParams("unknown geometry spec key '" + key + "'");
    }
  }
  if (name.empty()) throw BadParams("geometry spec has no name");
  return {name, params};
}

}  // namespace cartan
