// Command-line surface for the cartan library: every subcommand resolves its
// inputs up front, runs one computation, and writes a CSV with '#' metadata
// lines sufficient to re-run the job byte-identically.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cartan/csv.hpp"
#include "cartan/flows.hpp"
#include "cartan/frames.hpp"
#include "cartan/gauge.hpp"
#include "cartan/geometries.hpp"
#include "cartan/lie_algebra.hpp"
#include "cartan/lie_equation.hpp"
#include "cartan/transport.hpp"
#include "cartan/version.hpp"

namespace {

using namespace cartan;

constexpr const char* kConvention =
    "dsigma = i gamma ^ sigma; dgamma = K sigma1 ^ sigma2; left Lie equation g^-1 dg = A(t)";

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_csv_numbers(const std::string& s, int expected = -1) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw ValidationFailure("expected a number in '" + s + "'");
    }
  }
  if (expected >= 0 && static_cast<int>(out.size()) != expected)
    throw ValidationFailure("expected " + std::to_string(expected) + " numbers in '" + s + "'");
  return out;
}

VectorXd to_vec(const std::vector<double>& v) {
  VectorXd x(static_cast<long>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<long>(i)] = v[i];
  return x;
}

// Geometry resolution: a builtin name plus --param entries, or a path to a
// geometry spec file.
struct GeometryRequest {
  std::string spec;
  std::vector<std::string> params;

  std::string canonical() const {
    std::string s = spec;
    for (const auto& p : params) s += " --param " + p;
    return s;
  }
};

GeometryParams build_params(const std::vector<std::string>& entries) {
  GeometryParams params;
  for (const auto& entry : entries) {
    auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw ValidationFailure("--param expects key=value, got '" + entry + "'");
    std::string key = entry.substr(0, eq);
    std::string val = entry.substr(eq + 1);
    bool numeric = !val.empty() && (std::isdigit(static_cast<unsigned char>(val[0])) ||
                                    val[0] == '-' || val[0] == '+' || val[0] == '.');
    if (key == "lambda" || key == "phi" || key == "f") {
      Profile p = [&] {
        if (numeric) return Profile::from_poly(parse_csv_numbers(val));
        if (!std::filesystem::exists(val))
          throw ValidationFailure("profile file not found: " + val);
        return profile_from_file(val);
      }();
      if (key == "lambda") params.lambda = p;
      if (key == "phi") params.phi = p;
      if (key == "f") params.f = p;
    } else {
      params.values[key] = parse_csv_numbers(val);
    }
  }
  return params;
}

GeometryParams resolved_params(const GeometryRequest& req) {
  try {
    if (std::filesystem::exists(req.spec)) {
      std::ifstream f(req.spec);
      std::stringstream buf;
      buf << f.rdbuf();
      return parse_geometry_spec(buf.str()).second;
    }
    return build_params(req.params);
  } catch (const Error& e) {
    throw ValidationFailure(e.what());
  }
}

GeometryObject resolve_geometry(const GeometryRequest& req) {
  try {
    if (std::filesystem::exists(req.spec)) {
      std::ifstream f(req.spec);
      std::stringstream buf;
      buf << f.rdbuf();
      auto [name, params] = parse_geometry_spec(buf.str());
      return builtin_geometry(name, params);
    }
    return builtin_geometry(req.spec, build_params(req.params));
  } catch (const UnknownGeometry& e) {
    throw ValidationFailure(e.what());
  } catch (const BadParams& e) {
    throw ValidationFailure(e.what());
  } catch (const IoError& e) {
    throw ValidationFailure(e.what());
  }
}

SurfaceMetric require_surface(const GeometryObject& g, const char* ctx) {
  if (const auto* m = std::get_if<SurfaceMetric>(&g)) return *m;
  throw ValidationFailure(std::string(ctx) + " needs a surface geometry");
}

LorentzFamily require_lorentz(const GeometryObject& g, const char* ctx) {
  if (const auto* m = std::get_if<LorentzFamily>(&g)) return *m;
  throw ValidationFailure(std::string(ctx) + " needs a lorentz geometry");
}

ChartCurve resolve_curve(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
  if (kind != "segment" && kind != "circle" && kind != "latitude") {
    if (!std::filesystem::exists(spec)) throw ValidationFailure("curve file not found: " + spec);
  }
  try {
    return parse_curve(spec);
  } catch (const Error& e) {
    throw ValidationFailure(e.what());
  }
}

struct OutputSink {
  std::string path;  // empty: stdout

  void write(CsvDoc doc, const std::string& cmd) const {
    CsvDoc full;
    full.meta.emplace_back("cartan", version);
    full.meta.emplace_back("cmd", cmd);
    full.meta.emplace_back("convention", kConvention);
    full.meta.emplace_back("run.seedless", "true");
    for (auto& kv : doc.meta) full.meta.push_back(std::move(kv));
    full.header = std::move(doc.header);
    full.rows = std::move(doc.rows);
    if (path.empty())
      write_csv(std::cout, full);
    else
      write_csv(path, full);
  }
};

CsvDoc flow_csv(const FlowTrajectory& traj) {
  CsvDoc doc;
  doc.meta.emplace_back("outcome", to_string(traj.report.outcome));
  doc.meta.emplace_back("t_end", fmt17(traj.report.t_end));
  doc.meta.emplace_back("state_norm", fmt17(traj.report.state_norm));
  doc.meta.emplace_back("max_monitor_drift", fmt17(traj.report.max_monitor_drift));
  if (!traj.report.detail.empty()) doc.meta.emplace_back("detail", traj.report.detail);
  doc.header.push_back("t");
  for (const auto& n : traj.state_names) doc.header.push_back(n);
  for (const auto& n : traj.monitor_names) doc.header.push_back(n);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row{traj.times[i]};
    for (int c = 0; c < traj.states[i].size(); ++c) row.push_back(traj.states[i][c]);
    for (int c = 0; c < traj.monitors[i].size(); ++c) row.push_back(traj.monitors[i][c]);
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

CsvDoc bundle_csv(const BundleTrajectory& traj) {
  CsvDoc doc;
  doc.meta.emplace_back("complete", traj.complete ? "true" : "false");
  if (!traj.diagnostic.empty()) doc.meta.emplace_back("diagnostic", traj.diagnostic);
  doc.header.push_back("t");
  const long w = traj.states.front().size();
  for (long c = 0; c + (traj.has_fiber ? 1 : 0) < w; ++c)
    doc.header.push_back("x" + std::to_string(c + 1));
  if (traj.has_fiber) doc.header.push_back("phi");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row{traj.times[i]};
    for (long c = 0; c < w; ++c) row.push_back(traj.states[i][c]);
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

// Job options shared by most subcommands.
struct NumericOptions {
  double h = 1e-3;
  double h_fd = 1e-5;
  double tmax = 10.0;
  std::size_t stride = 1;
  std::string method = "rkmk4";

  void validate() const {
    if (!(h > 0.0 && h <= 1.0)) throw ValidationFailure("--h must lie in (0, 1]");
    if (!(tmax > 0.0 && tmax <= 1e9)) throw ValidationFailure("--tmax must lie in (0, 1e9]");
    if (!(h_fd > 0.0)) throw ValidationFailure("--h-fd must be positive");
    if (method != "rkmk4" && method != "lie_euler")
      throw ValidationFailure("--method must be rkmk4 or lie_euler");
  }
};

int dispatch(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const BadParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const UnknownGeometry& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

// CLI11 parsing lives in main; each subcommand gets a callback storing a job
// body, run after parsing succeeds so that exit codes stay uniform.
int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for Cartan geometries on matrix groups"};
  app.require_subcommand(1);
  // --h is a step-size flag here, so help lives on --help alone
  app.set_help_flag("--help", "print help");

  std::function<void()> job;

  double escape_norm = 1e8, collapse_step = 1e-12;
  app.add_option("--escape-norm", escape_norm, "state-norm escape threshold")
      ->capture_default_str();
  app.add_option("--collapse-step", collapse_step, "minimal substep before step_collapse")
      ->capture_default_str();

  // ---- algebras ----
  auto* algebras = app.add_subcommand("algebras", "list builtin algebras or check one");
  algebras->require_subcommand(1);
  auto* alg_list = algebras->add_subcommand("list", "list builtin algebra names");
  std::string alg_list_out;
  alg_list->add_option("--out", alg_list_out, "output csv path");
  alg_list->callback([&, alg_list_outp = &alg_list_out] {
    job = [outp = *alg_list_outp] {
      CsvDoc doc;
      doc.header = {"dim", "matrix_size"};
      std::string names;
      for (const auto& n : builtin_algebra_names()) {
        const LieAlgebra& a = builtin_algebra(n);
        doc.meta.emplace_back("algebra." + n, std::to_string(a.dim()) + "x" +
                                                  std::to_string(a.matrix_size()));
        doc.rows.push_back({static_cast<double>(a.dim()), static_cast<double>(a.matrix_size())});
        names += names.empty() ? n : ("," + n);
      }
      doc.meta.emplace_back("names", names);
      OutputSink{outp}.write(std::move(doc), "algebras list");
    };
  });
  auto* alg_check = algebras->add_subcommand("check", "verify closure and the Jacobi identity");
  std::string alg_check_name, alg_check_out;
  alg_check->add_option("name", alg_check_name, "builtin algebra name")->required();
  alg_check->add_option("--out", alg_check_out, "output csv path");
  alg_check->callback([&] {
    job = [name = alg_check_name, outp = alg_check_out] {
      const LieAlgebra* alg = nullptr;
      try {
        alg = &builtin_algebra(name);
      } catch (const UnknownGeometry& e) {
        throw ValidationFailure(e.what());
      }
      StructureConstants sc = structure_constants(*alg);
      double jd = jacobi_defect(sc);
      CsvDoc doc;
      doc.header = {"jacobi_defect"};
      doc.rows.push_back({jd});
      std::cout << "jacobi defect " << fmt17(jd) << "\n";
      OutputSink{outp}.write(std::move(doc), "algebras check " + name);
    };
  });

  // shared options
  GeometryRequest geo;
  std::vector<std::string> geo_params;
  NumericOptions num;
  std::string out_path;

  auto add_common = [&](CLI::App* cmd, bool with_geometry = true) {
    if (with_geometry) {
      cmd->add_option("--geometry", geo.spec, "builtin geometry name or spec file")->required();
      cmd->add_option("--param", geo_params, "geometry parameter key=value (repeatable)");
    }
    cmd->add_option("--h", num.h, "step size");
    cmd->add_option("--h-fd", num.h_fd, "finite-difference step");
    cmd->add_option("--tmax", num.tmax, "integration horizon");
    cmd->add_option("--method", num.method, "lie_euler or rkmk4");
    cmd->add_option("--stride", num.stride, "record every n-th step");
    cmd->add_option("--out", out_path, "output csv path");
  };

  auto geometry_of = [&]() {
    geo.params = geo_params;
    return resolve_geometry(geo);
  };
  auto cmd_tail = [&](const std::string& head, const std::string& extras) {
    std::string s = head + " --geometry " + geo.canonical() + " " + extras + " --h " +
                    fmt17(num.h) + " --h-fd " + fmt17(num.h_fd) + " --tmax " + fmt17(num.tmax) +
                    " --method " + num.method + " --stride " + std::to_string(num.stride);
    return s;
  };

  // ---- curvature ----
  auto* curv = app.add_subcommand("curvature", "Gauss curvature or full curvature at a point");
  std::string curv_point;
  bool curv_full = false;
  add_common(curv);
  curv->add_option("--point", curv_point, "chart point x,y")->required();
  curv->add_flag("--full", curv_full, "emit all curvature components");
  curv->callback([&] {
    job = [&, point = curv_point, full = curv_full] {
      num.validate();
      SurfaceMetric metric = require_surface(geometry_of(), "curvature");
      metric.h_fd = num.h_fd;
      VectorXd x = to_vec(parse_csv_numbers(point, 2));
      CartanGauge gauge = surface_gauge(metric);
      CsvDoc doc;
      if (metric.structure_group == StructureGroup::so2 && !full) {
        double kg = gauss_curvature(metric, x);
        CurvatureValue kv = curvature(gauge, x);
        doc.header = {"K_gauss", "K_gauge"};
        doc.rows.push_back({kg, kv.scalar_K});
        std::cout << "K = " << fmt17(kg) << " (gauge route " << fmt17(kv.scalar_K) << ")\n";
      } else {
        CurvatureValue kv = curvature(gauge, x);
        doc.header = {"m", "a", "b", "k"};
        const int n = gauge.model.algebra->dim();
        for (int m = 0; m < n; ++m)
          for (int a = 0; a < kv.d; ++a)
            for (int b = a + 1; b < kv.d; ++b)
              doc.rows.push_back({static_cast<double>(m), static_cast<double>(a),
                                  static_cast<double>(b), kv.k(m, a, b)});
      }
      OutputSink{out_path}.write(std::move(doc),
                                 cmd_tail("curvature", "--point " + point +
                                                           (full ? " --full" : "")));
    };
  });

  // ---- mc-check ----
  auto* mc = app.add_subcommand("mc-check", "Maurer-Cartan defect of a builtin group chart");
  std::string mc_chart, mc_point, mc_out;
  double mc_hfd = 1e-4;
  mc->add_option("--chart", mc_chart, "heis3, se2, abelian2 or sl2")->required();
  mc->add_option("--point", mc_point, "chart parameters")->required();
  mc->add_option("--h-fd", mc_hfd, "finite-difference step");
  mc->add_option("--out", mc_out, "output csv path");
  mc->callback([&] {
    job = [chart_name = mc_chart, point = mc_point, hfd = mc_hfd, outp = mc_out] {
      if (!(hfd > 0.0)) throw ValidationFailure("--h-fd must be positive");
      NamedChart chart = [&] {
        try {
          return builtin_chart(chart_name);
        } catch (const UnknownGeometry& e) {
          throw ValidationFailure(e.what());
        }
      }();
      VectorXd u = to_vec(parse_csv_numbers(point, chart.param_dim));
      double defect = maurer_cartan_defect(chart.chart, u, hfd);
      CsvDoc doc;
      doc.header = {"mc_defect"};
      doc.rows.push_back({defect});
      std::cout << "mc defect " << fmt17(defect) << "\n";
      OutputSink{outp}.write(std::move(doc), "mc-check --chart " + chart_name + " --point " +
                                                 point + " --h-fd " + fmt17(hfd));
    };
  });

  // ---- recognize ----
  auto* rec = app.add_subcommand("recognize", "compare transformed constants to a target algebra");
  std::string rec_source, rec_target, rec_p, rec_out;
  rec->add_option("--source", rec_source, "builtin algebra name or 'affine_surface'")->required();
  rec->add_option("--target", rec_target, "builtin algebra name")->required();
  rec->add_option("--P", rec_p, "row-major basis-change matrix entries")->required();
  rec->add_option("--out", rec_out, "output csv path");
  rec->callback([&] {
    job = [src = rec_source, tgt = rec_target, pstr = rec_p, outp = rec_out] {
      StructureConstants source = [&] {
        if (src == "affine_surface") return affine_surface_constants();
        try {
          return structure_constants(builtin_algebra(src));
        } catch (const UnknownGeometry& e) {
          throw ValidationFailure(e.what());
        }
      }();
      StructureConstants target = [&] {
        try {
          return structure_constants(builtin_algebra(tgt));
        } catch (const UnknownGeometry& e) {
          throw ValidationFailure(e.what());
        }
      }();
      const int n = source.dim();
      auto pv = parse_csv_numbers(pstr, n * n);
      MatrixXd p(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) p(r, c) = pv[static_cast<std::size_t>(r) * n + c];
      StructureConstants got = transform_constants(source, p);
      double err = got.max_abs_diff(target);
      CsvDoc doc;
      doc.header = {"max_entry_error"};
      doc.rows.push_back({err});
      std::cout << "max entry error " << fmt17(err) << "\n";
      OutputSink{outp}.write(std::move(doc), "recognize --source " + src + " --target " + tgt +
                                                 " --P " + pstr);
    };
  });

  // ---- develop ----
  auto* dev = app.add_subcommand("develop", "develop a chart curve into the model group");
  std::string dev_curve;
  add_common(dev);
  dev->add_option("--curve", dev_curve, "builtin curve spec or csv path")->required();
  dev->callback([&] {
    job = [&, curve_spec = dev_curve] {
      num.validate();
      SurfaceMetric metric = require_surface(geometry_of(), "develop");
      metric.h_fd = num.h_fd;
      ChartCurve curve = resolve_curve(curve_spec);
      CartanGauge gauge = surface_gauge(metric);
      GroupTrajectory traj = develop(gauge, curve, num.h, parse_method(num.method));
      OutputSink{out_path}.write(trajectory_csv(traj),
                                 cmd_tail("develop", "--curve " + curve_spec));
    };
  });

  // ---- holonomy ----
  auto* hol = app.add_subcommand("holonomy", "holonomy of a closed loop");
  std::string hol_loop;
  add_common(hol);
  hol->add_option("--loop", hol_loop, "builtin curve spec or csv path")->required();
  hol->callback([&] {
    job = [&, loop_spec = hol_loop] {
      num.validate();
      SurfaceMetric metric = require_surface(geometry_of(), "holonomy");
      metric.h_fd = num.h_fd;
      ChartCurve loop = resolve_curve(loop_spec);
      CartanGauge gauge = surface_gauge(metric);
      HolonomyResult res = holonomy(gauge, loop, num.h, parse_method(num.method));
      CsvDoc doc;
      doc.header = {"rotation_angle", "winding_angle", "translation_defect"};
      doc.rows.push_back({res.rotation_angle, res.winding_angle, res.translation_defect});
      const int m = gauge.model.algebra->matrix_size();
      for (int r = 0; r < m; ++r) {
        std::string row;
        for (int c = 0; c < m; ++c) row += (c ? "," : "") + fmt17(res.element.matrix(r, c));
        doc.meta.emplace_back("endpoint.row" + std::to_string(r), row);
      }
      std::cout << "rotation angle " << fmt17(res.rotation_angle) << " winding "
                << fmt17(res.winding_angle) << " translation defect "
                << fmt17(res.translation_defect) << "\n";
      OutputSink{out_path}.write(std::move(doc), cmd_tail("holonomy", "--loop " + loop_spec));
    };
  });

  // ---- roll ----
  auto* rol = app.add_subcommand("roll", "roll one surface over another along a curve");
  std::string roll_geob, roll_curve, roll_start;
  std::vector<std::string> roll_params_b;
  double roll_angle = 0.0;
  add_common(rol);
  rol->add_option("--geometry-b", roll_geob, "target surface name or spec file")->required();
  rol->add_option("--param-b", roll_params_b, "target surface parameter key=value");
  rol->add_option("--curve", roll_curve, "curve in the source chart")->required();
  rol->add_option("--start", roll_start, "contact point on the target chart x,y")->required();
  rol->add_option("--angle", roll_angle, "initial relative frame angle");
  rol->callback([&] {
    job = [&, geob = roll_geob, paramsb = roll_params_b, curve_spec = roll_curve,
           start = roll_start, angle = roll_angle] {
      num.validate();
      SurfaceMetric ma = require_surface(geometry_of(), "roll");
      SurfaceMetric mb = require_surface(resolve_geometry({geob, paramsb}), "roll");
      ma.h_fd = num.h_fd;
      mb.h_fd = num.h_fd;
      ChartCurve curve = resolve_curve(curve_spec);
      VectorXd sb = to_vec(parse_csv_numbers(start, 2));
      BundleTrajectory traj = roll(ma, mb, curve, sb, angle, num.h);
      std::string extras = "--geometry-b " + geob;
      for (const auto& p : paramsb) extras += " --param-b " + p;
      extras += " --curve " + curve_spec + " --start " + start + " --angle " + fmt17(angle);
      OutputSink{out_path}.write(bundle_csv(traj), cmd_tail("roll", extras));
    };
  });

  // ---- flow ----
  auto* flw = app.add_subcommand("flow", "flow of a constant vector field");
  std::string flow_a, flow_start;
  add_common(flw);
  flw->add_option("--A", flow_a, "omega-value: c0,a0,b0 (SO(2) fiber) or a0,b0 (coframing)")
      ->required();
  flw->add_option("--start", flow_start, "start x,y[,phi]")->required();
  flw->callback([&] {
    job = [&, a_spec = flow_a, start_spec = flow_start] {
      num.validate();
      SurfaceMetric metric = require_surface(geometry_of(), "flow");
      metric.h_fd = num.h_fd;
      CartanGauge gauge = surface_gauge(metric);
      bool fibered = gauge.model.structure_group_dim() == 1;
      auto av = parse_csv_numbers(a_spec, fibered ? 3 : 2);
      VectorXd a = to_vec(av);
      auto sv = parse_csv_numbers(start_spec);
      if (sv.size() != 2 && sv.size() != 3)
        throw ValidationFailure("--start expects x,y or x,y,phi");
      FlowState st;
      st.x = to_vec({sv[0], sv[1]});
      st.phi = sv.size() == 3 ? sv[2] : 0.0;
      FlowTrajectory traj = constant_flow(gauge, a, st, num.tmax, num.h, num.stride);
      OutputSink{out_path}.write(flow_csv(traj), cmd_tail("flow", "--A " + a_spec + " --start " +
                                                                       start_spec));
    };
  });

  // ---- geodesic ----
  auto* geod = app.add_subcommand("geodesic", "unit-speed geodesic flow on a surface");
  std::string geod_start;
  double geod_alpha = 0.0;
  add_common(geod);
  geod->add_option("--start", geod_start, "start point x,y")->required();
  geod->add_option("--alpha", geod_alpha, "initial heading in the orthonormal frame");
  geod->callback([&] {
    job = [&, start_spec = geod_start, alpha = geod_alpha] {
      num.validate();
      SurfaceMetric metric = require_surface(geometry_of(), "geodesic");
      metric.h_fd = num.h_fd;
      CartanGauge gauge = surface_gauge(metric);
      VectorXd x0 = to_vec(parse_csv_numbers(start_spec, 2));
      FlowTrajectory traj = geodesic_flow(gauge, x0, alpha, num.tmax, num.h, num.stride);
      OutputSink{out_path}.write(
          flow_csv(traj),
          cmd_tail("geodesic", "--start " + start_spec + " --alpha " + fmt17(alpha)));
    };
  });

  // ---- spiral ----
  auto* spi = app.add_subcommand("spiral", "surface-of-revolution spiral with Clairault monitor");
  std::string spi_start = "0,0,0", spi_sweep;
  double spi_c0 = 0.0;
  add_common(spi);
  spi->add_option("--c0", spi_c0, "fiber rate of the constant field");
  spi->add_option("--start", spi_start, "start z,theta,phi");
  spi->add_option("--sweep", spi_sweep, "csv of jobs: c0,z0,theta0,phi0");
  spi->callback([&] {
    job = [&, c0 = spi_c0, start_spec = spi_start, sweep = spi_sweep] {
      num.validate();
      GeometryObject obj = geometry_of();
      SurfaceMetric metric = require_surface(obj, "spiral");
      if (metric.name != "revolution")
        throw ValidationFailure("spiral needs the revolution geometry");
      GeometryParams params = resolved_params(geo);
      if (!params.lambda) throw ValidationFailure("spiral needs param lambda");
      Profile lambda = *params.lambda;
      ChartDomain dom = metric.domain;
      std::string extras = "--c0 " + fmt17(c0) + " --start " + start_spec;
      if (sweep.empty()) {
        VectorXd st = to_vec(parse_csv_numbers(start_spec, 3));
        FlowTrajectory traj = revolution_spiral(lambda, c0, st, num.tmax, num.h, &dom, num.stride);
        OutputSink{out_path}.write(flow_csv(traj), cmd_tail("spiral", extras));
        return;
      }
      if (!std::filesystem::exists(sweep))
        throw ValidationFailure("sweep file not found: " + sweep);
      CsvDoc jobs = read_csv_file(sweep);
      std::vector<std::future<FlowTrajectory>> futures;
      for (const auto& row : jobs.rows) {
        if (row.size() != 4) throw ValidationFailure("sweep rows need c0,z0,theta0,phi0");
        futures.push_back(std::async(std::launch::async, [row, lambda, dom, &num] {
          VectorXd st = to_vec({row[1], row[2], row[3]});
          return revolution_spiral(lambda, row[0], st, num.tmax, num.h, &dom, num.stride);
        }));
      }
      CsvDoc summary;
      summary.header = {"job", "c0", "z0", "theta0", "phi0", "outcome", "t_end",
                        "max_drift", "max_z"};
      std::string base = out_path.empty() ? std::string("spiral") : out_path;
      for (std::size_t j = 0; j < futures.size(); ++j) {
        FlowTrajectory traj = futures[j].get();
        char suffix[32];
        std::snprintf(suffix, sizeof(suffix), ".job%03zu.csv", j);
        OutputSink{base + suffix}.write(flow_csv(traj),
                                        cmd_tail("spiral", extras + " --sweep " + sweep));
        summary.rows.push_back({static_cast<double>(j), jobs.rows[j][0], jobs.rows[j][1],
                                jobs.rows[j][2], jobs.rows[j][3],
                                static_cast<double>(traj.report.outcome), traj.report.t_end,
                                traj.report.max_monitor_drift, traj.state_max[0]});
      }
      OutputSink{base + ".summary.csv"}.write(std::move(summary),
                                              cmd_tail("spiral", extras + " --sweep " + sweep));
    };
  });

  // ---- lorentz ----
  auto* lor = app.add_subcommand("lorentz", "lorentz-surface geodesic with first integrals");
  std::string lor_start = "1,0,1,0", lor_sweep;
  add_common(lor);
  lor->add_option("--start", lor_start, "start x,y,xdot,ydot");
  lor->add_option("--sweep", lor_sweep, "csv of jobs: x,y,xdot,ydot");
  lor->callback([&] {
    job = [&, start_spec = lor_start, sweep = lor_sweep] {
      num.validate();
      LorentzFamily fam = require_lorentz(geometry_of(), "lorentz");
      std::string extras = "--start " + start_spec;
      if (sweep.empty()) {
        VectorXd st = to_vec(parse_csv_numbers(start_spec, 4));
        FlowTrajectory traj = lorentz_geodesic(fam, st, num.tmax, num.h, num.stride);
        OutputSink{out_path}.write(flow_csv(traj), cmd_tail("lorentz", extras));
        return;
      }
      if (!std::filesystem::exists(sweep))
        throw ValidationFailure("sweep file not found: " + sweep);
      CsvDoc jobs = read_csv_file(sweep);
      std::vector<std::future<FlowTrajectory>> futures;
      for (const auto& row : jobs.rows) {
        if (row.size() != 4) throw ValidationFailure("sweep rows need x,y,xdot,ydot");
        futures.push_back(std::async(std::launch::async, [row, fam, &num] {
          VectorXd st = to_vec({row[0], row[1], row[2], row[3]});
          return lorentz_geodesic(fam, st, num.tmax, num.h, num.stride);
        }));
      }
      CsvDoc summary;
      summary.header = {"job", "x", "y", "xdot", "ydot", "outcome", "t_end", "max_drift"};
      std::string base = out_path.empty() ? std::string("lorentz") : out_path;
      for (std::size_t j = 0; j < futures.size(); ++j) {
        FlowTrajectory traj = futures[j].get();
        char suffix[32];
        std::snprintf(suffix, sizeof(suffix), ".job%03zu.csv", j);
        OutputSink{base + suffix}.write(flow_csv(traj),
                                        cmd_tail("lorentz", extras + " --sweep " + sweep));
        summary.rows.push_back({static_cast<double>(j), jobs.rows[j][0], jobs.rows[j][1],
                                jobs.rows[j][2], jobs.rows[j][3],
                                static_cast<double>(traj.report.outcome), traj.report.t_end,
                                traj.report.max_monitor_drift});
      }
      OutputSink{base + ".summary.csv"}.write(std::move(summary),
                                              cmd_tail("lorentz", extras + " --sweep " + sweep));
    };
  });

  // ---- frenet ----
  auto* fre = app.add_subcommand("frenet", "reconstruct a space curve from curvature and torsion");
  std::string fre_k = "1", fre_t = "0", fre_out;
  double fre_smax = 6.283185307179586, fre_s0 = 0.0, fre_h = 1e-3;
  fre->add_option("--k", fre_k, "curvature: polynomial coefficients or csv path");
  fre->add_option("--t", fre_t, "torsion: polynomial coefficients or csv path");
  fre->add_option("--s0", fre_s0, "arclength start");
  fre->add_option("--smax", fre_smax, "arclength end");
  fre->add_option("--h", fre_h, "step size");
  fre->add_option("--out", fre_out, "output csv path");
  fre->callback([&] {
    job = [kspec = fre_k, tspec = fre_t, s0 = fre_s0, smax = fre_smax, h = fre_h,
           outp = fre_out] {
      if (!(h > 0.0 && h <= 1.0)) throw ValidationFailure("--h must lie in (0, 1]");
      auto make_profile = [](const std::string& spec) {
        bool numeric = !spec.empty() && (std::isdigit(static_cast<unsigned char>(spec[0])) ||
                                         spec[0] == '-' || spec[0] == '+' || spec[0] == '.');
        if (numeric) return Profile::from_poly(parse_csv_numbers(spec));
        if (!std::filesystem::exists(spec))
          throw ValidationFailure("profile file not found: " + spec);
        return profile_from_file(spec);
      };
      Profile kp = make_profile(kspec), tp = make_profile(tspec);
      FrenetData data;
      data.k = [kp](double s) { return kp(s); };
      data.t = [tp](double s) { return tp(s); };
      data.s0 = s0;
      data.s1 = smax;
      SpaceCurve curve = frenet_reconstruct(data, h);
      CsvDoc doc;
      doc.header = {"s", "x", "y", "z"};
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          doc.header.push_back("f" + std::to_string(r) + std::to_string(c));
      for (std::size_t i = 0; i < curve.s.size(); ++i) {
        std::vector<double> row{curve.s[i], curve.x[i][0], curve.x[i][1], curve.x[i][2]};
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) row.push_back(curve.frame[i](r, c));
        doc.rows.push_back(std::move(row));
      }
      OutputSink{outp}.write(std::move(doc), "frenet --k " + kspec + " --t " + tspec + " --s0 " +
                                                 fmt17(s0) + " --smax " + fmt17(smax) + " --h " +
                                                 fmt17(h));
    };
  });

  auto all = [](const CLI::App*) { return true; };
  for (CLI::App* sub : app.get_subcommands(all)) {
    sub->set_help_flag("--help", "print help");
    for (CLI::App* inner : sub->get_subcommands(all)) inner->set_help_flag("--help", "print help");
  }

  CLI11_PARSE(app, argc, argv);
  flow_limits().escape_norm = escape_norm;
  flow_limits().step_collapse = collapse_step;
  if (!job) {
    std::cerr << "error: no job parsed\n";
    return 1;
  }
  return dispatch(job);
}
