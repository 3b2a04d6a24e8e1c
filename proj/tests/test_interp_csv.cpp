#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cartan/csv.hpp"
#include "cartan/interp.hpp"

using namespace cartan;

TEST_CASE("natural cubic spline reproduces cubics away from the ends") {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    double t = -2.0 + 0.1 * i;
    x.push_back(t);
    y.push_back(std::sin(t));
  }
  CubicSpline s(x, y);
  for (double t : {-0.95, 0.0, 0.63, 1.2}) {
    CHECK(s(t) == doctest::Approx(std::sin(t)).epsilon(1e-4));
    CHECK(s.deriv(t) == doctest::Approx(std::cos(t)).epsilon(1e-3));
  }
}

TEST_CASE("table interpolation orders") {
  std::vector<double> x{0, 1, 2, 3};
  std::vector<double> y{1, 3, 2, 5};
  Table1D pc(x, y, InterpOrder::piecewise_constant);
  CHECK(pc(0.5) == 1.0);
  CHECK(pc(1.0) == 3.0);
  CHECK(pc(2.7) == 2.0);
  Table1D lin(x, y, InterpOrder::linear);
  CHECK(lin(0.5) == doctest::Approx(2.0));
  CHECK(lin(2.5) == doctest::Approx(3.5));
}

TEST_CASE("polynomial derivative chain") {
  Poly p{{1.0, -2.0, 0.5, 3.0}};  // 1 - 2x + 0.5x^2 + 3x^3
  Poly d = p.derivative();
  CHECK(p(2.0) == doctest::Approx(1.0 - 4.0 + 2.0 + 24.0));
  CHECK(d(2.0) == doctest::Approx(-2.0 + 2.0 + 36.0));
}

TEST_CASE("csv round trip with metadata") {
  CsvDoc doc;
  doc.meta.emplace_back("alpha", "1.5");
  doc.header = {"t", "v"};
  doc.rows = {{0.0, 1.0 / 3.0}, {0.1, -2.25e-17}};
  std::stringstream ss;
  write_csv(ss, doc);
  CsvDoc back = read_csv(ss);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0][1] == doc.rows[0][1]);
  CHECK(back.rows[1][1] == doc.rows[1][1]);
  CHECK(back.meta[0].first == "alpha");
  CHECK(back.header[1] == "v");
}

TEST_CASE("bicubic grid interpolates a bilinear function exactly inside") {
  std::size_t nx = 9, ny = 7;
  std::vector<double> vals(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      double x = -1.0 + 2.0 * static_cast<double>(i) / (nx - 1);
      double y = 0.0 + 3.0 * static_cast<double>(j) / (ny - 1);
      vals[j * nx + i] = 2.0 * x - 0.5 * y + 0.25 * x * y;
    }
  BicubicGrid g(-1.0, 1.0, 0.0, 3.0, nx, ny, vals);
  for (double x : {-0.4, 0.1, 0.7})
    for (double y : {0.5, 1.3, 2.4})
      CHECK(g(x, y) == doctest::Approx(2.0 * x - 0.5 * y + 0.25 * x * y).epsilon(1e-12));
}
