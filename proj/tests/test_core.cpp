#include "convint/core.hpp"
#include "convint/io.hpp"
#include "convint/rng.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace convint;

TEST_CASE("window validation and geometry") {
  CHECK_THROWS_AS(Window(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Window(1.0, -2.0), InvalidArgument);
  const Window w = default_window();
  CHECK(w.area() == 804864.0);
  CHECK(w.contains(0.0, 0.0));
  CHECK(w.contains(1024.0, 786.0));
  CHECK_FALSE(w.contains(1024.5, 1.0));
}

TEST_CASE("point patterns reject points outside the window") {
  CHECK_THROWS_AS(PointPattern({{2.0, 0.5}}, Window(1.0, 1.0)), InvalidArgument);
  const PointPattern p({{0.0, 0.0}, {1.0, 1.0}}, Window(1.0, 1.0));
  CHECK(p.size() == 2);
  CHECK(PointPattern({}, Window(1.0, 1.0)).empty());
}

TEST_CASE("grid pixel conventions") {
  const Grid g(Eigen::MatrixXd::Zero(4, 2), Window(8.0, 2.0));
  CHECK(g.pixel_area() == doctest::Approx(2.0));
  CHECK(g.pixel_center(0, 0).x == 1.0);
  CHECK(g.pixel_center(3, 1).y == 1.5);
  CHECK(g.pixel_x(8.0) == 3);
  CHECK(g.pixel_x(1.99) == 0);
  CHECK(g.pixel_y(1.0) == 1);
}

TEST_CASE("bilinear interpolation reproduces centres and affine fields") {
  Eigen::MatrixXd v(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) v(i, j) = 2.0 * i - j;
  const Grid g(v, Window(3.0, 3.0));
  CHECK(g.bilinear(0.5, 0.5) == doctest::Approx(0.0));
  CHECK(g.bilinear(1.5, 2.5) == doctest::Approx(0.0));
  CHECK(g.bilinear(1.0, 1.25) == doctest::Approx(2.0 * 0.5 - 0.75));
  CHECK(g.bilinear(0.1, 0.1) == doctest::Approx(0.0));  // clamped to the outer centre
}

TEST_CASE("covariate and intensity invariants") {
  CHECK_THROWS_AS(CovariateGrid(Eigen::MatrixXd::Zero(1, 4), Window(1.0, 1.0)), InvalidArgument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(CovariateGrid(bad, Window(1.0, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(IntensityMap(Eigen::MatrixXd::Zero(2, 2), Window(1.0, 1.0)), InvalidArgument);
}

TEST_CASE("expected count") {
  CHECK(expected_count(IntensityMap(Eigen::MatrixXd::Ones(64, 48), default_window())) ==
        doctest::Approx(804864.0).epsilon(1e-14));
  CHECK(expected_count(IntensityMap(Eigen::MatrixXd::Constant(5, 7, 0.5), Window(1.0, 1.0))) ==
        doctest::Approx(0.5).epsilon(1e-14));
  const IntensityMap m((testing::random_grid(9, 6, Window(2.0, 3.0), 3).values().array() + 2.0).matrix(),
                       Window(2.0, 3.0));
  CHECK(expected_count(m.scaled(3.5)) == doctest::Approx(3.5 * expected_count(m)).epsilon(1e-13));
}

TEST_CASE("counter rng is deterministic and well spread") {
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  CHECK(a() != c());
  CHECK(a.counter() == 11);

  CounterRng r(7);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
  s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson sampler moments on both branches") {
  for (double mean : {0.3, 4.0, 9.5, 10.5, 37.0, 1800.0}) {
    CAPTURE(mean);
    CounterRng r(static_cast<Seed>(mean * 10));
    const int n = 40000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(r.poisson(mean));
      s += k;
      s2 += k * k;
    }
    const double m = s / n;
    const double var = s2 / n - m * m;
    CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / n));
    CHECK(var == doctest::Approx(mean).epsilon(0.05));
  }
  CounterRng r(1);
  CHECK(r.poisson(0.0) == 0);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 804864.0, 0.0})
    CHECK(io::parse_double(io::format_double(v)) == v);
  CHECK_THROWS_AS(io::parse_double("1.5x"), io::FormatError);
  CHECK_THROWS_AS(io::parse_double(""), io::FormatError);
}

TEST_CASE("pattern csv round-trips bit-exactly") {
  const Window w = default_window();
  const PointPattern p(testing::random_points(50, w, 9), w);
  std::stringstream ss;
  io::write_pattern(ss, p);
  CHECK(ss.str().rfind("x,y\n", 0) == 0);
  const PointPattern q = io::read_pattern(ss, w);
  CHECK(q.points() == p.points());

  std::stringstream bad("x,y\n2000,1\n");
  CHECK_THROWS(io::read_pattern(bad, w));
  std::stringstream header("a,b\n1,1\n");
  CHECK_THROWS_AS(io::read_pattern(header, w), io::FormatError);
}

TEST_CASE("grid text format round-trips") {
  const Grid g = testing::random_grid(5, 3, Window(10.0, 6.0), 11);
  std::stringstream ss;
  io::write_grid(ss, g);
  std::string first;
  std::getline(ss, first);
  CHECK(first == "5 3 10 6");
  ss.seekg(0);
  const Grid h = io::read_grid(ss);
  CHECK(h.window() == g.window());
  CHECK(h.values() == g.values());
  std::stringstream shortfile("2 2 1 1\n1 2\n3\n");
  CHECK_THROWS_AS(io::read_grid(shortfile), io::FormatError);
}

TEST_CASE("spectrum csv round-trips") {
  const Spectrum s = testing::random_spectrum(3, 2, 5);
  std::stringstream ss;
  io::write_spectrum(ss, s);
  std::string header, zero;
  std::getline(ss, header);
  std::getline(ss, zero);
  CHECK(header == "kx,ky,re,im");
  CHECK(zero.rfind("0,0,", 0) == 0);
  ss.seekg(0);
  const Spectrum t = io::read_spectrum(ss);
  CHECK(t.zero() == s.zero());
  CHECK(t.coefficients() == s.coefficients());
}

TEST_CASE("pgm export writes a binary image") {
  const auto dir = std::filesystem::temp_directory_path() / "convint_test_pgm";
  const Grid g = testing::random_grid(6, 4, Window(6.0, 4.0), 2);
  io::write_pgm(dir / "g.pgm", g);
  const std::string text = io::read_text(dir / "g.pgm");
  CHECK(text.rfind("P5\n6 4\n255\n", 0) == 0);
  CHECK(text.size() == std::string("P5\n6 4\n255\n").size() + 24);
  std::filesystem::remove_all(dir);
}
