#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slider/geometry.hpp"
#include "support.hpp"

using namespace slider;

using slider::testing::code_of;

TEST_CASE("grid spacing and numbering") {
  const Grid g(DomainRect{}, 3, 3);
  CHECK(g.dx() == doctest::Approx(0.5));
  CHECK(g.dy() == doctest::Approx(0.5));
  CHECK(g.size() == 9);
  CHECK(g.x1(0) == doctest::Approx(-0.5));
  CHECK(g.x2(2) == doctest::Approx(0.5));
  CHECK(g.index(2, 1) == 5);
  CHECK(g.column(5) == 2);
  CHECK(g.row(5) == 1);

  const Grid h(DomainRect{-1, 1, -0.5, 0.5}, 7, 3);
  CHECK(h.dx() == doctest::Approx(0.25));
  CHECK(h.dy() == doctest::Approx(0.25));
  CHECK(h.lattice_x1(0) == doctest::Approx(-1.0));
  CHECK(h.lattice_x1(8) == doctest::Approx(1.0));
}

TEST_CASE("grid rejects domains without the origin and coarse grids") {
  CHECK(code_of([] { Grid(DomainRect{0.1, 1, -1, 1}, 3, 3); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { Grid(DomainRect{}, 2, 3); }) == ErrorCode::TooCoarse);
  CHECK(code_of([] { Grid(DomainRect{}, 3, 1); }) == ErrorCode::TooCoarse);
}

TEST_CASE("nearest node to the origin") {
  const Grid g(DomainRect{}, 5, 5);
  CHECK(g.nearest_to_origin() == g.index(2, 2));
}

TEST_CASE("analytic heights and slopes") {
  CHECK(eval_height(LineContact{2}, {-0.5, 0.3}) == doctest::Approx(0.25));
  CHECK(eval_height(PointContact{2}, {0.3, 0.4}) == doctest::Approx(0.25));
  CHECK(eval_height(Flat{}, {0.7, -0.2}) == 0.0);
  CHECK(eval_gradient_x1(LineContact{2}, {-0.5, 0}) == doctest::Approx(-1.0));
  CHECK(eval_gradient_x1(PointContact{2}, {0.3, 0.4}) == doctest::Approx(0.6));
  CHECK(eval_gradient_x1(Flat{}, {0.3, 0.4}) == 0.0);
  CHECK(eval_gradient_x1(LineContact{1}, {0.0, 0.2}) == 0.0);
  CHECK(has_gradient_kink(LineContact{1}));
  CHECK_FALSE(has_gradient_kink(LineContact{1.5}));
}

TEST_CASE("slopes agree with central differences of the heights") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (double alpha : {1.0, 1.5, 2.0, 3.0}) {
    for (const SliderShape& shape : {SliderShape{LineContact{alpha}}, SliderShape{PointContact{alpha}}}) {
      for (int k = 0; k < 200; ++k) {
        const Point x{coord(rng), coord(rng)};
        if (std::abs(x.x1) < 1e-3) continue;
        const double h = 1e-6;
        const double fd =
            (eval_height(shape, {x.x1 + h, x.x2}) - eval_height(shape, {x.x1 - h, x.x2})) / (2 * h);
        CHECK(eval_gradient_x1(shape, x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("V1 matches a dense sampling of -dh0/dx1") {
  const Grid grid(DomainRect{}, 64, 64);
  CHECK(compute_V1(Flat{}, grid) == 0.0);
  CHECK(compute_V1(LineContact{2}, grid) == doctest::Approx(2.0).epsilon(grid.dx()));
  CHECK(compute_V1(PointContact{2}, grid) == doctest::Approx(2.0).epsilon(grid.dx()));

  for (const SliderShape& shape : {SliderShape{LineContact{1.5}}, SliderShape{PointContact{3.0}},
                                   SliderShape{PointContact{1.2}}}) {
    double sampled = 0.0;
    constexpr int n = 400;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Point x{-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n};
        sampled = std::max(sampled, -eval_gradient_x1(shape, x));
      }
    }
    CHECK(compute_V1(shape, grid) == doctest::Approx(sampled).epsilon(1e-9));
  }
}

TEST_CASE("shape validation") {
  CHECK(code_of([] { validate_shape(LineContact{0.5}); }) == ErrorCode::InvalidShape);
  CHECK(code_of([] { validate_shape(PointContact{0.99}); }) == ErrorCode::InvalidShape);
  validate_shape(LineContact{1.0});
  CHECK(exponent_of(PointContact{2.5}) == 2.5);
  CHECK(exponent_of(Flat{}) == 0.0);
  CHECK(kind_of(LineContact{2}) == ShapeKind::Line);
}

TEST_CASE("tabulated profile reproduces the analytic shape at lattice nodes") {
  const Grid grid(DomainRect{}, 9, 9);
  const TabulatedProfile table = tabulate(LineContact{2}, grid);
  CHECK(table.columns() == 11);
  CHECK(table.rows() == 11);
  for (std::size_t J = 0; J < table.rows(); ++J) {
    for (std::size_t I = 0; I < table.columns(); ++I) {
      const Point x{grid.lattice_x1(I), grid.lattice_x2(J)};
      CHECK(table.height(x) == doctest::Approx(eval_height(LineContact{2}, x)));
      CHECK(table.slope(x) == doctest::Approx(eval_gradient_x1(LineContact{2}, x)));
    }
  }
  // Bilinear in between: x1^2 is reproduced up to the interpolation error dx^2 / 4.
  const double mid = 0.5 * (grid.lattice_x1(2) + grid.lattice_x1(3));
  CHECK(std::abs(table.height({mid, 0.1}) - mid * mid) <= grid.dx() * grid.dx() / 4 + 1e-12);
  CHECK(code_of([&] { (void)table.height({1.5, 0.0}); }) == ErrorCode::OutOfDomain);
  CHECK(kind_of(SliderShape{table}) == ShapeKind::Tabulated);
}

TEST_CASE("tabulated profile validation") {
  const Grid grid(DomainRect{}, 4, 4);
  const std::size_t n = 6 * 6;
  CHECK(code_of([&] { TabulatedProfile(grid, std::vector<double>(n, -1.0), std::vector<double>(n, 0.0)); }) ==
        ErrorCode::InvalidShape);
  CHECK(code_of([&] { TabulatedProfile(grid, std::vector<double>(n, 1.0), std::vector<double>(n, 0.0)); }) ==
        ErrorCode::InvalidShape);
  CHECK(code_of([&] { TabulatedProfile(grid, std::vector<double>(3, 0.0), std::vector<double>(3, 0.0)); }) ==
        ErrorCode::InvalidShape);
}

TEST_CASE("contact boxes") {
  const ContactBox line = contact_box(LineContact{2}, 0.01, 0.5, DomainRect{});
  CHECK(line.kind == BoxKind::LineBox);
  CHECK(line.radius == doctest::Approx(0.1));
  CHECK(line.contains({-0.15, 0.0}));
  CHECK(line.contains({-0.15, 0.49}));
  CHECK_FALSE(line.contains({-0.15, 0.5}));
  CHECK_FALSE(line.contains({-0.2, 0.0}));
  CHECK_FALSE(line.contains({-0.1, 0.0}));
  CHECK_FALSE(line.contains({0.15, 0.0}));

  const ContactBox sector = contact_box(PointContact{2}, 0.01, std::numbers::pi / 6, DomainRect{});
  CHECK(sector.kind == BoxKind::SectorBox);
  CHECK(sector.radius == doctest::Approx(0.1));
  const auto polar = [](double rho, double theta) { return Point{rho * std::cos(theta), rho * std::sin(theta)}; };
  CHECK(sector.contains(polar(0.15, std::numbers::pi)));
  CHECK(sector.contains(polar(0.19, 5 * std::numbers::pi / 6 + 1e-6)));
  CHECK_FALSE(sector.contains(polar(0.15, 5 * std::numbers::pi / 6 - 1e-3)));
  CHECK_FALSE(sector.contains(polar(0.25, std::numbers::pi)));
  CHECK_FALSE(sector.contains(polar(0.05, std::numbers::pi)));

  CHECK(code_of([] { contact_box(Flat{}, 0.01, 0.5, DomainRect{}); }) == ErrorCode::UnsupportedShape);
  CHECK(code_of([] { contact_box(LineContact{2}, 0.0, 0.5, DomainRect{}); }) == ErrorCode::NonPositiveClearance);
  CHECK(code_of([] { contact_box(LineContact{2}, 0.5, 0.5, DomainRect{}); }) == ErrorCode::BoxOutsideDomain);
  CHECK(code_of([] { contact_box(LineContact{2}, 0.01, 2.0, DomainRect{}); }) == ErrorCode::BoxOutsideDomain);
  CHECK(code_of([] { contact_box(PointContact{2}, 0.01, 2.0, DomainRect{}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("the converging wedge drives the film everywhere in the contact box") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double alpha : {1.5, 2.0, 3.0}) {
    for (double beta : {1e-3, 0.01, 0.05}) {
      for (const SliderShape& shape : {SliderShape{LineContact{alpha}}, SliderShape{PointContact{alpha}}}) {
        const double aperture = kind_of(shape) == ShapeKind::Line ? 0.5 : std::numbers::pi / 6;
        const ContactBox box = contact_box(shape, beta, aperture, DomainRect{});
        // Sample a window around the box: x1 in [-2.5r, 0], |x2| <= max(2.5r, 0.6).
        const double r = box.radius;
        const double w = std::min(1.0, std::max(2.5 * r, 0.6));
        int inside = 0;
        for (int k = 0; k < 20000; ++k) {
          const Point x{-2.5 * r * unit(rng), w * (2.0 * unit(rng) - 1.0)};
          if (!box.contains(x)) continue;
          ++inside;
          CHECK(eval_gradient_x1(shape, x) < 0.0);
        }
        CHECK(inside > 0);
      }
    }
  }
}

TEST_CASE("sup of the height") {
  CHECK(sup_height(LineContact{2}, DomainRect{}) == doctest::Approx(1.0));
  CHECK(sup_height(PointContact{2}, DomainRect{}) == doctest::Approx(2.0));
  CHECK(sup_height(Flat{}, DomainRect{}) == 0.0);
}
