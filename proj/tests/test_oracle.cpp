#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slider/oracle.hpp"
#include "support.hpp"

using namespace slider;
using slider::testing::code_of;

TEST_CASE("Fourier constant of the unit square") {
  const DomainRect unit{-0.5, 0.5, -0.5, 0.5};
  const FourierConstant one = flat_C_omega(unit, 1);
  CHECK(one.value == doctest::Approx(32.0 / std::pow(std::numbers::pi, 6)));
  CHECK(one.value == doctest::Approx(0.0333).epsilon(1e-3));
  const FourierConstant many = flat_C_omega(unit, 99);
  CHECK(many.value == doctest::Approx(0.0351).epsilon(2e-3));
  CHECK(many.tail_bound > 0.0);
  // The tail bound really bounds the omitted terms.
  const FourierConstant reference = flat_C_omega(unit, 2001);
  CHECK(reference.value - many.value <= many.tail_bound);
  CHECK(reference.value - many.value >= 0.0);
}

TEST_CASE("Fourier constant is increasing in the cutoff and scales with the fourth power") {
  const DomainRect r{-0.3, 0.9, -0.4, 0.2};
  double previous = 0.0;
  for (std::size_t k = 1; k <= 41; k += 2) {
    const double v = flat_C_omega(r, k).value;
    CHECK(v > previous);
    previous = v;
  }
  const double base = flat_C_omega(DomainRect{-0.5, 0.5, -0.5, 0.5}, 199).value;
  for (double s : {0.5, 2.0, 3.0}) {
    CHECK(flat_C_omega(DomainRect{-0.5 * s, 0.5 * s, -0.5 * s, 0.5 * s}, 199).value ==
          doctest::Approx(base * std::pow(s, 4)).epsilon(1e-12));
  }
  CHECK(code_of([] { flat_C_omega(DomainRect{}, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Fourier constant agrees with a fine grid solve on a rectangle") {
  const DomainRect r{-0.7, 0.5, -0.3, 0.5};
  const double series = flat_C_omega(r, 199).value;
  const Grid grid(r, 255, 255);
  const DiscreteSystem s = assemble_system(grid, Flat{}, 1.0, -1.0);
  const double solved = load_integral(solve_linear(s, std::nullopt, 1e-12), grid);
  CHECK(solved == doctest::Approx(series).epsilon(5e-3));
}

TEST_CASE("flat model constants") {
  const FlatModel down = make_flat_model(0.5, 1.0, 1.0, -0.5);
  CHECK(down.t0 == 0.0);
  CHECK(down.eta_hat0 == 1.0);
  CHECK(down.a == doctest::Approx(0.5));
  CHECK(down.b == doctest::Approx(0.75));
  CHECK(flat_lower_envelope(down, 0.0) == doctest::Approx(std::sqrt(0.5 / 1.5)));

  const FlatModel up = make_flat_model(0.5, 2.0, 1.0, 1.0);
  CHECK(up.t0 == doctest::Approx(0.5));
  CHECK(up.eta_hat0 == doctest::Approx(1.25));
  CHECK(flat_lower_envelope(up, 0.25) == doctest::Approx(1.0 + 0.25 - 0.0625));
  CHECK(flat_lower_envelope(up, up.t0) == doctest::Approx(up.eta_hat0));
  CHECK(flat_upper_envelope(up) == doctest::Approx(1.25));
  CHECK(code_of([] { make_flat_model(0.0, 1.0, 1.0, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("flat reference trajectory") {
  const double C = flat_C_omega(DomainRect{}, 199).value;
  for (double eta1 : {-0.5, 0.0, 0.5}) {
    const FlatModel m = make_flat_model(C, 1.0, 1.0, eta1);
    const Trajectory t = flat_reference_trajectory(m, 100.0, 1e-10);
    CHECK(t.samples.back().t == doctest::Approx(100.0));
    CHECK(t.monitor.pass());
    for (const TrajectorySample& s : t.samples) {
      CHECK(s.eta >= flat_lower_envelope(m, s.t) * (1 - 1e-7));
      CHECK(s.eta <= flat_upper_envelope(m) * (1 + 1e-12));
      if (s.t >= m.t0) CHECK(s.eta * std::sqrt(s.t + m.b) >= m.a * (1 - 1e-7));
      if (eta1 > 0.0 && s.t <= m.t0) {
        CHECK(s.eta == doctest::Approx(1.0 + eta1 * s.t - 0.5 * s.t * s.t).epsilon(1e-12));
      }
    }
    // Descent: E1 never rises.
    double e1 = 1e300;
    for (const TrajectorySample& s : t.samples) {
      if (s.t < m.t0) continue;
      CHECK(s.E1 <= e1 + 1e-9);
      e1 = s.E1;
    }
  }
  const Trajectory start = flat_reference_trajectory(make_flat_model(C, 1.0, 1.0, 0.0), 0.01, 1e-10);
  CHECK(start.samples.front().G == -1.0);
  CHECK(start.samples.back().eta_dot < 0.0);
}

TEST_CASE("Hermite interpolation reproduces cubics") {
  Trajectory t;
  const auto eta = [](double x) { return 1 + x - 0.5 * x * x + 0.1 * x * x * x; };
  const auto vel = [](double x) { return 1 - x + 0.3 * x * x; };
  const auto acc = [](double x) { return -1 + 0.6 * x; };
  for (double x : {0.0, 0.3, 1.0, 1.7}) t.samples.push_back({x, eta(x), vel(x), acc(x), 0, 0, 0, 0});
  for (double x : {0.0, 0.1, 0.65, 1.2, 1.7}) {
    CHECK(interpolate_eta(t, x) == doctest::Approx(eta(x)).epsilon(1e-13));
    CHECK(interpolate_eta_dot(t, x) == doctest::Approx(vel(x)).epsilon(1e-13));
  }
  CHECK(code_of([&] { interpolate_eta(t, 2.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("active-set enumeration: trivial load signs") {
  const Grid grid(DomainRect{}, 3, 4);
  const DiscreteSystem negative = assemble_system(grid, PointContact{2}, 0.5, 5.0);
  const PressureField zero = lcp_enumerate(negative);
  for (double v : zero.values) CHECK(v == 0.0);

  const DiscreteSystem positive = assemble_system(grid, Flat{}, 0.5, -1.0);
  const PressureField full = lcp_enumerate(positive);
  const PressureField direct = solve_linear(positive, std::nullopt, 1e-14);
  for (std::size_t k = 0; k < full.values.size(); ++k) {
    CHECK(full.values[k] > 0.0);
    CHECK(full.values[k] == doctest::Approx(direct.values[k]).epsilon(1e-10));
  }
  CHECK(code_of([] { lcp_enumerate(assemble_system(Grid(DomainRect{}, 5, 4), Flat{}, 1, 0)); }) ==
        ErrorCode::TooLarge);
}

TEST_CASE("PSOR agrees with active-set enumeration on random small systems") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> side(3, 5);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PsorOptions o;
  o.tol = 1e-13;
  int mixed = 0;
  for (int k = 0; k < 100; ++k) {
    std::size_t nx = side(rng);
    std::size_t ny = side(rng);
    while (nx * ny > 16) ny -= 1;
    const Grid grid(DomainRect{-1.0, 0.5 + unit(rng), -0.6 - unit(rng), 1.0}, nx, ny);
    const double alpha = 1.0 + 2.0 * unit(rng);
    const int choice = kind(rng);
    const SliderShape shape = choice == 0   ? SliderShape{LineContact{alpha}}
                              : choice == 1 ? SliderShape{PointContact{alpha}}
                                            : SliderShape{Flat{}};
    const double beta = 0.05 + 1.95 * unit(rng);
    const double gamma = -2.0 + (compute_V1(shape, grid) + 3.0) * unit(rng);
    const DiscreteSystem s = assemble_system(grid, shape, beta, gamma);
    const PressureField e = lcp_enumerate(s);
    const PressureField p = solve_vi_psor(s, o);
    double diff = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) diff = std::max(diff, std::abs(e.values[i] - p.values[i]));
    CHECK(diff <= 1e-9);
    const ComplementarityReport r = complementarity_report(e, s);
    if (r.active > 0 && r.free > 0) ++mixed;
  }
  CHECK(mixed >= 10);
}

TEST_CASE("comparison principle") {
  Problem p;
  p.shape = LineContact{2};
  p.grid = Grid(DomainRect{}, 48, 48);
  p.solver.psor.tol = 1e-10;
  p.solver.psor.omega = 1.85;

  SUBCASE("whole interior with a non-negative load: both solves coincide") {
    Problem flat = p;
    flat.shape = Flat{};
    const ComparisonVerdict v =
        comparison_check(flat, 0.5, -1.0, std::vector<unsigned char>(flat.grid.size(), 1));
    CHECK(v.pass);
    CHECK(std::abs(v.worst_margin) <= 1e-8);
  }
  SUBCASE("contact box") {
    const ContactBox box = contact_box(p.shape, 0.05, 0.5, p.grid.domain());
    const ComparisonVerdict v = comparison_check(p, 0.05, -0.5, node_mask(p.grid, box));
    CHECK(v.pass);
    CHECK(v.worst_margin > 0.0);
    CHECK(v.nodes > 0);
  }
  SUBCASE("random sub-rectangles") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> idx(0, 47);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      std::size_t i0 = idx(rng), i1 = idx(rng), j0 = idx(rng), j1 = idx(rng);
      if (i0 > i1) std::swap(i0, i1);
      if (j0 > j1) std::swap(j0, j1);
      const double beta = 0.05 + 1.95 * unit(rng);
      const double gamma = -2.0 + 5.0 * unit(rng);
      const ComparisonVerdict v = comparison_check(p, beta, gamma, node_mask(p.grid, NodeRange{i0, i1, j0, j1}));
      CHECK(v.pass);
    }
  }
  CHECK(code_of([&] { node_mask(p.grid, NodeRange{0, 48, 0, 3}); }) == ErrorCode::OutOfDomain);
}
