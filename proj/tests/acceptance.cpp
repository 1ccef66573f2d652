// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "slider/dynamics.hpp"
#include "slider/geometry.hpp"
#include "slider/oracle.hpp"
#include "slider/steady.hpp"

using namespace slider;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds
  std::function<Outcome()> run;
};

Problem make_problem(SliderShape shape, DomainRect domain, std::size_t n, double omega, double tol) {
  Problem p;
  p.shape = std::move(shape);
  p.grid = Grid(domain, n, n);
  p.solver.psor.omega = omega;
  p.solver.psor.tol = tol;
  return p;
}

std::string round_sig(double x, int digits) { return fmt::format("{:.{}g}", x, digits); }

// Flat force law and its second-order grid convergence on the unit square.
Outcome flat_force_law() {
  const DomainRect unit{-0.5, 0.5, -0.5, 0.5};
  const double C = flat_C_omega(unit, 999).value;
  const auto max_errors = [&](std::size_t n) {
    const ForceModel model(make_problem(Flat{}, unit, n, 1.9, 1e-12));
    double err_G = 0.0;
    double err_load = 0.0;
    for (double beta : {0.5, 1.0, 2.0}) {
      for (double gamma : {-2.0, -1.0, -0.1}) {
        const ForceEvaluation ev = model.evaluate(beta, gamma);
        const double load = -gamma * C / std::pow(beta, 3);
        const double G = load - 1.0;
        err_G = std::max(err_G, std::abs(ev.G - G) / std::abs(G));
        err_load = std::max(err_load, std::abs(ev.load - load) / load);
      }
    }
    return std::pair{err_G, err_load};
  };
  const auto [g64, l64] = max_errors(64);
  const auto [g32, l32] = max_errors(32);
  const double ratio = l32 / l64;
  Outcome o;
  o.pass = g64 <= 0.02 && l64 <= 0.02 && ratio >= 3.5;
  o.detail = fmt::format("64x64: max rel err G {:.2e}, film load {:.2e}; 32x32 load err {:.2e}; ratio {:.2f}", g64,
                         l64, l32, ratio);
  return o;
}

// No film force once the squeeze velocity exceeds V1.
Outcome exact_cutoff() {
  const Grid grid(DomainRect{}, 33, 33);
  const std::vector<std::pair<std::string, SliderShape>> shapes = {
      {"line", LineContact{2}},
      {"point", PointContact{2}},
      {"flat", Flat{}},
      {"tabulated", tabulate(PointContact{3}, grid)}};
  Outcome o{true, ""};
  double worst = 0.0;
  for (const auto& [name, shape] : shapes) {
    Problem p = make_problem(shape, DomainRect{}, 33, 1.5, 1e-8);
    const double V1 = compute_V1(shape, grid);
    for (double beta : {0.1, 1.0}) {
      const ForceEvaluation ev = eval_G(p, beta, V1 + 0.1);
      worst = std::max(worst, std::abs(ev.load));
      if (!(ev.G == -p.F && std::abs(ev.load) <= 1e-10)) {
        o.pass = false;
        o.detail += fmt::format(" {} beta={} G={};", name, beta, ev.G);
      }
    }
  }
  o.detail = fmt::format("4 shapes x 2 clearances, max |integral p| = {:.1e}", worst) + o.detail;
  return o;
}

// PSOR against brute-force active-set enumeration.
Outcome oracle_equivalence() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::array<std::pair<std::size_t, std::size_t>, 6> sizes{
      {{3, 3}, {3, 4}, {4, 3}, {3, 5}, {5, 3}, {4, 4}}};
  PsorOptions psor;
  psor.tol = 1e-13;
  double worst = 0.0;
  int mixed = 0;
  for (int k = 0; k < 100; ++k) {
    const auto [nx, ny] = sizes[static_cast<std::size_t>(unit(rng) * sizes.size()) % sizes.size()];
    const Grid grid(DomainRect{}, nx, ny);
    const int kind = static_cast<int>(unit(rng) * 3) % 3;
    const SliderShape shape = kind == 0   ? SliderShape{LineContact{1.0 + 2.0 * unit(rng)}}
                              : kind == 1 ? SliderShape{PointContact{1.5 + 1.5 * unit(rng)}}
                                          : SliderShape{Flat{}};
    const double beta = 0.05 + 1.95 * unit(rng);
    const double gamma = -2.0 + (compute_V1(shape, grid) + 3.0) * unit(rng);
    const DiscreteSystem system = assemble_system(grid, shape, beta, gamma);
    const PressureField exact = lcp_enumerate(system);
    const PressureField iterate = solve_vi_psor(system, psor);
    for (std::size_t i = 0; i < system.size(); ++i) {
      worst = std::max(worst, std::abs(exact.values[i] - iterate.values[i]));
    }
    const ComplementarityReport r = complementarity_report(exact, system);
    if (r.active > 0 && r.free > 0) ++mixed;
  }
  return {worst <= 1e-9, fmt::format("100 systems ({} with mixed active sets), max nodal diff {:.2e}", mixed, worst)};
}

// Discrete comparison principle on random sub-rectangles.
Outcome comparison_principle() {
  constexpr std::size_t n = 49;  // odd, so a node sits at the origin for the tabulated profile
  const Grid grid(DomainRect{}, n, n);
  const std::vector<std::pair<std::string, SliderShape>> shapes = {
      {"line", LineContact{2}},
      {"point", PointContact{2}},
      {"flat", Flat{}},
      {"tabulated", tabulate(LineContact{1.5}, Grid(DomainRect{}, n, n))}};
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  int failed = 0;
  for (const auto& [name, shape] : shapes) {
    const Problem p = make_problem(shape, DomainRect{}, n, 1.9, 1e-8);
    const double V1 = compute_V1(shape, grid);
    for (int k = 0; k < 20; ++k) {
      std::size_t i0 = idx(rng), i1 = idx(rng), j0 = idx(rng), j1 = idx(rng);
      if (i0 > i1) std::swap(i0, i1);
      if (j0 > j1) std::swap(j0, j1);
      const double beta = 0.05 + 1.95 * unit(rng);
      const double gamma = -2.0 + (V1 + 3.0) * unit(rng);
      const ComparisonVerdict v = comparison_check(p, beta, gamma, node_mask(grid, NodeRange{i0, i1, j0, j1}));
      worst = std::min(worst, v.worst_margin);
      if (!v.pass) ++failed;
    }
  }
  return {failed == 0, fmt::format("4 shapes x 20 sub-rectangles, {} failed, worst min(q - r) = {:.2e}", failed, worst)};
}

// Steady clearances for line and point contact, stable under refinement.
Outcome steady_existence() {
  Outcome o{true, ""};
  for (const auto& [name, shape] :
       std::vector<std::pair<std::string, SliderShape>>{{"line", LineContact{2}}, {"point", PointContact{2}}}) {
    double beta[2] = {0.0, 0.0};
    int slot = 0;
    for (std::size_t n : {96, 128}) {
      const SteadyResult r = solve_steady(make_problem(shape, DomainRect{}, n, 1.9, 1e-10), SteadyOptions{});
      if (!(std::abs(r.g_at_root) <= 1e-6)) o.pass = false;
      beta[slot++] = r.beta_bar;
    }
    const bool stable = round_sig(beta[0], 2) == round_sig(beta[1], 2);
    o.pass = o.pass && stable;
    o.detail += fmt::format("{}: beta {:.6f} (96) {:.6f} (128), rel diff {:.1e}; ", name, beta[0], beta[1],
                            std::abs(beta[0] - beta[1]) / beta[1]);
  }
  try {
    find_bracket(make_problem(Flat{}, DomainRect{}, 96, 1.9, 1e-10), 0.5);
    o.pass = false;
    o.detail += "flat: no error raised";
  } catch (const Error& e) {
    const bool documented =
        e.code() == ErrorCode::InadmissibleShape && std::string(e.what()) == "no stationary solution for flat slider";
    o.pass = o.pass && documented;
    o.detail += fmt::format("flat: {} \"{}\"", to_string(e.code()), e.what());
  }
  return o;
}

// A priori bounds and energy monotonicity along line-contact trajectories.
Outcome trajectory_bounds() {
  Outcome o{true, ""};
  for (double eta1 : {-0.5, 0.0, 0.5}) {
    Problem p = make_problem(LineContact{2}, DomainRect{}, 64, 1.9, 1e-10);
    p.eta0 = 0.5;
    p.eta1 = eta1;
    const BoundsReport b = bounds_report(p);
    const Trajectory t = integrate_trajectory(p, 50.0, StepControl{});
    double min_eta = 1e300, max_eta = -1e300, min_vel = 1e300, max_vel = -1e300;
    for (const TrajectorySample& s : t.samples) {
      min_eta = std::min(min_eta, s.eta);
      max_eta = std::max(max_eta, s.eta);
      min_vel = std::min(min_vel, s.eta_dot);
      max_vel = std::max(max_vel, s.eta_dot);
    }
    const bool ok = t.termination == Termination::ReachedHorizon && max_vel < b.V2 && max_eta < b.D2 &&
                    min_vel > -b.V3 && min_eta > 0.0 && t.monitor.pass();
    o.pass = o.pass && ok;
    o.detail += fmt::format(
        "eta1={}: {} min eta {:.4f}, eta' in [{:.3f}, {:.3f}] vs V2 {:.2f} / -V3 {:.2f}, max eta {:.3f} < D2 {:.2f}, "
        "energy violation {:.1e}; ",
        eta1, to_string(t.termination), min_eta, min_vel, max_vel, b.V2, -b.V3, max_eta, b.D2,
        t.monitor.worst_violation);
  }
  return o;
}

// Flat slider against the scalar reference ODE and its decay envelope.
Outcome flat_decay() {
  Outcome o{true, ""};
  const double C = flat_C_omega(DomainRect{}, 999).value;
  for (double eta1 : {-0.5, 0.5}) {
    Problem p = make_problem(Flat{}, DomainRect{}, 32, 1.9, 1e-10);
    p.eta0 = 1.0;
    p.eta1 = eta1;
    const Trajectory t = integrate_trajectory(p, 200.0, StepControl{});
    const FlatModel model = make_flat_model(C, 1.0, 1.0, eta1);
    const Trajectory ref = flat_reference_trajectory(model, 200.0, 1e-10);

    double worst_ref = 0.0;
    double worst_env = std::numeric_limits<double>::infinity();
    for (const TrajectorySample& s : t.samples) {
      const double r = interpolate_eta(ref, s.t);
      worst_ref = std::max(worst_ref, std::abs(s.eta - r) / r);
      worst_env = std::min(worst_env, s.eta / flat_lower_envelope(model, s.t) - 1.0);
    }
    // Onset of strict descent: the time after which eta decreases sample to sample.
    double onset = 0.0;
    for (std::size_t k = 1; k < t.samples.size(); ++k) {
      if (!(t.samples[k].eta < t.samples[k - 1].eta)) onset = t.samples[k].t;
    }
    const double final_eta = t.samples.back().eta;
    const bool ok = t.termination == Termination::ReachedHorizon && worst_ref <= 0.01 && worst_env >= -0.02 &&
                    onset < 200.0 && final_eta < 0.2;
    o.pass = o.pass && ok;
    o.detail += fmt::format(
        "eta1={}: {} samples, max rel diff to reference {:.2e}, min envelope margin {:+.2e}, strictly decreasing "
        "after t={:.3g}, eta(200)={:.5f}; ",
        eta1, t.samples.size(), worst_ref, worst_env, onset, final_eta);
  }
  return o;
}

// Spring-damper lower bound G >= F_S - gamma d - F.
Outcome lower_bound() {
  const Problem p = make_problem(LineContact{2}, DomainRect{}, 96, 1.9, 1e-10);
  Outcome o{true, ""};
  double worst = std::numeric_limits<double>::infinity();
  for (double beta : {0.02, 0.05, 0.1}) {
    const ContactBox box = contact_box(p.shape, beta, 0.5, p.grid.domain());
    const SpringDamper sd = spring_damper_decomposition(p, beta, box, {-1.0, -0.3, 0.0}, 1e-6);
    o.pass = o.pass && sd.pass && sd.spring > 0.0 && sd.damping > 0.0;
    for (const LowerBoundCheck& c : sd.checks) worst = std::min(worst, c.G - c.bound);
    o.detail += fmt::format("beta={}: F_S {:.4f}, d {:.4f}, {} box nodes; ", beta, sd.spring, sd.damping, sd.box_nodes);
  }
  o.detail = fmt::format("min G - bound = {:.3e}; ", worst) + o.detail;
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "flat-case force law and second-order convergence", 30.0, flat_force_law},
      {2, "exact cutoff above V1", 5.0, exact_cutoff},
      {3, "PSOR equals active-set enumeration", 10.0, oracle_equivalence},
      {4, "comparison principle", 60.0, comparison_principle},
      {5, "steady-state existence and grid stability", 300.0, steady_existence},
      {6, "trajectory bounds and energies", 600.0, trajectory_bounds},
      {7, "flat-case decay", 300.0, flat_decay},
      {8, "spring-damper lower bound", 120.0, lower_bound},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s  criterion %d: %s [%.1f s / %.0f s%s] %s\n", pass ? "PASS" : "FAIL", c.id, c.title, seconds,
                c.time_limit, in_time ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
