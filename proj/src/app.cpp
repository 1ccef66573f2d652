#include "slider/app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <fmt/format.h>
#include "json.hpp"

#include "slider/oracle.hpp"
#include "slider/steady.hpp"

namespace slider {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  }
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out = open_output(path);
  out << doc.dump(2) << '\n';
}

json error_document(Command command, ErrorCode code, const std::string& reason) {
  return {{"command", to_string(command)}, {"error", to_string(code)}, {"reason", reason}};
}

const char* json_artifact(Command command) {
  switch (command) {
    case Command::Simulate:
      return "summary.json";
    case Command::Steady:
      return "steady.json";
    case Command::GCurve:
      return "error.json";
    case Command::Bounds:
      return "bounds.json";
    case Command::Verify:
      return "verify.json";
  }
  return "error.json";
}

void dump_field(const fs::path& out_dir, const Problem& problem, double beta, double gamma) {
  const DiscreteSystem system = FilmModel(problem.grid, problem.shape).assemble(beta, gamma);
  const PressureField field = solve_vi_psor(system, problem.solver.psor);
  std::ofstream out = open_output(out_dir / "field.csv");
  write_field_csv(out, system, field);
}

json bounds_json(const BoundsReport& b) {
  json doc = {{"V1", b.V1},
              {"V2", b.V2},
              {"lambda1", b.lambda1},
              {"sup_h0", b.sup_h0},
              {"c1", b.c1},
              {"D1", b.D1},
              {"D2", b.D2},
              {"V3", b.V3},
              {"s1", nullptr},
              {"s2", nullptr},
              {"steady_admissible", b.steady_admissible},
              {"global_admissible", b.global_admissible},
              {"gradient_kink", b.gradient_kink},
              {"D3", b.D3},
              {"D4", b.D4}};
  if (b.s1) doc["s1"] = *b.s1;
  if (b.s2) doc["s2"] = *b.s2;
  return doc;
}

int simulate(const RunConfig& config, const fs::path& out_dir) {
  const Problem problem = make_problem(config);
  const BoundsReport bounds = bounds_report(problem);
  const Trajectory traj = integrate_trajectory(problem, config.integrator.t_end, config.integrator.control);

  {
    std::ofstream out = open_output(out_dir / "trajectory.csv");
    out << "t,eta,eta_dot,G,load,E1,E2,psor_iters\n";
    for (const TrajectorySample& s : traj.samples) {
      out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", s.t, s.eta,
                         s.eta_dot, s.G, s.load, s.E1, s.E2, s.psor_iters);
    }
  }

  double min_eta = std::numeric_limits<double>::infinity();
  double max_eta = -min_eta;
  double min_vel = min_eta;
  double max_vel = -min_eta;
  for (const TrajectorySample& s : traj.samples) {
    min_eta = std::min(min_eta, s.eta);
    max_eta = std::max(max_eta, s.eta);
    min_vel = std::min(min_vel, s.eta_dot);
    max_vel = std::max(max_vel, s.eta_dot);
  }
  const TrajectorySample& last = traj.samples.back();
  json summary = {
      {"command", "simulate"},
      {"termination", to_string(traj.termination)},
      {"termination_time", traj.termination_time},
      {"termination_reason", traj.termination_reason},
      {"samples", traj.samples.size()},
      {"force_evaluations", traj.force_evaluations},
      {"rejected_steps", traj.rejected_steps},
      {"final", {{"t", last.t}, {"eta", last.eta}, {"eta_dot", last.eta_dot}, {"G", last.G}}},
      {"range",
       {{"min_eta", min_eta}, {"max_eta", max_eta}, {"min_eta_dot", min_vel}, {"max_eta_dot", max_vel}}},
      {"bounds",
       {{"V2", bounds.V2},
        {"D2", bounds.D2},
        {"V3", bounds.V3},
        {"margin_V2", bounds.V2 - max_vel},
        {"margin_D2", bounds.D2 - max_eta},
        {"margin_V3", min_vel + bounds.V3},
        {"within", max_vel < bounds.V2 && max_eta < bounds.D2 && min_vel > -bounds.V3}}},
      {"energy_monitor",
       {{"pass", traj.monitor.pass()},
        {"segments", traj.monitor.segments.size()},
        {"failed_segments", traj.monitor.failed_segments},
        {"worst_violation", traj.monitor.worst_violation}}},
      {"config", json::parse(serialize_config(config))}};
  write_json(out_dir / "summary.json", summary);

  if (config.debug.dump_field) {
    dump_field(out_dir, problem, last.eta, last.eta_dot);
  }
  switch (traj.termination) {
    case Termination::ReachedHorizon:
      return 0;
    case Termination::ContactGuard:
      return 1;
    case Termination::StepFailure:
      return 3;
  }
  return 3;
}

int steady(const RunConfig& config, const fs::path& out_dir) {
  const Problem problem = make_problem(config);
  const SteadyResult r = solve_steady(problem, config.steady);
  json doc = {{"command", "steady"},
              {"beta_bar", r.beta_bar},
              {"g_at_root", r.g_at_root},
              {"bracket", {{"lo", r.bracket.lo}, {"hi", r.bracket.hi}, {"g_lo", r.bracket.g_lo},
                           {"g_hi", r.bracket.g_hi}}},
              {"evaluations", r.evaluations},
              {"tol", config.steady.tol},
              {"tol_beta", config.steady.tol_beta}};
  write_json(out_dir / "steady.json", doc);
  if (config.debug.dump_field) {
    dump_field(out_dir, problem, r.beta_bar, 0.0);
  }
  return 0;
}

int gcurve(const RunConfig& config, const fs::path& out_dir) {
  const Problem problem = make_problem(config);
  const std::vector<GCurveRow> rows = g_curve(problem, config.gcurve_betas);
  std::ofstream out = open_output(out_dir / "gcurve.csv");
  write_gcurve_csv(out, rows);
  return 0;
}

int bounds(const RunConfig& config, const fs::path& out_dir) {
  const Problem problem = make_problem(config);
  json doc = bounds_json(bounds_report(problem));
  doc["command"] = "bounds";
  doc["shape"] = to_string(kind_of(problem.shape));
  write_json(out_dir / "bounds.json", doc);
  return 0;
}

int verify(const RunConfig& config, const fs::path& out_dir) {
  const VerificationReport report = run_verification(config);
  json checks = json::array();
  for (const VerificationCheck& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"skipped", c.skipped},
                      {"margin", c.margin},
                      {"detail", c.detail}});
  }
  write_json(out_dir / "verify.json",
             {{"command", "verify"}, {"pass", report.pass()}, {"seed", config.seed}, {"checks", checks}});
  return report.pass() ? 0 : 1;
}

// Verification checks.

VerificationCheck check_fourier(const RunConfig& config) {
  VerificationCheck c;
  c.name = "fourier_constant";
  const FourierConstant series = flat_C_omega(config.domain, config.verify.fourier_cutoff);
  const std::size_t n = config.verify.fourier_grid;
  const Grid grid(config.domain, n, n);
  const DiscreteSystem system = assemble_system(grid, Flat{}, 1.0, 0.0);
  const std::vector<double> unit(grid.size(), grid.cell_area());
  const PressureField w = solve_linear(system, std::span<const double>(unit), 1e-12);
  const double grid_value = load_integral(w, grid);
  const double rel = std::abs(grid_value - series.value) / series.value;
  constexpr double limit = 5e-3;
  c.pass = rel <= limit;
  c.margin = limit - rel;
  c.detail = fmt::format("series {:.10g} (tail <= {:.3g}), {}x{} grid {:.10g}, relative difference {:.3g}",
                         series.value, series.tail_bound, n, n, grid_value, rel);
  return c;
}

VerificationCheck check_lcp(const RunConfig& config, std::mt19937_64& rng) {
  VerificationCheck c;
  c.name = "lcp_enumeration";
  if (config.verify.lcp_cases == 0) {
    c.skipped = true;
    c.pass = true;
    c.detail = "no cases requested";
    return c;
  }
  constexpr std::array<std::pair<std::size_t, std::size_t>, 6> sizes{
      {{3, 3}, {3, 4}, {4, 3}, {3, 5}, {5, 3}, {4, 4}}};
  std::uniform_int_distribution<std::size_t> pick_size(0, sizes.size() - 1);
  std::uniform_int_distribution<int> pick_kind(0, 2);
  std::uniform_real_distribution<double> pick_alpha(1.0, 3.0);
  std::uniform_real_distribution<double> pick_beta(0.05, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PsorOptions psor;
  psor.tol = 1e-13;
  double worst = 0.0;
  for (std::size_t k = 0; k < config.verify.lcp_cases; ++k) {
    const auto [nx, ny] = sizes[pick_size(rng)];
    const Grid grid(config.domain, nx, ny);
    const int kind = pick_kind(rng);
    const SliderShape shape = kind == 0   ? SliderShape{LineContact{pick_alpha(rng)}}
                              : kind == 1 ? SliderShape{PointContact{pick_alpha(rng)}}
                                          : SliderShape{Flat{}};
    const double beta = pick_beta(rng);
    const double v1 = compute_V1(shape, grid);
    const double gamma = -2.0 + unit(rng) * (v1 + 3.0);
    const DiscreteSystem system = assemble_system(grid, shape, beta, gamma);
    const PressureField exact = lcp_enumerate(system);
    const PressureField iterate = solve_vi_psor(system, psor);
    for (std::size_t i = 0; i < exact.values.size(); ++i) {
      worst = std::max(worst, std::abs(exact.values[i] - iterate.values[i]));
    }
  }
  constexpr double limit = 1e-9;
  c.pass = worst <= limit;
  c.margin = limit - worst;
  c.detail = fmt::format("{} cases, max nodal difference {:.3g}", config.verify.lcp_cases, worst);
  return c;
}

VerificationCheck check_comparison(const RunConfig& config, const Problem& problem, std::mt19937_64& rng) {
  VerificationCheck c;
  c.name = "comparison_principle";
  if (config.verify.comparison_cases == 0) {
    c.skipped = true;
    c.pass = true;
    c.detail = "no cases requested";
    return c;
  }
  const Grid& grid = problem.grid;
  const double v1 = compute_V1(problem.shape, grid);
  std::uniform_real_distribution<double> pick_beta(0.05, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  std::size_t failed = 0;
  for (std::size_t k = 0; k < config.verify.comparison_cases; ++k) {
    std::uniform_int_distribution<std::size_t> pick_i(0, grid.nx() - 1);
    std::uniform_int_distribution<std::size_t> pick_j(0, grid.ny() - 1);
    std::size_t i0 = pick_i(rng);
    std::size_t i1 = pick_i(rng);
    std::size_t j0 = pick_j(rng);
    std::size_t j1 = pick_j(rng);
    if (i0 > i1) std::swap(i0, i1);
    if (j0 > j1) std::swap(j0, j1);
    const double beta = pick_beta(rng);
    const double gamma = -2.0 + unit(rng) * (v1 + 3.0);
    const ComparisonVerdict v = comparison_check(problem, beta, gamma, node_mask(grid, NodeRange{i0, i1, j0, j1}));
    worst = std::min(worst, v.worst_margin);
    if (!v.pass) ++failed;
  }
  c.pass = failed == 0;
  c.margin = worst;
  c.detail = fmt::format("{} sub-rectangles, {} failed, worst q - r = {:.3g}", config.verify.comparison_cases,
                         failed, worst);
  return c;
}

VerificationCheck check_cutoff(const Problem& problem) {
  VerificationCheck c;
  c.name = "exact_cutoff";
  const ForceModel model(problem);
  double worst_load = 0.0;
  bool exact = true;
  for (double beta : {0.1, 1.0}) {
    const ForceEvaluation ev = model.evaluate(beta, model.V1() + 0.1);
    worst_load = std::max(worst_load, std::abs(ev.load));
    exact = exact && ev.G == -problem.F;
  }
  constexpr double limit = 1e-10;
  c.pass = exact && worst_load <= limit;
  c.margin = limit - worst_load;
  c.detail = fmt::format("V1 = {:.17g}, max |load| at gamma = V1 + 0.1: {:.3g}", model.V1(), worst_load);
  return c;
}

VerificationCheck check_flat_reference(const RunConfig& config) {
  VerificationCheck c;
  c.name = "flat_envelope";
  const double C = flat_C_omega(config.domain, config.verify.fourier_cutoff).value;
  const FlatModel model = make_flat_model(C, config.physics.F, config.physics.eta0, config.physics.eta1);
  const Trajectory ref = flat_reference_trajectory(model, config.integrator.t_end, config.verify.reference_tol);
  double worst = std::numeric_limits<double>::infinity();
  for (const TrajectorySample& s : ref.samples) {
    const double lower = flat_lower_envelope(model, s.t);
    const double upper = flat_upper_envelope(model);
    worst = std::min({worst, (s.eta - lower) / lower, (upper - s.eta) / upper});
  }
  const double limit = -1e3 * config.verify.reference_tol;
  c.pass = worst >= limit && ref.monitor.pass();
  c.margin = worst - limit;
  c.detail = fmt::format(
      "C = {:.10g}, a = {:.10g}, b = {:.10g}, t0 = {:.10g}; {} samples, worst relative envelope margin {:.3g}, "
      "energy monitor {}",
      C, model.a, model.b, model.t0, ref.samples.size(), worst, ref.monitor.pass() ? "pass" : "fail");
  return c;
}

VerificationCheck check_lower_bound(const RunConfig& config, const Problem& problem) {
  VerificationCheck c;
  c.name = "spring_damper_lower_bound";
  const ShapeKind kind = kind_of(problem.shape);
  if (kind != ShapeKind::Line && kind != ShapeKind::Point) {
    c.skipped = true;
    c.pass = true;
    c.detail = fmt::format("not applicable to {} shapes", to_string(kind));
    return c;
  }
  const double aperture = kind == ShapeKind::Line ? config.contact.delta : config.contact.theta0;
  double worst = std::numeric_limits<double>::infinity();
  bool pass = true;
  std::string notes;
  for (double beta : config.contact.betas) {
    try {
      const ContactBox box = contact_box(problem.shape, beta, aperture, problem.grid.domain());
      const SpringDamper sd = spring_damper_decomposition(problem, beta, box, config.contact.gammas);
      for (const LowerBoundCheck& chk : sd.checks) {
        worst = std::min(worst, chk.G - chk.bound);
      }
      pass = pass && sd.pass;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoxOutsideDomain && e.code() != ErrorCode::BoxUnresolved) throw;
      notes += fmt::format(" beta = {} skipped ({});", beta, e.what());
    }
  }
  if (!std::isfinite(worst)) {
    c.skipped = true;
    c.pass = true;
    c.detail = "no contact box resolved on this grid:" + notes;
    return c;
  }
  c.pass = pass;
  c.margin = worst;
  c.detail = fmt::format("worst G - (F_S - gamma d - F) = {:.3g}{}", worst, notes);
  return c;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  if (name == "simulate") return Command::Simulate;
  if (name == "steady") return Command::Steady;
  if (name == "gcurve") return Command::GCurve;
  if (name == "bounds") return Command::Bounds;
  if (name == "verify") return Command::Verify;
  return std::nullopt;
}

const char* to_string(Command command) {
  switch (command) {
    case Command::Simulate:
      return "simulate";
    case Command::Steady:
      return "steady";
    case Command::GCurve:
      return "gcurve";
    case Command::Bounds:
      return "bounds";
    case Command::Verify:
      return "verify";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::Io:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidDomain:
    case ErrorCode::TooCoarse:
    case ErrorCode::InvalidShape:
      return 2;
    case ErrorCode::NoConvergence:
      return 3;
    default:
      return 1;
  }
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerificationCheck& c) { return c.pass; });
}

VerificationReport run_verification(const RunConfig& config) {
  const Problem problem = make_problem(config);
  std::mt19937_64 rng(config.seed);
  VerificationReport report;
  report.checks.push_back(check_fourier(config));
  report.checks.push_back(check_lcp(config, rng));
  report.checks.push_back(check_comparison(config, problem, rng));
  report.checks.push_back(check_cutoff(problem));
  report.checks.push_back(check_flat_reference(config));
  report.checks.push_back(check_lower_bound(config, problem));
  return report;
}

int run_command(Command command, const RunConfig& config, const fs::path& out_dir, std::ostream& diagnostics) {
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
      throw Error(ErrorCode::Io, fmt::format("cannot create output directory '{}': {}", out_dir.string(),
                                             ec.message()));
    }
    switch (command) {
      case Command::Simulate:
        return simulate(config, out_dir);
      case Command::Steady:
        return steady(config, out_dir);
      case Command::GCurve:
        return gcurve(config, out_dir);
      case Command::Bounds:
        return bounds(config, out_dir);
      case Command::Verify:
        return verify(config, out_dir);
    }
    return 2;
  } catch (const Error& e) {
    diagnostics << "error: " << e.what() << '\n';
    if (e.code() != ErrorCode::Io) {
      try {
        write_json(out_dir / json_artifact(command), error_document(command, e.code(), e.what()));
      } catch (const Error&) {
      }
    }
    return exit_code_for(e.code());
  }
}

}  // namespace slider
