#include "slider/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace slider {

void Problem::validate() const {
  validate_shape(shape);
  if (!(F > 0.0) || !std::isfinite(F)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("load F = {} must be > 0", F));
  }
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("initial height eta0 = {} must be > 0", eta0));
  }
  if (!std::isfinite(eta1)) {
    throw Error(ErrorCode::InvalidArgument, "initial velocity eta1 must be finite");
  }
}

ForceModel::ForceModel(const Problem& problem)
    : problem_(problem), film_(problem.grid, problem.shape), v1_(compute_V1(problem.shape, problem.grid)) {
  problem_.validate();
}

ForceEvaluation ForceModel::evaluate(double beta, double gamma, const PressureField* warm_start) const {
  const DiscreteSystem system = film_.assemble(beta, gamma);
  ForceEvaluation out;
  out.field = solve_vi_psor(system, problem_.solver.psor,
                            problem_.solver.warm_start ? warm_start : nullptr);
  out.load = load_integral(out.field, film_.grid());
  out.G = out.load - problem_.F;
  return out;
}

ForceEvaluation ForceModel::evaluate_with_cutoff(double beta, double gamma,
                                                 const PressureField* warm_start) const {
  if (gamma >= v1_) {
    if (!(beta > 0.0)) {
      throw Error(ErrorCode::NonPositiveClearance, fmt::format("clearance beta = {} must be > 0", beta));
    }
    ForceEvaluation out;
    out.field.values.assign(film_.grid().size(), 0.0);
    out.G = -problem_.F;
    out.shortcut = true;
    return out;
  }
  return evaluate(beta, gamma, warm_start);
}

ForceEvaluation eval_G(const Problem& problem, double beta, double gamma,
                       const PressureField* warm_start) {
  return ForceModel(problem).evaluate(beta, gamma, warm_start);
}

Energies energies(double eta, double eta_dot, double c1, double F) {
  Energies e;
  e.E1 = 0.5 * eta_dot * eta_dot + F * eta;
  e.E2 = e.E1 + c1 / (2.0 * eta * eta);
  return e;
}

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::ReachedHorizon: return "ReachedHorizon";
    case Termination::ContactGuard: return "ContactGuard";
    case Termination::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

double compute_c1(const SliderShape& shape, const DomainRect& domain) {
  const double l1 = domain.length1();
  const double l2 = domain.length2();
  const double lambda1 = std::numbers::pi * std::numbers::pi * (1.0 / (l1 * l1) + 1.0 / (l2 * l2));
  return sup_height(shape, domain) * domain.area() / std::sqrt(lambda1);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
  double eta;
  double vel;
};

struct Slope {
  double deta;
  double dvel;
  double load;
  std::size_t iters;
};

class Rhs {
 public:
  Rhs(const ForceModel& model, bool warm) : model_(model), warm_(warm) {}

  Slope operator()(State y) {
    ++evaluations;
    const ForceEvaluation ev =
        model_.evaluate_with_cutoff(y.eta, y.vel, warm_ && has_field_ ? &last_ : nullptr);
    if (!ev.shortcut) {
      last_ = ev.field;
      has_field_ = true;
    }
    return {y.vel, ev.G, ev.load, ev.field.iterations};
  }

  std::size_t evaluations = 0;

 private:
  const ForceModel& model_;
  bool warm_;
  PressureField last_;
  bool has_field_ = false;
};

}  // namespace

Trajectory integrate_trajectory(const Problem& problem, double t_end, const StepControl& control) {
  if (!(t_end > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("t_end = {} must be > 0", t_end));
  }
  if (!(control.rel_tol > 0.0) || !(control.abs_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "step tolerances must be > 0");
  }
  const ForceModel model(problem);
  const double F = problem.F;
  const double eps_contact = control.eps_contact > 0.0 ? control.eps_contact : 1e-4 * problem.eta0;
  const double dt_min = control.dt_min > 0.0 ? control.dt_min : 1e-12 * t_end;

  Trajectory traj;
  traj.F = F;
  traj.c1 = compute_c1(problem.shape, problem.grid.domain());
  Rhs rhs(model, problem.solver.warm_start);

  const auto record = [&](double t, State y, const Slope& k, std::size_t iters) {
    const Energies e = energies(y.eta, y.vel, traj.c1, F);
    traj.samples.push_back({t, y.eta, y.vel, k.load - F, k.load, e.E1, e.E2, iters});
  };
  const auto error_scale = [&](double a, double b) {
    return control.abs_tol + control.rel_tol * std::max(std::abs(a), std::abs(b));
  };
  const auto finish = [&](Termination kind, double t, std::string reason) {
    traj.termination = kind;
    traj.termination_time = t;
    traj.termination_reason = std::move(reason);
    traj.force_evaluations = rhs.evaluations;
    traj.monitor = monitor_energies(traj);
    return traj;
  };

  State y{problem.eta0, problem.eta1};
  double t = 0.0;
  Slope k1 = rhs(y);
  record(t, y, k1, k1.iters);

  // Initial step from the scaled size of the state and its slope.
  double dt;
  {
    const double d0 = std::hypot(y.eta / error_scale(y.eta, y.eta), y.vel / error_scale(y.vel, y.vel));
    const double d1 = std::hypot(k1.deta / error_scale(y.eta, y.eta), k1.dvel / error_scale(y.vel, y.vel));
    dt = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    dt = std::min({dt, t_end, 0.1 * y.eta / std::max(std::abs(y.vel), 1e-300)});
  }

  while (t < t_end) {
    if (traj.samples.size() >= control.max_samples) {
      return finish(Termination::StepFailure, t,
                    fmt::format("sample budget of {} exhausted", control.max_samples));
    }
    if (dt < dt_min) {
      return finish(Termination::StepFailure, t,
                    fmt::format("step size {} fell below dt_min = {}", dt, dt_min));
    }
    const bool last_step = t + dt >= t_end;
    const double h = last_step ? t_end - t : dt;

    const auto stage = [&](double ce, double cv) -> std::optional<State> {
      State s{y.eta + h * ce, y.vel + h * cv};
      if (!(s.eta > 0.0)) return std::nullopt;
      return s;
    };
    std::array<Slope, 7> k;
    k[0] = k1;
    std::optional<State> s;
    std::size_t iters = 0;
    bool blocked = false;
    const auto eval = [&](std::size_t idx, std::array<double, 6> a) {
      if (blocked) return;
      double ce = 0.0;
      double cv = 0.0;
      for (std::size_t m = 0; m < idx; ++m) {
        ce += a[m] * k[m].deta;
        cv += a[m] * k[m].dvel;
      }
      s = stage(ce, cv);
      if (!s) {
        blocked = true;
        return;
      }
      k[idx] = rhs(*s);
      iters += k[idx].iters;
    };
    eval(1, {a21});
    eval(2, {a31, a32});
    eval(3, {a41, a42, a43});
    eval(4, {a51, a52, a53, a54});
    eval(5, {a61, a62, a63, a64, a65});
    if (blocked) {
      // A stage reached non-positive clearance: the step overshoots contact.
      ++traj.rejected_steps;
      dt = 0.25 * h;
      continue;
    }
    const State next{y.eta + h * (b1 * k[0].deta + b3 * k[2].deta + b4 * k[3].deta + b5 * k[4].deta +
                                  b6 * k[5].deta),
                     y.vel + h * (b1 * k[0].dvel + b3 * k[2].dvel + b4 * k[3].dvel + b5 * k[4].dvel +
                                  b6 * k[5].dvel)};
    if (!(next.eta > 0.0)) {
      ++traj.rejected_steps;
      dt = 0.25 * h;
      continue;
    }
    k[6] = rhs(next);
    iters += k[6].iters;

    const double err_eta = h * (e1 * k[0].deta + e3 * k[2].deta + e4 * k[3].deta + e5 * k[4].deta +
                                e6 * k[5].deta + e7 * k[6].deta);
    const double err_vel = h * (e1 * k[0].dvel + e3 * k[2].dvel + e4 * k[3].dvel + e5 * k[4].dvel +
                                e6 * k[5].dvel + e7 * k[6].dvel);
    const double err = std::sqrt(0.5 * (std::pow(err_eta / error_scale(y.eta, next.eta), 2) +
                                        std::pow(err_vel / error_scale(y.vel, next.vel), 2)));
    if (!std::isfinite(err)) {
      ++traj.rejected_steps;
      dt = 0.25 * h;
      continue;
    }
    if (err > 1.0) {
      ++traj.rejected_steps;
      dt = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    t = last_step ? t_end : t + h;
    y = next;
    k1 = k[6];
    record(t, y, k1, iters);
    if (y.eta <= eps_contact) {
      return finish(Termination::ContactGuard, t,
                    fmt::format("height {} fell below the contact guard {}", y.eta, eps_contact));
    }
    const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    dt = h * grow;
  }
  return finish(Termination::ReachedHorizon, t, "");
}

MonitorReport monitor_energies(const Trajectory& trajectory, double tolerance) {
  MonitorReport report;
  const auto& s = trajectory.samples;
  if (s.size() < 2) return report;

  const auto scan = [&](bool descending) {
    const auto in_segment = [descending](const TrajectorySample& x) {
      return descending ? x.eta_dot <= 0.0 : x.eta_dot >= 0.0;
    };
    const auto energy = [descending](const TrajectorySample& x) { return descending ? x.E1 : x.E2; };
    std::size_t k = 0;
    while (k < s.size()) {
      if (!in_segment(s[k])) {
        ++k;
        continue;
      }
      std::size_t end = k;
      while (end + 1 < s.size() && in_segment(s[end + 1])) ++end;
      if (end > k) {
        SegmentVerdict v{k, end, descending, true, 0.0};
        double running_min = energy(s[k]);
        for (std::size_t m = k + 1; m <= end; ++m) {
          v.violation = std::max(v.violation, energy(s[m]) - running_min);
          running_min = std::min(running_min, energy(s[m]));
        }
        v.pass = v.violation <= tolerance;
        report.segments.push_back(v);
      }
      k = end + 1;
    }
  };
  scan(true);
  scan(false);
  std::sort(report.segments.begin(), report.segments.end(),
            [](const SegmentVerdict& a, const SegmentVerdict& b) {
              return a.first != b.first ? a.first < b.first : a.descending;
            });
  for (const auto& v : report.segments) {
    report.worst_violation = std::max(report.worst_violation, v.violation);
    if (!v.pass) ++report.failed_segments;
  }
  return report;
}

BoundsReport bounds_report(const Problem& problem) {
  problem.validate();
  const DomainRect& d = problem.grid.domain();
  BoundsReport r;
  const double F = problem.F;
  r.V1 = compute_V1(problem.shape, problem.grid);
  r.V2 = std::max(problem.eta1 + 1.0, r.V1);
  r.lambda1 = std::numbers::pi * std::numbers::pi *
              (1.0 / (d.length1() * d.length1()) + 1.0 / (d.length2() * d.length2()));
  r.sup_h0 = sup_height(problem.shape, d);
  r.c1 = r.sup_h0 * d.area() / std::sqrt(r.lambda1);
  r.D1 = std::cbrt(r.c1 / F);
  // c1 / D1^2 = c1^(1/3) F^(2/3), which stays finite as c1 -> 0.
  const double c1_over_d1_sq = std::cbrt(r.c1) * std::cbrt(F * F);
  const double eta0 = problem.eta0;
  const double eta1 = problem.eta1;
  r.D2 = 2.0 * std::max({eta0, r.D1,
                         (0.5 * eta1 * eta1 + F * eta0 + r.c1 / (2.0 * eta0 * eta0)) / F,
                         (0.5 * r.V2 * r.V2 + F * r.D1 + 0.5 * c1_over_d1_sq) / F});
  r.V3 = std::max({1.0 - eta1, 2.0 * std::sqrt(2.0 * F * r.D2),
                   2.0 * std::sqrt(eta1 * eta1 + 2.0 * F * eta0)});
  r.gradient_kink = has_gradient_kink(problem.shape);

  const double alpha = exponent_of(problem.shape);
  switch (kind_of(problem.shape)) {
    case ShapeKind::Line:
      r.s1 = 2.0 * (1.0 - 1.0 / alpha);
      r.s2 = 2.0 - 3.0 / alpha;
      r.steady_admissible = alpha > 1.0;
      r.global_admissible = alpha >= 1.5;
      break;
    case ShapeKind::Point:
      r.s1 = 2.0 - 3.0 / alpha;
      r.s2 = 2.0 - 4.0 / alpha;
      r.steady_admissible = alpha > 1.5;
      r.global_admissible = alpha >= 2.0;
      break;
    default:
      break;
  }
  return r;
}

SpringDamper spring_damper_decomposition(const Problem& problem, double beta, const ContactBox& box,
                                         const std::vector<double>& check_gammas, double tolerance) {
  const ForceModel model(problem);
  const Grid& grid = model.film().grid();
  std::vector<unsigned char> mask(grid.size(), 0);
  SpringDamper out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (box.contains(grid.node(k))) {
      mask[k] = 1;
      ++out.box_nodes;
    }
  }
  if (out.box_nodes == 0) {
    throw Error(ErrorCode::BoxUnresolved,
                fmt::format("contact box for beta = {} contains no grid node", beta));
  }
  const DiscreteSystem system = model.film().assemble(beta, 0.0);
  const std::vector<double> unit(grid.size(), grid.cell_area());
  constexpr double cg_tol = 1e-13;
  const PressureField spring =
      solve_linear(system, std::span<const double>(model.film().wedge_load()), cg_tol, 0,
                   std::span<const unsigned char>(mask));
  const PressureField damping =
      solve_linear(system, std::span<const double>(unit), cg_tol, 0, std::span<const unsigned char>(mask));
  out.spring = load_integral(spring, grid);
  out.damping = load_integral(damping, grid);

  PressureField warm;
  bool have_warm = false;
  for (double gamma : check_gammas) {
    const ForceEvaluation ev = model.evaluate(beta, gamma, have_warm ? &warm : nullptr);
    warm = ev.field;
    have_warm = true;
    LowerBoundCheck check{gamma, ev.G, out.spring - gamma * out.damping - problem.F, false};
    check.pass = check.G >= check.bound - tolerance;
    out.pass = out.pass && check.pass;
    out.checks.push_back(check);
  }
  return out;
}

}  // namespace slider
