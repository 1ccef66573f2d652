#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "slider/geometry.hpp"
#include "slider/vi_solver.hpp"

namespace slider {

struct SolverSettings {
  PsorOptions psor;
  bool warm_start = true;
};

/// One-degree-of-freedom slider under a constant load F.
struct Problem {
  SliderShape shape = Flat{};
  Grid grid{DomainRect{}, 32, 32};
  double F = 1.0;
  double eta0 = 1.0;
  double eta1 = 0.0;
  SolverSettings solver;

  void validate() const;
};

struct ForceEvaluation {
  double G = 0.0;     // load - F
  double load = 0.0;  // integral of the film pressure
  PressureField field;
  bool shortcut = false;  // gamma >= V1: p = 0 without a solve
};

/// Film force G(beta, gamma) = integral of p - F, p the cavitating Reynolds
/// pressure for clearance beta and squeeze velocity gamma. Holds the
/// assembled shape samples so repeated evaluations only re-solve.
class ForceModel {
 public:
  explicit ForceModel(const Problem& problem);

  const Problem& problem() const { return problem_; }
  const FilmModel& film() const { return film_; }
  double V1() const { return v1_; }

  /// Full VI solve at (beta, gamma).
  ForceEvaluation evaluate(double beta, double gamma, const PressureField* warm_start = nullptr) const;
  /// As evaluate(), but returns G = -F with p = 0 when gamma >= V1.
  ForceEvaluation evaluate_with_cutoff(double beta, double gamma,
                                       const PressureField* warm_start = nullptr) const;

 private:
  Problem problem_;
  FilmModel film_;
  double v1_;
};

ForceEvaluation eval_G(const Problem& problem, double beta, double gamma,
                       const PressureField* warm_start = nullptr);

struct Energies {
  double E1 = 0.0;
  double E2 = 0.0;
};

/// E1 = gamma^2 / 2 + F beta,  E2 = E1 + c1 / (2 beta^2), at (beta, gamma) = (eta, eta').
Energies energies(double eta, double eta_dot, double c1, double F);

struct TrajectorySample {
  double t = 0.0;
  double eta = 0.0;
  double eta_dot = 0.0;
  double G = 0.0;
  double load = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  std::size_t psor_iters = 0;  // PSOR sweeps spent on the step ending at this sample
};

enum class Termination { ReachedHorizon, ContactGuard, StepFailure };
const char* to_string(Termination termination);

struct SegmentVerdict {
  std::size_t first = 0;  // sample indices, inclusive
  std::size_t last = 0;
  bool descending = false;  // eta' <= 0: E1 checked; otherwise eta' >= 0: E2 checked
  bool pass = true;
  double violation = 0.0;  // largest rise of the checked energy above its running minimum
};

struct MonitorReport {
  std::vector<SegmentVerdict> segments;
  double worst_violation = 0.0;
  std::size_t failed_segments = 0;
  bool pass() const { return failed_segments == 0; }
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Termination termination = Termination::ReachedHorizon;
  double termination_time = 0.0;
  std::string termination_reason;
  double c1 = 0.0;
  double F = 0.0;
  std::size_t force_evaluations = 0;
  std::size_t rejected_steps = 0;
  MonitorReport monitor;
};

struct StepControl {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  double eps_contact = 0.0;  // 0 selects 1e-4 * eta0
  double dt_min = 0.0;       // 0 selects 1e-12 * t_end
  std::size_t max_samples = 10'000'000;

  bool operator==(const StepControl&) const = default;
};

/// Integrates eta'' = G(eta, eta') with the Dormand-Prince 5(4) pair. Each
/// stage costs one VI solve, warm-started from the previous one; stages with
/// eta' >= V1 use G = -F directly.
Trajectory integrate_trajectory(const Problem& problem, double t_end, const StepControl& control);

/// E1 must not rise on samples with eta' <= 0 and E2 must not rise on
/// samples with eta' >= 0 (both up to `tolerance`).
MonitorReport monitor_energies(const Trajectory& trajectory, double tolerance = 1e-4);

struct BoundsReport {
  double V1 = 0.0;
  double V2 = 0.0;
  double lambda1 = 0.0;  // first Dirichlet eigenvalue of the rectangle
  double sup_h0 = 0.0;
  double c1 = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
  double V3 = 0.0;
  std::optional<double> s1;  // line and point contact only
  std::optional<double> s2;
  bool steady_admissible = false;  // alpha > 1 (line) / alpha > 3/2 (point)
  bool global_admissible = false;  // alpha >= 3/2 (line) / alpha >= 2 (point)
  bool gradient_kink = false;
  std::string D3 = "not computable (non-constructive constants c3, c4, beta0)";
  std::string D4 = "not computable (non-constructive constants c3, c4, beta0)";
};

BoundsReport bounds_report(const Problem& problem);

/// c1 = sup h0 * |Omega| / sqrt(lambda1): G(beta, gamma) <= c1 / beta^3 - F for gamma >= 0.
double compute_c1(const SliderShape& shape, const DomainRect& domain);

struct LowerBoundCheck {
  double gamma = 0.0;
  double G = 0.0;
  double bound = 0.0;  // F_S - gamma d - F
  bool pass = false;
};

struct SpringDamper {
  double spring = 0.0;   // F_S: integral over the box of the wedge-driven solution
  double damping = 0.0;  // d: integral over the box of the unit-load solution
  std::size_t box_nodes = 0;
  std::vector<LowerBoundCheck> checks;
  bool pass = true;
};

/// Solves the two Dirichlet problems on the contact box (wedge load and unit
/// load, same operator) and checks G(beta, gamma) >= F_S - gamma d - F at
/// gamma in `check_gammas`.
SpringDamper spring_damper_decomposition(const Problem& problem, double beta, const ContactBox& box,
                                         const std::vector<double>& check_gammas = {0.0, -0.5, -1.0},
                                         double tolerance = 1e-6);

}  // namespace slider
