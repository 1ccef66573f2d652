#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "slider/dynamics.hpp"

namespace slider {

/// Clearance interval with g(lo) > 0 > g(hi), g(beta) = G(beta, 0).
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double g_lo = 0.0;
  double g_hi = 0.0;
  std::size_t evaluations = 0;
};

struct SteadyResult {
  double beta_bar = 0.0;
  double g_at_root = 0.0;
  Bracket bracket;  // final (narrowed) bracket
  std::size_t evaluations = 0;
};

struct SteadyOptions {
  double beta_init = 0.5;
  double tol = 1e-6;          // on |g(beta_bar)|
  double tol_beta = 1e-9;     // on the bracket width
  std::size_t max_expansions = 40;
  std::size_t max_bisections = 200;

  bool operator==(const SteadyOptions&) const = default;
};

/// Throws InadmissibleShape unless the shape is line contact with alpha > 1
/// or point contact with alpha > 3/2.
void require_steady_admissible(const SliderShape& shape);

/// Halves beta below beta_init until g > 0 and doubles it above until
/// g < 0. Throws BracketFailure after max_expansions steps in either
/// direction (typically the grid cannot resolve the wedge at small beta).
Bracket find_bracket(const Problem& problem, double beta_init, std::size_t max_expansions = 40);

/// Bisection on a sign-changing bracket until |g| <= tol and the bracket
/// is narrower than tol_beta. If an endpoint already satisfies |g| <= tol,
/// the endpoint with the smaller residual is returned.
SteadyResult find_steady(const Problem& problem, const Bracket& bracket, const SteadyOptions& options);

/// find_bracket followed by find_steady.
SteadyResult solve_steady(const Problem& problem, const SteadyOptions& options);

struct GCurveRow {
  double beta = 0.0;
  double g = 0.0;
  double load = 0.0;
  double active_fraction = 0.0;
  std::size_t psor_iters = 0;
  bool resolved = true;  // at least 4 cells across the contact width beta^(1/alpha)
};

/// g(beta) at each entry, in the given order, each solve warm-started from
/// the previous one.
std::vector<GCurveRow> g_curve(const Problem& problem, const std::vector<double>& betas);

void write_gcurve_csv(std::ostream& out, const std::vector<GCurveRow>& rows);

}  // namespace slider
