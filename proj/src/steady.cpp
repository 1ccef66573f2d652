#include "slider/steady.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace slider {

namespace {

// g(beta) evaluations sharing one assembled film and a running warm start.
class SteadyFunction {
 public:
  explicit SteadyFunction(const Problem& problem) : model_(problem) {}

  double operator()(double beta) {
    ForceEvaluation ev = model_.evaluate(beta, 0.0, have_warm_ ? &warm_ : nullptr);
    warm_ = std::move(ev.field);
    have_warm_ = true;
    ++evaluations_;
    return ev.G;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  ForceModel model_;
  PressureField warm_;
  bool have_warm_ = false;
  std::size_t evaluations_ = 0;
};

}  // namespace

void require_steady_admissible(const SliderShape& shape) {
  validate_shape(shape);
  switch (kind_of(shape)) {
    case ShapeKind::Flat:
      throw Error(ErrorCode::InadmissibleShape, "no stationary solution for flat slider");
    case ShapeKind::Tabulated:
      throw Error(ErrorCode::InadmissibleShape,
                  "steady-state analysis needs line or point contact with a known exponent");
    case ShapeKind::Line:
      if (!(exponent_of(shape) > 1.0)) {
        throw Error(ErrorCode::InadmissibleShape,
                    fmt::format("line contact needs alpha > 1, got {}", exponent_of(shape)));
      }
      break;
    case ShapeKind::Point:
      if (!(exponent_of(shape) > 1.5)) {
        throw Error(ErrorCode::InadmissibleShape,
                    fmt::format("point contact needs alpha > 3/2, got {}", exponent_of(shape)));
      }
      break;
  }
}

Bracket find_bracket(const Problem& problem, double beta_init, std::size_t max_expansions) {
  require_steady_admissible(problem.shape);
  if (!(beta_init > 0.0) || !std::isfinite(beta_init)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("beta_init = {} must be > 0", beta_init));
  }
  SteadyFunction g(problem);
  Bracket out;
  const double g0 = g(beta_init);
  out.lo = out.hi = beta_init;
  out.g_lo = out.g_hi = g0;
  if (g0 == 0.0) {
    out.evaluations = g.evaluations();
    return out;
  }
  if (g0 > 0.0) {
    std::size_t k = 0;
    while (out.g_hi >= 0.0) {
      if (k++ == max_expansions) {
        throw Error(ErrorCode::BracketFailure,
                    fmt::format("g stays >= 0 up to beta = {} after {} doublings", out.hi, max_expansions));
      }
      out.lo = out.hi;
      out.g_lo = out.g_hi;
      out.hi *= 2.0;
      out.g_hi = g(out.hi);
    }
  } else {
    std::size_t k = 0;
    while (out.g_lo <= 0.0) {
      if (k++ == max_expansions) {
        throw Error(ErrorCode::BracketFailure,
                    fmt::format("g stays <= 0 down to beta = {} after {} halvings; the grid is likely too "
                                "coarse to resolve the contact",
                                out.lo, max_expansions));
      }
      out.hi = out.lo;
      out.g_hi = out.g_lo;
      out.lo *= 0.5;
      out.g_lo = g(out.lo);
    }
  }
  out.evaluations = g.evaluations();
  return out;
}

SteadyResult find_steady(const Problem& problem, const Bracket& bracket, const SteadyOptions& options) {
  require_steady_admissible(problem.shape);
  if (!(options.tol > 0.0) || !(options.tol_beta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "steady tolerances must be > 0");
  }
  SteadyResult out;
  out.bracket = bracket;
  out.bracket.evaluations = 0;
  const double r_lo = std::abs(bracket.g_lo);
  const double r_hi = std::abs(bracket.g_hi);
  if (r_lo <= options.tol || r_hi <= options.tol) {
    const bool take_lo = r_lo <= r_hi;
    out.beta_bar = take_lo ? bracket.lo : bracket.hi;
    out.g_at_root = take_lo ? bracket.g_lo : bracket.g_hi;
    return out;
  }
  if (!(bracket.lo > 0.0) || !(bracket.lo < bracket.hi) || !(bracket.g_lo > 0.0) || !(bracket.g_hi < 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("bracket [{}, {}] with g = ({}, {}) does not change sign", bracket.lo, bracket.hi,
                            bracket.g_lo, bracket.g_hi));
  }
  SteadyFunction g(problem);
  Bracket& b = out.bracket;
  for (std::size_t k = 0; k < options.max_bisections; ++k) {
    const double mid = 0.5 * (b.lo + b.hi);
    const double gm = g(mid);
    if (gm > 0.0) {
      b.lo = mid;
      b.g_lo = gm;
    } else {
      b.hi = mid;
      b.g_hi = gm;
    }
    if (std::abs(gm) <= options.tol && b.hi - b.lo <= options.tol_beta) {
      out.beta_bar = mid;
      out.g_at_root = gm;
      out.evaluations = g.evaluations();
      return out;
    }
  }
  throw Error(ErrorCode::NoConvergence,
              fmt::format("bisection did not reach |g| <= {} within {} steps (bracket [{}, {}])", options.tol,
                          options.max_bisections, b.lo, b.hi));
}

SteadyResult solve_steady(const Problem& problem, const SteadyOptions& options) {
  const Bracket bracket = find_bracket(problem, options.beta_init, options.max_expansions);
  SteadyResult out = find_steady(problem, bracket, options);
  out.evaluations += bracket.evaluations;
  return out;
}

std::vector<GCurveRow> g_curve(const Problem& problem, const std::vector<double>& betas) {
  for (double beta : betas) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw Error(ErrorCode::NonPositiveClearance, fmt::format("clearance beta = {} must be > 0", beta));
    }
  }
  const ForceModel model(problem);
  const Grid& grid = problem.grid;
  const double alpha = exponent_of(problem.shape);
  const double spacing = std::max(grid.dx(), grid.dy());
  std::vector<GCurveRow> rows;
  rows.reserve(betas.size());
  PressureField warm;
  bool have_warm = false;
  for (double beta : betas) {
    ForceEvaluation ev = model.evaluate(beta, 0.0, have_warm ? &warm : nullptr);
    GCurveRow row;
    row.beta = beta;
    row.g = ev.G;
    row.load = ev.load;
    const auto active = std::count(ev.field.values.begin(), ev.field.values.end(), 0.0);
    row.active_fraction = static_cast<double>(active) / static_cast<double>(grid.size());
    row.psor_iters = ev.field.iterations;
    row.resolved = alpha > 0.0 ? std::pow(beta, 1.0 / alpha) / spacing >= 4.0 : true;
    rows.push_back(row);
    warm = std::move(ev.field);
    have_warm = true;
  }
  return rows;
}

void write_gcurve_csv(std::ostream& out, const std::vector<GCurveRow>& rows) {
  out << "beta,g,load,active_fraction,psor_iters,resolved\n";
  for (const GCurveRow& r : rows) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", r.beta, r.g, r.load, r.active_fraction,
                       r.psor_iters, r.resolved ? "true" : "false");
  }
}

}  // namespace slider
