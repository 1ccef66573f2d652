#pragma once

#include <cstddef>
#include <vector>

#include "slider/dynamics.hpp"
#include "slider/geometry.hpp"
#include "slider/vi_solver.hpp"

namespace slider {

struct FourierConstant {
  double value = 0.0;       // partial sum over odd m, n <= cutoff
  double tail_bound = 0.0;  // upper bound on the omitted (positive) terms
  std::size_t cutoff = 0;
};

/// C(Omega) = integral of w, -Laplace w = 1 in the rectangle, w = 0 on its
/// boundary, from the double sine series
///   sum_{m,n odd} 64 L1^3 L2^3 / (pi^6 m^2 n^2 (m^2 L2^2 + n^2 L1^2)).
FourierConstant flat_C_omega(const DomainRect& domain, std::size_t cutoff);

/// Closed-form description of the flat slider, where
///   eta'' = C (eta')^- / eta^3 - F.
/// For eta1 > 0 the slider first rises ballistically until t0 = eta1 / F,
/// reaching eta_hat0 = eta0 + eta1^2 / (2F); afterwards (and for eta1 <= 0
/// from the start) it descends monotonically with
///   eta(t) >= a / sqrt(t + b)   for t >= t0.
struct FlatModel {
  double C = 0.0;
  double F = 1.0;
  double eta0 = 1.0;
  double eta1 = 0.0;
  double eta_hat0 = 1.0;  // height where the descent starts
  double t0 = 0.0;
  double a = 0.0;
  double b = 0.0;
};

FlatModel make_flat_model(double C, double F, double eta0, double eta1);

/// Lower envelope of eta(t): the ballistic arc on [0, t0], then
/// eta_hat0 sqrt(C / (C + 2 eta_hat0^2 F (t - t0) - 2 eta_hat0^2 min(eta1, 0))).
double flat_lower_envelope(const FlatModel& model, double t);
/// eta(t) <= eta_hat0.
double flat_upper_envelope(const FlatModel& model);

/// Integrates the scalar flat-slider ODE (no pressure solves) with an
/// embedded Runge-Kutta-Fehlberg 7(8) pair at relative tolerance fine_tol;
/// the ballistic arc on [0, t0] is emitted analytically.
Trajectory flat_reference_trajectory(const FlatModel& model, double t_end, double fine_tol);

/// Cubic Hermite interpolation between samples: eta from (eta, eta'),
/// eta' from (eta', G).
double interpolate_eta(const Trajectory& trajectory, double t);
double interpolate_eta_dot(const Trajectory& trajectory, double t);

/// Brute-force LCP solution: tries every active set (free nodes solve
/// their principal subsystem, active nodes sit at zero) and returns the
/// candidate with p >= 0 and Ap - b >= 0. At most 16 unknowns.
PressureField lcp_enumerate(const DiscreteSystem& system);

/// Interior-node index box [i0, i1] x [j0, j1], inclusive.
struct NodeRange {
  std::size_t i0 = 0;
  std::size_t i1 = 0;
  std::size_t j0 = 0;
  std::size_t j1 = 0;
};

std::vector<unsigned char> node_mask(const Grid& grid, const NodeRange& range);
std::vector<unsigned char> node_mask(const Grid& grid, const ContactBox& box);

struct ComparisonVerdict {
  double worst_margin = 0.0;  // min over U of q - r
  std::size_t nodes = 0;
  bool pass = false;
};

/// Solves the full VI for q and the Dirichlet problem on U (same operator
/// and load, zero data on the boundary of U) for r, and checks q >= r on U
/// up to 10 * tol * max(1, |q|_inf), tol being the problem's PSOR tolerance.
/// q itself is solved with tol / 100.
ComparisonVerdict comparison_check(const Problem& problem, double beta, double gamma,
                                   const std::vector<unsigned char>& mask);

}  // namespace slider
