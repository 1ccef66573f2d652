#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "slider/errors.hpp"
#include "slider/geometry.hpp"

namespace slider {

/// Five-point discretization of
///   -div((h0 + beta)^3 grad p) = -(dh0/dx1 + gamma)
/// on the interior nodes of a grid, scaled by the cell area. Edge
/// conductances are (h0(edge midpoint) + beta)^3 * (transverse / axial
/// spacing); conductances toward the boundary ring enter the diagonal only.
/// The matrix is a symmetric M-matrix.
struct DiscreteSystem {
  Grid grid;
  double beta = 0.0;
  double gamma = 0.0;
  std::vector<double> diagonal;
  std::vector<double> west;  // positive conductances; 0 toward the boundary
  std::vector<double> east;
  std::vector<double> south;
  std::vector<double> north;
  std::vector<double> b;

  std::size_t size() const { return diagonal.size(); }

  /// out = A p
  void apply(std::span<const double> p, std::span<double> out) const;
  double off_diagonal(std::size_t row, std::size_t col) const;  // A(row, col), dense access
};

/// Shape samples a grid needs for assembly, computed once: h0 at every edge
/// midpoint and dh0/dx1 at every interior node. Assembly for a new
/// (beta, gamma) then costs one cube per edge.
class FilmModel {
 public:
  FilmModel(Grid grid, const SliderShape& shape);

  const Grid& grid() const { return grid_; }
  /// -dh0/dx1 * cell area at each interior node (the wedge load).
  const std::vector<double>& wedge_load() const { return wedge_; }
  DiscreteSystem assemble(double beta, double gamma) const;

 private:
  Grid grid_;
  std::vector<double> h_xedge_;  // (nx + 1) * ny, edge between lattice columns I, I+1 at interior row j
  std::vector<double> h_yedge_;  // nx * (ny + 1)
  std::vector<double> wedge_;
};

DiscreteSystem assemble_system(const Grid& grid, const SliderShape& shape, double beta, double gamma);

struct PressureField {
  std::vector<double> values;
  double residual_comp = 0.0;  // max |min(p_i, (Ap - b)_i)|
  double residual_lin = 0.0;   // PSOR: max violation of p >= 0, Ap - b >= 0; CG: relative residual
  std::size_t iterations = 0;
};

struct PsorOptions {
  double omega = 1.5;
  double tol = 1e-8;
  std::size_t max_iter = 0;  // 0 selects 50 * node count

  bool operator==(const PsorOptions&) const = default;
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, PressureField last)
      : Error(ErrorCode::NoConvergence, what), last_(std::move(last)) {}
  const PressureField& last_iterate() const { return last_; }

 private:
  PressureField last_;
};

/// Projected SOR for the LCP  p >= 0, Ap - b >= 0, p.(Ap - b) = 0.
///
/// Sweeps lexicographically. A warm start is first rescaled by the factor
/// s >= 0 minimizing the quadratic energy along its ray. Stops once the
/// largest nodal update is below tol * max(1, |p|_inf) and the diagonally
/// scaled complementarity residual max |min(p_i, (Ap - b)_i / A_ii)| is
/// below 10 * tol * max(1, |p|_inf).
PressureField solve_vi_psor(const DiscreteSystem& system, const PsorOptions& options,
                            const PressureField* warm_start = nullptr);

/// Conjugate gradients (Jacobi preconditioned) for A p = rhs without the
/// sign constraint. `mask`, when given, restricts the unknowns to the
/// marked nodes and holds the rest at zero, i.e. it solves the principal
/// subsystem (homogeneous Dirichlet data on the sub-domain boundary).
PressureField solve_linear(const DiscreteSystem& system,
                           std::optional<std::span<const double>> rhs_override, double tol,
                           std::size_t max_iter = 0,
                           std::optional<std::span<const unsigned char>> mask = std::nullopt);

/// sum_i p_i dx dy
double load_integral(const PressureField& field, const Grid& grid);
double load_integral(std::span<const double> values, const Grid& grid);

struct ComplementarityReport {
  double residual = 0.0;  // max_i |min(p_i, (Ap - b)_i)|
  double feasibility = 0.0;
  std::size_t active = 0;  // p_i = 0 (cavitation)
  std::size_t free = 0;
};

ComplementarityReport complementarity_report(const PressureField& field, const DiscreteSystem& system);

/// CSV dump keyed by node coordinates: x1,x2,p,residual,active.
void write_field_csv(std::ostream& out, const DiscreteSystem& system, const PressureField& field);

}  // namespace slider
