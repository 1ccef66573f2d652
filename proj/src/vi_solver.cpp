#include "slider/vi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace slider {

void DiscreteSystem::apply(std::span<const double> p, std::span<double> out) const {
  const std::size_t nx = grid.nx();
  const std::size_t ny = grid.ny();
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      double v = diagonal[k] * p[k];
      if (i > 0) v -= west[k] * p[k - 1];
      if (i + 1 < nx) v -= east[k] * p[k + 1];
      if (j > 0) v -= south[k] * p[k - nx];
      if (j + 1 < ny) v -= north[k] * p[k + nx];
      out[k] = v;
    }
  }
}

double DiscreteSystem::off_diagonal(std::size_t row, std::size_t col) const {
  const std::size_t nx = grid.nx();
  if (row == col) return diagonal[row];
  const std::size_t i = row % nx;
  if (col + 1 == row && i > 0) return -west[row];
  if (col == row + 1 && i + 1 < nx) return -east[row];
  if (col + nx == row) return -south[row];
  if (col == row + nx) return -north[row];
  return 0.0;
}

FilmModel::FilmModel(Grid grid, const SliderShape& shape) : grid_(std::move(grid)) {
  validate_shape(shape);
  const std::size_t nx = grid_.nx();
  const std::size_t ny = grid_.ny();
  const double dx = grid_.dx();
  const double dy = grid_.dy();

  h_xedge_.resize((nx + 1) * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t I = 0; I <= nx; ++I) {
      const Point mid{grid_.lattice_x1(I) + 0.5 * dx, grid_.x2(j)};
      h_xedge_[j * (nx + 1) + I] = eval_height(shape, mid);
    }
  }
  h_yedge_.resize(nx * (ny + 1));
  for (std::size_t J = 0; J <= ny; ++J) {
    for (std::size_t i = 0; i < nx; ++i) {
      const Point mid{grid_.x1(i), grid_.lattice_x2(J) + 0.5 * dy};
      h_yedge_[J * nx + i] = eval_height(shape, mid);
    }
  }
  wedge_.resize(grid_.size());
  const double area = grid_.cell_area();
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    wedge_[k] = -eval_gradient_x1(shape, grid_.node(k)) * area;
  }
}

DiscreteSystem FilmModel::assemble(double beta, double gamma) const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::NonPositiveClearance,
                fmt::format("clearance beta = {} must be > 0 (surfaces in contact)", beta));
  }
  const std::size_t nx = grid_.nx();
  const std::size_t ny = grid_.ny();
  const std::size_t n = grid_.size();
  const double ratio_x = grid_.dy() / grid_.dx();
  const double ratio_y = grid_.dx() / grid_.dy();
  const auto cube = [beta](double h) {
    const double g = h + beta;
    return g * g * g;
  };

  DiscreteSystem sys{grid_, beta, gamma, {}, {}, {}, {}, {}, {}};
  sys.diagonal.assign(n, 0.0);
  sys.west.assign(n, 0.0);
  sys.east.assign(n, 0.0);
  sys.south.assign(n, 0.0);
  sys.north.assign(n, 0.0);
  sys.b.resize(n);

  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      const double cw = cube(h_xedge_[j * (nx + 1) + i]) * ratio_x;
      const double ce = cube(h_xedge_[j * (nx + 1) + i + 1]) * ratio_x;
      const double cs = cube(h_yedge_[j * nx + i]) * ratio_y;
      const double cn = cube(h_yedge_[(j + 1) * nx + i]) * ratio_y;
      sys.diagonal[k] = cw + ce + cs + cn;
      if (i > 0) sys.west[k] = cw;
      if (i + 1 < nx) sys.east[k] = ce;
      if (j > 0) sys.south[k] = cs;
      if (j + 1 < ny) sys.north[k] = cn;
    }
  }
  const double area = grid_.cell_area();
  for (std::size_t k = 0; k < n; ++k) sys.b[k] = wedge_[k] - gamma * area;
  return sys;
}

DiscreteSystem assemble_system(const Grid& grid, const SliderShape& shape, double beta, double gamma) {
  return FilmModel(grid, shape).assemble(beta, gamma);
}

namespace {

// (Ap - b) at every node.
std::vector<double> slack(const DiscreteSystem& system, std::span<const double> p) {
  std::vector<double> w(system.size());
  system.apply(p, w);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] -= system.b[k];
  return w;
}

struct Residuals {
  double comp = 0.0;
  double feas = 0.0;
  double scaled_comp = 0.0;  // complementarity of the diagonally scaled LCP
};

Residuals residuals(const DiscreteSystem& system, std::span<const double> p) {
  const auto w = slack(system, p);
  Residuals r;
  for (std::size_t k = 0; k < w.size(); ++k) {
    r.comp = std::max(r.comp, std::abs(std::min(p[k], w[k])));
    r.feas = std::max({r.feas, -p[k], -w[k]});
    r.scaled_comp = std::max(r.scaled_comp, std::abs(std::min(p[k], w[k] / system.diagonal[k])));
  }
  return r;
}

}  // namespace

PressureField solve_vi_psor(const DiscreteSystem& system, const PsorOptions& options,
                            const PressureField* warm_start) {
  if (!(options.omega > 0.0 && options.omega < 2.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("relaxation omega = {} must lie in ]0, 2[", options.omega));
  }
  if (!(options.tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("tolerance {} must be > 0", options.tol));
  }
  const std::size_t n = system.size();
  const std::size_t nx = system.grid.nx();
  const std::size_t ny = system.grid.ny();
  const std::size_t stride = nx + 2;
  const std::size_t max_iter = options.max_iter > 0 ? options.max_iter : 50 * n;
  const double omega = options.omega;

  // Zero-padded copy of the iterate so the sweep needs no boundary tests.
  std::vector<double> padded((nx + 2) * (ny + 2), 0.0);
  const auto pad = [stride](std::size_t k, std::size_t nx_) {
    return (k / nx_ + 1) * stride + (k % nx_ + 1);
  };

  if (warm_start != nullptr && warm_start->values.size() == n) {
    std::vector<double> start(n);
    for (std::size_t k = 0; k < n; ++k) start[k] = std::max(0.0, warm_start->values[k]);
    std::vector<double> as(n);
    system.apply(start, as);
    double curvature = 0.0;
    double drive = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      curvature += start[k] * as[k];
      drive += system.b[k] * start[k];
    }
    const double s = curvature > 0.0 ? std::max(0.0, drive / curvature) : 0.0;
    for (std::size_t k = 0; k < n; ++k) padded[pad(k, nx)] = s * start[k];
  }

  std::vector<double> inv_diag(n);
  for (std::size_t k = 0; k < n; ++k) inv_diag[k] = 1.0 / system.diagonal[k];

  const auto extract = [&] {
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) values[k] = padded[pad(k, nx)];
    return values;
  };

  for (std::size_t it = 1; it <= max_iter; ++it) {
    double max_update = 0.0;
    double max_p = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      std::size_t pk = (j + 1) * stride + 1;
      std::size_t k = j * nx;
      for (std::size_t i = 0; i < nx; ++i, ++pk, ++k) {
        const double sigma = system.b[k] + system.west[k] * padded[pk - 1] +
                             system.east[k] * padded[pk + 1] + system.south[k] * padded[pk - stride] +
                             system.north[k] * padded[pk + stride];
        const double old = padded[pk];
        double next = old + omega * (sigma * inv_diag[k] - old);
        if (next < 0.0) next = 0.0;
        padded[pk] = next;
        max_update = std::max(max_update, std::abs(next - old));
        max_p = std::max(max_p, next);
      }
    }
    const double scale = std::max(1.0, max_p);
    if (max_update <= options.tol * scale) {
      PressureField field{extract(), 0.0, 0.0, it};
      const Residuals r = residuals(system, field.values);
      if (r.scaled_comp <= 10.0 * options.tol * scale) {
        field.residual_comp = r.comp;
        field.residual_lin = r.feas;
        return field;
      }
    }
  }
  PressureField last{extract(), 0.0, 0.0, max_iter};
  const Residuals r = residuals(system, last.values);
  last.residual_comp = r.comp;
  last.residual_lin = r.feas;
  throw NoConvergenceError(
      fmt::format("PSOR did not converge in {} sweeps (beta = {}, gamma = {}, residual {})", max_iter,
                  system.beta, system.gamma, last.residual_comp),
      std::move(last));
}

PressureField solve_linear(const DiscreteSystem& system,
                           std::optional<std::span<const double>> rhs_override, double tol,
                           std::size_t max_iter, std::optional<std::span<const unsigned char>> mask) {
  const std::size_t n = system.size();
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("tolerance {} must be > 0", tol));
  }
  if (rhs_override && rhs_override->size() != n) {
    throw Error(ErrorCode::InvalidArgument, "right-hand side size does not match the system");
  }
  if (mask && mask->size() != n) {
    throw Error(ErrorCode::InvalidArgument, "mask size does not match the system");
  }
  if (max_iter == 0) max_iter = 10 * n + 100;
  const auto inside = [&](std::size_t k) { return !mask || (*mask)[k] != 0; };

  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    r[k] = inside(k) ? (rhs_override ? (*rhs_override)[k] : system.b[k]) : 0.0;
  }
  PressureField field{std::vector<double>(n, 0.0), std::numeric_limits<double>::quiet_NaN(), 0.0, 0};

  const auto dot = [n](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * c[k];
    return s;
  };
  const double norm_rhs = std::sqrt(dot(r, r));
  if (norm_rhs == 0.0) return field;

  std::vector<double> z(n);
  std::vector<double> d(n);
  std::vector<double> ad(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / system.diagonal[k];
  d = z;
  double rz = dot(r, z);
  auto& x = field.values;

  for (std::size_t it = 1; it <= max_iter; ++it) {
    system.apply(d, ad);
    if (mask) {
      for (std::size_t k = 0; k < n; ++k)
        if (!inside(k)) ad[k] = 0.0;
    }
    const double alpha = rz / dot(d, ad);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * d[k];
      r[k] -= alpha * ad[k];
    }
    const double rel = std::sqrt(dot(r, r)) / norm_rhs;
    field.iterations = it;
    field.residual_lin = rel;
    if (rel <= tol) return field;
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / system.diagonal[k];
    const double rz_next = dot(r, z);
    const double ratio = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) d[k] = z[k] + ratio * d[k];
  }
  throw NoConvergenceError(
      fmt::format("conjugate gradients did not reach relative residual {} in {} iterations (got {})",
                  tol, max_iter, field.residual_lin),
      std::move(field));
}

double load_integral(std::span<const double> values, const Grid& grid) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.cell_area();
}

double load_integral(const PressureField& field, const Grid& grid) {
  return load_integral(field.values, grid);
}

ComplementarityReport complementarity_report(const PressureField& field, const DiscreteSystem& system) {
  if (field.values.size() != system.size()) {
    throw Error(ErrorCode::InvalidArgument, "pressure field does not match the system");
  }
  const auto w = slack(system, field.values);
  ComplementarityReport report;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double p = field.values[k];
    report.residual = std::max(report.residual, std::abs(std::min(p, w[k])));
    report.feasibility = std::max({report.feasibility, -p, -w[k]});
    if (p <= 0.0) {
      ++report.active;
    } else {
      ++report.free;
    }
  }
  return report;
}

void write_field_csv(std::ostream& out, const DiscreteSystem& system, const PressureField& field) {
  const auto w = slack(system, field.values);
  out << "x1,x2,p,residual,active\n";
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Point x = system.grid.node(k);
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{}\n", x.x1, x.x2, field.values[k], w[k],
                       field.values[k] <= 0.0 ? 1 : 0);
  }
}

}  // namespace slider
