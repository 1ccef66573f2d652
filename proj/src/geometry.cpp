#include "slider/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "slider/errors.hpp"

namespace slider {

bool DomainRect::contains(Point x) const {
  return x.x1 >= x1_min && x.x1 <= x1_max && x.x2 >= x2_min && x.x2 <= x2_max;
}

bool DomainRect::contains_strictly(Point x) const {
  return x.x1 > x1_min && x.x1 < x1_max && x.x2 > x2_min && x.x2 < x2_max;
}

void DomainRect::validate() const {
  const bool finite = std::isfinite(x1_min) && std::isfinite(x1_max) && std::isfinite(x2_min) &&
                      std::isfinite(x2_max);
  if (!finite || !(x1_min < 0.0 && 0.0 < x1_max && x2_min < 0.0 && 0.0 < x2_max)) {
    throw Error(ErrorCode::InvalidDomain,
                fmt::format("domain [{}, {}] x [{}, {}] must contain the origin in its interior",
                            x1_min, x1_max, x2_min, x2_max));
  }
}

Grid::Grid(const DomainRect& domain, std::size_t nx, std::size_t ny)
    : domain_(domain), nx_(nx), ny_(ny) {
  domain_.validate();
  if (nx < 3 || ny < 3) {
    throw Error(ErrorCode::TooCoarse, fmt::format("grid {}x{} is too coarse (need >= 3x3)", nx, ny));
  }
  dx_ = domain_.length1() / static_cast<double>(nx + 1);
  dy_ = domain_.length2() / static_cast<double>(ny + 1);
}

std::size_t Grid::nearest_to_origin() const {
  std::size_t best = 0;
  double best_d2 = INFINITY;
  for (std::size_t k = 0; k < size(); ++k) {
    const Point x = node(k);
    const double d2 = x.x1 * x.x1 + x.x2 * x.x2;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = k;
    }
  }
  return best;
}

Grid build_grid(const DomainRect& domain, std::size_t nx, std::size_t ny) {
  return Grid(domain, nx, ny);
}

TabulatedProfile::TabulatedProfile(const Grid& grid, std::vector<double> heights,
                                   std::vector<double> slopes)
    : domain_(grid.domain()),
      columns_(grid.nx() + 2),
      rows_(grid.ny() + 2),
      dx_(grid.dx()),
      dy_(grid.dy()),
      heights_(std::move(heights)),
      slopes_(std::move(slopes)) {
  const std::size_t n = columns_ * rows_;
  if (heights_.size() != n || slopes_.size() != n) {
    throw Error(ErrorCode::InvalidShape,
                fmt::format("tabulated profile needs {} lattice values, got {} heights and {} slopes",
                            n, heights_.size(), slopes_.size()));
  }
  double min_h = INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(heights_[k]) || !std::isfinite(slopes_[k])) {
      throw Error(ErrorCode::InvalidShape, "tabulated profile contains non-finite values");
    }
    min_h = std::min(min_h, heights_[k]);
  }
  if (min_h < 0.0) {
    throw Error(ErrorCode::InvalidShape, "tabulated heights must be >= 0");
  }
  const Point origin_node = grid.node(grid.nearest_to_origin());
  if (height(origin_node) != 0.0) {
    throw Error(ErrorCode::InvalidShape,
                fmt::format("tabulated height at the node nearest the origin ({}, {}) must be 0",
                            origin_node.x1, origin_node.x2));
  }
}

namespace {

// Splits a normalized coordinate into a cell index and local offset; values
// within 1e-9 of a lattice line snap onto it so nodal lookups are exact.
std::pair<std::size_t, double> locate(double s, std::size_t cells) {
  const double r = std::round(s);
  if (std::abs(s - r) < 1e-9) s = r;
  double cell = std::floor(s);
  cell = std::clamp(cell, 0.0, static_cast<double>(cells - 1));
  return {static_cast<std::size_t>(cell), s - cell};
}

}  // namespace

double TabulatedProfile::interpolate(const std::vector<double>& table, Point x) const {
  if (!domain_.contains(x)) {
    throw Error(ErrorCode::OutOfDomain,
                fmt::format("point ({}, {}) lies outside the tabulated domain", x.x1, x.x2));
  }
  const auto [I, t] = locate((x.x1 - domain_.x1_min) / dx_, columns_ - 1);
  const auto [J, u] = locate((x.x2 - domain_.x2_min) / dy_, rows_ - 1);
  const auto at = [&](std::size_t a, std::size_t b) { return table[b * columns_ + a]; };
  if (t == 0.0 && u == 0.0) return at(I, J);
  return (1.0 - t) * (1.0 - u) * at(I, J) + t * (1.0 - u) * at(I + 1, J) +
         (1.0 - t) * u * at(I, J + 1) + t * u * at(I + 1, J + 1);
}

double TabulatedProfile::height(Point x) const { return interpolate(heights_, x); }
double TabulatedProfile::slope(Point x) const { return interpolate(slopes_, x); }

ShapeKind kind_of(const SliderShape& shape) {
  return static_cast<ShapeKind>(shape.index());
}

const char* to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Line: return "line";
    case ShapeKind::Point: return "point";
    case ShapeKind::Flat: return "flat";
    case ShapeKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

double exponent_of(const SliderShape& shape) {
  if (const auto* s = std::get_if<LineContact>(&shape)) return s->alpha;
  if (const auto* s = std::get_if<PointContact>(&shape)) return s->alpha;
  return 0.0;
}

void validate_shape(const SliderShape& shape) {
  const ShapeKind kind = kind_of(shape);
  if (kind == ShapeKind::Line || kind == ShapeKind::Point) {
    const double alpha = exponent_of(shape);
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
      throw Error(ErrorCode::InvalidShape, fmt::format("exponent alpha = {} must be >= 1", alpha));
    }
  }
}

double eval_height(const SliderShape& shape, Point x) {
  switch (kind_of(shape)) {
    case ShapeKind::Line:
      return std::pow(std::abs(x.x1), std::get<LineContact>(shape).alpha);
    case ShapeKind::Point:
      return std::pow(std::hypot(x.x1, x.x2), std::get<PointContact>(shape).alpha);
    case ShapeKind::Flat:
      return 0.0;
    case ShapeKind::Tabulated:
      return std::get<TabulatedProfile>(shape).height(x);
  }
  return 0.0;
}

double eval_gradient_x1(const SliderShape& shape, Point x) {
  switch (kind_of(shape)) {
    case ShapeKind::Line: {
      const double alpha = std::get<LineContact>(shape).alpha;
      if (x.x1 == 0.0) return 0.0;
      const double mag = alpha * std::pow(std::abs(x.x1), alpha - 1.0);
      return x.x1 < 0.0 ? -mag : mag;
    }
    case ShapeKind::Point: {
      const double alpha = std::get<PointContact>(shape).alpha;
      const double r = std::hypot(x.x1, x.x2);
      if (r == 0.0) return 0.0;
      return alpha * std::pow(r, alpha - 2.0) * x.x1;
    }
    case ShapeKind::Flat:
      return 0.0;
    case ShapeKind::Tabulated:
      return std::get<TabulatedProfile>(shape).slope(x);
  }
  return 0.0;
}

bool has_gradient_kink(const SliderShape& shape) {
  const ShapeKind kind = kind_of(shape);
  return (kind == ShapeKind::Line || kind == ShapeKind::Point) && exponent_of(shape) == 1.0;
}

double compute_V1(const SliderShape& shape, const Grid& grid) {
  double v1 = 0.0;
  const auto visit = [&](Point x) { v1 = std::max(v1, -eval_gradient_x1(shape, x)); };

  if (const auto* table = std::get_if<TabulatedProfile>(&shape)) {
    for (std::size_t J = 0; J < table->rows(); ++J)
      for (std::size_t I = 0; I < table->columns(); ++I) v1 = std::max(v1, -table->slope_at(I, J));
    return v1;
  }
  for (std::size_t k = 0; k < grid.size(); ++k) visit(grid.node(k));

  // -dh0/dx1 grows with |x| along every ray into x1 < 0 (alpha >= 1), so the
  // supremum sits on the left edge: at its midpoint for alpha <= 2 and at its
  // corners for alpha >= 2.
  const DomainRect& d = grid.domain();
  switch (kind_of(shape)) {
    case ShapeKind::Line:
      visit({d.x1_min, 0.0});
      break;
    case ShapeKind::Point:
      visit({d.x1_min, 0.0});
      visit({d.x1_min, d.x2_min});
      visit({d.x1_min, d.x2_max});
      break;
    default:
      break;
  }
  return v1;
}

double sup_height(const SliderShape& shape, const DomainRect& d) {
  switch (kind_of(shape)) {
    case ShapeKind::Line: {
      const double reach = std::max(-d.x1_min, d.x1_max);
      return std::pow(reach, std::get<LineContact>(shape).alpha);
    }
    case ShapeKind::Point: {
      const double r1 = std::max(-d.x1_min, d.x1_max);
      const double r2 = std::max(-d.x2_min, d.x2_max);
      return std::pow(std::hypot(r1, r2), std::get<PointContact>(shape).alpha);
    }
    case ShapeKind::Flat:
      return 0.0;
    case ShapeKind::Tabulated: {
      const auto& h = std::get<TabulatedProfile>(shape).heights();
      return *std::max_element(h.begin(), h.end());
    }
  }
  return 0.0;
}

TabulatedProfile tabulate(const SliderShape& shape, const Grid& grid) {
  const std::size_t columns = grid.nx() + 2;
  const std::size_t rows = grid.ny() + 2;
  std::vector<double> heights(columns * rows);
  std::vector<double> slopes(columns * rows);
  for (std::size_t J = 0; J < rows; ++J) {
    for (std::size_t I = 0; I < columns; ++I) {
      const Point x{grid.lattice_x1(I), grid.lattice_x2(J)};
      heights[J * columns + I] = eval_height(shape, x);
      slopes[J * columns + I] = eval_gradient_x1(shape, x);
    }
  }
  return TabulatedProfile(grid, std::move(heights), std::move(slopes));
}

bool ContactBox::contains(Point x) const {
  if (kind == BoxKind::LineBox) {
    return x.x1 > -2.0 * radius && x.x1 < -radius && x.x2 > -aperture && x.x2 < aperture;
  }
  const double rho = std::hypot(x.x1, x.x2);
  if (rho < radius || rho > 2.0 * radius) return false;
  double theta = std::atan2(x.x2, x.x1);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return std::abs(theta - std::numbers::pi) <= aperture;
}

ContactBox contact_box(const SliderShape& shape, double beta, double aperture,
                       const DomainRect& domain) {
  const ShapeKind kind = kind_of(shape);
  if (kind != ShapeKind::Line && kind != ShapeKind::Point) {
    throw Error(ErrorCode::UnsupportedShape,
                fmt::format("contact boxes are defined for line and point contact, not {}",
                            to_string(kind)));
  }
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::NonPositiveClearance, fmt::format("clearance beta = {} must be > 0", beta));
  }
  ContactBox box;
  box.beta = beta;
  box.radius = std::pow(beta, 1.0 / exponent_of(shape));
  box.aperture = aperture;

  const double half_height = std::min(-domain.x2_min, domain.x2_max);
  double lateral = 0.0;
  if (kind == ShapeKind::Line) {
    box.kind = BoxKind::LineBox;
    if (!(aperture > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("delta = {} must be > 0", aperture));
    }
    lateral = aperture;
  } else {
    box.kind = BoxKind::SectorBox;
    if (!(aperture > 0.0 && aperture < std::numbers::pi / 2.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("theta0 = {} must lie in ]0, pi/2[", aperture));
    }
    lateral = 2.0 * box.radius * std::sin(aperture);
  }
  if (!(-2.0 * box.radius > domain.x1_min && lateral < half_height)) {
    throw Error(ErrorCode::BoxOutsideDomain,
                fmt::format("contact box for beta = {} (radius {}, aperture {}) leaves the domain",
                            beta, box.radius, aperture));
  }
  return box;
}

}  // namespace slider
