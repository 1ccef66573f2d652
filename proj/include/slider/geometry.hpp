#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace slider {

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Axis-aligned rectangle holding the lubricated contact. The origin (the
/// point of closest approach) must lie strictly inside.
struct DomainRect {
  double x1_min = -1.0;
  double x1_max = 1.0;
  double x2_min = -1.0;
  double x2_max = 1.0;

  double length1() const { return x1_max - x1_min; }
  double length2() const { return x2_max - x2_min; }
  double area() const { return length1() * length2(); }
  bool contains(Point x) const;  // closed rectangle
  bool contains_strictly(Point x) const;
  void validate() const;  // throws InvalidDomain

  bool operator==(const DomainRect&) const = default;
};

/// Uniform grid of the closed rectangle. Interior nodes carry the unknowns
/// and are numbered lexicographically, x1 fastest; the boundary ring is
/// the Dirichlet lattice.
class Grid {
 public:
  Grid(const DomainRect& domain, std::size_t nx, std::size_t ny);

  const DomainRect& domain() const { return domain_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area() const { return dx_ * dy_; }

  std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }
  std::size_t column(std::size_t k) const { return k % nx_; }
  std::size_t row(std::size_t k) const { return k / nx_; }

  /// Coordinates of interior node (i, j), 0-based.
  double x1(std::size_t i) const { return domain_.x1_min + static_cast<double>(i + 1) * dx_; }
  double x2(std::size_t j) const { return domain_.x2_min + static_cast<double>(j + 1) * dy_; }
  Point node(std::size_t k) const { return {x1(column(k)), x2(row(k))}; }

  /// Lattice including the boundary ring: I in [0, nx+1], J in [0, ny+1].
  double lattice_x1(std::size_t I) const { return domain_.x1_min + static_cast<double>(I) * dx_; }
  double lattice_x2(std::size_t J) const { return domain_.x2_min + static_cast<double>(J) * dy_; }

  /// Interior node closest to the origin (ties resolved to the lowest index).
  std::size_t nearest_to_origin() const;

 private:
  DomainRect domain_;
  std::size_t nx_;
  std::size_t ny_;
  double dx_;
  double dy_;
};

Grid build_grid(const DomainRect& domain, std::size_t nx, std::size_t ny);

/// h0 = |x1|^alpha, vanishing on the line {x1 = 0}.
struct LineContact {
  double alpha = 2.0;
};

/// h0 = |x|^alpha, vanishing at the origin only.
struct PointContact {
  double alpha = 2.0;
};

/// h0 = 0.
struct Flat {};

/// Heights and x1-slopes sampled on the full lattice of a grid (boundary
/// ring included), bilinearly interpolated in between.
class TabulatedProfile {
 public:
  TabulatedProfile(const Grid& grid, std::vector<double> heights, std::vector<double> slopes);

  const DomainRect& domain() const { return domain_; }
  std::size_t columns() const { return columns_; }
  std::size_t rows() const { return rows_; }
  double height_at(std::size_t I, std::size_t J) const { return heights_[J * columns_ + I]; }
  double slope_at(std::size_t I, std::size_t J) const { return slopes_[J * columns_ + I]; }
  const std::vector<double>& heights() const { return heights_; }
  const std::vector<double>& slopes() const { return slopes_; }

  double height(Point x) const;
  double slope(Point x) const;

 private:
  double interpolate(const std::vector<double>& table, Point x) const;

  DomainRect domain_;
  std::size_t columns_;
  std::size_t rows_;
  double dx_;
  double dy_;
  std::vector<double> heights_;
  std::vector<double> slopes_;
};

using SliderShape = std::variant<LineContact, PointContact, Flat, TabulatedProfile>;

enum class ShapeKind { Line, Point, Flat, Tabulated };
ShapeKind kind_of(const SliderShape& shape);
const char* to_string(ShapeKind kind);

/// Exponent of the analytic profiles; 0 for Flat and Tabulated.
double exponent_of(const SliderShape& shape);

/// Validates alpha >= 1 for the analytic variants (throws InvalidShape).
void validate_shape(const SliderShape& shape);

double eval_height(const SliderShape& shape, Point x);

/// dh0/dx1. On the zero set the value is 0; for alpha = 1 this is a
/// convention (the derivative does not exist there), see has_gradient_kink.
double eval_gradient_x1(const SliderShape& shape, Point x);

/// True when the profile is not differentiable on its zero set (alpha == 1).
bool has_gradient_kink(const SliderShape& shape);

/// V1 = sup of -dh0/dx1 over the closed domain, clamped at 0.
double compute_V1(const SliderShape& shape, const Grid& grid);

/// sup of h0 over the closed domain.
double sup_height(const SliderShape& shape, const DomainRect& domain);

/// Tabulates an analytic shape on the lattice of `grid`.
TabulatedProfile tabulate(const SliderShape& shape, const Grid& grid);

enum class BoxKind { LineBox, SectorBox };

/// Region close to the contact where the converging wedge drives the film:
/// ]-2r, -r[ x ]-delta, delta[ for line contact, and the sector
/// r <= rho <= 2r, |theta - pi| <= theta0 for point contact, r = beta^(1/alpha).
struct ContactBox {
  BoxKind kind = BoxKind::LineBox;
  double beta = 0.0;
  double radius = 0.0;    // beta^(1/alpha)
  double aperture = 0.0;  // delta (LineBox) or theta0 (SectorBox)

  bool contains(Point x) const;
};

ContactBox contact_box(const SliderShape& shape, double beta, double aperture,
                       const DomainRect& domain);

}  // namespace slider
