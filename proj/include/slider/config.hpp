#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slider/dynamics.hpp"
#include "slider/steady.hpp"

namespace slider {

struct ShapeConfig {
  std::string kind = "flat";  // flat | line | point | tabulated
  double alpha = 2.0;
  std::string table;  // CSV path for kind = tabulated, relative to the config file

  bool operator==(const ShapeConfig&) const = default;
};

struct GridConfig {
  std::size_t nx = 64;
  std::size_t ny = 64;

  bool operator==(const GridConfig&) const = default;
};

struct PhysicsConfig {
  double F = 1.0;
  double eta0 = 1.0;
  double eta1 = 0.0;

  bool operator==(const PhysicsConfig&) const = default;
};

struct IntegratorConfig {
  double t_end = 50.0;
  StepControl control;

  bool operator==(const IntegratorConfig&) const = default;
};

struct ContactConfig {
  double delta = 0.25;           // half-width of the line-contact box
  double theta0 = 0.785398163397448;  // half-aperture of the point-contact sector (pi / 4)
  std::vector<double> betas = {0.02, 0.05, 0.1};
  std::vector<double> gammas = {-1.0, -0.3, 0.0};

  bool operator==(const ContactConfig&) const = default;
};

struct VerifyConfig {
  std::size_t fourier_cutoff = 199;
  std::size_t fourier_grid = 256;
  std::size_t lcp_cases = 100;
  std::size_t comparison_cases = 20;
  double reference_tol = 1e-10;

  bool operator==(const VerifyConfig&) const = default;
};

struct DebugConfig {
  bool dump_field = false;

  bool operator==(const DebugConfig&) const = default;
};

/// Everything a run needs; every field has a default, so a document only
/// lists what it changes.
struct RunConfig {
  DomainRect domain;
  ShapeConfig shape;
  GridConfig grid;
  PhysicsConfig physics;
  SolverSettings solver;
  IntegratorConfig integrator;
  SteadyOptions steady;
  std::vector<double> gcurve_betas = default_gcurve_betas();
  ContactConfig contact;
  VerifyConfig verify;
  DebugConfig debug;
  std::uint64_t seed = 0;

  /// Directory that relative paths (shape.table) are resolved against.
  std::filesystem::path base_dir;

  bool operator==(const RunConfig& other) const;

  /// 20 log-spaced clearances in [1e-3, 10].
  static std::vector<double> default_gcurve_betas();
};

/// Parses and validates a JSON document. Unknown keys raise ParseError;
/// out-of-range values raise ValidationError naming the field path.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Effective configuration with all defaults filled, as JSON text.
std::string serialize_config(const RunConfig& config);

/// Reads a tabulated profile from CSV with header x1,x2,h0,dh0_dx1 and one
/// row per lattice node of `grid`, boundary ring included, in any order.
TabulatedProfile load_tabulated_csv(const std::filesystem::path& path, const Grid& grid);

SliderShape make_shape(const RunConfig& config, const Grid& grid);
Problem make_problem(const RunConfig& config);

}  // namespace slider
