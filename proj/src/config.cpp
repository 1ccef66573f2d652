#include "slider/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

namespace slider {

using nlohmann::json;

namespace {

std::size_t line_at_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Walks the JSON source and maps field paths to lines, following the key
// occurrences segment by segment.
class Locator {
 public:
  explicit Locator(std::string_view text) : text_(text) {}

  std::size_t line_of(const std::string& path) const {
    std::size_t pos = 0;
    std::size_t found = std::string_view::npos;
    std::string_view rest = path;
    while (!rest.empty()) {
      const std::size_t dot = rest.find('.');
      std::string_view segment = rest.substr(0, dot);
      segment = segment.substr(0, segment.find('['));
      const std::string quoted = fmt::format("\"{}\"", segment);
      const std::size_t at = text_.find(quoted, pos);
      if (at == std::string_view::npos) break;
      found = at;
      pos = at + quoted.size();
      rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
    }
    return found == std::string_view::npos ? 0 : line_at_offset(text_, found);
  }

 private:
  std::string_view text_;
};

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

class Section {
 public:
  Section(const json& node, std::string path, const Locator& locator)
      : node_(node), path_(std::move(path)), locator_(locator) {
    if (!node_.is_object()) {
      fail_type(path_, "an object");
    }
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& item : node_.items()) {
      if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
        const std::string where = join(path_, item.key());
        throw ParseError(locator_.line_of(where), where, fmt::format("unknown key '{}'", where));
      }
    }
  }

  bool has(const char* key) const { return node_.contains(key); }

  Section child(const char* key) const { return Section(node_.at(key), join(path_, key), locator_); }

  void read(const char* key, double& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_number()) fail_type(join(path_, key), "a number");
    out = v.get<double>();
  }

  void read(const char* key, std::size_t& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned()) fail_type(join(path_, key), "a non-negative integer");
    out = v.get<std::size_t>();
  }

  void read(const char* key, bool& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_boolean()) fail_type(join(path_, key), "a boolean");
    out = v.get<bool>();
  }

  void read(const char* key, std::string& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_string()) fail_type(join(path_, key), "a string");
    out = v.get<std::string>();
  }

  void read(const char* key, std::vector<double>& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    const std::string where = join(path_, key);
    if (!v.is_array()) fail_type(where, "an array of numbers");
    std::vector<double> values;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number()) fail_type(fmt::format("{}[{}]", where, k), "a number");
      values.push_back(v[k].get<double>());
    }
    out = std::move(values);
  }

 private:
  [[noreturn]] void fail_type(const std::string& where, const char* expected) const {
    throw ParseError(locator_.line_of(where), where, fmt::format("{} must be {}", where, expected));
  }

  const json& node_;
  std::string path_;
  const Locator& locator_;
};

void require(bool ok, const char* path, const char* constraint) {
  if (!ok) throw ValidationError(path, constraint);
}

void require_positive_list(const std::vector<double>& values, const char* path) {
  require(!values.empty(), path, "must not be empty");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0)) {
      throw ValidationError(fmt::format("{}[{}]", path, k), "must be > 0");
    }
  }
}

void validate(const RunConfig& c) {
  require(c.domain.x1_min < 0.0, "domain.x1_min", "must be < 0");
  require(c.domain.x1_max > 0.0, "domain.x1_max", "must be > 0");
  require(c.domain.x2_min < 0.0, "domain.x2_min", "must be < 0");
  require(c.domain.x2_max > 0.0, "domain.x2_max", "must be > 0");

  const std::string& kind = c.shape.kind;
  require(kind == "flat" || kind == "line" || kind == "point" || kind == "tabulated", "shape.kind",
          "must be one of flat, line, point, tabulated");
  require(c.shape.alpha >= 1.0, "shape.alpha", "must be >= 1");
  require(kind != "tabulated" || !c.shape.table.empty(), "shape.table", "must be set when shape.kind is tabulated");

  require(c.grid.nx >= 3, "grid.nx", "must be >= 3");
  require(c.grid.ny >= 3, "grid.ny", "must be >= 3");

  require(c.physics.F > 0.0, "physics.F", "must be > 0");
  require(c.physics.eta0 > 0.0, "physics.eta0", "must be > 0");

  require(c.solver.psor.omega > 0.0 && c.solver.psor.omega < 2.0, "solver.omega", "must be in (0, 2)");
  require(c.solver.psor.tol > 0.0, "solver.tol", "must be > 0");

  require(c.integrator.t_end > 0.0, "integrator.t_end", "must be > 0");
  require(c.integrator.control.rel_tol > 0.0, "integrator.rel_tol", "must be > 0");
  require(c.integrator.control.abs_tol > 0.0, "integrator.abs_tol", "must be > 0");
  require(c.integrator.control.eps_contact >= 0.0, "integrator.eps_contact", "must be >= 0");
  require(c.integrator.control.dt_min >= 0.0, "integrator.dt_min", "must be >= 0");
  require(c.integrator.control.max_samples >= 1, "integrator.max_samples", "must be >= 1");

  require(c.steady.beta_init > 0.0, "steady.beta_init", "must be > 0");
  require(c.steady.tol > 0.0, "steady.tol", "must be > 0");
  require(c.steady.tol_beta > 0.0, "steady.tol_beta", "must be > 0");
  require(c.steady.max_expansions >= 1, "steady.max_expansions", "must be >= 1");
  require(c.steady.max_bisections >= 1, "steady.max_bisections", "must be >= 1");

  require_positive_list(c.gcurve_betas, "gcurve.betas");

  require(c.contact.delta > 0.0, "contact.delta", "must be > 0");
  require(c.contact.theta0 > 0.0 && c.contact.theta0 < std::numbers::pi / 2, "contact.theta0",
          "must be in (0, pi/2)");
  require_positive_list(c.contact.betas, "contact.betas");
  require(!c.contact.gammas.empty(), "contact.gammas", "must not be empty");

  require(c.verify.fourier_cutoff >= 1, "verify.fourier_cutoff", "must be >= 1");
  require(c.verify.fourier_grid >= 3, "verify.fourier_grid", "must be >= 3");
  require(c.verify.reference_tol > 0.0, "verify.reference_tol", "must be > 0");
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return domain == o.domain && shape == o.shape && grid == o.grid && physics == o.physics &&
         solver.psor == o.solver.psor && solver.warm_start == o.solver.warm_start &&
         integrator == o.integrator && steady == o.steady && gcurve_betas == o.gcurve_betas &&
         contact == o.contact && verify == o.verify && debug == o.debug && seed == o.seed;
}

std::vector<double> RunConfig::default_gcurve_betas() {
  std::vector<double> betas;
  constexpr int count = 20;
  for (int k = 0; k < count; ++k) {
    betas.push_back(std::pow(10.0, -3.0 + 4.0 * k / (count - 1)));
  }
  return betas;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(line_at_offset(text, offset), "", fmt::format("malformed JSON: {}", e.what()));
  }
  const Locator locator(text);
  RunConfig c;
  c.base_dir = base_dir;

  const Section root(doc, "", locator);
  root.allow({"domain", "shape", "grid", "physics", "solver", "integrator", "steady", "gcurve", "contact",
              "verify", "debug", "seed"});
  if (root.has("domain")) {
    const Section s = root.child("domain");
    s.allow({"x1_min", "x1_max", "x2_min", "x2_max"});
    s.read("x1_min", c.domain.x1_min);
    s.read("x1_max", c.domain.x1_max);
    s.read("x2_min", c.domain.x2_min);
    s.read("x2_max", c.domain.x2_max);
  }
  if (root.has("shape")) {
    const Section s = root.child("shape");
    s.allow({"kind", "alpha", "table"});
    s.read("kind", c.shape.kind);
    s.read("alpha", c.shape.alpha);
    s.read("table", c.shape.table);
  }
  if (root.has("grid")) {
    const Section s = root.child("grid");
    s.allow({"nx", "ny"});
    s.read("nx", c.grid.nx);
    s.read("ny", c.grid.ny);
  }
  if (root.has("physics")) {
    const Section s = root.child("physics");
    s.allow({"F", "eta0", "eta1"});
    s.read("F", c.physics.F);
    s.read("eta0", c.physics.eta0);
    s.read("eta1", c.physics.eta1);
  }
  if (root.has("solver")) {
    const Section s = root.child("solver");
    s.allow({"omega", "tol", "max_iter", "warm_start"});
    s.read("omega", c.solver.psor.omega);
    s.read("tol", c.solver.psor.tol);
    s.read("max_iter", c.solver.psor.max_iter);
    s.read("warm_start", c.solver.warm_start);
  }
  if (root.has("integrator")) {
    const Section s = root.child("integrator");
    s.allow({"t_end", "rel_tol", "abs_tol", "eps_contact", "dt_min", "max_samples"});
    s.read("t_end", c.integrator.t_end);
    s.read("rel_tol", c.integrator.control.rel_tol);
    s.read("abs_tol", c.integrator.control.abs_tol);
    s.read("eps_contact", c.integrator.control.eps_contact);
    s.read("dt_min", c.integrator.control.dt_min);
    s.read("max_samples", c.integrator.control.max_samples);
  }
  if (root.has("steady")) {
    const Section s = root.child("steady");
    s.allow({"beta_init", "tol", "tol_beta", "max_expansions", "max_bisections"});
    s.read("beta_init", c.steady.beta_init);
    s.read("tol", c.steady.tol);
    s.read("tol_beta", c.steady.tol_beta);
    s.read("max_expansions", c.steady.max_expansions);
    s.read("max_bisections", c.steady.max_bisections);
  }
  if (root.has("gcurve")) {
    const Section s = root.child("gcurve");
    s.allow({"betas"});
    s.read("betas", c.gcurve_betas);
  }
  if (root.has("contact")) {
    const Section s = root.child("contact");
    s.allow({"delta", "theta0", "betas", "gammas"});
    s.read("delta", c.contact.delta);
    s.read("theta0", c.contact.theta0);
    s.read("betas", c.contact.betas);
    s.read("gammas", c.contact.gammas);
  }
  if (root.has("verify")) {
    const Section s = root.child("verify");
    s.allow({"fourier_cutoff", "fourier_grid", "lcp_cases", "comparison_cases", "reference_tol"});
    s.read("fourier_cutoff", c.verify.fourier_cutoff);
    s.read("fourier_grid", c.verify.fourier_grid);
    s.read("lcp_cases", c.verify.lcp_cases);
    s.read("comparison_cases", c.verify.comparison_cases);
    s.read("reference_tol", c.verify.reference_tol);
  }
  if (root.has("debug")) {
    const Section s = root.child("debug");
    s.allow({"dump_field"});
    s.read("dump_field", c.debug.dump_field);
  }
  std::size_t seed = c.seed;
  root.read("seed", seed);
  c.seed = seed;

  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, fmt::format("cannot read config file '{}'", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

std::string serialize_config(const RunConfig& c) {
  json doc;
  doc["domain"] = {{"x1_min", c.domain.x1_min},
                   {"x1_max", c.domain.x1_max},
                   {"x2_min", c.domain.x2_min},
                   {"x2_max", c.domain.x2_max}};
  doc["shape"] = {{"kind", c.shape.kind}, {"alpha", c.shape.alpha}, {"table", c.shape.table}};
  doc["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}};
  doc["physics"] = {{"F", c.physics.F}, {"eta0", c.physics.eta0}, {"eta1", c.physics.eta1}};
  doc["solver"] = {{"omega", c.solver.psor.omega},
                   {"tol", c.solver.psor.tol},
                   {"max_iter", c.solver.psor.max_iter},
                   {"warm_start", c.solver.warm_start}};
  doc["integrator"] = {{"t_end", c.integrator.t_end},
                       {"rel_tol", c.integrator.control.rel_tol},
                       {"abs_tol", c.integrator.control.abs_tol},
                       {"eps_contact", c.integrator.control.eps_contact},
                       {"dt_min", c.integrator.control.dt_min},
                       {"max_samples", c.integrator.control.max_samples}};
  doc["steady"] = {{"beta_init", c.steady.beta_init},
                   {"tol", c.steady.tol},
                   {"tol_beta", c.steady.tol_beta},
                   {"max_expansions", c.steady.max_expansions},
                   {"max_bisections", c.steady.max_bisections}};
  doc["gcurve"] = {{"betas", c.gcurve_betas}};
  doc["contact"] = {{"delta", c.contact.delta},
                    {"theta0", c.contact.theta0},
                    {"betas", c.contact.betas},
                    {"gammas", c.contact.gammas}};
  doc["verify"] = {{"fourier_cutoff", c.verify.fourier_cutoff},
                   {"fourier_grid", c.verify.fourier_grid},
                   {"lcp_cases", c.verify.lcp_cases},
                   {"comparison_cases", c.verify.comparison_cases},
                   {"reference_tol", c.verify.reference_tol}};
  doc["debug"] = {{"dump_field", c.debug.dump_field}};
  doc["seed"] = c.seed;
  return doc.dump(2) + "\n";
}

TabulatedProfile load_tabulated_csv(const std::filesystem::path& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, fmt::format("cannot read profile table '{}'", path.string()));
  }
  const std::size_t columns = grid.nx() + 2;
  const std::size_t rows = grid.ny() + 2;
  const std::string where = path.string();
  std::vector<double> heights(columns * rows, 0.0);
  std::vector<double> slopes(columns * rows, 0.0);
  std::vector<unsigned char> seen(columns * rows, 0);

  std::string line;
  std::size_t line_no = 0;
  const auto strip = [](std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  };
  if (!std::getline(in, line)) {
    throw ParseError(1, where, "profile table is empty");
  }
  ++line_no;
  strip(line);
  if (line != "x1,x2,h0,dh0_dx1") {
    throw ParseError(1, where, "profile table header must be x1,x2,h0,dh0_dx1");
  }
  const DomainRect& d = grid.domain();
  // Coordinates printed with a few digits still identify their node.
  const double snap1 = 1e-4 * grid.dx();
  const double snap2 = 1e-4 * grid.dy();
  while (std::getline(in, line)) {
    ++line_no;
    strip(line);
    if (line.empty()) continue;
    double v[4];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int f = 0; f < 4; ++f) {
      const auto [ptr, ec] = std::from_chars(p, end, v[f]);
      if (ec != std::errc{} || (f < 3 && (ptr == end || *ptr != ',')) || (f == 3 && ptr != end)) {
        throw ParseError(line_no, where, fmt::format("line {}: expected four comma-separated numbers", line_no));
      }
      p = ptr + 1;
    }
    const double fi = std::round((v[0] - d.x1_min) / grid.dx());
    const double fj = std::round((v[1] - d.x2_min) / grid.dy());
    if (fi < 0 || fj < 0 || fi > static_cast<double>(columns - 1) || fj > static_cast<double>(rows - 1)) {
      throw ParseError(line_no, where, fmt::format("line {}: ({}, {}) is outside the domain", line_no, v[0], v[1]));
    }
    const auto I = static_cast<std::size_t>(fi);
    const auto J = static_cast<std::size_t>(fj);
    if (std::abs(grid.lattice_x1(I) - v[0]) > snap1 || std::abs(grid.lattice_x2(J) - v[1]) > snap2) {
      throw ParseError(line_no, where,
                       fmt::format("line {}: ({}, {}) is not a lattice node of the configured grid", line_no, v[0],
                                   v[1]));
    }
    const std::size_t k = J * columns + I;
    if (seen[k]) {
      throw ParseError(line_no, where, fmt::format("line {}: node ({}, {}) listed twice", line_no, v[0], v[1]));
    }
    seen[k] = 1;
    heights[k] = v[2];
    slopes[k] = v[3];
  }
  const auto missing = std::count(seen.begin(), seen.end(), 0);
  if (missing > 0) {
    throw ParseError(line_no, where,
                     fmt::format("profile table lacks {} of the {} lattice nodes", missing, seen.size()));
  }
  return TabulatedProfile(grid, std::move(heights), std::move(slopes));
}

SliderShape make_shape(const RunConfig& config, const Grid& grid) {
  const std::string& kind = config.shape.kind;
  if (kind == "line") return LineContact{config.shape.alpha};
  if (kind == "point") return PointContact{config.shape.alpha};
  if (kind == "flat") return Flat{};
  std::filesystem::path table = config.shape.table;
  if (table.is_relative()) table = config.base_dir / table;
  return load_tabulated_csv(table, grid);
}

Problem make_problem(const RunConfig& config) {
  Problem problem;
  problem.grid = Grid(config.domain, config.grid.nx, config.grid.ny);
  problem.shape = make_shape(config, problem.grid);
  problem.F = config.physics.F;
  problem.eta0 = config.physics.eta0;
  problem.eta1 = config.physics.eta1;
  problem.solver = config.solver;
  problem.validate();
  return problem;
}

}  // namespace slider
