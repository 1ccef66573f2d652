// Command-line front end: slider <simulate|steady|gcurve|bounds|verify>
//   [--config <path>] [--out <dir>] [--seed <u64>]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "slider/app.hpp"
#include "slider/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lubricated slider: cavitating Reynolds film coupled to Newton's law"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON configuration file (defaults apply when omitted)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "seed for randomized checks (overrides the config)");

  for (const char* name : {"simulate", "steady", "gcurve", "bounds", "verify"}) {
    app.add_subcommand(name, "")->fallthrough();
  }
  app.get_subcommand("simulate")->description("integrate the slider trajectory");
  app.get_subcommand("steady")->description("find a steady clearance with G(beta, 0) = 0");
  app.get_subcommand("gcurve")->description("tabulate g(beta) = G(beta, 0)");
  app.get_subcommand("bounds")->description("report the a priori bounds");
  app.get_subcommand("verify")->description("run the oracle cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto command = slider::parse_command(app.get_subcommands().front()->get_name());
  try {
    slider::RunConfig config = config_path.empty() ? slider::parse_config("{}") : slider::load_config(config_path);
    if (seed) config.seed = *seed;
    return slider::run_command(*command, config, out_dir, std::cerr);
  } catch (const slider::ParseError& e) {
    std::cerr << "config error";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << ": " << e.what() << '\n';
    return 2;
  } catch (const slider::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return slider::exit_code_for(e.code());
  }
}
