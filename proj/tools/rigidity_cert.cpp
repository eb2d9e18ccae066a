#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rigcert/config.hpp"
#include "rigcert/error.hpp"
#include "rigcert/parallel.hpp"
#include "rigcert/pipelines.hpp"

using namespace rigcert;

namespace {

Scenario load(const std::string& path, std::optional<std::uint64_t> seed) {
  Scenario s = load_scenario(Config::load(path), seed);
  build_mesh(s.mesh);  // mesh files and generator arguments are checked here
  return s;
}

int run(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed) {
  Scenario s;
  try {
    s = load(path, seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const std::filesystem::path dir = out.empty() ? std::filesystem::path(s.name + ".out") : std::filesystem::path(out);
  try {
    const RunResult r = run_scenario(s);
    write_artifacts(dir, r.report, r.tables);
    std::cout << s.name << ": " << to_string(r.verdict) << " (" << dir.string() << ")\n";
    return exit_code(r.verdict);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    try {
      write_artifacts(dir, error_report(s, e));
    } catch (const Error& io) {
      std::cerr << "error: " << io.what() << "\n";
    }
    return 1;
  }
}

int validate(const std::string& path) {
  try {
    const Scenario s = load(path, std::nullopt);
    std::cout << s.name << ": ok (" << to_string(s.pipeline) << ")\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium solver and local uniqueness certificates for dead-load hyperelasticity"};
  app.require_subcommand(1);
  std::string config, out;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;

  CLI::App* run_cmd = app.add_subcommand("run", "run the scenario's pipeline and write report.json and CSV tables");
  run_cmd->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out, "output directory (default <name>.out)");
  run_cmd->add_option("--threads", threads, "worker threads, 0 for all cores")->capture_default_str();
  run_cmd->add_option("--seed", seed, "override the scenario seed");

  CLI::App* validate_cmd = app.add_subcommand("validate", "parse and check a scenario without running it");
  validate_cmd->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  set_thread_count(threads);
  if (*run_cmd) return run(config, out, seed);
  return validate(config);
}
