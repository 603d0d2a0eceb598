// Command-line experiment runner.
//
//   adarem run --config c.json [--out dir] [--seed N]
//   adarem compare --configs a.json b.json ... [--out dir]
//   adarem verify --config c.json [--out dir] [--seed N]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "adarem/errors.hpp"
#include "adarem/runner.hpp"

namespace {

using adarem::RunConfig;

RunConfig load_with_overrides(const std::string& path, const std::optional<std::string>& out,
                              const std::optional<std::uint64_t>& seed) {
  RunConfig cfg = adarem::load_config(path);
  if (out) cfg.output_dir = *out;
  if (seed) cfg.seed = *seed;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AdaRem optimizer experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> config_paths;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "Run one configuration");
  run_cmd->add_option("--config", config_path, "JSON config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run_cmd->add_option("--seed", seed, "Master seed (overrides seed)");

  auto* cmp_cmd = app.add_subcommand("compare", "Run several configs on one problem");
  cmp_cmd->add_option("--configs", config_paths, "JSON config files")->required();
  cmp_cmd->add_option("--out", out_dir, "Output directory for the comparison");

  auto* ver_cmd = app.add_subcommand("verify", "Check the regret bound on a quadratic stream");
  ver_cmd->add_option("--config", config_path, "JSON config file")->required();
  ver_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  ver_cmd->add_option("--seed", seed, "Master seed (overrides seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? adarem::kExitOk : adarem::kExitConfig;
  }

  try {
    if (*run_cmd) {
      const auto cfg = load_with_overrides(config_path, out_dir, seed);
      const auto summary = adarem::run(cfg);
      std::cout << summary.to_json().dump(2) << '\n';
      if (!summary.ok()) return adarem::kExitNumeric;
      if (summary.regret && summary.bound && *summary.regret > *summary.bound) {
        return adarem::kExitVerification;
      }
      return adarem::kExitOk;
    }

    if (*cmp_cmd) {
      std::vector<RunConfig> configs;
      for (const auto& p : config_paths) configs.push_back(adarem::load_config(p));
      const std::filesystem::path dir = out_dir.value_or("compare_out");
      const auto rows = adarem::compare(configs, dir);
      std::cout << std::ifstream(dir / "comparison.csv").rdbuf();
      for (const auto& r : rows) {
        if (r.error) return adarem::kExitNumeric;
      }
      return adarem::kExitOk;
    }

    if (*ver_cmd) {
      const auto cfg = load_with_overrides(config_path, out_dir, seed);
      const auto report = adarem::verify(cfg);
      const auto j = report.to_json();
      std::filesystem::create_directories(cfg.output_dir);
      std::ofstream(std::filesystem::path(cfg.output_dir) / "verify.json") << j.dump(2) << '\n';
      std::cout << j.dump(2) << '\n';
      return report.result.holds() ? adarem::kExitOk : adarem::kExitVerification;
    }
  } catch (const adarem::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return adarem::kExitNumeric;
  } catch (const adarem::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return adarem::kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return adarem::kExitConfig;
  }
  return adarem::kExitOk;
}
