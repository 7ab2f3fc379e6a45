// Command-line front end. Exit codes: 0 ok, 2 config error, 3 every row
// numerically degenerate, 4 I/O error.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nfmove/errors.hpp"
#include "nfmove/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitIo = 4;

struct Flags {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::string> axis, values, arch, scheme, out, region;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> resolution;
  std::vector<double> multiples{1.0, 10.0, 100.0};
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key = value config file");
  cmd->add_option("--set", f.sets, "override one setting, key=value (repeatable)");
  cmd->add_option("--axis", f.axis, "sweep axis: power, symbols, antennas");
  cmd->add_option("--values", f.values, "comma-separated sweep values");
  cmd->add_option("--arch", f.arch, "moving, fixed, extended, a comma list, or all");
  cmd->add_option("--scheme", f.scheme, "sem, isotropic, or both");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output path (default stdout)");
  cmd->add_option("--trials", f.trials, "Monte-Carlo trials");
  cmd->add_option("--region", f.region, "x_min,x_max,y_min,y_max in meters");
  cmd->add_option("--resolution", f.resolution, "grid step in meters");
}

nfmove::ExperimentConfig resolve(const Flags& f) {
  nfmove::ExperimentConfig cfg = f.config.empty() ? nfmove::ExperimentConfig{} : nfmove::parse_config_file(f.config);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw nfmove::ConfigError("--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(' '));
      s.erase(s.find_last_not_of(' ') + 1);
      return s;
    };
    cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  if (f.axis) cfg.set("axis", *f.axis);
  if (f.values) cfg.set("values", *f.values);
  if (f.arch) cfg.set("arch", *f.arch);
  if (f.scheme) cfg.set("scheme", *f.scheme);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.trials) cfg.trials = *f.trials;
  if (f.region) cfg.set("region", *f.region);
  if (f.resolution) cfg.resolution = *f.resolution;
  cfg.validate();
  return cfg;
}

// Writes through `emit` to cfg.out or stdout.
template <class Emit>
void write_output(const std::string& path, Emit emit) {
  if (path.empty()) {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  emit(file);
  file.flush();
  if (!file) throw std::ios_base::failure("write to '" + path + "' failed");
}

std::string with_suffix(const std::string& path, std::string_view suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + "_" + std::string(suffix);
  return path.substr(0, dot) + "_" + std::string(suffix) + path.substr(dot);
}

int cmd_sweep(const nfmove::ExperimentConfig& cfg) {
  const auto rows = nfmove::run_crb_sweep(cfg, cfg.axis, cfg.values);
  write_output(cfg.out, [&](std::ostream& os) { nfmove::write_sweep_csv(os, cfg, rows); });
  std::size_t failed = 0;
  for (const auto& row : rows)
    if (!row.report) ++failed;
  if (failed) std::fprintf(stderr, "%zu of %zu rows failed\n", failed, rows.size());
  return failed == rows.size() ? kExitDegenerate : kExitOk;
}

int cmd_map(const nfmove::ExperimentConfig& cfg) {
  const bool many = cfg.architectures.size() > 1;
  for (auto arch : cfg.architectures) {
    const auto run = nfmove::run_likelihood_map(cfg, arch);
    const std::string path = many && !cfg.out.empty() ? with_suffix(cfg.out, nfmove::to_string(arch)) : cfg.out;
    write_output(path, [&](std::ostream& os) { nfmove::write_likelihood_csv(os, cfg, arch, run); });
    (cfg.out.empty() ? std::cerr : std::cout) << nfmove::summarize(run, arch) << '\n';
  }
  return kExitOk;
}

int cmd_monte_carlo(const nfmove::ExperimentConfig& cfg) {
  const auto result = nfmove::run_monte_carlo(cfg);
  write_output(cfg.out, [&](std::ostream& os) { nfmove::write_monte_carlo_csv(os, cfg, result); });
  std::fprintf(cfg.out.empty() ? stderr : stdout, "rmse %.6g m, crb rmse %.6g m, ratio %.4f\n", result.rmse,
               result.crb_rmse, result.rmse / result.crb_rmse);
  return kExitOk;
}

int cmd_ratio(const nfmove::ExperimentConfig& cfg, const std::vector<double>& multiples) {
  const auto rows = nfmove::run_ratio_check(cfg, multiples);
  write_output(cfg.out, [&](std::ostream& os) { nfmove::write_ratio_csv(os, cfg, rows); });
  return kExitOk;
}

int cmd_geometry(const nfmove::ExperimentConfig& cfg) {
  const auto g = nfmove::geometry_report(cfg);
  write_output(cfg.out, [&](std::ostream& os) {
    nfmove::write_preamble(os, cfg, "geometry");
    // 12 digits: the products below are exact in decimal but not in binary
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "quantity,value\nplatform_size_m,%.12g\nconventional_aperture_m,%.12g\n"
                  "rayleigh_conventional_m,%.12g\nrayleigh_extended_m,%.12g\n",
                  g.platform_size, g.conventional_aperture, g.rayleigh_conventional, g.rayleigh_extended);
    os << buf;
  });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field moving-array localization: bounds, synthesis, and ML search"};
  app.set_version_flag("--version", std::string(nfmove::kToolVersion));
  app.require_subcommand(1);

  Flags flags;
  auto* sweep = app.add_subcommand("crb-sweep", "position bound versus power, symbols or antennas");
  auto* map = app.add_subcommand("likelihood-map", "concentrated log-likelihood over a grid");
  auto* mc = app.add_subcommand("monte-carlo", "ML position RMSE against the bound");
  auto* ratio = app.add_subcommand("ratio-check", "moving/extended bound ratio far from the platform");
  auto* geom = app.add_subcommand("geometry", "platform size and Rayleigh distances");
  for (auto* cmd : {sweep, map, mc, ratio, geom}) add_common(cmd, flags);
  ratio->add_option("--multiples", flags.multiples, "target distance in platform sizes")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const auto cfg = resolve(flags);
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (map->parsed()) return cmd_map(cfg);
    if (mc->parsed()) return cmd_monte_carlo(cfg);
    if (ratio->parsed()) return cmd_ratio(cfg, flags.multiples);
    return cmd_geometry(cfg);
  } catch (const nfmove::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const nfmove::SingularFimError& e) {
    std::fprintf(stderr, "numerical degeneracy: %s\n", e.what());
    return kExitDegenerate;
  } catch (const nfmove::DegenerateGeometryError& e) {
    std::fprintf(stderr, "numerical degeneracy: %s\n", e.what());
    return kExitDegenerate;
  } catch (const nfmove::DegenerateHypothesisError& e) {
    std::fprintf(stderr, "numerical degeneracy: %s\n", e.what());
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
