#include "nfmove/experiments.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "nfmove/errors.hpp"
#include "nfmove/simulate.hpp"

namespace nfmove {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("invalid number '" + std::string(text) + "' for key '" + std::string(key) + "'",
                      std::string(key));
  return v;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text) {
  Int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ConfigError("invalid integer '" + std::string(text) + "' for key '" + std::string(key) + "'",
                      std::string(key));
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += format_double(values[i]);
  }
  return s;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto integer = [](int ArrayConfig::*field) {
      return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
        c.array.*field = parse_int<int>(k, v);
      };
    };
    auto array_real = [](double ArrayConfig::*field) {
      return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
        c.array.*field = parse_double(k, v);
      };
    };
    auto scene_real = [](double Scene::*field) {
      return [field](ExperimentConfig& c, std::string_view k, std::string_view v) {
        c.scene.*field = parse_double(k, v);
      };
    };
    t["n_elements"] = t["N"] = integer(&ArrayConfig::n_elements);
    t["n_symbols"] = t["L"] = integer(&ArrayConfig::n_symbols);
    t["spacing"] = t["delta"] = array_real(&ArrayConfig::spacing);
    t["speed"] = t["v"] = array_real(&ArrayConfig::speed);
    t["symbol_duration"] = t["Ts"] = array_real(&ArrayConfig::symbol_duration);
    t["target_x"] = t["x"] = scene_real(&Scene::target_x);
    t["target_y"] = t["y"] = scene_real(&Scene::target_y);
    t["noise_power"] = scene_real(&Scene::noise_power);
    t["tx_power"] = scene_real(&Scene::tx_power);
    t["wavelength"] = t["lambda"] = scene_real(&Scene::wavelength);
    t["P0_dbm"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.scene.tx_power = dbm_to_watts(parse_double(k, v));
    };
    t["sigma2_dbm"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.scene.noise_power = dbm_to_watts(parse_double(k, v));
    };
    t["reflection_re"] = t["b_re"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.scene.reflection.real(parse_double(k, v));
    };
    t["reflection_im"] = t["b_im"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.scene.reflection.imag(parse_double(k, v));
    };
    t["scheme"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      std::vector<Scheme> schemes;
      if (v == "both" || v == "all") {
        schemes = {Scheme::sem, Scheme::isotropic};
      } else {
        for (auto part : split(v, ',')) schemes.push_back(parse_scheme(part));
      }
      c.schemes = std::move(schemes);
    };
    t["arch"] = t["architecture"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      std::vector<Architecture> archs;
      if (v == "all") {
        archs = {Architecture::moving, Architecture::fixed, Architecture::extended};
      } else {
        for (auto part : split(v, ',')) archs.push_back(parse_architecture(part));
      }
      c.architectures = std::move(archs);
    };
    t["axis"] = [](ExperimentConfig& c, std::string_view, std::string_view v) { c.axis = parse_axis(v); };
    t["values"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      std::vector<double> values;
      if (!v.empty())
        for (auto part : split(v, ',')) values.push_back(parse_double(k, part));
      c.values = std::move(values);
    };
    t["seed"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.seed = parse_int<std::uint64_t>(k, v);
    };
    t["out"] = [](ExperimentConfig& c, std::string_view, std::string_view v) { c.out = std::string(v); };
    t["trials"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.trials = parse_int<int>(k, v); };
    t["realizations"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.realizations = parse_int<int>(k, v);
    };
    t["region"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      const auto parts = split(v, ',');
      if (parts.size() != 4)
        throw ConfigError("region needs x_min,x_max,y_min,y_max", std::string(k));
      c.region = Region{parse_double(k, parts[0]), parse_double(k, parts[1]), parse_double(k, parts[2]),
                        parse_double(k, parts[3])};
    };
    t["resolution"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.resolution = parse_double(k, v);
    };
    return t;
  }();
  return table;
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::power: return "power";
    case SweepAxis::symbols: return "symbols";
    case SweepAxis::antennas: return "antennas";
  }
  return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "power") return SweepAxis::power;
  if (name == "symbols") return SweepAxis::symbols;
  if (name == "antennas") return SweepAxis::antennas;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'", "axis");
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'", std::string(key));
  try {
    it->second(*this, key, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string(e.what()) + " (key '" + std::string(key) + "')", std::string(key));
  }
}

void ExperimentConfig::validate() const {
  try {
    array.validate();
    scene.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (schemes.empty()) throw ConfigError("no scheme selected", "scheme");
  if (architectures.empty()) throw ConfigError("no architecture selected", "arch");
  if (trials < 1) throw ConfigError("trials must be >= 1", "trials");
  if (realizations < 1) throw ConfigError("realizations must be >= 1", "realizations");
  if (!(resolution > 0.0)) throw ConfigError("resolution must be > 0", "resolution");
  if (!(region.x_min > 0.0) || !(region.x_max >= region.x_min) || !(region.y_max >= region.y_min))
    throw ConfigError("region must satisfy 0 < x_min <= x_max and y_min <= y_max", "region");
  for (double v : values) {
    if (axis != SweepAxis::power && (v < 1.0 || v != std::floor(v)))
      throw ConfigError("sweep values on axis '" + std::string(to_string(axis)) + "' must be positive integers",
                        "values");
  }
}

std::vector<std::string> ExperimentConfig::describe() const {
  std::vector<std::string> lines;
  auto add = [&](std::string_view key, const std::string& value) {
    lines.push_back(std::string(key) + " = " + value);
  };
  add("n_elements", std::to_string(array.n_elements));
  add("n_symbols", std::to_string(array.n_symbols));
  add("spacing", format_double(array.spacing));
  add("speed", format_double(array.speed));
  add("symbol_duration", format_double(array.symbol_duration));
  add("target_x", format_double(scene.target_x));
  add("target_y", format_double(scene.target_y));
  add("reflection_re", format_double(scene.reflection.real()));
  add("reflection_im", format_double(scene.reflection.imag()));
  add("noise_power", format_double(scene.noise_power));
  add("tx_power", format_double(scene.tx_power));
  add("wavelength", format_double(scene.wavelength));
  std::string s;
  for (std::size_t i = 0; i < schemes.size(); ++i) s += (i ? "," : "") + std::string(to_string(schemes[i]));
  add("scheme", s);
  s.clear();
  for (std::size_t i = 0; i < architectures.size(); ++i)
    s += (i ? "," : "") + std::string(to_string(architectures[i]));
  add("arch", s);
  add("axis", std::string(to_string(axis)));
  add("values", join_doubles(values));
  add("seed", std::to_string(seed));
  add("trials", std::to_string(trials));
  add("realizations", std::to_string(realizations));
  add("region", join_doubles({region.x_min, region.x_max, region.y_min, region.y_max}));
  add("resolution", format_double(resolution));
  return lines;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", {}, line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key", {}, line_no);
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what(), e.key(), line_no);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << f.rdbuf();
  return parse_config(text.str());
}

std::vector<double> default_sweep_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::power: {
      std::vector<double> v;
      for (int dbm = 0; dbm <= 50; dbm += 5) v.push_back(dbm);
      return v;
    }
    case SweepAxis::symbols: return {100, 200, 500, 1000, 2000, 5000};
    case SweepAxis::antennas: return {4, 8, 16, 32, 64, 128};
  }
  return {};
}

std::vector<SweepRow> run_crb_sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values) {
  const auto grid = values.empty() ? default_sweep_values(axis) : values;
  std::vector<SweepRow> rows;
  for (double value : grid) {
    ArrayConfig array = cfg.array;
    Scene scene = cfg.scene;
    switch (axis) {
      case SweepAxis::power: scene.tx_power = dbm_to_watts(value); break;
      case SweepAxis::symbols: array.n_symbols = static_cast<int>(value); break;
      case SweepAxis::antennas: array.n_elements = static_cast<int>(value); break;
    }
    for (Architecture arch : cfg.architectures) {
      for (Scheme scheme : cfg.schemes) {
        SweepRow row;
        row.axis_value = value;
        row.architecture = arch;
        row.scheme = scheme;
        try {
          if (arch == Architecture::moving && scheme == Scheme::isotropic) {
            // realization r draws its waveforms from seed + r
            std::vector<CrbReport> reports;
            for (int r = 0; r < cfg.realizations; ++r)
              reports.push_back(crb_for(array, scene, arch, scheme, cfg.seed + static_cast<std::uint64_t>(r)));
            CrbReport mean = reports.front();
            double sum = 0.0, gxx = 0.0, gyy = 0.0, alpha = 0.0;
            for (const auto& rep : reports) {
              sum += rep.crb_position;
              gxx += rep.gterms.g_xx;
              gyy += rep.gterms.g_yy;
              alpha += rep.gterms.alpha;
            }
            const double n = static_cast<double>(reports.size());
            row.crb_mean = sum / n;
            double var = 0.0;
            for (const auto& rep : reports) var += (rep.crb_position - row.crb_mean) * (rep.crb_position - row.crb_mean);
            row.crb_std = reports.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
            mean.crb_position = row.crb_mean;
            mean.gterms.g_xx = gxx / n;
            mean.gterms.g_yy = gyy / n;
            mean.gterms.alpha = alpha / n;
            row.realizations = static_cast<int>(reports.size());
            row.report = mean;
          } else {
            row.report = crb_for(array, scene, arch, scheme, cfg.seed);
            row.crb_mean = row.report->crb_position;
          }
        } catch (const std::exception& e) {
          row.report.reset();
          row.error = e.what();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<RatioCheckRow> run_ratio_check(const ExperimentConfig& cfg, const std::vector<double>& multiples) {
  const double size = platform_size(cfg.array);
  const double n = cfg.array.n_elements;
  const double l = cfg.array.n_symbols;
  std::vector<RatioCheckRow> rows;
  for (double m : multiples) {
    RatioCheckRow row;
    row.distance_multiple = m;
    Scene scene = cfg.scene;
    scene.target_x = m * size;
    scene.target_y = extended_array_positions(cfg.array).back() / 2.0;
    row.target_x = scene.target_x;
    row.target_y = scene.target_y;
    row.crb_moving = crb_for(cfg.array, scene, Architecture::moving, Scheme::sem).crb_position;
    row.crb_extended = crb_for(cfg.array, scene, Architecture::extended, Scheme::sem).crb_position;
    row.ratio = row.crb_moving / row.crb_extended;
    row.ratio_approx = crb_sem_approx(cfg.array, scene, Architecture::moving).crb_position /
                       crb_sem_approx(cfg.array, scene, Architecture::extended).crb_position;
    row.l2_over_4n2 = l * l / (4.0 * n * n);
    row.l2_over_4n = l * l / (4.0 * n);
    rows.push_back(row);
  }
  return rows;
}

MapRun run_likelihood_map(const ExperimentConfig& cfg, Architecture arch) {
  const ArrayTrack track = ArrayTrack::make(cfg.array, arch);
  const Scheme scheme = cfg.schemes.front();
  const WaveformSet ws =
      scheme == Scheme::sem ? sem_waveforms(track, cfg.scene) : iso_waveforms(track, cfg.scene, cfg.seed);
  const Observation obs = synthesize(track, cfg.scene, ws, cfg.seed);
  const ConcentratedLikelihood objective(track, cfg.scene.wavelength, ws, obs);
  MapRun run;
  run.map = grid_search(objective, cfg.region, cfg.resolution);
  run.refined = refine(run.map, objective);
  return run;
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg) {
  SearchOptions options;
  options.architecture = cfg.architectures.front();
  options.region = cfg.region;
  options.resolution = cfg.resolution;
  return monte_carlo_rmse(cfg.array, cfg.scene, cfg.schemes.front(), cfg.trials, cfg.seed, options);
}

GeometryReport geometry_report(const ExperimentConfig& cfg) {
  GeometryReport r;
  r.platform_size = platform_size(cfg.array);
  r.conventional_aperture = cfg.array.n_elements * cfg.array.spacing;
  r.rayleigh_conventional = rayleigh_distance(r.conventional_aperture, cfg.scene.wavelength);
  r.rayleigh_extended = rayleigh_distance(r.platform_size, cfg.scene.wavelength);
  return r;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_preamble(std::ostream& out, const ExperimentConfig& cfg, std::string_view command) {
  out << "# " << kToolVersion << '\n';
  out << "# command: " << command << '\n';
  out << "# seed: " << cfg.seed << '\n';
  for (const auto& line : cfg.describe()) out << "# config: " << line << '\n';
}

void write_sweep_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  write_preamble(out, cfg, "crb-sweep");
  out << "axis_value,architecture,scheme,crb_m2,rmse_lb_m,alpha,g_xx,g_yy,crb_mean,crb_std,realizations,status\n";
  for (const auto& row : rows) {
    out << format_double(row.axis_value) << ',' << to_string(row.architecture) << ',' << to_string(row.scheme) << ',';
    if (row.report) {
      const auto& r = *row.report;
      out << format_double(r.crb_position) << ',' << format_double(r.rmse_lower_bound()) << ','
          << format_double(r.gterms.alpha) << ',' << format_double(r.gterms.g_xx) << ','
          << format_double(r.gterms.g_yy) << ',';
      if (row.realizations > 0)
        out << format_double(row.crb_mean) << ',' << format_double(row.crb_std) << ',' << row.realizations;
      else
        out << ",,";
      out << ",ok\n";
    } else {
      out << ",,,,,,,," << csv_field("error: " + row.error) << '\n';
    }
  }
}

void write_ratio_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<RatioCheckRow>& rows) {
  write_preamble(out, cfg, "ratio-check");
  out << "distance_multiple,x_m,y_m,crb_moving,crb_extended,ratio,ratio_approx,l2_over_4n2,l2_over_4n,"
         "dev_4n2,dev_4n\n";
  for (const auto& r : rows) {
    out << format_double(r.distance_multiple) << ',' << format_double(r.target_x) << ','
        << format_double(r.target_y) << ',' << format_double(r.crb_moving) << ',' << format_double(r.crb_extended)
        << ',' << format_double(r.ratio) << ',' << format_double(r.ratio_approx) << ','
        << format_double(r.l2_over_4n2) << ',' << format_double(r.l2_over_4n) << ','
        << format_double(r.deviation_4n2()) << ',' << format_double(r.deviation_4n()) << '\n';
  }
}

void write_monte_carlo_csv(std::ostream& out, const ExperimentConfig& cfg, const MonteCarloResult& result) {
  write_preamble(out, cfg, "monte-carlo");
  out << "trial,seed,x_hat,y_hat,err_m\n";
  for (const auto& t : result.trials) {
    out << t.trial << ',' << t.seed << ',' << format_double(t.estimate.x) << ',' << format_double(t.estimate.y)
        << ',' << format_double(t.error) << '\n';
  }
  // aggregate rows carry their value in the err_m column
  out << "rmse,,,," << format_double(result.rmse) << '\n';
  out << "crb_rmse,,,," << format_double(result.crb_rmse) << '\n';
}

std::string summarize(const MapRun& run, Architecture arch) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%s argmax x=%.4f y=%.4f loglik=%.10g refined x=%.6f y=%.6f b=%.6g%+.6gj loglik=%.10g",
                std::string(to_string(arch)).c_str(), run.map.argmax.x, run.map.argmax.y, run.map.max_value,
                run.refined.position.x, run.refined.position.y, run.refined.reflection.real(),
                run.refined.reflection.imag(), run.refined.objective);
  return buf;
}

void write_likelihood_csv(std::ostream& out, const ExperimentConfig& cfg, Architecture arch, const MapRun& run) {
  write_preamble(out, cfg, "likelihood-map");
  out << "# architecture: " << to_string(arch) << '\n';
  out << "# summary: " << summarize(run, arch) << '\n';
  write_map_csv(out, run.map);
}

}  // namespace nfmove
