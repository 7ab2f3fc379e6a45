#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nfmove/channel.hpp"
#include "nfmove/crb.hpp"
#include "nfmove/errors.hpp"
#include "nfmove/estimate.hpp"
#include "nfmove/experiments.hpp"
#include "nfmove/simulate.hpp"
#include "nfmove/waveform.hpp"

namespace py = pybind11;
using namespace nfmove;

namespace {

WaveformSet waveforms_for(const ArrayTrack& track, const Scene& scene, Scheme scheme, std::uint64_t seed) {
  return scheme == Scheme::sem ? sem_waveforms(track, scene) : iso_waveforms(track, scene, seed);
}

Eigen::MatrixXcd symbols_matrix(const WaveformSet& ws) {
  Eigen::MatrixXcd m(ws.n_symbols(), ws.n_elements());
  for (int l = 0; l < ws.n_symbols(); ++l) m.row(l) = ws.symbols[l].transpose();
  return m;
}

WaveformSet from_matrix(const Eigen::MatrixXcd& m, Scheme scheme, Architecture arch) {
  WaveformSet ws;
  ws.scheme = scheme;
  ws.architecture = arch;
  for (Eigen::Index l = 0; l < m.rows(); ++l) ws.symbols.push_back(m.row(l).transpose());
  return ws;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Near-field moving-array localization bounds and estimators";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<DegenerateGeometryError>(m, "DegenerateGeometryError", PyExc_ArithmeticError);
  py::register_exception<DegenerateHypothesisError>(m, "DegenerateHypothesisError", PyExc_ArithmeticError);
  py::register_exception<SingularFimError>(m, "SingularFimError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Architecture>(m, "Architecture")
      .value("moving", Architecture::moving)
      .value("fixed", Architecture::fixed)
      .value("extended", Architecture::extended);
  py::enum_<Scheme>(m, "Scheme").value("sem", Scheme::sem).value("isotropic", Scheme::isotropic);

  py::class_<ArrayConfig>(m, "ArrayConfig")
      .def(py::init<>())
      .def_readwrite("n_elements", &ArrayConfig::n_elements)
      .def_readwrite("spacing", &ArrayConfig::spacing)
      .def_readwrite("speed", &ArrayConfig::speed)
      .def_readwrite("symbol_duration", &ArrayConfig::symbol_duration)
      .def_readwrite("n_symbols", &ArrayConfig::n_symbols)
      .def("validate", &ArrayConfig::validate);

  py::class_<Scene>(m, "Scene")
      .def(py::init<>())
      .def_readwrite("target_x", &Scene::target_x)
      .def_readwrite("target_y", &Scene::target_y)
      .def_readwrite("reflection", &Scene::reflection)
      .def_readwrite("noise_power", &Scene::noise_power)
      .def_readwrite("tx_power", &Scene::tx_power)
      .def_readwrite("wavelength", &Scene::wavelength)
      .def("validate", &Scene::validate);

  py::class_<GTerms>(m, "GTerms")
      .def_readonly("g_xx", &GTerms::g_xx)
      .def_readonly("g_yy", &GTerms::g_yy)
      .def_readonly("g_xy", &GTerms::g_xy)
      .def_readonly("alpha", &GTerms::alpha);

  py::class_<CrbReport>(m, "CrbReport")
      .def_readonly("crb_position", &CrbReport::crb_position)
      .def_readonly("gterms", &CrbReport::gterms)
      .def_readonly("architecture", &CrbReport::architecture)
      .def_readonly("scheme", &CrbReport::scheme)
      .def_property_readonly("rmse_lower_bound", &CrbReport::rmse_lower_bound);

  m.def("dbm_to_watts", &dbm_to_watts);
  m.def("watts_to_dbm", &watts_to_dbm);
  m.def("antenna_position", &antenna_position, py::arg("cfg"), py::arg("l"), py::arg("n"));
  m.def("platform_size", &platform_size);
  m.def("rayleigh_distance", &rayleigh_distance, py::arg("aperture"), py::arg("wavelength"));
  m.def("distances", [](const ArrayConfig& cfg, const Scene& scene) { return distance_field(cfg, scene).distances; });

  m.def("steering", &steering, py::arg("cfg"), py::arg("scene"), py::arg("l"));
  m.def(
      "steering_at",
      [](const Eigen::VectorXd& positions, double x, double y, double wavelength) {
        const auto b = steering_at(positions, x, y, wavelength);
        return py::make_tuple(b.a, b.da_dx, b.da_dy);
      },
      py::arg("positions"), py::arg("x"), py::arg("y"), py::arg("wavelength"),
      "Steering vector and its x and y derivatives.");

  m.def(
      "waveforms",
      [](const ArrayConfig& cfg, const Scene& scene, Architecture arch, Scheme scheme, std::uint64_t seed) {
        return symbols_matrix(waveforms_for(ArrayTrack::make(cfg, arch), scene, scheme, seed));
      },
      py::arg("cfg"), py::arg("scene"), py::arg("arch") = Architecture::moving, py::arg("scheme") = Scheme::sem,
      py::arg("seed") = 0, "Transmit symbols as an L x N matrix, one row per symbol.");
  m.def(
      "sample_covariance",
      [](const Eigen::MatrixXcd& symbols) { return sample_covariance(from_matrix(symbols, Scheme::sem, Architecture::moving)).matrix(); },
      py::arg("symbols"));

  m.def(
      "fim",
      [](const ArrayConfig& cfg, const Scene& scene, Architecture arch, const Eigen::MatrixXcd& symbols) {
        const auto track = ArrayTrack::make(cfg, arch);
        return Eigen::Matrix4d(fim(track, scene, from_matrix(symbols, Scheme::sem, arch)).matrix);
      },
      py::arg("cfg"), py::arg("scene"), py::arg("arch"), py::arg("symbols"));
  m.def(
      "crb_from_fim",
      [](const Eigen::Matrix4d& F) { return crb_from_fim(Fim{F}); }, py::arg("F"));
  m.def(
      "crb_closed",
      [](const ArrayConfig& cfg, const Scene& scene, Architecture arch, const Eigen::MatrixXcd& symbols) {
        return crb_closed(ArrayTrack::make(cfg, arch), scene, from_matrix(symbols, Scheme::sem, arch));
      },
      py::arg("cfg"), py::arg("scene"), py::arg("arch"), py::arg("symbols"));
  m.def("crb", &crb_for, py::arg("cfg"), py::arg("scene"), py::arg("arch"), py::arg("scheme") = Scheme::sem,
        py::arg("seed") = 0, "Bound for an architecture under SEM or isotropic transmission.");
  m.def("gterms_sem_approx", &gterms_sem_approx, py::arg("cfg"), py::arg("scene"), py::arg("arch"));
  m.def("crb_sem_approx", &crb_sem_approx, py::arg("cfg"), py::arg("scene"), py::arg("arch"));
  m.def("asymptotic_ratio", &asymptotic_ratio, py::arg("cfg"));

  m.def(
      "synthesize",
      [](const ArrayConfig& cfg, const Scene& scene, Architecture arch, const Eigen::MatrixXcd& symbols,
         std::uint64_t seed, bool noise) {
        const auto obs = synthesize(ArrayTrack::make(cfg, arch), scene, from_matrix(symbols, Scheme::sem, arch), seed,
                                    noise ? NoiseMode::enabled : NoiseMode::disabled);
        Eigen::MatrixXcd r(obs.per_symbol.size(), cfg.n_elements);
        if (!obs.per_symbol.empty()) r.resize(obs.per_symbol.size(), obs.per_symbol.front().size());
        for (std::size_t l = 0; l < obs.per_symbol.size(); ++l) r.row(static_cast<Eigen::Index>(l)) = obs.per_symbol[l].transpose();
        return r;
      },
      py::arg("cfg"), py::arg("scene"), py::arg("arch"), py::arg("symbols"), py::arg("seed"), py::arg("noise") = true,
      "Received samples, one row per symbol.");

  m.def(
      "likelihood_map",
      [](const ArrayConfig& cfg, const Scene& scene, Architecture arch, Scheme scheme, std::uint64_t seed,
         std::tuple<double, double, double, double> region, double resolution) {
        const auto track = ArrayTrack::make(cfg, arch);
        const auto ws = waveforms_for(track, scene, scheme, seed);
        const auto obs = synthesize(track, scene, ws, seed);
        const ConcentratedLikelihood objective(track, scene.wavelength, ws, obs);
        const auto [x0, x1, y0, y1] = region;
        const auto map = grid_search(objective, Region{x0, x1, y0, y1}, resolution);
        const auto est = refine(map, objective);
        py::dict out;
        out["x"] = map.x_grid;
        out["y"] = map.y_grid;
        out["loglik"] = map.values;
        out["argmax"] = py::make_tuple(map.argmax.x, map.argmax.y);
        out["refined"] = py::make_tuple(est.position.x, est.position.y);
        out["reflection"] = est.reflection;
        return out;
      },
      py::arg("cfg"), py::arg("scene"), py::arg("arch") = Architecture::moving, py::arg("scheme") = Scheme::sem,
      py::arg("seed") = 1, py::arg("region") = std::make_tuple(5.0, 15.0, -5.0, 5.0), py::arg("resolution") = 0.04,
      "One seeded noise realization searched over a grid, plus the refined estimate.");

  m.def(
      "monte_carlo",
      [](const ArrayConfig& cfg, const Scene& scene, Scheme scheme, int trials, std::uint64_t seed, Architecture arch,
         std::tuple<double, double, double, double> region, double resolution) {
        SearchOptions opt;
        opt.architecture = arch;
        const auto [x0, x1, y0, y1] = region;
        opt.region = Region{x0, x1, y0, y1};
        opt.resolution = resolution;
        const auto mc = monte_carlo_rmse(cfg, scene, scheme, trials, seed, opt);
        std::vector<double> errors;
        for (const auto& t : mc.trials) errors.push_back(t.error);
        py::dict out;
        out["rmse"] = mc.rmse;
        out["crb_rmse"] = mc.crb_rmse;
        out["errors"] = errors;
        return out;
      },
      py::arg("cfg"), py::arg("scene"), py::arg("scheme") = Scheme::sem, py::arg("trials") = 10, py::arg("seed") = 1,
      py::arg("arch") = Architecture::moving, py::arg("region") = std::make_tuple(9.0, 11.0, -1.0, 1.0),
      py::arg("resolution") = 0.04);

  m.def(
      "crb_sweep_csv",
      [](const std::string& config_text, const std::string& axis, const std::vector<double>& values) {
        const auto cfg = parse_config(config_text);
        std::ostringstream out;
        write_sweep_csv(out, cfg, run_crb_sweep(cfg, parse_axis(axis), values));
        return out.str();
      },
      py::arg("config_text") = "", py::arg("axis") = "power", py::arg("values") = std::vector<double>{},
      "Runs a bound sweep and returns the CSV text, preamble included.");
  m.def(
      "parse_config",
      [](const std::string& text) { return parse_config(text).describe(); }, py::arg("text"),
      "Validates config text and returns the resolved `key = value` lines.");

  m.attr("__version__") = "0.1.0";
}
