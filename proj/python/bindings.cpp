#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ionvac/chain.hpp"
#include "ionvac/detect.hpp"
#include "ionvac/errors.hpp"
#include "ionvac/experiments.hpp"
#include "ionvac/gaussian.hpp"
#include "ionvac/swap.hpp"
#include "ionvac/version.hpp"

namespace py = pybind11;
using namespace ionvac;

namespace {

py::dict swap_result_dict(const SwapResult& r) {
    py::dict d;
    d["rho"] = r.rho;
    d["eof"] = r.eof;
    d["concurrence"] = r.concurrence;
    d["purity"] = r.purity;
    d["residual_motional_overlap"] = r.residual_motional_overlap;
    d["ground_entropy"] = r.ground_entropy;
    d["ratio_to_ground_entropy"] = r.ratio_to_ground_entropy;
    return d;
}

ExchangeOrdering ordering_from(const std::string& s) {
    if (s == "product") return ExchangeOrdering::Product;
    if (s == "time_ordered") return ExchangeOrdering::TimeOrdered;
    throw ConfigError("ordering must be product or time_ordered", "ordering");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Vacuum entanglement in trapped-ion chains";
    m.attr("__version__") = kVersion;

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::object exc = py::reinterpret_borrow<py::object>(config_error.ptr())(e.what());
            exc.attr("field") = e.field();
            PyErr_SetObject(config_error.ptr(), exc.ptr());
        } catch (const NumericalError& e) {
            py::set_error(numerical_error, e.what());
        }
    });

    m.def("equilibrium_positions", [](int n) { return solve_equilibrium(ChainSpec{n}).u; }, py::arg("n_ions"));
    m.def("coupling_matrix", [](int n) { return chain_coupling(n).g; }, py::arg("n_ions"));
    m.def(
        "normal_modes",
        [](const Matrix& g) {
            const NormalModes nm = normal_modes(CouplingMatrix{g});
            return py::make_tuple(nm.frequencies, nm.vectors);
        },
        py::arg("coupling"), "(frequencies, vectors) of a coupling matrix");
    m.def(
        "truncated_coupling", [](const Matrix& g, int cut) { return truncated_coupling(CouplingMatrix{g}, cut).g; },
        py::arg("coupling"), py::arg("cut"));

    m.def("ground_state_covariance", [](int n) { return ground_state_covariance(chain_coupling(n)).sigma; },
          py::arg("n_ions"));
    m.def(
        "entanglement_entropy",
        [](int n, const SiteList& part) { return entanglement_entropy(ground_state_covariance(chain_coupling(n)), part); },
        py::arg("n_ions"), py::arg("partition"));
    m.def(
        "log_negativity",
        [](int n, const SiteList& a, const SiteList& b) {
            return log_negativity(ground_state_covariance(chain_coupling(n)), a, b);
        },
        py::arg("n_ions"), py::arg("group_a"), py::arg("group_b"));
    m.def("two_ion_analytics", [] {
        const TwoIonSqueezing s = two_ion_analytics();
        py::dict d;
        d["lambda"] = s.lambda;
        d["e_beta"] = s.e_beta;
        d["entropy_ebits"] = s.entropy_ebits;
        return d;
    });
    m.def(
        "entropy_vs_chain_size",
        [](const std::vector<int>& ns) {
            std::vector<std::pair<int, double>> out;
            for (const auto& r : entropy_vs_chain_size(ns)) out.emplace_back(r.n_ions, r.entropy);
            return out;
        },
        py::arg("chain_sizes"));

    m.def(
        "run_sequence",
        [](const std::string& sequence, int fock_dim, double gauge) {
            const SwapSimulator sim(chain_coupling(2), LocalModeBasis{gauge, fock_dim});
            return swap_result_dict(sim.run(parse_pulse_sequence(sequence)));
        },
        py::arg("sequence"), py::arg("fock_dim") = 16, py::arg("gauge_frequency") = std::pow(3.0, 0.25));
    m.def(
        "optimize_sequence",
        [](int n_pairs, int restarts, std::uint64_t seed, int threads, int max_evaluations, int fock_dim) {
            const SwapSimulator sim(chain_coupling(2), LocalModeBasis{std::pow(3.0, 0.25), fock_dim});
            OptimizationResult r;
            {
                py::gil_scoped_release release;
                r = optimize_sequence(sim, OptimizerOptions{n_pairs, restarts, seed, threads, max_evaluations});
            }
            py::dict d = swap_result_dict(r.result);
            d["sequence"] = format_pulse_sequence(r.sequence);
            d["restart_eof"] = r.restart_eof;
            d["best_restart"] = r.best_restart;
            return d;
        },
        py::arg("n_pairs") = 3, py::arg("restarts") = 32, py::arg("seed") = 20050101, py::arg("threads") = 0,
        py::arg("max_evaluations") = 3000, py::arg("fock_dim") = 16);

    m.def(
        "detection",
        [](int n, int a, int b, double duration, double detuning, double omega, bool truncated,
           const std::string& ordering) {
            DetectionConfig cfg{n, a, b, duration, detuning, omega, truncated, ordering_from(ordering)};
            validate(cfg);
            const auto amps = perturbative_amplitudes(cfg, normal_modes(chain_coupling(n)));
            const auto r = assemble_rho(amps, cfg.ordering);
            py::dict d;
            d["rho"] = r.rho;
            d["eta"] = r.eta;
            d["negativity"] = r.negativity;
            d["entangled"] = r.entangled;
            d["exchange"] = cfg.ordering == ExchangeOrdering::Product ? amps.exchange : amps.exchange_time_ordered;
            d["norm_a"] = amps.norm_a;
            d["norm_b"] = amps.norm_b;
            return d;
        },
        py::arg("n_ions") = 20, py::arg("probe_a") = 6, py::arg("probe_b") = 15, py::arg("duration") = 0.8,
        py::arg("detuning") = 0.0, py::arg("omega") = 0.05, py::arg("truncated") = false,
        py::arg("ordering") = "product");
    m.def(
        "eta_sweep",
        [](int n, int a, int b, double duration, const std::vector<double>& detunings) {
            DetectionConfig cfg;
            cfg.n_ions = n;
            cfg.probe_a = a;
            cfg.probe_b = b;
            cfg.duration = duration;
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& r : eta_sweep(cfg, detunings)) out.emplace_back(r.detuning, r.eta_full, r.eta_truncated);
            return out;
        },
        py::arg("n_ions"), py::arg("probe_a"), py::arg("probe_b"), py::arg("duration"), py::arg("detunings"));
    m.def(
        "commutator_profile",
        [](int n, int reference, const std::vector<double>& times) {
            return commutator_profile(normal_modes(chain_coupling(n)), reference, times).values;
        },
        py::arg("n_ions"), py::arg("reference"), py::arg("times"));
    m.def(
        "classical_propagation",
        [](int n, int kicked, const std::vector<double>& times) {
            const Trajectory t = classical_propagation(normal_modes(chain_coupling(n)), kicked, times);
            return py::make_tuple(t.displacement, t.energy);
        },
        py::arg("n_ions"), py::arg("kicked"), py::arg("times"));

    m.def("experiment_names", &experiment_names);
    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const ExperimentConfig cfg = config_from_json(Json::parse(config_json));
            ExperimentOutput out;
            {
                py::gil_scoped_release release;
                out = run_experiment(cfg);
            }
            std::map<std::string, py::bytes> files;
            for (const auto& f : out.files) files.emplace(f.name, py::bytes(f.content));
            return py::make_tuple(out.summary.dump(), files);
        },
        py::arg("config_json"));
}
