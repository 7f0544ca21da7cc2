#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hybridsm/harness.hpp"
#include "hybridsm/precoders.hpp"
#include "hybridsm/sdp.hpp"
#include "hybridsm/secrecy.hpp"
#include "hybridsm/tass.hpp"

namespace py = pybind11;
using namespace hsm;

namespace {

ChannelPair make_channels(const SystemConfig& cfg, const CMatrix& h, const CMatrix& g) {
    if (h.rows() != cfg.n_b || h.cols() != cfg.n_total() || g.rows() != cfg.n_e ||
        g.cols() != cfg.n_total()) {
        throw std::invalid_argument("channel shapes must be (n_b, n_aa*n_rf) and (n_e, n_aa*n_rf)");
    }
    return ChannelPair{h, g, cfg.n_aa};
}

PrecoderResult run_precoder_named(const Instance& inst, const std::string& name) {
    switch (precoder_from_string(name)) {
        case PrecoderKind::MaxAsrGa: return max_asr_ga(inst);
        case PrecoderKind::MaxAsrAdmm: return max_asr_admm(inst);
        case PrecoderKind::SdrAltMin: return sdr_altmin(inst);
    }
    throw std::invalid_argument("unknown precoder");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "secure hybrid spatial modulation: precoding, TASS and secrecy metrics";

    py::register_exception<DegenerateProjectorError>(m, "DegenerateProjectorError");
    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<RunFailure>(m, "RunFailure");

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("n_rf", &SystemConfig::n_rf)
        .def_readwrite("n_aa", &SystemConfig::n_aa)
        .def_readwrite("n_t", &SystemConfig::n_t)
        .def_readwrite("n_b", &SystemConfig::n_b)
        .def_readwrite("n_e", &SystemConfig::n_e)
        .def_readwrite("m", &SystemConfig::m)
        .def_readwrite("beta", &SystemConfig::beta)
        .def_readwrite("p_total", &SystemConfig::p_total)
        .def_readwrite("sigma2_b", &SystemConfig::sigma2_b)
        .def_readwrite("sigma2_e", &SystemConfig::sigma2_e)
        .def("set_snr_db", &SystemConfig::set_snr_db)
        .def("snr_db", &SystemConfig::snr_db)
        .def("validate", &SystemConfig::validate)
        .def_static("derive_n_t", &SystemConfig::derive_n_t);

    py::class_<Instance>(m, "Instance")
        .def_property_readonly("composite", [](const Instance& i) { return i.prec.p; })
        .def_property_readonly("f_rf", [](const Instance& i) { return i.prec.f_rf; })
        .def_property_readonly("f_bb", [](const Instance& i) { return i.prec.f_bb; })
        .def_property_readonly("t_bb", [](const Instance& i) { return i.an.t_bb; })
        .def_property_readonly("omega_b", [](const Instance& i) { return i.whit.omega_b; })
        .def_property_readonly("omega_e", [](const Instance& i) { return i.whit.omega_e; })
        .def_property_readonly("w_b", [](const Instance& i) { return i.comb.w_b; })
        .def_property_readonly("w_e", [](const Instance& i) { return i.comb.w_e; })
        .def_property_readonly("h", [](const Instance& i) { return i.ch.h; })
        .def_property_readonly("g", [](const Instance& i) { return i.ch.g; })
        .def_property_readonly("selected",
                               [](const Instance& i) { return i.sel.indices; });

    py::class_<TassScorecard>(m, "TassScorecard")
        .def_property_readonly("method",
                               [](const TassScorecard& c) { return to_string(c.method); })
        .def_readonly("scores", &TassScorecard::scores)
        .def_readonly("subsets", &TassScorecard::subsets)
        .def_readonly("flops_estimate", &TassScorecard::flops_estimate)
        .def_property_readonly("chosen",
                               [](const TassScorecard& c) { return c.chosen.indices; });

    py::class_<SrEstimate>(m, "SrEstimate")
        .def_readonly("asr", &SrEstimate::asr)
        .def_readonly("sr_exact", &SrEstimate::sr_exact)
        .def_readonly("std_err", &SrEstimate::std_err)
        .def_readonly("n_noise_samples", &SrEstimate::n_noise_samples);

    // numerics
    m.def("svd", [](const CMatrix& a) {
        const SvdResult r = svd(a);
        return py::make_tuple(r.u, r.sigma, r.v);
    });
    m.def("pinv", &pinv);
    m.def("inv_sqrt_hermitian", &inv_sqrt_hermitian);
    m.def("kron", &kron);
    m.def("sample_complex_gaussian",
          [](Eigen::Index rows, Eigen::Index cols, double variance, std::uint64_t seed) {
              Rng rng(seed);
              return rng.complex_gaussian(rows, cols, variance);
          },
          py::arg("rows"), py::arg("cols"), py::arg("variance") = 1.0, py::arg("seed") = 1);

    // model
    m.def(
        "draw_channels",
        [](const SystemConfig& cfg, std::uint64_t seed) {
            Rng rng(seed);
            const ChannelPair ch = draw_channels(cfg, rng);
            return py::make_tuple(ch.h, ch.g);
        },
        py::arg("cfg"), py::arg("seed") = 1);
    m.def(
        "constellation",
        [](int order) {
            const Constellation c = build_constellation(order);
            return c.symbols;
        },
        py::arg("order"));
    m.def("build_instance",
          [](const SystemConfig& cfg, const CMatrix& h, const CMatrix& g,
             const std::vector<int>& selected) {
              const ChannelPair ch = make_channels(cfg, h, g);
              return build_svd_instance(cfg, ch, build_selection(selected, cfg));
          },
          "Instance around the SVD-initialized precoder", py::arg("cfg"), py::arg("h"),
          py::arg("g"), py::arg("selected"));

    // secrecy
    m.def("asr", [](const Instance& inst) { return asr(build_asr_context(inst)); });
    m.def("cutoff_rates", [](const Instance& inst) {
        const AsrContext ctx = build_asr_context(inst);
        return py::make_tuple(cutoff_rate(ctx, Side::Bob), cutoff_rate(ctx, Side::Eve));
    });
    m.def("exact_sr_monte_carlo",
          [](const Instance& inst, int n_noise, std::uint64_t seed) {
              Rng rng(seed);
              return exact_sr_monte_carlo(inst, n_noise, rng);
          },
          py::arg("instance"), py::arg("n_noise") = 1000, py::arg("seed") = 1);
    m.def("sinr_ansnr", &sinr_ansnr);
    m.def("slnr", &slnr);
    m.def(
        "ml_detect",
        [](const Instance& inst, const CVector& y_b) {
            return ml_detect(y_b, inst.tx, inst.comb, inst.ch, inst.cfg);
        },
        "Maximum-likelihood (subarray, symbol) decision from the combined observation",
        py::arg("instance"), py::arg("y_b"));

    // precoders
    m.def("run_precoder",
          [](const Instance& inst, const std::string& name) {
              const PrecoderResult r = run_precoder_named(inst, name);
              std::vector<double> objectives;
              objectives.reserve(r.log.size());
              for (const auto& rec : r.log) {
                  objectives.push_back(rec.objective);
              }
              const Instance refreshed =
                  build_instance(inst.cfg, inst.ch, inst.sel, r.precoder);
              return py::make_tuple(refreshed, objectives);
          },
          "Optimize the precoder; returns (instance at the new precoder, objective log)",
          py::arg("instance"), py::arg("name"));

    // TASS
    m.def("run_tass",
          [](const SystemConfig& cfg, const CMatrix& h, const CMatrix& g,
             const std::string& method, std::uint64_t seed) {
              Rng rng(seed);
              return run_tass(tass_from_string(method), cfg, make_channels(cfg, h, g), rng);
          },
          py::arg("cfg"), py::arg("h"), py::arg("g"), py::arg("method"), py::arg("seed") = 1);
    m.def("flops_estimate", [](const std::string& method, const SystemConfig& cfg) {
        return flops_estimate(tass_from_string(method), cfg);
    });

    // harness
    m.def("parse_config_text",
          [](const std::string& text) { return parse_config_text(text, "<python>"); });
    m.def("serialize_config", &serialize_config);
    m.def("run_sweep", [](const ExperimentSpec& spec) {
        const auto records = run_sweep(spec);
        py::list rows;
        for (const auto& r : records) {
            py::dict row;
            row["snr_db"] = r.snr_db;
            row["precoder"] = r.precoder;
            row["tass"] = r.tass;
            row["mean_asr"] = r.mean_asr;
            row["mean_sr_mc"] = r.mean_sr_mc;
            row["std_err"] = r.std_err;
            row["n_draws"] = r.n_draws;
            row["n_failed"] = r.n_failed;
            row["draw_sr"] = r.draw_sr;
            row["draw_asr"] = r.draw_asr;
            row["draw_subset"] = r.draw_subset;
            rows.append(row);
        }
        return rows;
    });

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("cfg", &ExperimentSpec::cfg)
        .def_property(
            "precoder",
            [](const ExperimentSpec& s) { return to_string(s.precoder); },
            [](ExperimentSpec& s, const std::string& v) { s.precoder = precoder_from_string(v); })
        .def_property(
            "tass", [](const ExperimentSpec& s) { return to_string(s.tass); },
            [](ExperimentSpec& s, const std::string& v) { s.tass = tass_from_string(v); })
        .def_readwrite("snr_grid_db", &ExperimentSpec::snr_grid_db)
        .def_readwrite("n_channel_draws", &ExperimentSpec::n_channel_draws)
        .def_readwrite("n_noise_samples", &ExperimentSpec::n_noise_samples)
        .def_readwrite("seed", &ExperimentSpec::seed)
        .def_readwrite("output_path", &ExperimentSpec::output_path)
        .def_readwrite("threads", &ExperimentSpec::threads);
}
