#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <vector>

#include "moralecon/econ_core.hpp"
#include "moralecon/engine.hpp"
#include "moralecon/errors.hpp"
#include "moralecon/export.hpp"
#include "moralecon/interactions.hpp"
#include "moralecon/metrics.hpp"
#include "moralecon/sweep.hpp"

namespace py = pybind11;
using namespace moralecon;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) {
        throw ValidationError("expected a one-dimensional array");
    }
    return {a.data(), a.data() + a.size()};
}

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Agent-based growth economy with redistribution and consumption thresholds.";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
    auto& simulation_error =
        py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
    py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
    // A failed sweep cell surfaces as SimulationError too.
    static PyObject* simulation_type = simulation_error.ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const CellFailure& e) {
            py::set_error(py::handle(simulation_type), e.what());
        }
    });

    py::class_<EconomyParams>(m, "EconomyParams")
        .def(py::init<>())
        .def_readwrite("alpha", &EconomyParams::alpha)
        .def_readwrite("delta", &EconomyParams::delta)
        .def_readwrite("rho", &EconomyParams::rho)
        .def_readwrite("theta", &EconomyParams::theta)
        .def_readwrite("gamma0", &EconomyParams::gamma0)
        .def("validate", &EconomyParams::validate);

    py::class_<SaddlePoint>(m, "SaddlePoint")
        .def_readonly("k_star", &SaddlePoint::k_star)
        .def_readonly("c_star", &SaddlePoint::c_star)
        .def_readonly("gamma", &SaddlePoint::gamma);

    py::class_<AdjustmentSpeed>(m, "AdjustmentSpeed")
        .def_readonly("mu", &AdjustmentSpeed::mu)
        .def_readonly("beta", &AdjustmentSpeed::beta);

    m.def("saddle_capital", &saddle_capital, py::arg("params"), py::arg("gamma"));
    m.def("saddle_consumption", &saddle_consumption, py::arg("params"), py::arg("k_star"),
          py::arg("gamma"));
    m.def("knowledge_rate_for_capital", &knowledge_rate_for_capital, py::arg("params"),
          py::arg("k_star"));
    m.def("initial_saddle", &initial_saddle, py::arg("params"));
    m.def("saddle_for_capital", &saddle_for_capital, py::arg("params"), py::arg("k_star"));
    m.def("adjustment_speed", &adjustment_speed, py::arg("params"), py::arg("k_star"),
          py::arg("c_star"), py::arg("gamma"));
    m.def("utility_increment", &utility_increment, py::arg("c"), py::arg("theta"), py::arg("beta"),
          py::arg("t"), py::arg("t_event"), py::arg("dt"));

    py::class_<BusinessParams>(m, "BusinessParams")
        .def(py::init<>())
        .def_readwrite("savings_rate", &BusinessParams::savings_rate)
        .def_readwrite("profit_width", &BusinessParams::profit_width)
        .def_readwrite("pairs", &BusinessParams::pairs)
        .def_readwrite("period_days", &BusinessParams::period_days);

    py::enum_<RedistTiming>(m, "RedistTiming")
        .value("OFFSET_PERIOD", RedistTiming::kOffsetPeriod)
        .value("EXTENDED_PERIOD", RedistTiming::kExtendedPeriod);

    py::class_<RedistSchedule>(m, "RedistSchedule")
        .def(py::init<>())
        .def_readwrite("period_years", &RedistSchedule::period_years)
        .def_readwrite("start_years", &RedistSchedule::start_years)
        .def_readwrite("timing", &RedistSchedule::timing);

    m.def("joint_business", &joint_business, py::arg("k_i"), py::arg("k_j"), py::arg("savings_rate"),
          py::arg("eps"));
    m.def(
        "redistribute",
        [](const Array& k, double k_th) { return to_array(redistribute(to_vector(k), k_th)); },
        py::arg("k"), py::arg("k_th"));

    py::class_<ScheduleConfig>(m, "ScheduleConfig")
        .def(py::init<>())
        .def_readwrite("agents", &ScheduleConfig::agents)
        .def_readwrite("horizon_years", &ScheduleConfig::horizon_years)
        .def_readwrite("seed", &ScheduleConfig::seed);

    py::enum_<CapitalDrift>(m, "CapitalDrift")
        .value("ACCUMULATE", CapitalDrift::kAccumulate)
        .value("SINGLE_STEP", CapitalDrift::kSingleStep);

    py::class_<ModelConfig>(m, "ModelConfig")
        .def(py::init<>())
        .def_readwrite("economy", &ModelConfig::economy)
        .def_readwrite("business", &ModelConfig::business)
        .def_readwrite("redistribution", &ModelConfig::redistribution)
        .def_readwrite("schedule", &ModelConfig::schedule)
        .def_readwrite("capital_drift", &ModelConfig::capital_drift)
        .def("validate", &ModelConfig::validate);

    py::class_<MoralParams>(m, "MoralParams")
        .def(py::init<>())
        .def(py::init([](double k_th, double c_th) { return MoralParams{k_th, c_th}; }),
             py::arg("k_th"), py::arg("c_th"))
        .def_readwrite("k_th", &MoralParams::k_th)
        .def_readwrite("c_th", &MoralParams::c_th);

    py::class_<RunResult>(m, "RunResult")
        .def_property_readonly("final_k", [](const RunResult& r) { return to_array(r.final_k); })
        .def_property_readonly("final_c", [](const RunResult& r) { return to_array(r.final_c); })
        .def_property_readonly("final_u", [](const RunResult& r) { return to_array(r.final_u); })
        .def_readonly("k_med", &RunResult::k_med)
        .def_readonly("u_med", &RunResult::u_med)
        .def_readonly("g_k", &RunResult::g_k)
        .def_readonly("g_u", &RunResult::g_u)
        .def_readonly("balance", &RunResult::balance);

    m.def(
        "run",
        [](const ModelConfig& config, const MoralParams& morals) {
            py::gil_scoped_release release;
            return run(config, morals);
        },
        py::arg("config"), py::arg("morals"),
        "Simulate one threshold cell from day 0 to the horizon.");

    m.def(
        "gini", [](const Array& v) { return gini(to_vector(v)); }, py::arg("values"));
    m.def(
        "median", [](const Array& v) { return median(to_vector(v)); }, py::arg("values"));
    m.def("balance_index", &balance_index, py::arg("u_med"), py::arg("g_k"));

    py::class_<GaussSurfaceFit>(m, "GaussSurfaceFit")
        .def_readonly("amplitude", &GaussSurfaceFit::amplitude)
        .def_readonly("offset", &GaussSurfaceFit::offset)
        .def_readonly("x_center", &GaussSurfaceFit::x_center)
        .def_readonly("y_center", &GaussSurfaceFit::y_center)
        .def_readonly("x_curvature", &GaussSurfaceFit::x_curvature)
        .def_readonly("y_curvature", &GaussSurfaceFit::y_curvature)
        .def_readonly("r_squared", &GaussSurfaceFit::r_squared)
        .def_readonly("iterations", &GaussSurfaceFit::iterations)
        .def("__call__", &GaussSurfaceFit::operator(), py::arg("k_th"), py::arg("c_th"));

    m.def(
        "fit_gauss_surface",
        [](const Array& k_th, const Array& c_th, const Array& value) {
            const auto k = to_vector(k_th);
            const auto c = to_vector(c_th);
            const auto v = to_vector(value);
            if (k.size() != c.size() || k.size() != v.size()) {
                throw ValidationError("k_th, c_th and value must have the same length");
            }
            std::vector<SurfacePoint> pts;
            for (std::size_t i = 0; i < k.size(); ++i) {
                pts.push_back({k[i], c[i], v[i]});
            }
            return fit_gauss_surface(pts);
        },
        py::arg("k_th"), py::arg("c_th"), py::arg("value"));

    py::class_<LinearFit>(m, "LinearFit")
        .def_readonly("slope", &LinearFit::slope)
        .def_readonly("intercept", &LinearFit::intercept)
        .def_readonly("p_value", &LinearFit::p_value)
        .def_readonly("r_squared", &LinearFit::r_squared)
        .def_readonly("n", &LinearFit::n);

    m.def(
        "fit_linear",
        [](const Array& x, const Array& y) {
            const auto xs = to_vector(x);
            const auto ys = to_vector(y);
            if (xs.size() != ys.size()) {
                throw ValidationError("x and y must have the same length");
            }
            std::vector<Point2> pts;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                pts.push_back({xs[i], ys[i]});
            }
            return fit_linear(pts);
        },
        py::arg("x"), py::arg("y"));

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("k_th", &SweepRow::k_th)
        .def_readonly("c_th", &SweepRow::c_th)
        .def_readonly("seed", &SweepRow::seed)
        .def_readonly("k_med", &SweepRow::k_med)
        .def_readonly("u_med", &SweepRow::u_med)
        .def_readonly("g_k", &SweepRow::g_k)
        .def_readonly("g_u", &SweepRow::g_u)
        .def_readonly("balance", &SweepRow::balance);

    py::class_<OutputOptions>(m, "OutputOptions")
        .def_readwrite("dir", &OutputOptions::dir)
        .def_readwrite("summary", &OutputOptions::summary)
        .def_readwrite("histograms", &OutputOptions::histograms)
        .def_readwrite("traces", &OutputOptions::traces)
        .def_readwrite("surfaces", &OutputOptions::surfaces)
        .def_readwrite("fit_report", &OutputOptions::fit_report)
        .def_readwrite("svg", &OutputOptions::svg)
        .def_readwrite("trace_agents", &OutputOptions::trace_agents)
        .def_readwrite("histogram_years", &OutputOptions::histogram_years);

    py::class_<SweepConfig>(m, "SweepConfig")
        .def(py::init(&baseline_config))
        .def_readwrite("model", &SweepConfig::model)
        .def_readwrite("k_th_grid", &SweepConfig::k_th_grid)
        .def_readwrite("c_th_grid", &SweepConfig::c_th_grid)
        .def_readwrite("seeds", &SweepConfig::seeds)
        .def_readwrite("outputs", &SweepConfig::outputs)
        .def("validate", &SweepConfig::validate);

    m.def("baseline_config", &baseline_config);
    m.def("parse_config", &parse_config, py::arg("path_or_preset"));
    m.def("parse_config_text", &parse_config_text, py::arg("json_text"));
    m.def(
        "run_sweep",
        [](const SweepConfig& config, int threads) {
            SweepOutcome out;
            {
                py::gil_scoped_release release;
                out = run_sweep(config, threads);
            }
            return out.table;
        },
        py::arg("config"), py::arg("threads") = 1,
        "Run every (k_th, c_th, seed) task; rows come back in lexical order.");
    m.def("write_results_csv", &write_results_csv, py::arg("table"), py::arg("path"));
    m.def("read_results_csv", &read_results_csv, py::arg("path"));
}
