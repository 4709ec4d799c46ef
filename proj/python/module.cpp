#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "regobs/commands.hpp"
#include "regobs/errors.hpp"
#include "regobs/observer.hpp"
#include "regobs/regional.hpp"
#include "regobs/report.hpp"
#include "regobs/scenario.hpp"
#include "regobs/sensing.hpp"
#include "regobs/spectral.hpp"
#include "regobs/strategic.hpp"

namespace py = pybind11;
using namespace regobs;

namespace {

// Reports are built as JSON internally; hand them to python as text.
std::string run_and_dump(const cli::Json& report) { return report.dump(2); }

cli::CommandOptions quiet_options(const std::string& out_dir) {
    static std::ostringstream sink;
    cli::CommandOptions opts;
    opts.human = &sink;
    sink.str("");
    opts.out_dir = out_dir;
    return opts;
}

} // namespace

PYBIND11_MODULE(_regobs, m) {
    m.doc() = "regional observability analysis for 2D Neumann diffusion systems";

    py::class_<Point>(m, "Point")
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Point::x)
        .def_readwrite("y", &Point::y);

    py::class_<Rectangle>(m, "Rectangle")
        .def(py::init<double, double, double, double>(), py::arg("x_min"), py::arg("x_max"),
             py::arg("y_min"), py::arg("y_max"))
        .def_readonly("x_min", &Rectangle::x_min)
        .def_readonly("x_max", &Rectangle::x_max)
        .def_readonly("y_min", &Rectangle::y_min)
        .def_readonly("y_max", &Rectangle::y_max)
        .def("width", &Rectangle::width)
        .def("height", &Rectangle::height)
        .def("area", &Rectangle::area);

    py::class_<spectral::Mode>(m, "Mode")
        .def(py::init<int, int>(), py::arg("i"), py::arg("j"))
        .def_readwrite("i", &spectral::Mode::x_order)
        .def_readwrite("j", &spectral::Mode::y_order)
        .def("__repr__", [](const spectral::Mode& mode) {
            return "Mode(" + std::to_string(mode.x_order) + ", " +
                   std::to_string(mode.y_order) + ")";
        });

    py::class_<spectral::ModeSet>(m, "ModeSet")
        .def_property_readonly("size", &spectral::ModeSet::size)
        .def_property_readonly("domain", &spectral::ModeSet::domain)
        .def_property_readonly("shift", &spectral::ModeSet::shift)
        .def("mode", &spectral::ModeSet::mode, py::arg("k"))
        .def("eigenvalue", &spectral::ModeSet::mode_eigenvalue, py::arg("k"))
        .def("growth_rate", &spectral::ModeSet::growth_rate, py::arg("k"))
        .def("modes", [](const spectral::ModeSet& s) { return s.modes(); })
        .def("eigenvalues", [](const spectral::ModeSet& s) { return s.eigenvalues(); });

    m.def("eigenvalue", &spectral::eigenvalue, py::arg("domain"), py::arg("mode"));
    m.def("eigenfunction_value", &spectral::eigenfunction_value, py::arg("domain"),
          py::arg("mode"), py::arg("point"));
    m.def("eigenfunction_gradient", &spectral::eigenfunction_gradient, py::arg("domain"),
          py::arg("mode"), py::arg("point"));
    m.def("build_mode_set", &spectral::build_mode_set, py::arg("domain"), py::arg("order_x"),
          py::arg("order_y"), py::arg("shift") = 0.0);

    // sensors and profiles
    py::class_<sensing::UniformProfile>(m, "UniformProfile").def(py::init<>());
    py::class_<sensing::TriangleProfile>(m, "TriangleProfile")
        .def(py::init([](double cx, double cy) {
                 return sensing::TriangleProfile{{cx, cy}};
             }),
             py::arg("cx"), py::arg("cy"))
        .def_readwrite("peak", &sensing::TriangleProfile::peak);
    py::class_<sensing::TabulatedProfile>(m, "TabulatedProfile")
        .def(py::init([](std::size_t rows, std::size_t cols, std::vector<double> values) {
                 sensing::TabulatedProfile p{rows, cols, std::move(values)};
                 p.validate();
                 return p;
             }),
             py::arg("rows"), py::arg("cols"), py::arg("values"));

    py::class_<sensing::InteriorPointSensor>(m, "InteriorPointSensor")
        .def(py::init([](double x, double y) {
                 return sensing::InteriorPointSensor{{x, y}};
             }),
             py::arg("x"), py::arg("y"))
        .def_readwrite("location", &sensing::InteriorPointSensor::location);
    py::class_<sensing::BoundaryPointSensor>(m, "BoundaryPointSensor")
        .def(py::init([](double x, double y) {
                 return sensing::BoundaryPointSensor{{x, y}};
             }),
             py::arg("x"), py::arg("y"));
    py::class_<sensing::InteriorZoneSensor>(m, "InteriorZoneSensor")
        .def(py::init([](const Rectangle& support, const sensing::Profile& profile) {
                 return sensing::InteriorZoneSensor{support, profile};
             }),
             py::arg("support"), py::arg("profile") = sensing::Profile{});
    py::class_<sensing::BoundaryZoneSensor>(m, "BoundaryZoneSensor")
        .def(py::init([](const Point& a, const Point& b, const sensing::Profile& profile) {
                 return sensing::BoundaryZoneSensor{a, b, profile};
             }),
             py::arg("start"), py::arg("end"), py::arg("profile") = sensing::Profile{});
    py::class_<sensing::FilamentSensor>(m, "FilamentSensor")
        .def(py::init([](std::vector<Point> polyline, const sensing::Profile& weight) {
                 return sensing::FilamentSensor{std::move(polyline), weight};
             }),
             py::arg("polyline"), py::arg("weight") = sensing::Profile{});

    m.def("sensor_coefficient", &sensing::sensor_coefficient, py::arg("sensor"),
          py::arg("mode"), py::arg("basis_domain"));
    m.def(
        "build_output_matrix",
        [](const std::vector<sensing::SensorSpec>& sensors, const spectral::ModeSet& modes) {
            return sensing::build_output_matrix(sensors, modes).coefficients;
        },
        py::arg("sensors"), py::arg("modes"));
    m.def("validate_sensor", &sensing::validate_sensor, py::arg("sensor"), py::arg("domain"));

    // strategic analysis
    py::class_<strategic::SlowSpec>(m, "SlowSpec")
        .def_static("groups", &strategic::SlowSpec::groups, py::arg("count"))
        .def_static("threshold", &strategic::SlowSpec::threshold, py::arg("sigma_min"));

    py::class_<strategic::GroupDiagnostics>(m, "GroupDiagnostics")
        .def_readonly("eigenvalue", &strategic::GroupDiagnostics::eigenvalue)
        .def_readonly("multiplicity", &strategic::GroupDiagnostics::multiplicity)
        .def_readonly("rank", &strategic::GroupDiagnostics::rank)
        .def_readonly("smallest_singular_value",
                      &strategic::GroupDiagnostics::smallest_singular_value)
        .def_readonly("vanishing_members", &strategic::GroupDiagnostics::vanishing_members);

    py::class_<strategic::StrategicReport>(m, "StrategicReport")
        .def_readonly("sensor_count", &strategic::StrategicReport::sensor_count)
        .def_readonly("slow_group_count", &strategic::StrategicReport::slow_group_count)
        .def_readonly("max_multiplicity", &strategic::StrategicReport::max_multiplicity)
        .def_readonly("strategic", &strategic::StrategicReport::strategic)
        .def_readonly("margin", &strategic::StrategicReport::margin)
        .def_readonly("groups", &strategic::StrategicReport::groups);

    m.def(
        "check_strategic",
        [](const std::vector<sensing::SensorSpec>& sensors, const spectral::ModeSet& modes,
           const strategic::SlowSpec& slow, double rank_tol) {
            return strategic::check_strategic(sensors, modes, slow, rank_tol);
        },
        py::arg("sensors"), py::arg("modes"), py::arg("slow"), py::arg("rank_tol") = 1e-10);
    m.def(
        "observability_margin",
        [](const std::vector<sensing::SensorSpec>& sensors, const spectral::ModeSet& modes,
           std::size_t slow_mode_count, double horizon) {
            return strategic::observability_margin(sensors, modes, slow_mode_count, horizon);
        },
        py::arg("sensors"), py::arg("modes"), py::arg("slow_mode_count"), py::arg("horizon"));
    m.def(
        "placement_predicate_point",
        [](const Rectangle& domain, double x, double y, int max_i, int max_j) {
            const auto verdict =
                strategic::placement_predicate_point(domain, {x, y}, max_i, max_j);
            std::vector<std::tuple<int, int, int>> flagged;
            for (const auto& f : verdict.vanishing_modes)
                flagged.emplace_back(f.mode.x_order, f.mode.y_order, f.axis);
            return flagged;
        },
        py::arg("domain"), py::arg("x"), py::arg("y"), py::arg("max_i"), py::arg("max_j"));

    // observers
    py::class_<observer::ModalSystem>(m, "ModalSystem")
        .def_readonly("growth_rates", &observer::ModalSystem::growth_rates)
        .def_readonly("output_matrix", &observer::ModalSystem::output_matrix)
        .def_readonly("input_matrix", &observer::ModalSystem::input_matrix)
        .def_readonly("slow_count", &observer::ModalSystem::slow_count);

    m.def(
        "make_modal_system",
        [](const spectral::ModeSet& modes, const std::vector<sensing::SensorSpec>& sensors,
           const strategic::SlowSpec& slow) {
            return observer::make_modal_system(modes, sensors, slow);
        },
        py::arg("modes"), py::arg("sensors"), py::arg("slow"));

    py::class_<observer::EstimatorOperators>(m, "EstimatorOperators")
        .def_readonly("state_map", &observer::EstimatorOperators::state_map)
        .def_readonly("dynamics", &observer::EstimatorOperators::dynamics)
        .def_readonly("injection", &observer::EstimatorOperators::injection)
        .def_readonly("input_map", &observer::EstimatorOperators::input_map)
        .def_readonly("from_output", &observer::EstimatorOperators::from_output)
        .def_readonly("from_state", &observer::EstimatorOperators::from_state);

    py::class_<observer::EstimatorResiduals>(m, "EstimatorResiduals")
        .def_readonly("reconstruction", &observer::EstimatorResiduals::reconstruction)
        .def_readonly("intertwining", &observer::EstimatorResiduals::intertwining)
        .def_readonly("input", &observer::EstimatorResiduals::input);

    m.def(
        "design_gain_riccati",
        [](const observer::ModalSystem& system, double rho) {
            return observer::design_gain(system, observer::RiccatiGain{rho});
        },
        py::arg("system"), py::arg("rho"));
    m.def(
        "design_gain_shift",
        [](const observer::ModalSystem& system, double sigma_star) {
            return observer::design_gain(system, observer::RateShiftGain{sigma_star});
        },
        py::arg("system"), py::arg("sigma_star"));
    m.def("build_identity_estimator", &observer::build_identity_estimator, py::arg("system"),
          py::arg("injection"));
    m.def("build_general_estimator", &observer::build_general_estimator, py::arg("system"),
          py::arg("rates"), py::arg("injection"));
    m.def("verify_estimator_conditions", &observer::verify_estimator_conditions,
          py::arg("estimator"), py::arg("system"));

    py::class_<observer::TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("times", &observer::TrajectoryRecord::times)
        .def_readonly("states", &observer::TrajectoryRecord::states)
        .def_readonly("observers", &observer::TrajectoryRecord::observers)
        .def_readonly("estimates", &observer::TrajectoryRecord::estimates)
        .def_readonly("outputs", &observer::TrajectoryRecord::outputs);

    m.def(
        "simulate",
        [](const observer::ModalSystem& system, const observer::EstimatorOperators& ops,
           const Eigen::VectorXd& z0, const Eigen::VectorXd& w0, double t_final, double dt) {
            return observer::simulate(system, ops, z0, w0, {}, t_final, dt);
        },
        py::arg("system"), py::arg("estimator"), py::arg("z0"), py::arg("w0"),
        py::arg("t_final"), py::arg("dt"));

    // regional norms and fits
    py::enum_<regional::NormKind>(m, "NormKind")
        .value("L2", regional::NormKind::L2)
        .value("H1", regional::NormKind::H1);

    py::class_<regional::DecayFit>(m, "DecayFit")
        .def_readonly("sigma", &regional::DecayFit::sigma)
        .def_readonly("amplitude", &regional::DecayFit::amplitude)
        .def_readonly("rms_residual", &regional::DecayFit::rms_residual);

    m.def(
        "field_norm",
        [](const spectral::ModeSet& modes, const Eigen::VectorXd& coeffs,
           const Rectangle& region, regional::NormKind kind) {
            return regional::field_norm(modes, coeffs, region, kind);
        },
        py::arg("modes"), py::arg("coeffs"), py::arg("region"), py::arg("kind"));
    m.def(
        "fit_decay",
        [](const std::vector<double>& times, const std::vector<double>& values,
           double window_fraction) {
            return regional::fit_decay(times, values, window_fraction);
        },
        py::arg("times"), py::arg("values"), py::arg("window_fraction") = 0.2);
    m.def(
        "error_floor",
        [](const std::vector<double>& values, double tail_fraction) {
            return regional::error_floor(values, tail_fraction);
        },
        py::arg("values"), py::arg("tail_fraction") = 0.2);
    m.def(
        "projection_matrix",
        [](const spectral::ModeSet& global_modes,
           const std::vector<spectral::Mode>& regional_modes, const Rectangle& region) {
            return regional::projection_matrix(global_modes, regional_modes, region);
        },
        py::arg("global_modes"), py::arg("regional_modes"), py::arg("region"));

    // scenario front end: reports come back as JSON text
    m.def("builtin_counterexample_config", []() {
        return cli::serialize_scenario(cli::builtin_counterexample_scenario());
    });
    m.def(
        "run_check",
        [](const std::string& config, const std::string& out_dir) {
            return run_and_dump(cli::cmd_check(cli::parse_scenario(config),
                                               quiet_options(out_dir)));
        },
        py::arg("config"), py::arg("out_dir") = std::string());
    m.def(
        "run_simulate",
        [](const std::string& config, const std::string& out_dir) {
            return run_and_dump(cli::cmd_simulate(cli::parse_scenario(config),
                                                  quiet_options(out_dir)));
        },
        py::arg("config"), py::arg("out_dir") = std::string());
    m.def(
        "run_scan",
        [](const std::string& config, const std::string& out_dir) {
            return run_and_dump(cli::cmd_scan(cli::parse_scenario(config),
                                              quiet_options(out_dir)));
        },
        py::arg("config"), py::arg("out_dir") = std::string());
    m.def(
        "run_verify",
        [](const std::string& config, const std::string& out_dir) {
            return run_and_dump(cli::cmd_verify(cli::parse_scenario(config),
                                                quiet_options(out_dir)));
        },
        py::arg("config"), py::arg("out_dir") = std::string());
    m.def(
        "run_counterexample",
        [](const std::optional<std::string>& config, const std::string& out_dir) {
            std::optional<cli::Scenario> scenario;
            if (config) scenario = cli::parse_scenario(*config);
            return run_and_dump(cli::cmd_counterexample(scenario, quiet_options(out_dir)));
        },
        py::arg("config") = std::nullopt, py::arg("out_dir") = std::string());

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalFailure", PyExc_RuntimeError);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = cli::kToolVersion;
#endif
}
