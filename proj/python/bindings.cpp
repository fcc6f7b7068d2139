#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vwflow/commands.hpp"
#include "vwflow/diagnostics.hpp"
#include "vwflow/errors.hpp"

namespace py = pybind11;
using namespace vwflow;

namespace {

PlaneVec to_vec(const py::handle& h) {
    if (py::isinstance<PlaneVec>(h)) return h.cast<PlaneVec>();
    const auto seq = h.cast<py::sequence>();
    if (py::len(seq) != 2) throw py::value_error("expected a pair (x1, x2)");
    return {seq[0].cast<double>(), seq[1].cast<double>()};
}

py::dict files_dict(const CommandResult& r) {
    py::dict d;
    for (const auto& f : r.files) d[py::str(f.name)] = py::str(f.contents);
    return d;
}

RunOptions options(int threads, std::optional<long> level) { return {threads, level}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lagrangian flows around a point vortex: kernels, flows, vortex-wave runs and diagnostics";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SemanticError>(m, "SemanticError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
    py::register_exception<UnsupportedOperation>(m, "UnsupportedOperation", PyExc_NotImplementedError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    py::class_<PlaneVec>(m, "PlaneVec")
        .def(py::init<double, double>(), py::arg("x1") = 0.0, py::arg("x2") = 0.0)
        .def_readwrite("x1", &PlaneVec::x1)
        .def_readwrite("x2", &PlaneVec::x2)
        .def("__iter__", [](const PlaneVec& v) { return py::iter(py::make_tuple(v.x1, v.x2)); })
        .def("__eq__", [](const PlaneVec& a, const PlaneVec& b) { return a == b; })
        .def("__repr__", [](const PlaneVec& v) {
            return "PlaneVec(" + py::repr(py::float_(v.x1)).cast<std::string>() + ", " +
                   py::repr(py::float_(v.x2)).cast<std::string>() + ")";
        });

    m.def("biot_savart_kernel", [](py::object y) { return biot_savart_kernel(to_vec(y)); }, py::arg("y"));
    m.def("regularized_kernel", [](py::object y, long n) { return regularized_kernel(to_vec(y), RegularizationLevel(n)); },
          py::arg("y"), py::arg("n"));

    py::class_<PointVortexPath>(m, "PointVortexPath")
        .def_static("constant", [](py::object z, double T) { return PointVortexPath::constant(to_vec(z), T); },
                    py::arg("position"), py::arg("horizon"))
        .def_static(
            "from_samples",
            [](std::vector<double> t, std::vector<py::object> z) {
                std::vector<PlaneVec> pts;
                for (const auto& p : z) pts.push_back(to_vec(p));
                return PointVortexPath::from_samples(std::move(t), std::move(pts));
            },
            py::arg("times"), py::arg("positions"))
        .def("at", [](const PointVortexPath& p, double t) { return p.at(t); }, py::arg("t"))
        .def_property_readonly("horizon", &PointVortexPath::horizon)
        .def_property_readonly("lipschitz_bound", &PointVortexPath::lipschitz_bound)
        .def_property_readonly("sup_norm", &PointVortexPath::sup_norm);

    m.def(
        "singular_drift",
        [](double t, py::object x, const PointVortexPath& p) { return singular_drift(t, to_vec(x), p); },
        py::arg("t"), py::arg("x"), py::arg("path"));
    m.def(
        "regularized_drift",
        [](double t, py::object x, const PointVortexPath& p, long n) {
            return regularized_drift(t, to_vec(x), p, RegularizationLevel(n));
        },
        py::arg("t"), py::arg("x"), py::arg("path"), py::arg("n"));

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_readonly("horizon", &Scenario::horizon)
        .def_readonly("dt", &Scenario::dt)
        .def_readonly("output_times", &Scenario::output_times)
        .def_readonly("levels", &Scenario::levels)
        .def_readonly("reference_level", &Scenario::reference_level)
        .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });
    m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));
    m.def("emit_scenario", &emit_scenario, py::arg("scenario"));
    m.def("scenario_hash", &scenario_hash, py::arg("scenario"));

    m.def(
        "integrate",
        [](const Scenario& s, std::optional<long> level, int threads) {
            const auto e = build_ensemble(s);
            const auto f = make_composite(build_smooth_field(s), build_path(s, threads),
                                          RegularizationLevel(level.value_or(s.levels.front())));
            TrajectorySet tr;
            {
                py::gil_scoped_release release;
                tr = integrate_flow(f, e, s.horizon, s.dt, uniform_times(s.horizon, s.output_times), threads,
                                    scenario_hash(s));
            }
            py::list initial, positions;
            for (std::size_t i = 0; i < tr.point_count(); ++i) {
                initial.append(py::make_tuple(e.points[i].x1, e.points[i].x2));
                py::list row;
                for (std::size_t k = 0; k < tr.time_count(); ++k) {
                    const PlaneVec x = tr.position(i, k);
                    row.append(py::make_tuple(x.x1, x.x2));
                }
                positions.append(row);
            }
            py::dict d;
            d["times"] = tr.output_times;
            d["initial"] = initial;
            d["positions"] = positions;
            d["min_distance"] = tr.min_distance;
            d["cell_weight"] = tr.cell_weight;
            return d;
        },
        py::arg("scenario"), py::arg("level") = py::none(), py::arg("threads") = 1);

    m.def(
        "pure_kernel_delta",
        [](long n, long mm, double horizon, double radius) {
            auto v = TimeVaryingField::zero();
            v.already_smooth = true;
            const auto path = PointVortexPath::constant({0, 0}, horizon);
            return delta_l1(make_composite(v, path, RegularizationLevel(n)),
                            make_composite(v, path, RegularizationLevel(mm)), horizon, radius);
        },
        py::arg("n"), py::arg("m"), py::arg("horizon"), py::arg("radius"));

    m.def(
        "induced_velocity",
        [](std::vector<py::object> positions, std::vector<double> weights, double core, py::object x) {
            BlobEnsemble e;
            for (const auto& p : positions) e.positions.push_back(to_vec(p));
            e.weights = std::move(weights);
            e.core = core;
            return induced_velocity(e, to_vec(x));
        },
        py::arg("positions"), py::arg("weights"), py::arg("core"), py::arg("x"));

    py::class_<CommandResult>(m, "CommandResult")
        .def_readonly("exit_code", &CommandResult::exit_code)
        .def_readonly("summary", &CommandResult::summary)
        .def_property_readonly("files", &files_dict);

    auto bind_cmd = [&](const char* name, CommandResult (*fn)(const Scenario&, const RunOptions&)) {
        m.def(
            name,
            [fn](const Scenario& s, int threads, std::optional<long> level) {
                py::gil_scoped_release release;
                return fn(s, options(threads, level));
            },
            py::arg("scenario"), py::arg("threads") = 1, py::arg("level") = py::none());
    };
    bind_cmd("cmd_flow", &cmd_flow);
    bind_cmd("cmd_converge", &cmd_converge);
    bind_cmd("cmd_collision", &cmd_collision);
    bind_cmd("cmd_vortexwave", &cmd_vortexwave);
}
