#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <sstream>

#include "hbem/driver.hpp"
#include "hbem/specfun.hpp"

namespace py = pybind11;
using namespace hbem;

namespace {

py::dict level_dict(const LevelReport& r) {
    py::dict d;
    d["level"] = r.level;
    d["M"] = r.M;
    d["h_max"] = r.h_max;
    d["h_min"] = r.h_min;
    d["eta_tilde"] = r.eta_tilde;
    d["marked"] = r.marked;
    d["e1_hat"] = r.e1_hat;
    d["e2_hat"] = r.e2_hat;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hbem, m) {
    m.doc() = "Adaptive Galerkin BEM for transmission problems with hyperbolic media";
    m.attr("__version__") = version;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("branch_sqrt", &specfun::branch_sqrt, py::arg("z"));
    m.def("hankel1_0", &specfun::hankel1_0, py::arg("z"));
    m.def("hankel1_1", &specfun::hankel1_1, py::arg("z"));

    m.def(
        "half_cone_angle", [](cplx eps1, cplx eps2) { return half_cone_angle(MaterialPair(eps1, eps2)); },
        py::arg("eps1"), py::arg("eps2"));

    m.def(
        "kernel",
        [](std::pair<double, double> x, std::pair<double, double> y, cplx eps1, cplx eps2, double k0) {
            return phi({x.first, x.second}, {y.first, y.second}, KernelContext(MaterialPair(eps1, eps2), k0));
        },
        py::arg("x"), py::arg("y"), py::arg("eps1"), py::arg("eps2"), py::arg("k0"),
        "Fundamental solution Phi(x, y) of one medium.");

    m.def("example_config", &example_config_text, py::arg("k"), "Config text of example k (1..5).");
    m.def(
        "normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("text"), "Parse config text and return its canonical form with every key.");

    m.def(
        "run",
        [](const std::string& text, const std::filesystem::path& out, std::optional<int> levels, bool serial,
           bool field, bool reference, bool verbose) {
            const ProblemConfig cfg = parse_config(text);
            RunOptions opt;
            opt.serial = serial;
            opt.levels = levels;
            opt.out = out;
            opt.field = field;
            opt.reference = reference;
            std::ostringstream quiet;
            RunSummary s;
            {
                py::gil_scoped_release release;
                s = run_problem(cfg, opt, verbose ? std::cerr : quiet);
            }
            py::list reports;
            for (const auto& r : s.reports) reports.append(level_dict(r));
            return reports;
        },
        py::arg("config"), py::arg("out"), py::arg("levels") = py::none(), py::arg("serial") = true,
        py::arg("field") = true, py::arg("reference") = true, py::arg("verbose") = false,
        "Run the adaptive solver on config text, write outputs into `out`, return the per-level reports.");
}
