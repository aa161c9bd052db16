#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "diraclab/config.hpp"
#include "diraclab/errors.hpp"
#include "diraclab/evolve.hpp"
#include "diraclab/functionals.hpp"
#include "diraclab/oracles.hpp"
#include "diraclab/runner.hpp"
#include "diraclab/stability.hpp"

namespace py = pybind11;
using namespace diraclab;

namespace {

py::array_t<cplx> to_array(const std::vector<cplx> &w)
{
    py::array_t<cplx> a(static_cast<py::ssize_t>(w.size()));
    std::copy(w.begin(), w.end(), a.mutable_data());
    return a;
}

std::vector<cplx> from_array(const py::array_t<cplx, py::array::c_style | py::array::forcecast> &a)
{
    if (a.ndim() != 1) throw py::value_error("expected a 1-d complex array");
    return {a.data(), a.data() + a.size()};
}

py::dict record_dict(const FunctionalRecord &r)
{
    py::dict d;
    d["t"] = r.t;
    d["L0"] = r.L0;
    d["Q0"] = r.Q0;
    d["D0"] = r.D0;
    d["int_D0"] = r.int_D0;
    d["bony_budget"] = r.bony_budget;
    d["bony_residual"] = r.bony_residual;
    d["gammaR"] = r.gammaR;
    d["gammaL"] = r.gammaL;
    d["q_bound"] = r.q_bound;
    d["linf_sq"] = r.linf_sq;
    d["linf_envelope"] = r.linf_envelope;
    d["h1_semi"] = r.h1_semi;
    return d;
}

py::dict pair_record_dict(const PairRecord &r)
{
    py::dict d;
    d["t"] = r.t;
    d["L1"] = r.L1;
    d["Q1"] = r.Q1;
    d["D1"] = r.D1;
    d["int_D1"] = r.int_D1;
    d["lyapunov"] = r.lyapunov;
    d["h3"] = r.h3;
    d["h3_closed"] = r.h3_closed;
    d["h4"] = r.h4;
    d["K"] = r.K;
    d["bound_residual"] = r.bound_residual;
    d["growth"] = r.growth;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Core of the nonlinear Dirac laboratory";
    m.attr("__version__") = std::string(version());

    auto base = py::register_exception<error>(m, "DiraclabError", PyExc_RuntimeError);
    py::register_exception<configuration_error>(m, "ConfigurationError", base.ptr());
    py::register_exception<model_rejected>(m, "ModelRejected", base.ptr());
    py::register_exception<numerical_degeneracy>(m, "NumericalDegeneracy", base.ptr());
    py::register_exception<domain_too_small>(m, "DomainTooSmall", base.ptr());
    py::register_exception<numerical_abort>(m, "NumericalAbort", base.ptr());

    py::enum_<Preset>(m, "Preset")
        .value("thirring", Preset::thirring)
        .value("gross_neveu", Preset::gross_neveu)
        .value("custom", Preset::custom);
    py::enum_<Status>(m, "Status")
        .value("pass_", Status::pass)
        .value("fail", Status::fail)
        .value("not_applicable", Status::not_applicable);
    py::enum_<Component>(m, "Component").value("u", Component::u).value("v", Component::v);
    py::enum_<ProfileKind>(m, "ProfileKind")
        .value("gaussian", ProfileKind::gaussian)
        .value("smooth_bump", ProfileKind::smooth_bump)
        .value("zero", ProfileKind::zero);

    py::class_<ModelParams>(m, "ModelParams")
        .def_readonly("preset", &ModelParams::preset)
        .def_readonly("coupling", &ModelParams::coupling)
        .def_readonly("mass", &ModelParams::mass);

    py::class_<ModelConstants>(m, "ModelConstants")
        .def_readonly("c", &ModelConstants::c)
        .def_readonly("delta", &ModelConstants::delta)
        .def_readonly("c_star", &ModelConstants::c_star)
        .def_readonly("K", &ModelConstants::K)
        .def_readonly("delta_capped", &ModelConstants::delta_capped);

    py::class_<A2Report>(m, "A2Report")
        .def_readonly("max_abs", &A2Report::max_abs)
        .def_readonly("max_rel", &A2Report::max_rel);

    m.def("preset", py::overload_cast<std::string_view, double, double>(&preset), py::arg("name"),
          py::arg("coupling"), py::arg("mass"));
    m.def("custom_model", &custom_model, py::arg("alpha"), py::arg("beta"), py::arg("mass"));
    m.def("eval_N", &eval_N, py::arg("params"), py::arg("u"), py::arg("v"));
    m.def("a2_residual", &a2_residual, py::arg("params"), py::arg("u"), py::arg("v"));
    m.def("sample_a2", &sample_a2, py::arg("params"), py::arg("samples") = 10000, py::arg("seed") = 1,
          py::arg("box") = 10.0);
    m.def(
        "derive_constants",
        [](const ModelParams &p, std::size_t samples, std::uint64_t seed) {
            ConstantsOptions o;
            o.samples = samples;
            o.seed = seed;
            return derive_constants(p, o);
        },
        py::arg("params"), py::arg("samples") = 100000, py::arg("seed") = ConstantsOptions{}.seed);

    py::class_<Grid>(m, "Grid")
        .def(py::init<double, double, std::size_t>(), py::arg("x_min"), py::arg("x_max"), py::arg("n_cells"))
        .def_property_readonly("x_min", &Grid::x_min)
        .def_property_readonly("x_max", &Grid::x_max)
        .def_property_readonly("n_cells", &Grid::n_cells)
        .def_property_readonly("dx", &Grid::dx)
        .def("centers", [](const Grid &g) {
            py::array_t<double> x(g.n_cells());
            auto r = x.mutable_unchecked<1>();
            for (std::size_t j = 0; j < g.n_cells(); ++j) r(j) = g.center(j);
            return x;
        });

    py::class_<ProfileSpec>(m, "ProfileSpec")
        .def(py::init([](ProfileKind kind, Component component, double center, double width, double amplitude,
                         double phase) { return ProfileSpec{kind, component, center, width, amplitude, phase}; }),
             py::arg("kind") = ProfileKind::gaussian, py::arg("component") = Component::u, py::arg("center") = 0.0,
             py::arg("width") = 1.0, py::arg("amplitude") = 1.0, py::arg("phase") = 0.0);

    py::class_<SpinorField>(m, "SpinorField")
        .def(py::init([](const Grid &g, const py::array_t<cplx> &u, const py::array_t<cplx> &v, double t) {
                 SpinorField f(g, t);
                 f.u = from_array(u);
                 f.v = from_array(v);
                 if (f.u.size() != g.n_cells() || f.v.size() != g.n_cells()) {
                     throw py::value_error("component length does not match grid");
                 }
                 return f;
             }),
             py::arg("grid"), py::arg("u"), py::arg("v"), py::arg("t") = 0.0)
        .def_readonly("grid", &SpinorField::grid)
        .def_readonly("t", &SpinorField::t)
        .def_property_readonly("u", [](const SpinorField &f) { return to_array(f.u); })
        .def_property_readonly("v", [](const SpinorField &f) { return to_array(f.v); });

    m.def(
        "build_initial",
        [](const Grid &g, const std::vector<ProfileSpec> &p, double margin) { return build_initial(g, p, margin); },
        py::arg("grid"), py::arg("profiles"), py::arg("margin") = 0.0);
    m.def("bony_Q0", &bony_Q0);
    m.def("brute_force_Q0", &brute_force_Q0);
    m.def("brute_force_Q1", &brute_force_Q1);
    m.def("l2_distance", &l2_distance);
    m.def("pair_functionals", [](const SpinorField &a, const SpinorField &b) {
        const auto p = pair_functionals(a, b);
        return py::dict(py::arg("L1") = p.L1, py::arg("Q1") = p.Q1, py::arg("D1") = p.D1);
    });
    m.def("pointwise_functionals", [](const SpinorField &f) {
        const auto p = pointwise_functionals(f);
        return py::dict(py::arg("L0") = p.L0, py::arg("D0") = p.D0, py::arg("linf_sq") = p.linf_sq,
                        py::arg("h1_semi") = p.h1_semi);
    });

    m.def(
        "step",
        [](const SpinorField &f, const ModelParams &p, const std::string &order, const std::string &integrator,
           bool backward) {
            SchemeConfig s;
            s.substep_order = parse_substep_order(order);
            s.nonlinear_integrator = parse_nonlinear_integrator(integrator);
            return step(f, p, s, backward ? Direction::backward : Direction::forward);
        },
        py::arg("field"), py::arg("params"), py::arg("substep_order") = "strang",
        py::arg("nonlinear_integrator") = "exact_preset", py::arg("backward") = false);

    m.def(
        "run_trajectory",
        [](const SpinorField &init, const ModelParams &p, const ModelConstants &k, double t_final,
           std::size_t stride, const std::string &order, const std::string &integrator) {
            SchemeConfig s;
            s.t_final = t_final;
            s.diagnostics_stride = stride;
            s.substep_order = parse_substep_order(order);
            s.nonlinear_integrator = parse_nonlinear_integrator(integrator);
            Trajectory tr;
            {
                py::gil_scoped_release release;
                tr = run_trajectory(init, p, s, k, {true});
            }
            py::list records;
            for (const auto &r : tr.records) records.append(record_dict(r));
            return py::make_tuple(records, tr.snapshots.back().field);
        },
        py::arg("init"), py::arg("params"), py::arg("constants"), py::arg("t_final"), py::arg("stride") = 10,
        py::arg("substep_order") = "strang", py::arg("nonlinear_integrator") = "exact_preset",
        "Returns (records, final_field).");

    m.def(
        "pair_run",
        [](const SpinorField &a, const SpinorField &b, const ModelParams &p, const ModelConstants &k, double t_final,
           std::size_t stride) {
            PairExperiment e{a, b, p, SchemeConfig{}, k};
            e.scheme.t_final = t_final;
            e.scheme.diagnostics_stride = stride;
            PairResult r;
            {
                py::gil_scoped_release release;
                r = pair_run(e);
            }
            py::list out;
            for (const auto &rec : r.records) out.append(pair_record_dict(rec));
            return out;
        },
        py::arg("base"), py::arg("perturbed"), py::arg("params"), py::arg("constants"), py::arg("t_final"),
        py::arg("stride") = 10);

    m.def(
        "thirring_m0_exact",
        [](const std::vector<ProfileSpec> &p, const ModelParams &params, double t, const Grid &g) {
            return thirring_m0_exact(p, params, t, g);
        },
        py::arg("profiles"), py::arg("params"), py::arg("t"),
          py::arg("grid"));

    m.def(
        "refinement_study",
        [](const ModelParams &p, const std::vector<ProfileSpec> &profiles, double x_min, double x_max,
           std::size_t base_cells, double t_final, std::size_t levels) {
            RefinementProblem prob{p, profiles, x_min, x_max, base_cells, SchemeConfig{}};
            prob.scheme.t_final = t_final;
            RefinementResult r;
            {
                py::gil_scoped_release release;
                r = refinement_study(prob, levels);
            }
            py::list rows;
            for (const auto &row : r.rows) {
                rows.append(py::dict(py::arg("level") = row.level, py::arg("n_cells") = row.n_cells,
                                     py::arg("l2_error") = row.l2_error, py::arg("observed_order") = row.observed_order));
            }
            return rows;
        },
        py::arg("params"), py::arg("profiles"), py::arg("x_min"), py::arg("x_max"), py::arg("base_cells"),
        py::arg("t_final"), py::arg("levels") = 4);

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("model", &RunConfig::model)
        .def_readonly("n_cells", &RunConfig::n_cells)
        .def_property_readonly("experiment", [](const RunConfig &c) { return std::string(to_string(c.experiment)); })
        .def_property_readonly("stride", [](const RunConfig &c) { return c.scheme.diagnostics_stride; })
        .def_property_readonly("substep_order",
                               [](const RunConfig &c) { return std::string(to_string(c.scheme.substep_order)); });

    m.def("parse_config", &parse_config, py::arg("text"), py::arg("experiment") = "");
    m.def(
        "dispatch",
        [](const RunConfig &c, const std::filesystem::path &out) {
            DispatchResult r;
            {
                py::gil_scoped_release release;
                r = dispatch(c, out);
            }
            return py::make_tuple(r.exit_code, r.summary);
        },
        py::arg("config"), py::arg("out_dir"), "Returns (exit_code, summary_json_text).");
}
