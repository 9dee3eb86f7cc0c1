#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "embjet/pipeline.hpp"

namespace py = pybind11;
using namespace embjet;

namespace {

Scalar to_scalar(const py::object& v, Mode mode) {
    if (py::isinstance<py::str>(v)) {
        std::string s = v.cast<std::string>();
        auto slash = s.find('/');
        Scalar q = Scalar::rational(std::stol(s.substr(0, slash)),
                                    slash == std::string::npos
                                        ? 1
                                        : std::stol(s.substr(slash + 1)));
        return mode == Mode::exact ? q : q.to_float();
    }
    if (py::isinstance<py::int_>(v)) {
        Scalar q = Scalar::rational(v.cast<long>());
        return mode == Mode::exact ? q : q.to_float();
    }
    if (mode == Mode::exact)
        throw py::type_error("exact-mode coefficients must be int or 'num/den'");
    return Scalar::real(v.cast<double>());
}

py::object from_scalar(const Scalar& c) {
    if (c.mode() == Mode::floating) return py::float_(c.to_double());
    return py::str(c.rat().get_str());
}

MultiIndex to_mi(const std::vector<int>& e) {
    MultiIndex mi(static_cast<int>(e.size()));
    for (size_t i = 0; i < e.size(); ++i) mi[static_cast<int>(i)] = e[i];
    return mi;
}

} // namespace

PYBIND11_MODULE(_embjet, mod) {
    mod.doc() = "truncated-jet isometric embedding toolkit";

    // translators run newest-first: register the base before the derived
    py::register_exception<Error>(mod, "EmbjetError");
    py::register_exception<SchemaError>(mod, "SchemaError");
    py::register_exception<AdmissibilityError>(mod, "AdmissibilityError");
    py::register_exception<CharacteristicError>(mod, "CharacteristicError");

    py::class_<Jet>(mod, "Jet")
        .def(py::init([](int nvars, int order, bool exact) {
                 return Jet(nvars, order, exact ? Mode::exact : Mode::floating);
             }),
             py::arg("nvars"), py::arg("order"), py::arg("exact") = true)
        .def_static(
            "variable",
            [](int var, int nvars, int order, bool exact) {
                return Jet::variable(var, nvars, order,
                                     exact ? Mode::exact : Mode::floating);
            },
            py::arg("var"), py::arg("nvars"), py::arg("order"),
            py::arg("exact") = true)
        .def_static(
            "constant",
            [](int nvars, int order, const py::object& c, bool exact) {
                return Jet::constant(
                    nvars, order,
                    to_scalar(c, exact ? Mode::exact : Mode::floating));
            },
            py::arg("nvars"), py::arg("order"), py::arg("value"),
            py::arg("exact") = true)
        .def_property_readonly("nvars", &Jet::nvars)
        .def_property_readonly("order", &Jet::order)
        .def_property_readonly("exact",
                               [](const Jet& a) { return a.mode() == Mode::exact; })
        .def("coeff",
             [](const Jet& a, const std::vector<int>& e) {
                 return from_scalar(a.coeff(to_mi(e)));
             })
        .def("set_coeff",
             [](Jet& a, const std::vector<int>& e, const py::object& c) {
                 a.set_coeff(to_mi(e), to_scalar(c, a.mode()));
             })
        .def("terms",
             [](const Jet& a) {
                 py::dict d;
                 for (auto& [mi, c] : a.terms()) {
                     py::tuple k(mi.nvars());
                     for (int i = 0; i < mi.nvars(); ++i) k[i] = mi[i];
                     d[k] = from_scalar(c);
                 }
                 return d;
             })
        .def("eval", [](const Jet& a, const std::vector<double>& x) {
            return a.eval_double(x);
        })
        .def("truncated", &Jet::truncated)
        .def("scale", [](const Jet& a, const py::object& c) {
            return a.scale(to_scalar(c, a.mode()));
        })
        .def("is_zero", &Jet::is_zero)
        .def("max_abs_coeff", &Jet::max_abs_coeff)
        .def("__add__", [](const Jet& a, const Jet& b) { return a + b; })
        .def("__sub__", [](const Jet& a, const Jet& b) { return a - b; })
        .def("__mul__", [](const Jet& a, const Jet& b) { return a * b; })
        .def("__eq__", [](const Jet& a, const Jet& b) { return a == b; })
        .def("__repr__", [](const Jet& a) {
            std::ostringstream os;
            os << "Jet(nvars=" << a.nvars() << ", order=" << a.order()
               << ", terms=" << a.terms().size() << ")";
            return os.str();
        });

    mod.def("differentiate", &differentiate, py::arg("jet"), py::arg("var"));
    mod.def("sqrt_jet", &sqrt_jet);
    mod.def("reciprocal", &reciprocal);
    mod.def("to_float", &to_float);
    mod.def(
        "sin_jet",
        [](const py::object& lam, int var, int nvars, int order) {
            return sin_jet(to_scalar(lam, Mode::exact), var, nvars, order);
        },
        py::arg("coefficient"), py::arg("var"), py::arg("nvars"), py::arg("order"));
    mod.def(
        "cos_jet",
        [](const py::object& lam, int var, int nvars, int order) {
            return cos_jet(to_scalar(lam, Mode::exact), var, nvars, order);
        },
        py::arg("coefficient"), py::arg("var"), py::arg("nvars"), py::arg("order"));
    mod.def(
        "exp_jet",
        [](const py::object& lam, int var, int nvars, int order) {
            return exp_jet(to_scalar(lam, Mode::exact), var, nvars, order);
        },
        py::arg("coefficient"), py::arg("var"), py::arg("nvars"), py::arg("order"));

    py::class_<MetricJet>(mod, "MetricJet")
        .def_property_readonly("n", [](const MetricJet& g) { return g.n; })
        .def_property_readonly("order", &MetricJet::order)
        .def("at", &MetricJet::at, py::return_value_policy::copy)
        .def("is_normal_form", &MetricJet::is_normal_form)
        .def("is_symmetric", &MetricJet::is_symmetric);

    mod.def("make_metric", &make_metric, py::arg("n"), py::arg("entries"));

    py::class_<AdmissibleMetric>(mod, "AdmissibleMetric")
        .def_readonly("metric", &AdmissibleMetric::metric)
        .def_readonly("l", &AdmissibleMetric::l)
        .def_readonly("F0", &AdmissibleMetric::F0)
        .def_readonly("F", &AdmissibleMetric::F);

    py::class_<AdmissibilityResult>(mod, "AdmissibilityResult")
        .def_property_readonly("ok", &AdmissibilityResult::ok)
        .def_readonly("violations", &AdmissibilityResult::violations)
        .def_property_readonly("metric", [](const AdmissibilityResult& r) {
            return r.metric;   // None when not admissible
        });

    mod.def("check_admissible", &check_admissible, py::arg("metric"),
            py::arg("l") = 1);

    py::class_<NormalFormResult>(mod, "NormalFormResult")
        .def_readonly("normal", &NormalFormResult::normal)
        .def_readonly("max_cross_coeff", &NormalFormResult::max_cross_coeff);

    mod.def(
        "normal_form_transform",
        [](const MetricJet& g, const py::object& eps) {
            return normal_form_transform(g, to_scalar(eps, g.mode()));
        },
        py::arg("metric"), py::arg("eps") = py::str("1/8"));

    py::class_<EmbeddingJet>(mod, "EmbeddingJet")
        .def_readonly("ambient", &EmbeddingJet::ambient)
        .def_readonly("components", &EmbeddingJet::comp);

    mod.def("embed_cartan_janet", &embed_cartan_janet, py::arg("metric"),
            py::arg("order"));

    py::class_<ResidualEntry>(mod, "ResidualEntry")
        .def_readonly("name", &ResidualEntry::name)
        .def_readonly("max_abs", &ResidualEntry::max_abs)
        .def_readonly("residual", &ResidualEntry::residual);

    py::class_<ResidualReport>(mod, "ResidualReport")
        .def_property_readonly("ok",
                               [](const ResidualReport& r) { return r.pass; })
        .def_readonly("order_checked", &ResidualReport::order_checked)
        .def_readonly("tolerance", &ResidualReport::tolerance)
        .def_readonly("entries", &ResidualReport::entries)
        .def("max_abs", &ResidualReport::max_abs);

    mod.def("first_order_residual", &first_order_residual);
    mod.def("equivalence_check", &equivalence_check);

    py::class_<CauchyData>(mod, "CauchyData")
        .def_readonly("ambient", &CauchyData::ambient)
        .def_readonly("singular", &CauchyData::singular)
        .def_readonly("u0", &CauchyData::u0)
        .def_readonly("u1", &CauchyData::u1)
        .def_readonly("Delta", &CauchyData::Delta)
        .def_readonly("Delta0", &CauchyData::Delta0);

    mod.def(
        "build_singular_data",
        [](const AdmissibleMetric& g, const py::object& eps, int K) {
            return build_singular_data(g, to_scalar(eps, Mode::exact), K);
        },
        py::arg("metric"), py::arg("eps") = py::str("9/10"), py::arg("order") = 4);

    mod.def("constraint_residual",
            py::overload_cast<const CauchyData&, const AdmissibleMetric&>(
                &constraint_residual));

    py::class_<PointSolve>(mod, "PointSolve")
        .def_readonly("point", &PointSolve::point)
        .def_readonly("u", &PointSolve::u)
        .def_readonly("max_residual", &PointSolve::max_residual);

    mod.def("solve_at_base_points", &solve_at_base_points, py::arg("metric"),
            py::arg("data"), py::arg("points"), py::arg("order"));

    py::class_<PrincipalSymbol>(mod, "PrincipalSymbol")
        .def_static("scalar", &PrincipalSymbol::scalar_symbol, py::arg("jet"),
                    py::arg("n"))
        .def_static("system", &PrincipalSymbol::system_symbol, py::arg("data"))
        .def_readonly("n", &PrincipalSymbol::n)
        .def_readonly("dim", &PrincipalSymbol::dim)
        .def_readonly("m", &PrincipalSymbol::m)
        .def("restricted_det", &PrincipalSymbol::restricted_det)
        .def("eval", &PrincipalSymbol::eval)
        .def("grad_x", &PrincipalSymbol::grad_x)
        .def("grad_p", &PrincipalSymbol::grad_p);

    py::class_<CharClassification>(mod, "CharClassification")
        .def_readonly("characteristic", &CharClassification::characteristic)
        .def_readonly("tolerance", &CharClassification::tolerance)
        .def_property_readonly("value", [](const CharClassification& c) {
            return from_scalar(c.value);
        });

    mod.def(
        "is_characteristic",
        [](const PrincipalSymbol& sym, const std::vector<py::object>& x,
           const Jet& s) {
            std::vector<Scalar> xs;
            for (auto& v : x) xs.push_back(to_scalar(v, sym.mode()));
            return is_characteristic(sym, xs, s);
        },
        py::arg("symbol"), py::arg("x"), py::arg("surface"));

    py::class_<NonexCertificate>(mod, "NonexCertificate")
        .def_readonly("nonexceptional", &NonexCertificate::nonexceptional)
        .def_readonly("inconclusive", &NonexCertificate::inconclusive)
        .def_readonly("witness", &NonexCertificate::witness)
        .def_property_readonly("value", [](const NonexCertificate& c) {
            return from_scalar(c.value);
        });

    mod.def(
        "is_nonexceptional",
        [](const PrincipalSymbol& sym, const std::vector<py::object>& x,
           const Jet& s) {
            std::vector<Scalar> xs;
            for (auto& v : x) xs.push_back(to_scalar(v, sym.mode()));
            return is_nonexceptional(sym, xs, s);
        },
        py::arg("symbol"), py::arg("x"), py::arg("surface"));

    py::class_<CharStrip>(mod, "CharStrip")
        .def_readonly("t", &CharStrip::t)
        .def_readonly("x", &CharStrip::x)
        .def_readonly("p", &CharStrip::p)
        .def_readonly("xi", &CharStrip::xi)
        .def_readonly("g0", &CharStrip::g0)
        .def_readonly("max_drift", &CharStrip::max_drift)
        .def_readonly("zero_velocity", &CharStrip::zero_velocity);

    mod.def("hamilton_flow", &hamilton_flow, py::arg("symbol"), py::arg("start"),
            py::arg("surface"), py::arg("t0"), py::arg("t1"), py::arg("step"),
            py::arg("drift_tol") = 1e-8, py::arg("halve_budget") = 6);

    py::class_<UniformizationMap>(mod, "UniformizationMap")
        .def_readonly("xi", &UniformizationMap::xi)
        .def_readonly("dxi_dt", &UniformizationMap::dxi_dt)
        .def_readwrite("trust_radius", &UniformizationMap::trust_radius);

    mod.def("solve_hj_series", &solve_hj_series, py::arg("symbol"),
            py::arg("surface"), py::arg("order"));

    py::class_<UniformizeValue>(mod, "UniformizeValue")
        .def_readonly("xi", &UniformizeValue::xi)
        .def_readonly("dxi_dt", &UniformizeValue::dxi_dt)
        .def_readonly("on_Z", &UniformizeValue::on_Z);

    mod.def("uniformize_eval", &uniformize_eval, py::arg("map"), py::arg("t"),
            py::arg("x"), py::arg("ztol") = 1e-9);

    py::class_<ConoidSample>(mod, "ConoidSample")
        .def_readonly("strips", &ConoidSample::strips)
        .def_readonly("exceptional", &ConoidSample::exceptional);

    mod.def("conoid_sample", &conoid_sample, py::arg("symbol"), py::arg("vertex"),
            py::arg("surface"), py::arg("rays"), py::arg("t0"), py::arg("t1"),
            py::arg("step") = 1e-3, py::arg("spread") = 0.05);

    mod.def(
        "run_pipeline",
        [](const std::string& input, const std::string& out_dir,
           const std::vector<std::string>& stages, int order,
           const std::string& mode, const std::string& eps,
           const std::vector<std::vector<double>>& points, double step,
           int jobs) {
            PipelineConfig cfg;
            cfg.input = input;
            cfg.out_dir = out_dir;
            cfg.stages = stages;
            cfg.K = order;
            cfg.mode = mode;
            cfg.eps = eps;
            cfg.points = points;
            cfg.step = step;
            cfg.jobs = jobs;
            std::ostringstream out, err;
            int code = run_pipeline(cfg, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("input"), py::arg("out_dir"), py::arg("stages"),
        py::arg("order") = 4, py::arg("mode") = "", py::arg("eps") = "9/10",
        py::arg("points") = std::vector<std::vector<double>>{},
        py::arg("step") = 1e-3, py::arg("jobs") = 1);
}
