#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "garrote/glm.hpp"
#include "garrote/inference.hpp"
#include "garrote/reporting.hpp"
#include "garrote/tuning.hpp"

namespace py = pybind11;
using namespace garrote;

namespace {

MethodSpec make_spec(const std::string& method, const std::string& init, const std::string& rule,
                     const std::string& init_rule) {
    MethodSpec s;
    s.method = method_from_string(method);
    s.init = init_kind_from_string(init);
    s.rule = rule_from_string(rule);
    s.init_rule = rule_from_string(init_rule);
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nonnegative garrote and related penalized regression";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<Family>(m, "Family").value("gaussian", Family::gaussian).value("binomial", Family::binomial);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init([](Matrix x, Vector y, std::vector<std::string> names, Family family) {
                 return Dataset(std::move(x), std::move(y), std::move(names), family);
             }),
             py::arg("x"), py::arg("y"), py::arg("names"), py::arg("family") = Family::gaussian)
        .def_property_readonly("x", &Dataset::x)
        .def_property_readonly("y", &Dataset::y)
        .def_property_readonly("names", &Dataset::names)
        .def_property_readonly("family", &Dataset::family)
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("p", &Dataset::p)
        .def("__repr__", [](const Dataset& d) {
            return "<Dataset n=" + std::to_string(d.n()) + " p=" + std::to_string(d.p()) + ">";
        });

    m.def("bundled_data_dir", [] { return std::filesystem::path(GARROTE_BUNDLED_DATA_DIR); });
    m.def("load_csv", &load_csv, py::arg("path"), py::arg("response") = "", py::arg("family") = Family::gaussian);
    m.def("load_prostate", &load_prostate, py::arg("data_dir"));
    m.def("load_bodyfat", &load_bodyfat, py::arg("data_dir"));
    m.def(
        "standardize", [](const Dataset& d) { return standardize(d).first; }, py::arg("dataset"));
    m.def(
        "synthetic_highdim",
        [](Index n, Index p, Index k_true, double rho, double snr, std::uint64_t seed, Family family) {
            SyntheticSpec s{n, p, k_true, rho, snr, seed, family};
            return make_synthetic_highdim(s);
        },
        py::arg("n") = 286, py::arg("p") = 2000, py::arg("k_true") = 20, py::arg("rho") = 0.0, py::arg("snr") = 8.0,
        py::arg("seed") = 1, py::arg("family") = Family::binomial);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("coefficients", &FitResult::coefficients)
        .def_readonly("intercept", &FitResult::intercept)
        .def_readonly("p_values", &FitResult::p_values)
        .def_readonly("sigma2_hat", &FitResult::sigma2_hat);
    m.def("ols", [](const Dataset& d) { return fit_full(d); }, py::arg("dataset"));
    m.def(
        "r_squared", [](const Dataset& d, const Vector& b, double a) { return r_squared(d, b, a).r2; },
        py::arg("dataset"), py::arg("coefficients"), py::arg("intercept"));
    m.def(
        "collinearity",
        [](const Dataset& d) {
            const CollinearityReport c = collinearity(d);
            return py::dict(py::arg("vif") = c.vif, py::arg("condition_number") = c.condition_number);
        },
        py::arg("dataset"));

    py::class_<SelectorFit>(m, "SelectorFit")
        .def_readonly("method", &SelectorFit::method)
        .def_readonly("coefficients", &SelectorFit::coefficients)
        .def_readonly("intercept", &SelectorFit::intercept)
        .def_readonly("selected", &SelectorFit::selected)
        .def_readonly("shrinkage_factors", &SelectorFit::shrinkage_factors)
        .def_readonly("tuning", &SelectorFit::tuning)
        .def_readonly("fit_stats", &SelectorFit::fit_stats);

    m.def(
        "fit",
        [](const Dataset& d, const std::string& method, const std::string& init, const std::string& rule,
           const std::string& init_rule, int folds, std::uint64_t seed) {
            return tuned_fit(d, make_spec(method, init, rule, init_rule), assign_folds(d.n(), folds, seed));
        },
        py::arg("dataset"), py::arg("method") = "nng", py::arg("init") = "ols", py::arg("rule") = "opt",
        py::arg("init_rule") = "opt", py::arg("folds") = 10, py::arg("seed") = 1,
        "Tune a method by K-fold CV and refit it on the full data.");
    m.def(
        "nng_fit",
        [](const Dataset& d, const Vector& init, double lambda) {
            return nng_fit(d, make_initial(InitKind::ols, init), lambda);
        },
        py::arg("dataset"), py::arg("initial"), py::arg("lambda_"));
    m.def("best_subset", &best_subset, py::arg("dataset"), py::arg("max_k"));

    py::class_<PredictionReport>(m, "PredictionReport")
        .def_readonly("method", &PredictionReport::method)
        .def_readonly("metric", &PredictionReport::metric)
        .def_readonly("value", &PredictionReport::value)
        .def_readonly("se", &PredictionReport::se)
        .def_readonly("avg_vars", &PredictionReport::avg_vars)
        .def_readonly("held_out", &PredictionReport::held_out);
    m.def(
        "cv_prediction_error",
        [](const Dataset& d, const std::string& method, const std::string& init, const std::string& rule,
           int folds, int inner_folds, std::uint64_t seed, int threads, bool nested) {
            PredictionOptions o{folds, inner_folds, seed, threads, nested};
            py::gil_scoped_release release;
            return cv_prediction_error(d, make_spec(method, init, rule, "opt"), o);
        },
        py::arg("dataset"), py::arg("method") = "nng", py::arg("init") = "ols", py::arg("rule") = "opt",
        py::arg("folds") = 10, py::arg("inner_folds") = 10, py::arg("seed") = 1, py::arg("threads") = 1,
        py::arg("nested") = true);

    py::class_<BootstrapSummary>(m, "BootstrapSummary")
        .def_readonly("B", &BootstrapSummary::B)
        .def_readonly("mean", &BootstrapSummary::mean_est)
        .def_readonly("se", &BootstrapSummary::se)
        .def_readonly("nonzero_prop", &BootstrapSummary::nonzero_prop)
        .def_readonly("failed", &BootstrapSummary::failed);
    m.def(
        "bootstrap",
        [](const Dataset& d, const std::string& method, const std::string& init, int B, const std::string& mode,
           std::uint64_t seed, int threads, int folds) {
            BootstrapOptions o;
            o.B = B;
            o.mode = bootstrap_mode_from_string(mode);
            o.seed = seed;
            o.threads = threads;
            o.folds = folds;
            py::gil_scoped_release release;
            return bootstrap_se(d, make_spec(method, init, "opt", "opt"), o);
        },
        py::arg("dataset"), py::arg("method") = "nng", py::arg("init") = "ols", py::arg("B") = 1000,
        py::arg("mode") = "fixed_opt", py::arg("seed") = 1, py::arg("threads") = 1, py::arg("folds") = 10);

    m.def(
        "bland_altman",
        [](const Vector& a, const Vector& b) {
            const BlandAltman r = bland_altman(a, b);
            return py::dict(py::arg("mean_diff") = r.mean_diff, py::arg("sd_diff") = r.sd_diff,
                            py::arg("loa") = r.loa);
        },
        py::arg("a"), py::arg("b"));
    m.def("auc", &auc, py::arg("y"), py::arg("scores"));
    m.def("drop_one_r2", &drop_one_r2, py::arg("dataset"));
}
