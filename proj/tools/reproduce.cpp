#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "garrote/glm.hpp"
#include "garrote/serialize.hpp"

namespace garrote::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_targets(const std::string& section) {
    const fs::path path = data_dir() / "targets.json";
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    json all = json::parse(in);
    if (!all.contains(section)) throw UsageError("targets.json has no section '" + section + "'");
    return all.at(section);
}

bool within(const json& computed, const json& target, double tol) {
    if (target.is_array()) {
        if (!computed.is_array() || computed.size() != target.size()) return false;
        for (std::size_t i = 0; i < target.size(); ++i)
            if (!within(computed[i], target[i], tol)) return false;
        return true;
    }
    return computed.is_number() && std::abs(computed.get<double>() - target.get<double>()) <= tol;
}

class Manifest {
public:
    Manifest(std::string name, const GlobalOptions& g) : name_(std::move(name)), g_(g), targets_(load_targets(name_)) {}

    /// Compares `computed` with the configured target for `id` and records the outcome.
    void check(const std::string& id, const json& computed) {
        if (!targets_.contains(id)) throw std::logic_error("no target configured for check '" + id + "'");
        const json& t = targets_.at(id);
        const std::string kind = t.at("kind");
        bool pass = false;
        if (kind == "abs") {
            pass = within(computed, t.at("target"), t.at("tolerance").get<double>());
        } else if (kind == "max") {
            pass = computed.is_number() && computed.get<double>() <= t.at("limit").get<double>();
        } else if (kind == "min") {
            pass = computed.is_number() && computed.get<double>() >= t.at("limit").get<double>();
        } else if (kind == "set") {
            std::set<std::string> a, b;
            for (const auto& v : computed) a.insert(v.get<std::string>());
            for (const auto& v : t.at("target")) b.insert(v.get<std::string>());
            pass = a == b;
        } else if (kind == "true") {
            pass = computed.is_boolean() && computed.get<bool>();
        } else {
            throw std::logic_error("unknown check kind '" + kind + "'");
        }
        json rec = t;
        rec["id"] = id;
        rec["computed"] = computed;
        rec["pass"] = pass;
        checks_.push_back(rec);
        std::cout << (pass ? "PASS " : "FAIL ") << id << '\n';
    }

    /// Wall-clock check; the measured value is left out under --no-timestamp.
    void runtime_check(const std::string& id, double seconds) {
        check(id, seconds);
        if (g_.no_timestamp) checks_.back()["computed"] = nullptr;
    }

    fs::path artifact(const std::string& stem, bool json_only = false) {
        const std::string file = stem + (json_only || g_.format == "json" ? ".json" : ".csv");
        artifacts_.push_back(file);
        return dir() / file;
    }

    fs::path dir() const { return fs::path(g_.out) / name_; }

    void write() const {
        json m;
        m["analysis"] = name_;
        m["seed"] = g_.seed;
        m["folds"] = g_.folds;
        if (!g_.no_timestamp) {
            const std::time_t now = std::time(nullptr);
            std::ostringstream ts;
            ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
            m["generated"] = ts.str();
        }
        m["checks"] = checks_;
        m["artifacts"] = artifacts_;
        int passed = 0;
        for (const auto& c : checks_) passed += c.at("pass").get<bool>() ? 1 : 0;
        m["passed"] = passed;
        m["failed"] = static_cast<int>(checks_.size()) - passed;
        write_json_file(m, dir() / "manifest.json");
        std::cout << passed << " of " << checks_.size() << " checks passed; wrote " << (dir() / "manifest.json").string()
                  << '\n';
    }

private:
    std::string name_;
    const GlobalOptions& g_;
    json targets_;
    json checks_ = json::array();
    std::vector<std::string> artifacts_;
};

json names_of(const std::vector<Index>& idx, const Dataset& d) {
    json a = json::array();
    for (Index j : idx) a.push_back(d.names()[static_cast<std::size_t>(j)]);
    return a;
}

Index column(const Dataset& d, const std::string& name) {
    const auto& n = d.names();
    const auto it = std::find(n.begin(), n.end(), name);
    if (it == n.end()) throw std::logic_error("no column " + name);
    return static_cast<Index>(it - n.begin());
}

json pick(const Vector& v, const Dataset& d, const std::vector<std::string>& names) {
    json a = json::array();
    for (const auto& n : names) a.push_back(v[column(d, n)]);
    return a;
}

MethodSpec spec_of(Method m, Rule rule = Rule::opt, InitKind init = InitKind::ols, Rule init_rule = Rule::opt) {
    MethodSpec s;
    s.method = m;
    s.rule = rule;
    s.init = init;
    s.init_rule = init_rule;
    return s;
}

PredictionOptions prediction_options(const GlobalOptions& g) {
    PredictionOptions o;
    o.outer_folds = g.folds;
    o.inner_folds = 10;
    o.seed = g.seed;
    o.threads = g.threads;
    return o;
}

void emit_reports(Manifest& man, const std::vector<PredictionReport>& reps, const GlobalOptions& g) {
    if (g.format == "json") {
        write_json_file(json(reps), man.artifact("prediction"));
        return;
    }
    std::ostringstream os;
    os << "method,metric,value,se,avg_vars,se_vars\n";
    for (const auto& r : reps)
        os << r.method << ',' << r.metric << ',' << format_double(r.value) << ',' << format_double(r.se) << ','
           << format_double(r.avg_vars) << ',' << format_double(r.se_vars) << '\n';
    write_text_file(os.str(), man.artifact("prediction"));
}

void emit_table(Manifest& man, const ComparisonTable& t, const GlobalOptions& g, const std::string& stem) {
    if (g.format == "json")
        write_json_file(json(t), man.artifact(stem));
    else
        write_text_file(t.to_csv(false), man.artifact(stem));
    std::cout << t.render_text(true);
}

void reproduce_prostate(const GlobalOptions& g) {
    Manifest man("prostate", g);
    const Format format = output_format(g);
    const Dataset d = load_prostate(data_dir());
    const FoldAssignment folds = assign_folds(d.n(), g.folds, g.seed);
    const std::vector<std::string> strong{"x1", "x2", "x5"};

    const FitResult ols = fit_full(d);
    const RSquared r2 = r_squared(ols, d);
    man.check("ols_coefficients", vector_json(ols.coefficients));
    man.check("ols_r2", r2.r2);
    man.check("ols_adj_r2", r2.adj_r2);
    man.check("ols_p_values_x1_x2_x5", pick(ols.p_values, d, strong));
    const CollinearityReport col = collinearity(d);
    man.check("vif_min", col.vif.minCoeff());
    man.check("vif_max", col.vif.maxCoeff());
    man.check("condition_number", col.condition_number);

    TuningCache cache;
    json inits = json::object();
    for (const auto& [tag, kind, rule] : {std::tuple{"ols", InitKind::ols, Rule::opt},
                                          std::tuple{"ridge_opt", InitKind::ridge, Rule::opt},
                                          std::tuple{"lasso_opt", InitKind::lasso, Rule::opt},
                                          std::tuple{"lasso_1se", InitKind::lasso, Rule::one_se}})
        inits[tag] = cache.initial(d, folds, kind, rule);
    write_json_file(inits, man.artifact("initial_estimates", true));
    const InitialEstimate& lasso_1se = cache.initial(d, folds, InitKind::lasso, Rule::one_se);
    man.check("lasso_1se_r2", r_squared(d, lasso_1se.values, lasso_1se.intercept).r2);

    std::vector<SelectorFit> nngs;
    for (const auto& [tag, init, init_rule] : {std::tuple{"ols", InitKind::ols, Rule::opt},
                                               std::tuple{"ridge", InitKind::ridge, Rule::opt},
                                               std::tuple{"lasso", InitKind::lasso, Rule::opt},
                                               std::tuple{"lasso_1se", InitKind::lasso, Rule::one_se}}) {
        nngs.push_back(tuned_fit(d, spec_of(Method::nng, Rule::opt, init, init_rule), folds, &cache));
        man.check(std::string("nng_") + tag + "_selected", names_of(nngs.back().selected, d));
    }
    const SelectorFit& nng_l1se = nngs.back();
    man.check("nng_lasso_1se_factors_x1_x2_x5", pick(*nng_l1se.shrinkage_factors, d, strong));
    man.check("nng_lasso_1se_r2", nng_l1se.fit_stats.at("r2"));

    // relaxed lasso with phi = 0 at a lambda whose lasso support is {x1, x2, x5}
    {
        const PenaltySpec spec = PenaltySpec::lasso(d.p());
        const PathFit path = solve_path(d, spec, lambda_path(d, spec));
        json r2_phi0 = nullptr;
        for (Index k = 0; k < path.size(); ++k) {
            std::vector<Index> s;
            for (Index j = 0; j < d.p(); ++j)
                if (path.coefficients(j, k) != 0.0) s.push_back(j);
            if (names_of(s, d) == json(strong)) {
                r2_phi0 = rlasso_fit(d, path.lambdas[static_cast<std::size_t>(k)], 0.0).fit_stats.at("r2");
                break;
            }
        }
        man.check("rlasso_phi0_r2", r2_phi0);
    }

    const std::vector<SelectorFit> subsets = best_subset(d, d.p());
    man.check("best_subset_size3", names_of(subsets[3].selected, d));
    man.check("bic_selected", names_of(select_subset_bic(subsets, d).selected, d));

    std::vector<SelectorFit> fits;
    std::vector<std::string> labels;
    for (const MethodSpec& s : {spec_of(Method::ols), spec_of(Method::nng), spec_of(Method::alasso),
                                spec_of(Method::lasso), spec_of(Method::lasso, Rule::one_se), spec_of(Method::rlasso),
                                spec_of(Method::subset_cv), spec_of(Method::subset_bic)}) {
        fits.push_back(tuned_fit(d, s, folds, &cache));
        labels.push_back(s.label());
    }
    emit_table(man, build_comparison(fits, d, labels), g, "comparison");

    const SelectorFit& nng_o = fits[1];
    const SandwichSE sw = sandwich_se(nng_o, cache.initial(d, folds, InitKind::ols, Rule::opt), d,
                                      nng_o.tuning.at("lambda"));
    write_json_file(json(sw), man.artifact("sandwich_se", true));
    man.check("sandwich_se_x1_x2_x5", pick(sw.se, d, strong));
    bool zero_elsewhere = true;
    for (Index j = 0; j < d.p(); ++j)
        if (std::find(strong.begin(), strong.end(), d.names()[static_cast<std::size_t>(j)]) == strong.end())
            zero_elsewhere = zero_elsewhere && sw.se[j] == 0.0;
    man.check("sandwich_se_zero_elsewhere", zero_elsewhere);

    for (const BootstrapMode mode : {BootstrapMode::fixed_opt, BootstrapMode::reestimated_opt, BootstrapMode::fixed_1se,
                                     BootstrapMode::reestimated_1se}) {
        BootstrapOptions o;
        o.B = 1000;
        o.mode = mode;
        o.seed = g.seed;
        o.threads = g.threads;
        o.folds = g.folds;
        const BootstrapSummary s = bootstrap_se(d, spec_of(Method::nng), o);
        emit_plot_data(s, d.names(), man.artifact("bootstrap_" + std::string(to_string(mode))), format);
        const Index x1 = column(d, "x1");
        if (mode == BootstrapMode::fixed_opt || mode == BootstrapMode::reestimated_opt) {
            const std::string tag = "bootstrap_" + std::string(to_string(mode)) + "_x1_";
            man.check(tag + "mean", s.mean_est[x1]);
            man.check(tag + "se", s.se[x1]);
        }
    }

    std::vector<MethodSpec> cv_specs{spec_of(Method::ols)};
    for (const Rule rule : {Rule::opt, Rule::one_se}) {
        cv_specs.push_back(spec_of(Method::rlasso, rule));
        cv_specs.push_back(spec_of(Method::lasso, rule));
        for (const InitKind init : {InitKind::ols, InitKind::ridge, InitKind::lasso}) {
            cv_specs.push_back(spec_of(Method::nng, rule, init));
            cv_specs.push_back(spec_of(Method::alasso, rule, init));
        }
    }
    cv_specs.push_back(spec_of(Method::subset_cv));
    cv_specs.push_back(spec_of(Method::subset_bic));
    emit_reports(man, cv_prediction_errors(d, cv_specs, prediction_options(g)), g);
    man.write();
}

void reproduce_bodyfat(const GlobalOptions& g) {
    Manifest man("bodyfat", g);
    const Format format = output_format(g);
    const Dataset d = load_bodyfat(data_dir());
    const FoldAssignment folds = assign_folds(d.n(), g.folds, g.seed);

    const CollinearityReport col = collinearity(d);
    man.check("condition_number", col.condition_number);
    man.check("vif_max", col.vif.maxCoeff());
    const Vector drop = drop_one_r2(d);
    {
        json j = json::object();
        for (Index k = 0; k < d.p(); ++k) j[d.names()[static_cast<std::size_t>(k)]] = drop[k];
        write_json_file(j, man.artifact("drop_one_r2", true));
    }
    man.check("drop_one_abdomen", drop[column(d, "abdomen")]);
    man.check("drop_one_wrist", drop[column(d, "wrist")]);
    man.check("drop_one_knee", drop[column(d, "knee")]);

    const SelectorFit bic = select_subset_bic(best_subset(d, d.p()), d);
    man.check("bic_n_selected", static_cast<double>(bic.selected.size()));
    man.check("bic_selected", names_of(bic.selected, d));

    TuningCache cache;
    std::vector<SelectorFit> fits;
    std::vector<std::string> labels;
    for (const MethodSpec& s :
         {spec_of(Method::ols), spec_of(Method::nng, Rule::opt, InitKind::ols),
          spec_of(Method::nng, Rule::opt, InitKind::ridge), spec_of(Method::nng, Rule::opt, InitKind::lasso),
          spec_of(Method::alasso, Rule::opt, InitKind::ridge), spec_of(Method::lasso), spec_of(Method::rlasso),
          spec_of(Method::subset_bic)}) {
        fits.push_back(tuned_fit(d, s, folds, &cache));
        labels.push_back(s.label());
    }
    emit_table(man, build_comparison(fits, d, labels), g, "comparison");

    const auto eta = [&](const SelectorFit& f) { return linear_predictor(d.x(), f.coefficients, f.intercept); };
    const BlandAltman rl = bland_altman(eta(fits[2]), eta(fits[3]));
    const BlandAltman rb = bland_altman(eta(fits[2]), eta(fits[7]));
    emit_plot_data(rl, man.artifact("bland_altman_nng_ridge_vs_nng_lasso"), format);
    emit_plot_data(rb, man.artifact("bland_altman_nng_ridge_vs_bs_bic"), format);
    man.check("bland_altman_r_vs_l_abs_mean_diff", std::abs(rl.mean_diff));
    man.check("bland_altman_r_vs_l_loa_width", rl.loa.second - rl.loa.first);
    man.check("bland_altman_r_vs_bic_loa", json::array({rb.loa.first, rb.loa.second}));

    const std::vector<MethodSpec> cv_specs{
        spec_of(Method::ols),
        spec_of(Method::lasso),
        spec_of(Method::lasso, Rule::one_se),
        spec_of(Method::nng, Rule::opt, InitKind::ridge),
        spec_of(Method::nng, Rule::one_se, InitKind::ridge),
        spec_of(Method::alasso, Rule::opt, InitKind::ridge),
        spec_of(Method::alasso, Rule::one_se, InitKind::ridge),
    };
    const auto reps = cv_prediction_errors(d, cv_specs, prediction_options(g));
    emit_reports(man, reps, g);
    man.check("cv_mse_ols", reps[0].value);
    man.check("cv_mse_lasso", reps[1].value);
    man.check("cv_mse_nng_ridge", reps[3].value);
    man.check("cv_mse_alasso_ridge", reps[5].value);
    man.check("one_se_fewer_vars_lasso", reps[2].avg_vars < reps[1].avg_vars);
    man.check("one_se_fewer_vars_nng_ridge", reps[4].avg_vars < reps[3].avg_vars);
    man.check("one_se_fewer_vars_alasso_ridge", reps[6].avg_vars < reps[5].avg_vars);
    man.write();
}

void reproduce_highdim(const GlobalOptions& g) {
    Manifest man("highdim", g);
    const Dataset d = make_synthetic_highdim(synthetic_spec(g));
    const FoldAssignment folds = assign_folds(d.n(), g.folds, g.seed);

    std::vector<SelectorFit> fits;
    for (const auto& [id, method] : {std::pair{"runtime_nng_lasso", Method::nng},
                                     std::pair{"runtime_alasso_lasso", Method::alasso}}) {
        const auto t0 = std::chrono::steady_clock::now();
        fits.push_back(tuned_fit(d, spec_of(method, Rule::opt, InitKind::lasso), folds));
        man.runtime_check(id, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    emit_fit(fits[0], d, man.artifact("fit_nng_lasso"), output_format(g));
    emit_fit(fits[1], d, man.artifact("fit_alasso_lasso"), output_format(g));

    const std::vector<MethodSpec> specs{
        spec_of(Method::lasso),
        spec_of(Method::lasso, Rule::one_se),
        spec_of(Method::nng, Rule::opt, InitKind::lasso),
        spec_of(Method::nng, Rule::one_se, InitKind::lasso),
        spec_of(Method::alasso, Rule::opt, InitKind::lasso),
        spec_of(Method::alasso, Rule::one_se, InitKind::lasso),
    };
    const auto reps = cv_prediction_errors(d, specs, prediction_options(g));
    emit_reports(man, reps, g);
    const auto drop = [](double opt, double one_se) { return 100.0 * (opt - one_se) / opt; };
    man.check("nng_lasso_fewer_vars_than_lasso", reps[2].avg_vars < reps[0].avg_vars);
    man.check("nng_lasso_auc_gap", std::abs(reps[2].value - reps[0].value));
    man.check("one_se_degrades_lasso_more",
              drop(reps[0].value, reps[1].value) > drop(reps[2].value, reps[3].value));
    man.write();
}

}  // namespace

int cmd_reproduce(const GlobalOptions& g, const std::string& name) {
    output_format(g);
    if (name == "prostate")
        reproduce_prostate(g);
    else if (name == "bodyfat")
        reproduce_bodyfat(g);
    else if (name == "highdim")
        reproduce_highdim(g);
    else
        throw UsageError("unknown analysis '" + name + "' (expected prostate, bodyfat or highdim)");
    return 0;
}

}  // namespace garrote::cli
