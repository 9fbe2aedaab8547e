#include <iostream>

#include "CLI11.hpp"

#include "cli.hpp"

using namespace garrote;
using namespace garrote::cli;

namespace {

void add_method_options(CLI::App* sub, MethodOptions& m) {
    sub->add_option("--method", m.method, "ols, ridge, lasso, nng, alasso, rlasso, subset, subset_cv")
        ->capture_default_str();
    sub->add_option("--init", m.init, "Initial estimate for nng/alasso: ols, ridge, lasso")->capture_default_str();
    sub->add_option("--rule", m.rule, "Tuning rule: opt or 1se")->capture_default_str();
    sub->add_option("--init-rule", m.init_rule, "Tuning rule of a ridge/lasso initial estimate")->capture_default_str();
    sub->add_option("--gammas", m.gammas, "Adaptive-lasso gamma grid")->delimiter(',');
    sub->add_option("--phis", m.phis, "Relaxed-lasso phi grid")->delimiter(',');
}

void check_method_options(CLI::App* sub, const MethodOptions& m) {
    const Method method = method_from_string(m.method);
    const bool uses_init = method == Method::nng || method == Method::alasso;
    if (!uses_init && (sub->count("--init") > 0 || sub->count("--init-rule") > 0))
        throw UsageError("--init only applies to nng and alasso");
}

void print_warnings() {
    for (const auto& w : take_warnings()) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonnegative garrote and related penalized regression methods"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--data", g.data, "prostate, bodyfat, highdim-synthetic or a CSV path")->capture_default_str();
    app.add_option("--response", g.response, "Response column of a CSV file (default: last column)");
    app.add_option("--family", g.family, "gaussian or binomial (CSV files)")->capture_default_str();
    app.add_option("--sd", g.sd, "Standardization SD denominator: sample or population");
    app.add_option("--seed", g.seed, "Master seed for folds, resampling and synthetic data")->capture_default_str();
    app.add_option("--folds", g.folds, "Number of CV folds")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_flag("--no-timestamp", g.no_timestamp, "Leave wall-clock values out of manifests");
    app.add_option("--n", g.n, "Synthetic sample size")->capture_default_str();
    app.add_option("--p", g.p, "Synthetic number of covariates")->capture_default_str();
    app.add_option("--k-true", g.k_true, "Synthetic number of active covariates")->capture_default_str();
    app.add_option("--rho", g.rho, "Synthetic AR(1) correlation")->capture_default_str();
    app.add_option("--snr", g.snr, "Synthetic signal variance")->capture_default_str();

    MethodOptions fit_m, cv_m, tune_m, boot_m;
    auto* fit = app.add_subcommand("fit", "Tune a method by CV and fit it on all data");
    add_method_options(fit, fit_m);

    auto* cv = app.add_subcommand("cv", "Nested cross-validated prediction error");
    add_method_options(cv, cv_m);
    int inner_folds = 10;
    bool fixed = false;
    cv->add_option("--inner-folds", inner_folds, "Folds of the inner tuning CV")->capture_default_str();
    cv->add_flag("--fixed", fixed, "Tune once on all data instead of inside each outer fold");

    auto* tune = app.add_subcommand("tune", "Cross-validation curve of a method's tuning parameters");
    add_method_options(tune, tune_m);

    auto* boot = app.add_subcommand("bootstrap", "Bootstrap standard errors");
    add_method_options(boot, boot_m);
    BootstrapArgs b;
    boot->add_option("--B", b.B, "Bootstrap replicates")->capture_default_str();
    boot->add_option("--mode", b.mode, "fixed_opt, fixed_1se, reestimated_opt, reestimated_1se")->capture_default_str();
    boot->add_flag("--keep-draws", b.keep_draws, "Write every replicate's coefficients");
    boot->add_flag("--fixed-init", b.fixed_init, "Reuse the original-data initial estimate in fixed modes");

    auto* compare = app.add_subcommand("compare", "Side-by-side selection table");
    std::vector<std::string> methods{"nng:ols", "alasso:ols", "lasso:opt", "lasso:1se", "rlasso", "subset"};
    bool ba = false;
    compare->add_option("--methods", methods, "Comma-separated method[:init][:rule] list")
        ->delimiter(',')
        ->capture_default_str();
    compare->add_flag("--bland-altman", ba, "Bland-Altman data of the first method against each other one");

    auto* reproduce = app.add_subcommand("reproduce", "Run a full analysis and write a checked manifest");
    std::string analysis;
    reproduce->add_option("analysis", analysis, "prostate, bodyfat or highdim")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    int code = 0;
    try {
        if (g.folds < 2) throw UsageError("--folds must be at least 2");
        if (*fit) {
            check_method_options(fit, fit_m);
            code = cmd_fit(g, fit_m);
        } else if (*cv) {
            check_method_options(cv, cv_m);
            code = cmd_cv(g, cv_m, inner_folds, fixed);
        } else if (*tune) {
            check_method_options(tune, tune_m);
            code = cmd_tune(g, tune_m);
        } else if (*boot) {
            check_method_options(boot, boot_m);
            code = cmd_bootstrap(g, boot_m, b);
        } else if (*compare) {
            code = cmd_compare(g, methods, ba);
        } else if (*reproduce) {
            code = cmd_reproduce(g, analysis);
        }
    } catch (const UsageError& e) {
        print_warnings();
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        print_warnings();
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        print_warnings();
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    print_warnings();
    return code;
}
