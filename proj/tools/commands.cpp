#include <iostream>

#include "cli.hpp"
#include "garrote/serialize.hpp"

namespace garrote::cli {

namespace {

void print_fit(const SelectorFit& fit, const Dataset& d, const std::string& label) {
    std::cout << label << ": " << fit.selected.size() << " of " << d.p() << " selected";
    if (!fit.selected.empty()) {
        std::cout << " (";
        const std::size_t shown = std::min<std::size_t>(fit.selected.size(), 12);
        for (std::size_t i = 0; i < shown; ++i)
            std::cout << (i ? " " : "") << d.names()[static_cast<std::size_t>(fit.selected[i])];
        if (shown < fit.selected.size()) std::cout << " ...";
        std::cout << ")";
    }
    std::cout << '\n';
    for (const auto& [k, v] : fit.tuning) std::cout << "  " << k << " = " << format_double(v) << '\n';
    for (const auto& [k, v] : fit.fit_stats) std::cout << "  " << k << " = " << format_double(v) << '\n';
}

}  // namespace

int cmd_fit(const GlobalOptions& g, const MethodOptions& m) {
    const Format format = output_format(g);
    const Dataset d = resolve_dataset(g);
    const MethodSpec spec = make_spec(m);
    const SelectorFit fit = tuned_fit(d, spec, assign_folds(d.n(), g.folds, g.seed));
    const auto path = output_path(g, "fit");
    emit_fit(fit, d, path, format);
    print_fit(fit, d, spec.label());
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_cv(const GlobalOptions& g, const MethodOptions& m, int inner_folds, bool fixed) {
    const Format format = output_format(g);
    const Dataset d = resolve_dataset(g);
    const MethodSpec spec = make_spec(m);
    PredictionOptions o;
    o.outer_folds = g.folds;
    o.inner_folds = inner_folds;
    o.seed = g.seed;
    o.threads = g.threads;
    o.nested = !fixed;
    const PredictionReport rep = cv_prediction_error(d, spec, o);
    const auto path = output_path(g, "prediction");
    emit_prediction(rep, path, format);
    std::cout << rep.method << ": " << rep.metric << " = " << format_double(rep.value) << " (se "
              << format_double(rep.se) << "), variables " << format_double(rep.avg_vars) << " (se "
              << format_double(rep.se_vars) << ")\n"
              << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_tune(const GlobalOptions& g, const MethodOptions& m) {
    const Format format = output_format(g);
    const Dataset d = resolve_dataset(g);
    const MethodSpec spec = make_spec(m);
    const FoldAssignment folds = assign_folds(d.n(), g.folds, g.seed);
    CVResult cv;
    switch (spec.method) {
        case Method::ridge: cv = cv_lasso(d, folds, Norm::l2, spec.n_lambda); break;
        case Method::lasso: cv = cv_lasso(d, folds, Norm::l1, spec.n_lambda); break;
        case Method::nng: {
            const InitialEstimate init = compute_initial(d, spec.init, folds, spec.init_rule);
            if (init.nonzero_set.empty()) throw NumericalError("initial estimate selected no variables");
            cv = cv_nng(d, init, folds, spec.n_lambda);
            break;
        }
        case Method::alasso: {
            const InitialEstimate init = compute_initial(d, spec.init, folds, spec.init_rule);
            if (init.nonzero_set.empty()) throw NumericalError("initial estimate selected no variables");
            cv = cv_alasso(d, init, folds, spec.gammas, spec.n_lambda);
            break;
        }
        case Method::rlasso: cv = cv_rlasso(d, folds, spec.phis, spec.n_lambda); break;
        case Method::subset_bic:
        case Method::subset_cv: cv = cv_subset(d, folds, d.p()); break;
        case Method::null_model:
        case Method::ols: throw UsageError("method '" + m.method + "' has no tuning parameter");
    }
    const auto path = output_path(g, "cv");
    emit_plot_data(cv, path, format);
    const auto show = [&](const char* tag, std::size_t i) {
        std::cout << tag << ":";
        for (const auto& [k, v] : cv.grid[i]) std::cout << ' ' << k << '=' << format_double(v);
        std::cout << "  loss " << format_double(cv.mean_loss[i]) << " (se " << format_double(cv.se_loss[i]) << ")\n";
    };
    show("opt", cv.idx_opt);
    show("1se", cv.idx_1se);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_bootstrap(const GlobalOptions& g, const MethodOptions& m, const BootstrapArgs& b) {
    const Format format = output_format(g);
    const Dataset d = resolve_dataset(g);
    const MethodSpec spec = make_spec(m);
    BootstrapOptions o;
    o.B = b.B;
    o.mode = bootstrap_mode_from_string(b.mode);
    o.seed = g.seed;
    o.threads = g.threads;
    o.folds = g.folds;
    o.recompute_init = !b.fixed_init;
    o.keep_draws = b.keep_draws;
    const BootstrapSummary s = bootstrap_se(d, spec, o);
    const auto path = output_path(g, "bootstrap");
    emit_plot_data(s, d.names(), path, format);
    std::cout << s.method << " bootstrap, B = " << s.B << ", mode " << to_string(s.mode) << ", failed " << s.failed
              << "\n";
    const std::size_t shown = std::min<std::size_t>(d.names().size(), 20);
    for (std::size_t j = 0; j < shown; ++j) {
        const auto jj = static_cast<Index>(j);
        std::cout << "  " << d.names()[j] << "  mean " << format_double(s.mean_est[jj]) << "  se "
                  << format_double(s.se[jj]) << "  nonzero " << format_double(s.nonzero_prop[jj]) << '\n';
    }
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_compare(const GlobalOptions& g, const std::vector<std::string>& methods, bool bland_altman_out) {
    const Format format = output_format(g);
    const Dataset d = resolve_dataset(g);
    if (methods.empty()) throw UsageError("compare needs at least one method");
    const FoldAssignment folds = assign_folds(d.n(), g.folds, g.seed);
    TuningCache cache;
    std::vector<SelectorFit> fits;
    std::vector<std::string> labels;
    for (const auto& token : methods) {
        const MethodSpec spec = parse_method_token(token);
        fits.push_back(tuned_fit(d, spec, folds, &cache));
        labels.push_back(spec.label());
    }
    const ComparisonTable table = build_comparison(fits, d, labels);
    const auto path = output_path(g, "comparison");
    if (format == Format::json)
        write_json_file(nlohmann::json(table), path);
    else
        write_text_file(table.to_csv(false), path);
    std::cout << table.render_text(true) << "wrote " << path.string() << '\n';

    if (bland_altman_out) {
        if (fits.size() < 2) throw UsageError("--bland-altman needs at least two methods");
        const Vector ref = linear_predictor(d.x(), fits[0].coefficients, fits[0].intercept);
        for (std::size_t m = 1; m < fits.size(); ++m) {
            const BlandAltman ba = bland_altman(ref, linear_predictor(d.x(), fits[m].coefficients, fits[m].intercept));
            const auto ba_path = output_path(g, "bland_altman_" + std::to_string(m));
            emit_plot_data(ba, ba_path, format);
            std::cout << labels[0] << " vs " << labels[m] << ": mean diff " << format_double(ba.mean_diff)
                      << ", LOA (" << format_double(ba.loa.first) << ", " << format_double(ba.loa.second) << ")\n"
                      << "wrote " << ba_path.string() << '\n';
        }
    }
    return 0;
}

}  // namespace garrote::cli
