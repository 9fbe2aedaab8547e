#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "garrote/serialize.hpp"

namespace garrote::cli {

namespace fs = std::filesystem;

fs::path data_dir() {
    if (const char* env = std::getenv("GARROTE_DATA_DIR"); env && *env) return env;
    return GARROTE_BUNDLED_DATA_DIR;
}

SyntheticSpec synthetic_spec(const GlobalOptions& g) {
    SyntheticSpec s;
    s.n = g.n;
    s.p = g.p;
    s.k_true = g.k_true;
    s.rho = g.rho;
    s.snr = g.snr;
    s.seed = g.seed;
    s.family = Family::binomial;
    return s;
}

Dataset resolve_dataset(const GlobalOptions& g) {
    const auto sd_of = [&](SdDenominator fallback) {
        if (g.sd.empty()) return fallback;
        if (g.sd == "sample") return SdDenominator::sample;
        if (g.sd == "population") return SdDenominator::population;
        throw UsageError("unknown --sd '" + g.sd + "' (expected sample or population)");
    };
    if (g.data == "prostate" || g.data == "bodyfat") {
        const SdDenominator sd = sd_of(SdDenominator::population);
        if (sd == SdDenominator::population) return g.data == "prostate" ? load_prostate(data_dir()) : load_bodyfat(data_dir());
        if (g.data == "prostate") {
            const Dataset raw = load_csv(data_dir() / "prostate.csv", "lpsa", Family::gaussian);
            std::vector<std::string> names;
            for (Index j = 0; j < raw.p(); ++j) names.push_back("x" + std::to_string(j + 1));
            return standardize(raw.with_x(raw.x(), std::move(names)), sd).first;
        }
        return standardize(prepare_bodyfat(load_csv(data_dir() / "bodyfat.csv", "siri", Family::gaussian)), sd).first;
    }
    if (g.data == "highdim-synthetic" || g.data == "highdim") return make_synthetic_highdim(synthetic_spec(g));
    const Dataset raw = load_csv(g.data, g.response, family_from_string(g.family));
    return standardize(raw, sd_of(SdDenominator::sample)).first;
}

MethodSpec make_spec(const MethodOptions& m) {
    MethodSpec s;
    s.method = method_from_string(m.method);
    s.init = init_kind_from_string(m.init);
    s.rule = rule_from_string(m.rule);
    s.init_rule = rule_from_string(m.init_rule);
    s.gammas = m.gammas;
    s.phis = m.phis;
    return s;
}

MethodSpec parse_method_token(std::string_view token) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : token) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    MethodOptions m;
    m.method = parts[0];
    const Method method = method_from_string(m.method);
    if (method == Method::nng || method == Method::alasso) {
        if (parts.size() > 4) throw UsageError("too many fields in method '" + std::string(token) + "'");
        if (parts.size() > 1) m.init = parts[1];
        if (parts.size() > 2) m.rule = parts[2];
        if (parts.size() > 3) m.init_rule = parts[3];
    } else {
        if (parts.size() > 2) throw UsageError("too many fields in method '" + std::string(token) + "'");
        if (parts.size() > 1) m.rule = parts[1];
    }
    return make_spec(m);
}

Format output_format(const GlobalOptions& g) { return format_from_string(g.format); }

fs::path output_path(const GlobalOptions& g, const std::string& stem) {
    return fs::path(g.out) / (stem + (g.format == "csv" ? ".csv" : ".json"));
}

void write_text_file(const std::string& text, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write " + path.string());
    os << text;
}

void write_json_file(const nlohmann::json& j, const fs::path& path) { write_text_file(j.dump(2) + "\n", path); }

void emit_fit(const SelectorFit& fit, const Dataset& d, const fs::path& path, Format format) {
    if (format == Format::json) return write_json_file(named_fit_json(fit, d.names()), path);
    std::ostringstream os;
    os << "# method," << fit.method << '\n' << "# intercept," << format_double(fit.intercept) << '\n';
    for (const auto& [k, v] : fit.tuning) os << "# " << k << ',' << format_double(v) << '\n';
    for (const auto& [k, v] : fit.fit_stats) os << "# " << k << ',' << format_double(v) << '\n';
    os << "variable,coefficient,selected";
    if (fit.shrinkage_factors) os << ",shrinkage_factor";
    os << '\n';
    for (Index j = 0; j < d.p(); ++j) {
        os << d.names()[static_cast<std::size_t>(j)] << ',' << format_double(fit.coefficients[j]) << ','
           << (fit.coefficients[j] != 0.0 ? 1 : 0);
        if (fit.shrinkage_factors) os << ',' << format_double((*fit.shrinkage_factors)[j]);
        os << '\n';
    }
    write_text_file(os.str(), path);
}

void emit_prediction(const PredictionReport& rep, const fs::path& path, Format format) {
    if (format == Format::json) return write_json_file(nlohmann::json(rep), path);
    std::ostringstream os;
    os << "# method," << rep.method << '\n'
       << "# metric," << rep.metric << '\n'
       << "# value," << format_double(rep.value) << '\n'
       << "# se," << format_double(rep.se) << '\n'
       << "# avg_vars," << format_double(rep.avg_vars) << '\n'
       << "# se_vars," << format_double(rep.se_vars) << '\n'
       << "fold,n_test,loss,n_selected\n";
    for (const auto& f : rep.per_fold)
        os << f.fold << ',' << f.n_test << ',' << format_double(f.loss) << ',' << f.n_selected << '\n';
    write_text_file(os.str(), path);
}

}  // namespace garrote::cli
