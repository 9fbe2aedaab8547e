#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "garrote/reporting.hpp"
#include "garrote/tuning.hpp"

namespace garrote::cli {

struct GlobalOptions {
    std::string data = "prostate";
    std::string response;  // CSV files only; empty = last column
    std::string family = "gaussian";
    std::string sd;  // "sample" or "population"; empty = population for bundled data, sample otherwise
    std::uint64_t seed = 1;
    int folds = 10;
    int threads = 0;
    std::string out = ".";
    std::string format = "json";
    bool no_timestamp = false;

    // highdim-synthetic
    Index n = 286;
    Index p = 2000;
    Index k_true = 20;
    double rho = 0.0;
    double snr = 8.0;
};

struct MethodOptions {
    std::string method = "nng";
    std::string init = "ols";
    std::string rule = "opt";
    std::string init_rule = "opt";
    std::vector<double> gammas = kDefaultGammas;
    std::vector<double> phis = kDefaultPhis;
};

/// $GARROTE_DATA_DIR, else the directory baked in at build time.
std::filesystem::path data_dir();

/// Built-in name (prostate, bodyfat, highdim-synthetic) or a CSV path.
Dataset resolve_dataset(const GlobalOptions& g);
SyntheticSpec synthetic_spec(const GlobalOptions& g);

MethodSpec make_spec(const MethodOptions& m);
/// "method[:init[:rule[:init_rule]]]" for nng/alasso, "method[:rule]" otherwise.
MethodSpec parse_method_token(std::string_view token);

Format output_format(const GlobalOptions& g);
std::filesystem::path output_path(const GlobalOptions& g, const std::string& stem);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);
void write_text_file(const std::string& text, const std::filesystem::path& path);

void emit_fit(const SelectorFit& fit, const Dataset& d, const std::filesystem::path& path, Format format);
void emit_prediction(const PredictionReport& rep, const std::filesystem::path& path, Format format);

int cmd_fit(const GlobalOptions& g, const MethodOptions& m);
int cmd_cv(const GlobalOptions& g, const MethodOptions& m, int inner_folds, bool fixed);
int cmd_tune(const GlobalOptions& g, const MethodOptions& m);
struct BootstrapArgs {
    int B = 1000;
    std::string mode = "fixed_opt";
    bool keep_draws = false;
    bool fixed_init = false;
};
int cmd_bootstrap(const GlobalOptions& g, const MethodOptions& m, const BootstrapArgs& b);
int cmd_compare(const GlobalOptions& g, const std::vector<std::string>& methods, bool bland_altman);
int cmd_reproduce(const GlobalOptions& g, const std::string& name);

}  // namespace garrote::cli
