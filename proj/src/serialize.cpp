#include "garrote/serialize.hpp"

#include <cmath>

namespace garrote {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json vector_json(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

json matrix_json(const Matrix& m) {
    json a = json::array();
    for (Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
    return a;
}

void to_json(json& j, const FitResult& f) {
    j = json{{"coefficients", vector_json(f.coefficients)},
             {"intercept", number(f.intercept)},
             {"sigma2_hat", number(f.sigma2_hat)},
             {"cov", matrix_json(f.cov)},
             {"p_values", vector_json(f.p_values)},
             {"df_used", f.df_used},
             {"iterations", f.iterations}};
}

void to_json(json& j, const CollinearityReport& c) {
    j = json{{"vif", vector_json(c.vif)}, {"condition_number", number(c.condition_number)}};
}

void to_json(json& j, const PathFit& f) {
    json conv = json::array();
    for (bool b : f.converged) conv.push_back(b);
    j = json{{"lambdas", f.lambdas},
             {"coefficients", matrix_json(f.coefficients.transpose())},
             {"intercepts", vector_json(f.intercepts)},
             {"df", f.df},
             {"converged", conv}};
}

void to_json(json& j, const InitialEstimate& e) {
    j = json{{"kind", std::string(to_string(e.kind))},
             {"values", vector_json(e.values)},
             {"intercept", number(e.intercept)},
             {"nonzero_set", e.nonzero_set}};
    j["lambda"] = e.lambda ? number(*e.lambda) : json(nullptr);
    j["rule"] = e.rule ? json(std::string(to_string(*e.rule))) : json(nullptr);
}

void to_json(json& j, const SelectorFit& f) {
    j = json{{"method", f.method},
             {"coefficients", vector_json(f.coefficients)},
             {"intercept", number(f.intercept)},
             {"selected", f.selected},
             {"tuning", f.tuning},
             {"fit_stats", f.fit_stats}};
    j["shrinkage_factors"] = f.shrinkage_factors ? vector_json(*f.shrinkage_factors) : json(nullptr);
}

void to_json(json& j, const CVResult& r) {
    j = json{{"grid", r.grid},
             {"mean_loss", r.mean_loss},
             {"se_loss", r.se_loss},
             {"idx_opt", r.idx_opt},
             {"idx_1se", r.idx_1se},
             {"loss_kind", r.loss_kind == LossKind::mse ? "mse" : "deviance"}};
}

void to_json(json& j, const FoldPrediction& f) {
    j = json{{"fold", f.fold}, {"n_test", f.n_test}, {"loss", number(f.loss)}, {"n_selected", f.n_selected}};
}

void to_json(json& j, const PredictionReport& r) {
    j = json{{"method", r.method},       {"metric", r.metric},     {"value", number(r.value)},
             {"se", number(r.se)},       {"avg_vars", number(r.avg_vars)},
             {"se_vars", number(r.se_vars)}, {"per_fold", r.per_fold}};
}

void to_json(json& j, const SandwichSE& s) {
    j = json{{"se", vector_json(s.se)}, {"sigma2", number(s.sigma2)}, {"active", s.active}};
}

void to_json(json& j, const BootstrapSummary& s) {
    j = json{{"B", s.B},
             {"mode", std::string(to_string(s.mode))},
             {"seed", s.seed},
             {"method", s.method},
             {"mean_est", vector_json(s.mean_est)},
             {"se", vector_json(s.se)},
             {"nonzero_prop", vector_json(s.nonzero_prop)},
             {"fixed_tuning", s.fixed_tuning},
             {"failed", s.failed},
             {"retries", s.retries}};
}

void to_json(json& j, const BlandAltman& b) {
    json pts = json::array();
    for (const auto& [m, d] : b.points) pts.push_back({number(m), number(d)});
    j = json{{"mean_diff", number(b.mean_diff)},
             {"sd_diff", number(b.sd_diff)},
             {"loa", {number(b.loa.first), number(b.loa.second)}},
             {"ci_mean", {number(b.ci_mean.first), number(b.ci_mean.second)}},
             {"points", pts}};
}

void to_json(json& j, const ComparisonTable& t) {
    json r2 = json::array(), ar2 = json::array();
    for (double v : t.r2) r2.push_back(number(v));
    for (double v : t.adj_r2) ar2.push_back(number(v));
    j = json{{"methods", t.methods},   {"variables", t.variables}, {"coefficients", matrix_json(t.coefficients)},
             {"n_vars", t.n_vars},     {"r2", r2},                 {"adj_r2", ar2}};
}

json named_fit_json(const SelectorFit& f, const std::vector<std::string>& names) {
    json j = f;
    json coefs = json::object();
    for (Index k = 0; k < f.coefficients.size(); ++k)
        coefs[names[static_cast<std::size_t>(k)]] = number(f.coefficients[k]);
    json sel = json::array();
    for (Index k : f.selected) sel.push_back(names[static_cast<std::size_t>(k)]);
    j["coefficients_by_name"] = coefs;
    j["selected_names"] = sel;
    return j;
}

}  // namespace garrote
