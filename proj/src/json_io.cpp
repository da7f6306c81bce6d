#include "lifetail/json_io.hpp"

namespace lifetail {

Json to_json(const Interval& iv) { return Json::array({iv.lo, iv.hi}); }

Json to_json(const FitResult& fr) {
    Json j;
    j["model"] = model_name(fr.model);
    j["gamma"] = fr.params.gamma;
    j["sigma"] = fr.params.sigma;
    j["loglik"] = fr.loglik;
    j["n_obs"] = fr.n_obs;
    j["converged"] = fr.converged;
    j["hessian_unstable"] = fr.hessian_unstable;
    if (fr.covariance) {
        if (fr.model == Model::gp) {
            j["covariance"] = Json::array({Json::array({(*fr.covariance)[0], (*fr.covariance)[1]}),
                                           Json::array({(*fr.covariance)[2], (*fr.covariance)[3]})});
        } else {
            j["covariance"] = Json::array({Json::array({(*fr.covariance)[0]})});
        }
    } else {
        j["covariance"] = nullptr;
    }
    j["ci_gamma"] = fr.ci_gamma ? to_json(*fr.ci_gamma) : Json(nullptr);
    j["ci_sigma"] = fr.ci_sigma ? to_json(*fr.ci_sigma) : Json(nullptr);
    return j;
}

Json to_json(const TestReport& tr) {
    Json j;
    j["statistic"] = tr.statistic;
    j["df"] = tr.df;
    j["p_value"] = tr.p_value;
    j["strategy"] = model_name(tr.strategy);
    j["groups"] = tr.groups;
    return j;
}

Json to_json(const TrendModel& tm) {
    Json j;
    j["link"] = link_name(tm.link);
    j["intercept"] = tm.intercept;
    j["slope"] = tm.slope;
    j["year_center"] = tm.year_center;
    j["covariance"] = Json::array({Json::array({tm.covariance[0], tm.covariance[1]}),
                                   Json::array({tm.covariance[2], tm.covariance[3]})});
    j["loglik"] = tm.loglik;
    return j;
}

Json to_json(const CountEstimate& ce) {
    Json j;
    j["point"] = ce.point;
    j["ci"] = to_json(ce.ci);
    return j;
}

Json to_json(const RecordForecast& rf) {
    Json j;
    j["sigma"] = rf.sigma;
    j["n"] = rf.n;
    j["sigma_ci"] = rf.sigma_interval ? to_json(*rf.sigma_interval) : Json(nullptr);
    j["n_ci"] = rf.n_interval ? to_json(*rf.n_interval) : Json(nullptr);
    return j;
}

Json to_json(const SurvivalEstimate& se) {
    Json j;
    j["point"] = se.point;
    j["ci"] = se.ci ? to_json(*se.ci) : Json(nullptr);
    return j;
}

} // namespace lifetail
