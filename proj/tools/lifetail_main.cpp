// lifetail: truncation-aware analysis of threshold-exceedance lifespan data.
//
// One subcommand per analysis artifact: fit / tests / qq / forecast /
// simulate / power. Every run writes its outputs plus a manifest.json that
// echoes the fully resolved configuration; reruns with the same inputs and
// seed produce byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lifetail/dataio.hpp"
#include "lifetail/fit.hpp"
#include "lifetail/hypotest.hpp"
#include "lifetail/json_io.hpp"
#include "lifetail/records.hpp"
#include "lifetail/rng.hpp"
#include "lifetail/simkit.hpp"
#include "lifetail/stats.hpp"
#include "lifetail/trend.hpp"
#include "lifetail/version.hpp"

namespace fs = std::filesystem;
using namespace lifetail;

namespace {

struct RunContext {
    fs::path out_dir;
    Json config;
    std::vector<std::string> outputs;
    int exit_code = 0;

    fs::path path_of(const std::string& name) const { return out_dir / name; }

    void write_file(const std::string& name, const std::string& content) {
        fs::create_directories(out_dir);
        std::ofstream out(path_of(name), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path_of(name).string());
        out << content;
        outputs.push_back(name);
    }

    void write_json(const std::string& name, const Json& j) { write_file(name, j.dump(2) + "\n"); }

    void finish(const std::string& command) {
        Json manifest;
        manifest["tool"] = "lifetail";
        manifest["version"] = kVersion;
        manifest["command"] = command;
        manifest["config"] = config;
        manifest["outputs"] = outputs;
        fs::create_directories(out_dir);
        std::ofstream out(path_of("manifest.json"), std::ios::binary);
        out << manifest.dump(2) << "\n";
    }
};

std::string two_dec(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string slug(const std::string& name) {
    std::string s;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(c));
        else s += '_';
    }
    return s;
}

std::string ci_text(const std::optional<Interval>& ci) {
    if (!ci) return "N/A";
    return "(" + two_dec(ci->lo) + ", " + two_dec(ci->hi) + ")";
}

// ---------------------------------------------------------------------------
// shared data-loading pipeline
// ---------------------------------------------------------------------------

struct LoadedData {
    GroupConfig config;
    std::vector<LifespanRecord> records; // after exclusions
    std::vector<RejectedRow> rejected;
    std::vector<ExcludedRecord> excluded;
};

struct DataOptions {
    std::string data_path;
    std::string groups_path;
    std::optional<double> threshold;
    std::string validation; // "", "A", "A+B"
};

LoadedData load_pipeline(const DataOptions& opt, RunContext& ctx) {
    LoadedData out;
    out.config = load_group_config(opt.groups_path, opt.threshold);
    if (opt.validation == "A") out.config.validation = ValidationFilter::a_only;
    else if (opt.validation == "A+B") out.config.validation = ValidationFilter::a_and_b;
    else if (!opt.validation.empty()) throw std::runtime_error("--validation must be A or A+B");

    const auto loaded = load_records(opt.data_path);
    out.rejected = loaded.rejected;
    auto excl = apply_exclusions(loaded.records, out.config.imputation);
    out.records = std::move(excl.kept);
    out.excluded = std::move(excl.excluded);

    std::ostringstream rej;
    rej << "line,id,reason\n";
    for (const auto& r : out.rejected) rej << r.line << ',' << r.id << ",\"" << r.reason << "\"\n";
    ctx.write_file("rejected_rows.csv", rej.str());

    std::ostringstream exc;
    exc << "id,country,death_date,reason\n";
    for (const auto& e : out.excluded) {
        exc << e.record.id << ',' << e.record.country << ',' << format_date(e.record.death_date)
            << ",\"" << e.reason << "\"\n";
    }
    ctx.write_file("excluded_records.csv", exc.str());
    return out;
}

void write_inconsistency_report(RunContext& ctx, const std::string& name,
                                const std::vector<LifespanRecord>& records,
                                const std::map<std::string, std::vector<ConversionIssue>>& by_group) {
    std::ostringstream os;
    os << "group,id,country,reason\n";
    for (const auto& [group, issues] : by_group) {
        for (const auto& issue : issues) {
            os << group << ',' << issue.id << ',' << records[issue.record_index].country << ",\""
               << issue.reason << "\"\n";
        }
    }
    ctx.write_file(name, os.str());
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

int cmd_fit(const DataOptions& dopt, RunContext& ctx) {
    const auto data = load_pipeline(dopt, ctx);

    Json results = Json::array();
    std::map<std::string, std::vector<ConversionIssue>> issues;
    std::ostringstream table;
    table << pad("group", 16) << pad("n", 6) << pad("shape", 8) << pad("95% CI", 18)
          << pad("p(exp)", 8) << "\n";

    for (const auto& group : data.config.groups) {
        const auto conv = to_truncated_observations(data.records, group, data.config.validation,
                                                    data.config.imputation);
        if (!conv.inconsistent.empty()) issues[group.name] = conv.inconsistent;

        Json row;
        row["group"] = group.name;
        row["n_obs"] = conv.observations.size();
        if (conv.observations.empty()) {
            row["status"] = "insufficient data";
            table << pad(group.name, 16) << pad("0", 6) << "insufficient data\n";
            results.push_back(row);
            ctx.exit_code = std::max(ctx.exit_code, 2);
            continue;
        }
        try {
            const auto gp = fit_gp(conv.observations, Model::gp);
            const auto exp_fit = fit_gp(conv.observations, Model::exponential);
            const auto lrt = lr_test_exponential(conv.observations);
            row["status"] = "ok";
            row["gp"] = to_json(gp);
            row["exponential"] = to_json(exp_fit);
            row["survival_one_year"] = to_json(survival_one_year(exp_fit));
            row["lr_exponential"] = to_json(lrt);
            table << pad(group.name, 16) << pad(std::to_string(conv.observations.size()), 6)
                  << pad(two_dec(gp.params.gamma), 8) << pad(ci_text(gp.ci_gamma), 18)
                  << pad(two_dec(lrt.p_value), 8) << "\n";
        } catch (const std::exception& e) {
            row["status"] = std::string("fit failed: ") + e.what();
            table << pad(group.name, 16) << pad(std::to_string(conv.observations.size()), 6)
                  << "fit failed\n";
            ctx.exit_code = std::max(ctx.exit_code, 2);
        }
        results.push_back(row);
    }

    write_inconsistency_report(ctx, "inconsistent_records.csv", data.records, issues);
    ctx.write_file("fit_table.txt", table.str());
    ctx.write_json("fit_results.json", results);
    return ctx.exit_code;
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

std::map<std::string, double> parse_split_overrides(const std::vector<std::string>& raw) {
    std::map<std::string, double> out;
    for (const auto& item : raw) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("--split-date expects GROUP=YYYY-MM-DD, got '" + item + "'");
        }
        out[item.substr(0, eq)] = fractional_years(parse_date(item.substr(eq + 1)));
    }
    return out;
}

int cmd_tests(const DataOptions& dopt, const std::vector<std::string>& split_overrides,
              RunContext& ctx) {
    const auto data = load_pipeline(dopt, ctx);
    const auto overrides = parse_split_overrides(split_overrides);

    struct GroupObs {
        std::vector<TruncatedObservation> all, women, men;
    };
    std::map<std::string, GroupObs> per_group;
    std::map<std::string, std::vector<ConversionIssue>> issues;
    for (const auto& group : data.config.groups) {
        const auto conv = to_truncated_observations(data.records, group, data.config.validation,
                                                    data.config.imputation);
        if (!conv.inconsistent.empty()) issues[group.name] = conv.inconsistent;
        GroupObs g;
        g.all = conv.observations;
        for (std::size_t i = 0; i < conv.observations.size(); ++i) {
            const auto& rec = data.records[conv.source[i]];
            (rec.gender == Gender::female ? g.women : g.men).push_back(conv.observations[i]);
        }
        per_group[group.name] = std::move(g);
    }
    write_inconsistency_report(ctx, "inconsistent_records.csv", data.records, issues);

    // Table: no difference in mortality between women and men
    Json gender_json = Json::array();
    std::ostringstream gender_table;
    gender_table << pad("group", 16) << pad("GP", 8) << pad("exp", 8) << "\n";
    for (const auto& group : data.config.groups) {
        const auto& g = per_group[group.name];
        Json row;
        row["group"] = group.name;
        row["n_women"] = g.women.size();
        row["n_men"] = g.men.size();
        if (g.women.empty() || g.men.empty()) {
            row["status"] = "insufficient data";
            gender_table << pad(group.name, 16) << "-\n";
            ctx.exit_code = std::max(ctx.exit_code, 2);
        } else {
            try {
                const std::vector<LabeledSample> samples{{"women", g.women}, {"men", g.men}};
                const auto by_gp = lr_test_groups(samples, Model::gp);
                const auto by_exp = lr_test_groups(samples, Model::exponential);
                row["status"] = "ok";
                row["gp"] = to_json(by_gp);
                row["exponential"] = to_json(by_exp);
                gender_table << pad(group.name, 16) << pad(two_dec(by_gp.p_value), 8)
                             << pad(two_dec(by_exp.p_value), 8) << "\n";
            } catch (const std::exception& e) {
                row["status"] = std::string("test failed: ") + e.what();
                gender_table << pad(group.name, 16) << "-\n";
                ctx.exit_code = std::max(ctx.exit_code, 2);
            }
        }
        gender_json.push_back(row);
    }
    ctx.write_file("tests_gender.txt", gender_table.str());
    ctx.write_json("tests_gender.json", gender_json);

    // Table: no difference between the first and last half of the data.
    // "mean" columns are the fitted exponential scales, not sample means.
    Json halves_json = Json::array();
    std::ostringstream halves_table;
    halves_table << pad("group", 16) << pad("deaths", 12) << pad("#", 5) << pad("mean", 7)
                 << pad("deaths", 12) << pad("#", 5) << pad("mean", 7) << pad("p", 6) << "\n";
    for (const auto& group : data.config.groups) {
        const auto& g = per_group[group.name];
        Json row;
        row["group"] = group.name;
        auto fail = [&](const std::string& why) {
            row["status"] = why;
            halves_table << pad(group.name, 16) << "-\n";
            ctx.exit_code = std::max(ctx.exit_code, 2);
        };
        try {
            const auto it = overrides.find(group.name);
            const auto halves = it == overrides.end() ? split_halves(g.all)
                                                      : split_at(g.all, it->second);
            const auto& first = halves.first;
            const auto& second = halves.second;
            if (first.empty() || second.empty()) {
                fail("split produced an empty part");
            } else {
                const auto f1 = fit_gp(first, Model::exponential);
                const auto f2 = fit_gp(second, Model::exponential);
                const auto wald = wald_test_halves(f1, f2);
                auto year_range = [](const std::vector<TruncatedObservation>& v) {
                    const int lo = static_cast<int>(std::floor(v.front().death_time()));
                    const int hi = static_cast<int>(std::floor(v.back().death_time()));
                    return std::to_string(lo) + "-" + std::to_string(hi);
                };
                row["status"] = "ok";
                row["first"] = {{"deaths", year_range(first)},
                                {"n", first.size()},
                                {"mean", f1.params.sigma}};
                row["second"] = {{"deaths", year_range(second)},
                                 {"n", second.size()},
                                 {"mean", f2.params.sigma}};
                row["wald"] = to_json(wald);
                halves_table << pad(group.name, 16) << pad(year_range(first), 12)
                             << pad(std::to_string(first.size()), 5)
                             << pad(two_dec(f1.params.sigma), 7) << pad(year_range(second), 12)
                             << pad(std::to_string(second.size()), 5)
                             << pad(two_dec(f2.params.sigma), 7)
                             << pad(two_dec(wald.p_value), 6) << "\n";
            }
        } catch (const std::exception& e) {
            fail(std::string("failed: ") + e.what());
        }
        halves_json.push_back(row);
    }
    ctx.write_file("tests_halves.txt", halves_table.str());
    ctx.write_json("tests_halves.json", halves_json);

    // Table: no difference in mortality between groups of countries
    Json countries_json = Json::array();
    std::ostringstream countries_table;
    countries_table << pad("comparison", 36) << pad("GP", 8) << pad("exp", 8) << "\n";
    for (const auto& [a, b] : data.config.comparisons) {
        Json row;
        const std::string label = a + " vs " + b;
        row["comparison"] = label;
        try {
            const std::vector<LabeledSample> samples{{a, per_group.at(a).all},
                                                     {b, per_group.at(b).all}};
            const auto by_gp = lr_test_groups(samples, Model::gp);
            const auto by_exp = lr_test_groups(samples, Model::exponential);
            row["status"] = "ok";
            row["gp"] = to_json(by_gp);
            row["exponential"] = to_json(by_exp);
            countries_table << pad(label, 36) << pad(two_dec(by_gp.p_value), 8)
                            << pad(two_dec(by_exp.p_value), 8) << "\n";
        } catch (const std::exception& e) {
            row["status"] = std::string("test failed: ") + e.what();
            countries_table << pad(label, 36) << "-\n";
            ctx.exit_code = std::max(ctx.exit_code, 2);
        }
        countries_json.push_back(row);
    }
    ctx.write_file("tests_countries.txt", countries_table.str());
    ctx.write_json("tests_countries.json", countries_json);
    return ctx.exit_code;
}

// ---------------------------------------------------------------------------
// qq
// ---------------------------------------------------------------------------

int cmd_qq(const DataOptions& dopt, RunContext& ctx) {
    const auto data = load_pipeline(dopt, ctx);
    Json summary = Json::array();
    for (const auto& group : data.config.groups) {
        const auto conv = to_truncated_observations(data.records, group, data.config.validation,
                                                    data.config.imputation);
        Json row;
        row["group"] = group.name;
        row["n_obs"] = conv.observations.size();
        if (conv.observations.empty()) {
            row["status"] = "skipped: no observations";
            summary.push_back(row);
            continue;
        }
        const auto fitted = fit_gp(conv.observations, Model::exponential);
        std::vector<double> x;
        x.reserve(conv.observations.size());
        for (const auto& o : conv.observations) x.push_back(o.excess);
        const auto pts = exponential_qq_points(std::move(x), fitted.params.sigma);

        std::ostringstream csv;
        csv << "theoretical_quantile,observed_excess\n";
        char buf[64];
        for (const auto& [theo, obs] : pts) {
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", theo, obs);
            csv << buf;
        }
        const std::string name = "qq_" + slug(group.name) + ".csv";
        ctx.write_file(name, csv.str());
        row["status"] = "ok";
        row["sigma"] = fitted.params.sigma;
        row["file"] = name;
        summary.push_back(row);
    }
    ctx.write_json("qq_summary.json", summary);
    return ctx.exit_code;
}

// ---------------------------------------------------------------------------
// forecast
// ---------------------------------------------------------------------------

struct ForecastOptions {
    std::string counts_path;
    std::string label;
    std::string params_path;
    std::string link = "both";
    int window_first = 2018;
    int window_last = 2042;
    double ratio = 1.76;
    double sigma = 0.0;
    std::vector<double> sigma_ci;
    double threshold = 110.0;
    double low_age = 119.0;
    double high_age = 128.0;
    std::uint64_t seed = kForecastDefaultSeed;
};

Json record_queries(const RecordForecast& f, const ForecastOptions& opt) {
    const double x_low = opt.low_age - opt.threshold;
    const double x_high = opt.high_age - opt.threshold;
    Json j;
    j["record_below_low_age"] = {
        {"age", opt.low_age},
        {"estimate", record_cdf(f.sigma, f.n, x_low)},
        {"upper_bound", record_cdf(f.sigma_interval->lo, f.n_interval->lo, x_low)},
        {"poisson_estimate", record_cdf_poisson(f.sigma, f.n, x_low)},
    };
    j["record_above_high_age"] = {
        {"age", opt.high_age},
        {"estimate", record_exceedance(f.sigma, f.n, x_high)},
        {"upper_bound", record_exceedance(f.sigma_interval->hi, f.n_interval->hi, x_high)},
        {"poisson_estimate", 1.0 - record_cdf_poisson(f.sigma, f.n, x_high)},
    };
    return j;
}

void write_band(RunContext& ctx, const std::string& name, const RecordForecast& f,
                double threshold) {
    const auto grid = default_forecast_grid();
    const auto band = forecast_band(f, grid);
    std::ostringstream csv;
    csv << "age,density_point,density_lower,density_upper\n";
    char buf[128];
    for (std::size_t i = 0; i < band.x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", threshold + band.x[i],
                      band.point[i], band.lower[i], band.upper[i]);
        csv << buf;
    }
    ctx.write_file(name, csv.str());
}

int cmd_forecast(const ForecastOptions& opt, RunContext& ctx) {
    std::vector<LinkFunction> links;
    if (opt.link == "identity") links = {LinkFunction::identity};
    else if (opt.link == "log") links = {LinkFunction::log};
    else if (opt.link == "both") links = {LinkFunction::identity, LinkFunction::log};
    else throw std::runtime_error("--link must be identity, log, or both");

    double sigma = opt.sigma;
    std::optional<Interval> sigma_ci;
    if (opt.sigma_ci.size() == 2) sigma_ci = Interval{opt.sigma_ci[0], opt.sigma_ci[1]};
    std::map<LinkFunction, CountEstimate> n_by_link;

    Json params_json;
    if (!opt.params_path.empty()) {
        std::ifstream in(opt.params_path);
        if (!in) throw std::runtime_error("cannot open --params file " + opt.params_path);
        nlohmann::json pj;
        in >> pj;
        if (pj.contains("sigma")) sigma = pj.at("sigma").get<double>();
        if (pj.contains("sigma_ci")) {
            sigma_ci = Interval{pj.at("sigma_ci").at(0).get<double>(),
                                pj.at("sigma_ci").at(1).get<double>()};
        }
        for (const auto& [key, link] :
             {std::pair<const char*, LinkFunction>{"n_identity", LinkFunction::identity},
              {"n_log", LinkFunction::log}}) {
            if (pj.contains(key)) {
                n_by_link[link] = CountEstimate{
                    pj.at(key).at("point").get<double>(),
                    {pj.at(key).at("ci").at(0).get<double>(), pj.at(key).at("ci").at(1).get<double>()}};
            }
        }
    }
    if (!(sigma > 0.0)) throw std::runtime_error("forecast: provide --sigma or a --params file");
    if (!sigma_ci) throw std::runtime_error("forecast: provide --sigma-ci or a --params file");

    std::optional<YearlyCounts> counts;
    if (!opt.counts_path.empty()) {
        const auto all = load_yearly_counts(opt.counts_path);
        if (all.empty()) throw std::runtime_error("no rows in " + opt.counts_path);
        if (opt.label.empty()) {
            counts = all.front();
        } else {
            for (const auto& yc : all) {
                if (yc.label == opt.label) counts = yc;
            }
            if (!counts) throw std::runtime_error("label '" + opt.label + "' not found in counts file");
        }
    }

    Json summary;
    summary["sigma"] = sigma;
    summary["sigma_ci"] = to_json(*sigma_ci);
    summary["window"] = {opt.window_first, opt.window_last};
    summary["ratio"] = opt.ratio;
    Json per_link = Json::object();

    for (const auto link : links) {
        const std::string lname = link_name(link);
        Json lj;
        try {
            CountEstimate n_est;
            if (counts) {
                const auto model = fit_trend(*counts, link);
                lj["trend"] = to_json(model);
                std::ostringstream line;
                line << "year,observed,fitted\n";
                for (std::size_t i = 0; i < counts->years.size(); ++i) {
                    line << counts->years[i] << ',' << counts->counts[i] << ','
                         << model.intensity(static_cast<double>(counts->years[i])) << "\n";
                }
                ctx.write_file("trend_line_" + lname + ".csv", line.str());
                const auto raw = forecast_count(model, {opt.window_first, opt.window_last}, opt.seed);
                lj["window_count_unscaled"] = to_json(raw);
                n_est = scale_count(raw, opt.ratio);
            } else {
                const auto it = n_by_link.find(link);
                if (it == n_by_link.end()) {
                    throw std::runtime_error("no count source for link " + lname +
                                             " (provide --counts or --params)");
                }
                n_est = it->second;
            }
            lj["n"] = to_json(n_est);

            RecordForecast f;
            f.sigma = sigma;
            f.n = n_est.point;
            f.sigma_interval = sigma_ci;
            f.n_interval = Interval{n_est.ci.lo, n_est.ci.hi};
            write_band(ctx, "record_band_" + lname + ".csv", f, opt.threshold);
            lj["record"] = record_queries(f, opt);
            lj["status"] = "ok";
        } catch (const std::exception& e) {
            lj["status"] = std::string("failed: ") + e.what();
            ctx.exit_code = std::max(ctx.exit_code, 2);
        }
        per_link[lname] = lj;
    }
    summary["links"] = per_link;
    ctx.write_json("forecast_summary.json", summary);
    return ctx.exit_code;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& scenario_path, std::size_t count_override,
                 std::uint64_t seed_override, bool seed_given, RunContext& ctx) {
    std::ifstream in(scenario_path);
    if (!in) throw std::runtime_error("cannot open scenario file " + scenario_path);
    nlohmann::json sj;
    in >> sj;

    SchemeScenario sc;
    sc.true_params.gamma = sj.value("gamma", 0.0);
    sc.true_params.sigma = sj.value("sigma", 1.34);
    sc.window.begin = sj.at("window").at("begin").get<double>();
    sc.window.end = sj.at("window").at("end").get<double>();
    if (sj.contains("arrivals")) {
        const auto& a = sj.at("arrivals");
        sc.arrivals.rate_start = a.value("rate_start", 1.0);
        sc.arrivals.rate_end = a.value("rate_end", 1.0);
        sc.arrivals.lookback = a.value("lookback", 30.0);
    }
    const std::string scheme = sj.value("scheme", "death-in-window");
    if (scheme == "death-in-window") sc.scheme = SamplingScheme::death_in_window;
    else if (scheme == "alive-at-begin-dead-by-end") sc.scheme = SamplingScheme::alive_at_begin_dead_by_end;
    else throw std::runtime_error("unknown scheme '" + scheme + "'");
    sc.seed = seed_given ? seed_override : sj.value("seed", 1ULL);
    const std::size_t count = count_override > 0 ? count_override : sj.value("count", 500UL);

    const auto obs = simulate_scheme(sc, count);

    std::ostringstream csv;
    csv << "crossing_time,excess,death_time,window_begin,window_end\n";
    char buf[160];
    for (const auto& o : obs) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g\n", o.crossing_time, o.excess,
                      o.death_time(), o.window.begin, o.window.end);
        csv << buf;
    }
    ctx.write_file("observations.csv", csv.str());

    Json summary;
    summary["scheme"] = scheme_name(sc.scheme);
    summary["seed"] = sc.seed;
    summary["n_obs"] = obs.size();
    summary["true_gamma"] = sc.true_params.gamma;
    summary["true_sigma"] = sc.true_params.sigma;
    try {
        summary["fit_truncated_gp"] = to_json(fit_gp(obs, Model::gp));
        summary["fit_truncated_exponential"] = to_json(fit_gp(obs, Model::exponential));
        const auto naive = fit_gp(without_truncation(obs), Model::gp);
        summary["fit_naive_gp"] = to_json(naive);
        const auto naive_exp = fit_gp(without_truncation(obs), Model::exponential);
        std::vector<double> x;
        for (const auto& o : obs) x.push_back(o.excess);
        summary["qq_bend_naive"] = qq_bend_statistic(x, naive_exp.params.sigma);
    } catch (const std::exception& e) {
        summary["fit_status"] = std::string("failed: ") + e.what();
        ctx.exit_code = std::max(ctx.exit_code, 2);
    }
    ctx.write_json("simulation_summary.json", summary);
    return ctx.exit_code;
}

// ---------------------------------------------------------------------------
// power
// ---------------------------------------------------------------------------

int cmd_power(double sigma, std::size_t n, const std::vector<double>& deltas, double level,
              std::size_t reps, std::uint64_t seed, RunContext& ctx) {
    Json rows = Json::array();
    std::ostringstream csv;
    csv << "delta,power,std_error,rejections,reps,implied_sigma\n";
    for (double delta : deltas) {
        const auto res = power_survival_increase(sigma, n, delta, level, reps, seed);
        Json row;
        row["delta"] = delta;
        row["power"] = res.power;
        row["std_error"] = res.std_error;
        row["rejections"] = res.rejections;
        row["reps"] = res.reps;
        row["implied_sigma"] = res.implied_sigma;
        rows.push_back(row);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%g,%.6g,%.6g,%zu,%zu,%.6g\n", delta, res.power,
                      res.std_error, res.rejections, res.reps, res.implied_sigma);
        csv << buf;
    }
    ctx.write_file("power.csv", csv.str());
    ctx.write_json("power.json", rows);
    return ctx.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncation-aware extreme-value analysis of exceedance lifespans"};
    app.set_config("--config", "", "read options from an INI/TOML file (flags win)");
    app.require_subcommand(1);

    DataOptions dopt;
    double threshold_flag = -1.0;
    std::string out_dir = "out";
    std::uint64_t seed = 42;

    auto add_common = [&](CLI::App* cmd, bool needs_data) {
        cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
        cmd->add_option("--seed", seed, "random seed")->capture_default_str();
        if (needs_data) {
            cmd->add_option("--data", dopt.data_path, "lifespan records CSV")->required();
            cmd->add_option("--groups", dopt.groups_path, "group/window config JSON")->required();
            cmd->add_option("--threshold", threshold_flag, "age threshold override (years)");
            cmd->add_option("--validation", dopt.validation, "validation filter: A or A+B");
        }
    };

    auto* fit_cmd = app.add_subcommand("fit", "group-wise GP and exponential fits");
    add_common(fit_cmd, true);

    auto* tests_cmd = app.add_subcommand("tests", "gender / early-late / country-group tests");
    add_common(tests_cmd, true);
    std::vector<std::string> split_overrides;
    tests_cmd->add_option("--split-date", split_overrides,
                          "per-group split override, GROUP=YYYY-MM-DD (repeatable)");

    auto* qq_cmd = app.add_subcommand("qq", "exponential QQ-plot coordinates per group");
    add_common(qq_cmd, true);

    auto* forecast_cmd = app.add_subcommand("forecast", "record-age forecast");
    add_common(forecast_cmd, false);
    ForecastOptions fopt;
    forecast_cmd->add_option("--counts", fopt.counts_path, "yearly death counts CSV");
    forecast_cmd->add_option("--label", fopt.label, "label to select from the counts CSV");
    forecast_cmd->add_option("--params", fopt.params_path,
                             "JSON with sigma/sigma_ci and per-link n estimates");
    forecast_cmd->add_option("--link", fopt.link, "identity, log, or both")->capture_default_str();
    std::string window_spec = "2018:2042";
    forecast_cmd->add_option("--window", window_spec, "forecast year range FIRST:LAST")
        ->capture_default_str();
    forecast_cmd->add_option("--ratio", fopt.ratio, "count scaling ratio")->capture_default_str();
    forecast_cmd->add_option("--sigma", fopt.sigma, "exponential scale estimate");
    forecast_cmd->add_option("--sigma-ci", fopt.sigma_ci, "sigma 95% interval LO HI")->expected(2);
    forecast_cmd->add_option("--threshold", fopt.threshold, "age threshold (years)")
        ->capture_default_str();
    forecast_cmd->add_option("--low-age", fopt.low_age, "lower record-age query")
        ->capture_default_str();
    forecast_cmd->add_option("--high-age", fopt.high_age, "upper record-age query")
        ->capture_default_str();

    auto* sim_cmd = app.add_subcommand("simulate", "window-sampling scheme simulation");
    add_common(sim_cmd, false);
    std::string scenario_path;
    std::size_t sim_count = 0;
    sim_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    sim_cmd->add_option("--count", sim_count, "observations to generate (overrides scenario)");

    auto* power_cmd = app.add_subcommand("power", "power for a yearly-survival increase");
    add_common(power_cmd, false);
    double p_sigma = 1.34, p_level = 0.05;
    std::size_t p_n = 566, p_reps = 1000;
    std::vector<double> p_deltas{0.0, 0.02, 0.05, 0.10};
    power_cmd->add_option("--sigma", p_sigma, "baseline exponential scale")->capture_default_str();
    power_cmd->add_option("--n", p_n, "sample size per arm")->capture_default_str();
    power_cmd->add_option("--level", p_level, "test level")->capture_default_str();
    power_cmd->add_option("--reps", p_reps, "replications per delta")->capture_default_str();
    power_cmd->add_option("--deltas", p_deltas, "survival increases to scan");

    CLI11_PARSE(app, argc, argv);

    RunContext ctx;
    ctx.out_dir = out_dir;

    try {
        if (threshold_flag > 0.0) dopt.threshold = threshold_flag;
        ctx.config["out"] = out_dir;
        ctx.config["seed"] = seed;

        int rc = 0;
        std::string command;
        if (*fit_cmd || *tests_cmd || *qq_cmd) {
            ctx.config["data"] = dopt.data_path;
            ctx.config["groups"] = dopt.groups_path;
            ctx.config["threshold"] = dopt.threshold ? Json(*dopt.threshold) : Json(nullptr);
            ctx.config["validation"] = dopt.validation.empty() ? "from config" : dopt.validation;
        }
        if (*fit_cmd) {
            command = "fit";
            rc = cmd_fit(dopt, ctx);
        } else if (*tests_cmd) {
            command = "tests";
            ctx.config["split_date"] = split_overrides;
            rc = cmd_tests(dopt, split_overrides, ctx);
        } else if (*qq_cmd) {
            command = "qq";
            rc = cmd_qq(dopt, ctx);
        } else if (*forecast_cmd) {
            command = "forecast";
            const auto colon = window_spec.find(':');
            if (colon == std::string::npos) throw std::runtime_error("--window expects FIRST:LAST");
            fopt.window_first = std::stoi(window_spec.substr(0, colon));
            fopt.window_last = std::stoi(window_spec.substr(colon + 1));
            fopt.seed = seed;
            ctx.config["counts"] = fopt.counts_path;
            ctx.config["params"] = fopt.params_path;
            ctx.config["link"] = fopt.link;
            ctx.config["window"] = {fopt.window_first, fopt.window_last};
            ctx.config["ratio"] = fopt.ratio;
            ctx.config["sigma"] = fopt.sigma;
            ctx.config["threshold"] = fopt.threshold;
            rc = cmd_forecast(fopt, ctx);
        } else if (*sim_cmd) {
            command = "simulate";
            ctx.config["scenario"] = scenario_path;
            ctx.config["count"] = sim_count;
            rc = cmd_simulate(scenario_path, sim_count, seed, sim_cmd->count("--seed") > 0, ctx);
        } else if (*power_cmd) {
            command = "power";
            ctx.config["sigma"] = p_sigma;
            ctx.config["n"] = p_n;
            ctx.config["level"] = p_level;
            ctx.config["reps"] = p_reps;
            ctx.config["deltas"] = p_deltas;
            rc = cmd_power(p_sigma, p_n, p_deltas, p_level, p_reps, seed, ctx);
        }
        ctx.finish(command);
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "lifetail: " << e.what() << "\n";
        return 1;
    }
}
