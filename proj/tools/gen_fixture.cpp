// Regenerates the bundled synthetic lifespan fixture:
//   data/idl_synthetic.csv           566 records shaped like the default groups
//   data/idl_synthetic_manifest.json expected per-group counts for tests
//
// Usage: gen_fixture <groups_default.json> <out_csv> <out_manifest> [seed]
//
// Excess lifetimes are exponential (sigma 1.34) under the death-in-window
// scheme with increasing arrivals, so the fixture exercises the same
// truncation geometry as real register data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "lifetail/dataio.hpp"
#include "lifetail/rng.hpp"
#include "lifetail/simkit.hpp"

using namespace lifetail;

namespace {

struct CountrySpec {
    std::string code;
    std::size_t women;
    std::size_t men;
};

// Table-shaped composition: per-group totals follow the bundled group config.
const std::vector<CountrySpec> kComposition = {
    {"DNK", 10, 1}, {"DEU", 19, 1}, {"ENW", 50, 3}, {"ITA", 40, 8},
    {"FRA", 45, 7}, {"ESP", 12, 2}, {"USA", 260, 26}, {"QBC", 12, 2},
    {"JPN", 55, 9}, {"AUS", 4, 0},
};

struct Row {
    std::string id, country, gender;
    Date birth, death;
    std::int64_t age_days;
    bool year_only_death;
};

} // namespace

int main(int argc, char** argv) {
    if (argc < 4) {
        std::cerr << "usage: gen_fixture <groups.json> <out_csv> <out_manifest> [seed]\n";
        return 1;
    }
    const std::uint64_t seed = argc > 4 ? std::stoull(argv[4]) : 20180642ULL;
    const auto cfg = load_group_config(argv[1]);
    const auto& world = cfg.groups.back(); // carries every country window

    std::vector<Row> rows;
    for (const auto& spec : kComposition) {
        const SamplingWindow window = world.windows.at(spec.code);
        SchemeScenario sc;
        sc.true_params = {0.0, 1.34};
        sc.window = window;
        sc.arrivals = {1.0, 4.0, 12.0};
        sc.scheme = SamplingScheme::death_in_window;
        sc.seed = Rng::derive_stream(seed, std::hash<std::string>{}(spec.code));

        const std::size_t want = spec.women + spec.men;
        const auto candidates = simulate_scheme(sc, want + 60);

        std::size_t taken = 0;
        for (const auto& obs : candidates) {
            if (taken == want) break;
            // Round to calendar dates the way the loader will reconstruct them,
            // and keep only candidates that still satisfy the window inclusion.
            const auto birth_days = static_cast<std::int64_t>(
                std::llround((obs.crossing_time - 110.0 - 1970.0) * kDaysPerYear));
            const auto age_days = static_cast<std::int64_t>(
                std::llround((obs.excess + 110.0) * kDaysPerYear));
            TruncatedObservation rounded;
            rounded.crossing_time = 1970.0 + static_cast<double>(birth_days) / kDaysPerYear + 110.0;
            rounded.excess = static_cast<double>(age_days) / kDaysPerYear - 110.0;
            rounded.window = window;
            if (rounded.excess < 0.0 || !rounded.satisfies_inclusion()) continue;

            Row row;
            row.country = spec.code;
            row.gender = taken < spec.women ? "female" : "male";
            char idbuf[32];
            std::snprintf(idbuf, sizeof(idbuf), "SYN-%s-%03zu", spec.code.c_str(), taken + 1);
            row.id = idbuf;
            row.birth = civil_from_days(birth_days);
            row.death = civil_from_days(birth_days + age_days);
            row.age_days = age_days;
            row.year_only_death = spec.code == "USA"; // register reports year of death only
            rows.push_back(row);
            ++taken;
        }
        if (taken != want) {
            std::cerr << "gen_fixture: could not place " << want << " records for " << spec.code
                      << "\n";
            return 1;
        }
    }

    std::ofstream csv(argv[2]);
    csv << "id,country,gender,validation,birth_date,death_date,age_at_death_days\n";
    for (const auto& r : rows) {
        Date death = r.death;
        if (r.year_only_death) death.year_only = true;
        csv << r.id << ',' << r.country << ',' << r.gender << ",A," << format_date(r.birth) << ','
            << format_date(death) << ',' << r.age_days << '\n';
    }

    std::map<std::string, std::pair<std::size_t, std::size_t>> by_country;
    for (const auto& r : rows) {
        auto& c = by_country[r.country];
        (r.gender == "female" ? c.first : c.second) += 1;
    }

    nlohmann::ordered_json manifest;
    manifest["rows"] = rows.size();
    manifest["seed"] = seed;
    for (const auto& [code, counts] : by_country) {
        manifest["by_country"][code] = {{"women", counts.first}, {"men", counts.second}};
    }
    for (const auto& g : cfg.groups) {
        std::size_t women = 0, men = 0;
        for (const auto& c : g.countries) {
            const auto it = by_country.find(c);
            if (it == by_country.end()) continue;
            women += it->second.first;
            men += it->second.second;
        }
        manifest["by_group"][g.name] = {{"women", women}, {"men", men}};
    }

    std::ofstream mf(argv[3]);
    mf << manifest.dump(2) << '\n';
    std::cout << "wrote " << rows.size() << " records\n";
    return 0;
}
