#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "lifetail/dataio.hpp"
#include "lifetail/rng.hpp"

using namespace lifetail;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

const char* kHeader = "id,country,gender,validation,birth_date,death_date,age_at_death_days\n";

LifespanRecord make_record(const std::string& id, const std::string& country,
                           const std::string& birth, const std::string& death, int age_days) {
    LifespanRecord r;
    r.id = id;
    r.country = country;
    r.gender = Gender::female;
    r.validation = Validation::A;
    r.birth_date = parse_date(birth);
    r.death_date = parse_date(death);
    r.age_at_death_days = age_days;
    return r;
}

TruncatedObservation obs_at(double death_time) {
    // crossing long before a wide window; death time carries the ordering
    return TruncatedObservation{death_time - 2.0, 2.0, SamplingWindow{-1e9, 1e9}};
}

} // namespace

TEST_CASE("date parsing and civil-day arithmetic") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(1970, 1, 2) == 1);
    CHECK(days_from_civil(1969, 12, 31) == -1);
    CHECK(days_from_civil(2000, 3, 1) == 11017);

    const Date leap = parse_date("2000-02-29");
    CHECK(leap.day == 29);
    CHECK_THROWS_AS(parse_date("1900-02-29"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("1990-13-01"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("199O-01-01"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("04-05-1990"), std::invalid_argument);

    const Date y = parse_date("1998");
    CHECK(y.year_only);
    CHECK_THROWS_AS(fractional_years(y), std::invalid_argument);
    CHECK(format_date(impute_death_date(y, ImputationPolicy::july2)) == "1998-07-02");
    CHECK(format_date(impute_death_date(y, ImputationPolicy::january1)) == "1998-01-01");
    CHECK(format_date(impute_death_date(y, ImputationPolicy::december31)) == "1998-12-31");

    // round trip across two centuries
    for (std::int64_t d : {-40000, -1, 0, 1, 10957, 25000}) {
        const Date c = civil_from_days(d);
        CHECK(days_from_civil(c.year, c.month, c.day) == d);
    }
    CHECK(fractional_years(parse_date("1970-01-01")) == 1970.0);
}

TEST_CASE("load_records accepts the schema and reports bad rows") {
    SUBCASE("empty file with header") {
        const auto path = write_temp("lt_empty.csv", kHeader);
        const auto res = load_records(path);
        CHECK(res.records.empty());
        CHECK(res.rejected.empty());
    }

    SUBCASE("wrong header is fatal") {
        const auto path = write_temp("lt_badheader.csv", "id,country\nX,USA\n");
        CHECK_THROWS_AS(load_records(path), std::runtime_error);
        CHECK_THROWS_AS(load_records(fs::temp_directory_path() / "lt_missing.csv"),
                        std::runtime_error);
        CHECK_THROWS_AS(load_records(path, 2), std::invalid_argument);
    }

    SUBCASE("row diagnostics") {
        const std::string body =
            std::string(kHeader) +
            "ok1,FRA,female,A,1885-02-21,1997-08-04,41071\n"       // valid
            "bad1,FRA,female,A,1990-01-01,1985-01-01,1000\n"       // death before birth
            "bad2,FRA,female,A,1885-02-30,1997-08-04,41071\n"      // bad date
            "bad3,FRA,female,A,1885-02-21,1997-08-04,-5\n"         // negative age
            "bad4,FRA,person,A,1885-02-21,1997-08-04,41071\n"      // bad gender
            "bad5,FRA,female,C,1885-02-21,1997-08-04,41071\n"      // bad validation
            "bad6,FRA,female,A,1885-02-21,1997-08-04,41071,extra\n" // extra column
            "bad7,FRA,female,A,1885-02-21,1997-08-04,30000\n"      // age inconsistent with dates
            "ok2,USA,male,B,1886-03-11,1998,41000\n";              // year-only death
        const auto path = write_temp("lt_rows.csv", body);
        const auto res = load_records(path);
        CHECK(res.records.size() == 2);
        CHECK(res.rejected.size() == 7);
        CHECK(res.records[1].death_date.year_only);
        for (const auto& rej : res.rejected) CHECK_FALSE(rej.reason.empty());
        // age within one day of the date difference passes
        const auto days = days_from_civil(1997, 8, 4) - days_from_civil(1885, 2, 21);
        CHECK(res.records[0].age_at_death_days == days);
    }
}

TEST_CASE("sampling-scheme exclusions") {
    std::vector<LifespanRecord> recs;
    recs.push_back(make_record("us_kept", "USA", "1885-01-15", "1999-06-30", 41803));
    recs.push_back(make_record("us_gone", "USA", "1888-01-15", "2001-03-01", 41318));
    recs.push_back(make_record("us_yr", "USA", "1889-01-15", "2001", 41000));
    recs.push_back(make_record("jp_96", "JPN", "1885-06-01", "1996-06-01", 40538));
    recs.push_back(make_record("jp_edge", "JPN", "1893-02-01", "2003-08-31", 40387));
    recs.push_back(make_record("jp_gone", "JPN", "1893-02-01", "2003-09-01", 40388));
    recs.push_back(make_record("fr_kept", "FRA", "1890-12-31", "2001-05-05", 40302));

    const auto res = apply_exclusions(recs);
    CHECK(res.kept.size() == 3);
    CHECK(res.excluded.size() == 4);
    CHECK(res.excluded[0].record.id == "us_gone");
    CHECK(res.excluded[0].reason.find("USA") != std::string::npos);
    CHECK(res.excluded[1].record.id == "us_yr");
    CHECK(res.excluded[2].record.id == "jp_96");
    CHECK(res.excluded[3].record.id == "jp_gone");

    // idempotent: excluding the kept set removes nothing further
    const auto again = apply_exclusions(res.kept);
    CHECK(again.kept.size() == res.kept.size());
    CHECK(again.excluded.empty());
}

TEST_CASE("conversion to truncated observations") {
    GroupSpec spec;
    spec.name = "France";
    spec.countries = {"FRA"};
    spec.threshold = 110.0;
    spec.windows["FRA"] = SamplingWindow{fractional_years(parse_date("1987-01-01")),
                                         fractional_years(parse_date("2004-01-01"))};

    std::vector<LifespanRecord> recs;
    // age 112.45-ish: 41072 days
    recs.push_back(make_record("in", "FRA", "1885-02-21", "1997-08-03", 41072));
    recs.push_back(make_record("below", "FRA", "1900-01-01", "2005-01-01", 38350)); // ~105y
    recs.push_back(make_record("outside", "FRA", "1870-01-01", "1981-01-01", 40542));
    recs.push_back(make_record("skip_country", "DEU", "1885-02-21", "1997-08-03", 41072));
    recs.back().validation = Validation::B;
    recs.push_back(make_record("levelB", "FRA", "1885-02-21", "1997-08-03", 41072));
    recs.back().validation = Validation::B;

    SUBCASE("A-only filter") {
        const auto res = to_truncated_observations(recs, spec);
        REQUIRE(res.observations.size() == 1);
        CHECK(res.source[0] == 0);
        const auto& o = res.observations[0];
        CHECK(o.excess == doctest::Approx(41072.0 / 365.25 - 110.0).epsilon(1e-12));
        CHECK(o.excess == doctest::Approx(2.45).epsilon(1e-3));
        CHECK(o.crossing_time ==
              doctest::Approx(fractional_years(parse_date("1885-02-21")) + 110.0).epsilon(1e-12));
        CHECK(o.satisfies_inclusion());
        REQUIRE(res.rejected.size() == 1);
        CHECK(res.rejected[0].id == "below");
        REQUIRE(res.inconsistent.size() == 1);
        CHECK(res.inconsistent[0].id == "outside");
    }

    SUBCASE("A+B keeps the level-B record") {
        const auto res = to_truncated_observations(recs, spec, ValidationFilter::a_and_b);
        CHECK(res.observations.size() == 2);
    }

    SUBCASE("raising the threshold can only shrink the count") {
        for (double thr : {110.5, 111.0, 111.5, 112.0, 112.5}) {
            GroupSpec high = spec;
            high.threshold = thr;
            const auto res = to_truncated_observations(recs, high);
            CHECK(res.observations.size() <= 1);
            if (thr > 112.4) CHECK(res.observations.empty());
        }
    }

    SUBCASE("US year-only death date is imputed") {
        GroupSpec us;
        us.name = "NA";
        us.countries = {"USA"};
        us.threshold = 110.0;
        us.windows["USA"] = SamplingWindow{fractional_years(parse_date("1980-01-01")),
                                           fractional_years(parse_date("2000-01-01"))};
        std::vector<LifespanRecord> one{make_record("usy", "USA", "1886-03-11", "1998", 41000)};
        const auto res = to_truncated_observations(one, us);
        REQUIRE(res.observations.size() == 1);
        CHECK(format_date(res.death_dates[0]) == "1998-07-02");
        const auto jan = to_truncated_observations(one, us, ValidationFilter::a_only,
                                                   ImputationPolicy::january1);
        CHECK(format_date(jan.death_dates[0]) == "1998-01-01");
    }
}

TEST_CASE("split_halves follows the strict-size rule") {
    auto distinct = [](int n) {
        std::vector<TruncatedObservation> v;
        for (int i = 0; i < n; ++i) v.push_back(obs_at(1980.0 + i));
        return v;
    };

    SUBCASE("forced sizes for small n") {
        const auto [f5, s5] = split_halves(distinct(5));
        CHECK(f5.size() == 2);
        CHECK(s5.size() == 3);
        const auto [f4, s4] = split_halves(distinct(4));
        CHECK(f4.size() == 1);
        CHECK(s4.size() == 3);
        const auto [f84, s84] = split_halves(distinct(84));
        CHECK(f84.size() == 41);
        CHECK(s84.size() == 43);
    }

    SUBCASE("brute-force oracle over many sizes") {
        for (int n = 3; n <= 40; ++n) {
            const auto v = distinct(n);
            // oracle: the largest k with strictly larger second part
            std::size_t expect = 0;
            for (std::size_t k = 1; k < static_cast<std::size_t>(n); ++k) {
                if (static_cast<std::size_t>(n) - k > k) expect = k;
            }
            CHECK(split_index(v) == expect);
        }
    }

    SUBCASE("tie group moves whole into the second part") {
        std::vector<TruncatedObservation> v{obs_at(1980), obs_at(1985), obs_at(1985),
                                            obs_at(1985), obs_at(1990)};
        const auto [first, second] = split_halves(v);
        CHECK(first.size() == 1);
        CHECK(second.size() == 4);
    }

    SUBCASE("identical dates are unsplittable") {
        std::vector<TruncatedObservation> v{obs_at(1985), obs_at(1985), obs_at(1985)};
        CHECK_THROWS_AS(split_halves(v), std::invalid_argument);
    }

    SUBCASE("concatenating the halves reproduces the date-sorted sample") {
        std::vector<TruncatedObservation> v;
        Rng rng(99);
        for (int i = 0; i < 37; ++i) v.push_back(obs_at(1960.0 + 40.0 * rng.uniform01()));
        auto [first, second] = split_halves(v);
        first.insert(first.end(), second.begin(), second.end());
        auto sorted = v;
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return a.death_time() < b.death_time();
        });
        REQUIRE(first.size() == sorted.size());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            CHECK(first[i].death_time() == sorted[i].death_time());
        }
    }

    SUBCASE("explicit split date override") {
        const auto v = distinct(6);
        const auto [first, second] = split_at(v, 1983.0);
        CHECK(first.size() == 3);
        CHECK(second.size() == 3);
    }
}

TEST_CASE("bundled group config and synthetic fixture") {
    const fs::path data_dir{LIFETAIL_DATA_DIR};
    const auto cfg = load_group_config(data_dir / "groups_default.json");
    CHECK(cfg.groups.size() == 7);
    CHECK(cfg.threshold == 110.0);
    CHECK(cfg.comparisons.size() == 3);

    const auto table = load_records(data_dir / "idl_synthetic.csv");
    CHECK(table.rejected.empty());
    CHECK(table.records.size() == 566);

    const auto kept = apply_exclusions(table.records);
    CHECK(kept.excluded.empty()); // fixture windows already respect the exclusions

    // counts per group and gender match the fixture manifest
    std::ifstream mf(data_dir / "idl_synthetic_manifest.json");
    REQUIRE(mf.good());
    nlohmann::json manifest;
    mf >> manifest;
    for (const auto& g : cfg.groups) {
        const auto res = to_truncated_observations(kept.kept, g, cfg.validation, cfg.imputation);
        CHECK(res.inconsistent.empty());
        std::size_t women = 0, men = 0;
        for (std::size_t idx : res.source) {
            (kept.kept[idx].gender == Gender::female ? women : men) += 1;
        }
        const auto& expect = manifest.at("by_group").at(g.name);
        CHECK(women == expect.at("women").get<std::size_t>());
        CHECK(men == expect.at("men").get<std::size_t>());
    }
    const auto& world = manifest.at("by_group").at("World");
    CHECK(world.at("women").get<int>() == 507);
    CHECK(world.at("men").get<int>() == 59);

    // threshold override flows through
    const auto cfg112 = load_group_config(data_dir / "groups_default.json", 112.0);
    CHECK(cfg112.threshold == 112.0);
    const auto res110 = to_truncated_observations(kept.kept, cfg.groups.back(), cfg.validation);
    const auto res112 = to_truncated_observations(kept.kept, cfg112.groups.back(), cfg112.validation);
    CHECK(res112.observations.size() < res110.observations.size());
}
