#include "lifetail/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lifetail {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string trim(const std::string& s) {
    auto b = s.begin();
    auto e = s.end();
    while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
    return std::string(b, e);
}

} // namespace

std::int64_t days_from_civil(int y, int m, int d) {
    // Howard Hinnant's civil-calendar algorithm; day 0 is 1970-01-01.
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t days) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    Date out;
    out.year = static_cast<int>(y + (m <= 2));
    out.month = static_cast<int>(m);
    out.day = static_cast<int>(d);
    return out;
}

Date parse_date(const std::string& text) {
    const std::string s = trim(text);
    Date d;
    if (s.size() == 4) {
        if (!parse_int(s, d.year)) throw std::invalid_argument("bad date '" + text + "'");
        d.year_only = true;
        d.month = 1;
        d.day = 1;
        return d;
    }
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw std::invalid_argument("bad date '" + text + "' (expected YYYY-MM-DD or YYYY)");
    }
    if (!parse_int(s.substr(0, 4), d.year) || !parse_int(s.substr(5, 2), d.month) ||
        !parse_int(s.substr(8, 2), d.day)) {
        throw std::invalid_argument("bad date '" + text + "'");
    }
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
        throw std::invalid_argument("non-calendar date '" + text + "'");
    }
    return d;
}

std::string format_date(const Date& d) {
    char buf[16];
    if (d.year_only) {
        std::snprintf(buf, sizeof(buf), "%04d", d.year);
    } else {
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    }
    return buf;
}

double fractional_years(const Date& d) {
    if (d.year_only) throw std::invalid_argument("fractional_years: date has no month/day (impute first)");
    return 1970.0 + static_cast<double>(days_from_civil(d.year, d.month, d.day)) / kDaysPerYear;
}

Date impute_death_date(const Date& d, ImputationPolicy policy) {
    if (!d.year_only) return d;
    Date out = d;
    out.year_only = false;
    switch (policy) {
        case ImputationPolicy::january1:
            out.month = 1;
            out.day = 1;
            break;
        case ImputationPolicy::july2:
            out.month = 7;
            out.day = 2;
            break;
        case ImputationPolicy::december31:
            out.month = 12;
            out.day = 31;
            break;
    }
    return out;
}

const char* gender_name(Gender g) { return g == Gender::female ? "female" : "male"; }
const char* validation_name(Validation v) { return v == Validation::A ? "A" : "B"; }

namespace {

const char* kHeader = "id,country,gender,validation,birth_date,death_date,age_at_death_days";

// Parses one data row; returns the failure reason or empty on success.
std::string parse_row(const std::vector<std::string>& fields, LifespanRecord& rec) {
    if (fields.size() != 7) {
        return "row has " + std::to_string(fields.size()) + " fields, expected 7";
    }
    rec.id = trim(fields[0]);
    rec.country = trim(fields[1]);
    if (rec.id.empty()) return "empty id";
    if (rec.country.empty()) return "empty country";

    const std::string gender = trim(fields[2]);
    if (gender == "female") rec.gender = Gender::female;
    else if (gender == "male") rec.gender = Gender::male;
    else return "unknown gender '" + gender + "'";

    const std::string validation = trim(fields[3]);
    if (validation == "A") rec.validation = Validation::A;
    else if (validation == "B") rec.validation = Validation::B;
    else return "unknown validation level '" + validation + "'";

    try {
        rec.birth_date = parse_date(fields[4]);
    } catch (const std::exception& e) {
        return std::string("birth_date: ") + e.what();
    }
    if (rec.birth_date.year_only) return "birth_date must be a full date";

    try {
        rec.death_date = parse_date(fields[5]);
    } catch (const std::exception& e) {
        return std::string("death_date: ") + e.what();
    }

    int age = 0;
    if (!parse_int(trim(fields[6]), age) || age < 0) {
        return "age_at_death_days must be a nonnegative integer";
    }
    rec.age_at_death_days = age;

    const std::int64_t birth_days =
        days_from_civil(rec.birth_date.year, rec.birth_date.month, rec.birth_date.day);
    if (rec.death_date.year_only) {
        if (rec.death_date.year < rec.birth_date.year) return "death year precedes birth date";
    } else {
        const std::int64_t death_days =
            days_from_civil(rec.death_date.year, rec.death_date.month, rec.death_date.day);
        if (death_days < birth_days) return "death date precedes birth date";
        const std::int64_t delta = (death_days - birth_days) - rec.age_at_death_days;
        if (delta > 1 || delta < -1) {
            return "age_at_death_days inconsistent with dates (off by more than one day)";
        }
    }
    return {};
}

} // namespace

LoadResult load_records(const std::filesystem::path& path, int schema_version) {
    if (schema_version != kSchemaVersion) {
        throw std::invalid_argument("load_records: unsupported schema version " +
                                    std::to_string(schema_version));
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_records: cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_records: empty file (missing header)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) != kHeader) {
        throw std::runtime_error("load_records: header does not match schema v1: expected '" +
                                 std::string(kHeader) + "'");
    }

    LoadResult out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        LifespanRecord rec;
        const std::string reason = parse_row(fields, rec);
        if (reason.empty()) {
            out.records.push_back(std::move(rec));
        } else {
            out.rejected.push_back({line_no, fields.empty() ? "" : trim(fields[0]), reason});
        }
    }
    return out;
}

ExclusionResult apply_exclusions(std::span<const LifespanRecord> records, ImputationPolicy policy) {
    ExclusionResult out;
    const std::int64_t usa_cutoff = days_from_civil(1999, 12, 31);
    const std::int64_t japan_cutoff = days_from_civil(2003, 8, 31);
    for (const auto& rec : records) {
        const Date death = impute_death_date(rec.death_date, policy);
        const std::int64_t death_days = days_from_civil(death.year, death.month, death.day);
        if (rec.country == "USA" && death_days > usa_cutoff) {
            out.excluded.push_back({rec, "USA post-1999 sampling scheme"});
            continue;
        }
        if (rec.country == "JPN" && (death.year == 1996 || death_days > japan_cutoff)) {
            out.excluded.push_back({rec, "Japan 1996 / post-2003-08-31 sampling scheme"});
            continue;
        }
        out.kept.push_back(rec);
    }
    return out;
}

void GroupSpec::validate() const {
    if (name.empty()) throw std::invalid_argument("GroupSpec: empty name");
    if (countries.empty()) throw std::invalid_argument("GroupSpec '" + name + "': no countries");
    if (!(threshold > 0.0)) throw std::invalid_argument("GroupSpec '" + name + "': threshold must be > 0");
    for (const auto& c : countries) {
        const auto it = windows.find(c);
        if (it == windows.end()) {
            throw std::invalid_argument("GroupSpec '" + name + "': no sampling window for country '" + c + "'");
        }
        it->second.validate();
    }
}

GroupConfig load_group_config(const std::filesystem::path& path,
                              std::optional<double> threshold_override) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_group_config: cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("load_group_config: bad JSON in '" + path.string() + "': " + e.what());
    }

    GroupConfig cfg;
    cfg.threshold = threshold_override.value_or(j.value("threshold", 110.0));

    const std::string filter = j.value("validation", "A");
    if (filter == "A") cfg.validation = ValidationFilter::a_only;
    else if (filter == "A+B") cfg.validation = ValidationFilter::a_and_b;
    else throw std::runtime_error("load_group_config: validation must be 'A' or 'A+B'");

    const std::string imp = j.value("imputation", "july2");
    if (imp == "january1") cfg.imputation = ImputationPolicy::january1;
    else if (imp == "july2") cfg.imputation = ImputationPolicy::july2;
    else if (imp == "december31") cfg.imputation = ImputationPolicy::december31;
    else throw std::runtime_error("load_group_config: imputation must be january1|july2|december31");

    std::map<std::string, SamplingWindow> windows;
    for (const auto& [country, w] : j.at("windows").items()) {
        SamplingWindow sw;
        sw.begin = fractional_years(parse_date(w.at("begin").get<std::string>()));
        sw.end = fractional_years(parse_date(w.at("end").get<std::string>()));
        sw.validate();
        windows[country] = sw;
    }

    for (const auto& g : j.at("groups")) {
        GroupSpec spec;
        spec.name = g.at("name").get<std::string>();
        spec.threshold = cfg.threshold;
        for (const auto& c : g.at("countries")) {
            const std::string country = c.get<std::string>();
            spec.countries.push_back(country);
            const auto it = windows.find(country);
            if (it != windows.end()) spec.windows[country] = it->second;
        }
        spec.validate();
        cfg.groups.push_back(std::move(spec));
    }

    if (j.contains("comparisons")) {
        for (const auto& pair : j.at("comparisons")) {
            cfg.comparisons.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
        }
    }
    return cfg;
}

ConversionResult to_truncated_observations(std::span<const LifespanRecord> records,
                                           const GroupSpec& spec, ValidationFilter filter,
                                           ImputationPolicy policy) {
    spec.validate();
    ConversionResult out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (std::find(spec.countries.begin(), spec.countries.end(), rec.country) ==
            spec.countries.end()) {
            continue;
        }
        if (filter == ValidationFilter::a_only && rec.validation != Validation::A) continue;

        const double age_years = rec.age_at_death_years();
        if (age_years < spec.threshold) {
            out.rejected.push_back({i, rec.id, "age at death below threshold"});
            continue;
        }

        TruncatedObservation obs;
        obs.crossing_time = fractional_years(rec.birth_date) + spec.threshold;
        obs.excess = age_years - spec.threshold;
        obs.window = spec.windows.at(rec.country);

        if (!obs.satisfies_inclusion()) {
            out.inconsistent.push_back({i, rec.id, "death date outside the country sampling window"});
            continue;
        }
        out.observations.push_back(obs);
        out.source.push_back(i);
        out.death_dates.push_back(impute_death_date(rec.death_date, policy));
    }
    return out;
}

std::size_t split_index(std::span<const TruncatedObservation> sorted_by_death) {
    const std::size_t n = sorted_by_death.size();
    if (n < 2) throw std::invalid_argument("split_index: need at least 2 observations");
    // Largest first-part size with the second part strictly bigger, then move
    // whole tie groups of equal death dates into the second part.
    std::size_t k = (n - 1) / 2;
    while (k > 0 &&
           sorted_by_death[k - 1].death_time() == sorted_by_death[k].death_time()) {
        --k;
    }
    if (k == 0) {
        throw std::invalid_argument(
            "split_index: no nonempty split satisfies the strict-size rule (too few "
            "observations or tied death dates span the midpoint)");
    }
    return k;
}

std::pair<std::vector<TruncatedObservation>, std::vector<TruncatedObservation>>
split_halves(std::span<const TruncatedObservation> observations) {
    std::vector<TruncatedObservation> sorted(observations.begin(), observations.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.death_time() < b.death_time(); });
    const std::size_t k = split_index(sorted);
    return {std::vector<TruncatedObservation>(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k)),
            std::vector<TruncatedObservation>(sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end())};
}

std::pair<std::vector<TruncatedObservation>, std::vector<TruncatedObservation>>
split_at(std::span<const TruncatedObservation> observations, double split_time) {
    std::vector<TruncatedObservation> sorted(observations.begin(), observations.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.death_time() < b.death_time(); });
    const auto mid = std::partition_point(sorted.begin(), sorted.end(), [&](const auto& o) {
        return o.death_time() < split_time;
    });
    return {std::vector<TruncatedObservation>(sorted.begin(), mid),
            std::vector<TruncatedObservation>(mid, sorted.end())};
}

} // namespace lifetail
