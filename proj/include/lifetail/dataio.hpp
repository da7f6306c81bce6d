#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lifetail/trunclik.hpp"

namespace lifetail {

/// Calendar date; year_only marks a death date given as just "YYYY".
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;
    bool year_only = false;

    bool operator==(const Date&) const = default;
};

/// Parses "YYYY-MM-DD" or bare "YYYY"; throws std::invalid_argument on
/// malformed or non-calendar dates.
Date parse_date(const std::string& text);

std::string format_date(const Date& d);

/// Days since 1970-01-01 (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);

Date civil_from_days(std::int64_t days);

/// Calendar time in fractional years: 1970 + days-since-1970 / 365.25.
/// Every time quantity in the toolkit goes through this one conversion, so
/// window bounds and observation times stay mutually consistent.
double fractional_years(const Date& d); // throws if d.year_only

inline constexpr double kDaysPerYear = 365.25;

enum class Gender { female, male };
enum class Validation { A, B };
enum class ValidationFilter { a_only, a_and_b };

/// Death dates given as a bare year are replaced by a fixed day of that year.
enum class ImputationPolicy { january1, july2, december31 };

Date impute_death_date(const Date& d, ImputationPolicy policy);

/// One validated lifespan record in the canonical CSV schema (version 1):
///   id,country,gender,validation,birth_date,death_date,age_at_death_days
/// birth_date is a full ISO-8601 date; death_date is ISO-8601 or "YYYY";
/// age_at_death_days is an integer day count.
struct LifespanRecord {
    std::string id;
    std::string country;
    Gender gender = Gender::female;
    Validation validation = Validation::A;
    Date birth_date;
    Date death_date;
    std::int64_t age_at_death_days = 0;

    double age_at_death_years() const { return static_cast<double>(age_at_death_days) / kDaysPerYear; }
};

struct RejectedRow {
    std::size_t line = 0; // 1-based line number in the file
    std::string id;       // best-effort; may be empty for unparseable rows
    std::string reason;
};

struct LoadResult {
    std::vector<LifespanRecord> records;
    std::vector<RejectedRow> rejected;
};

inline constexpr int kSchemaVersion = 1;

/// Reads the canonical CSV. Malformed rows land in the reject report with a
/// reason; an unreadable file or a wrong header/schema version is fatal
/// (std::runtime_error / std::invalid_argument).
LoadResult load_records(const std::filesystem::path& path, int schema_version = kSchemaVersion);

struct ExcludedRecord {
    LifespanRecord record;
    std::string reason;
};

struct ExclusionResult {
    std::vector<LifespanRecord> kept;
    std::vector<ExcludedRecord> excluded;
};

/// Sampling-scheme exclusions: USA deaths after 1999-12-31, Japan deaths
/// during 1996 or after 2003-08-31. Idempotent. Year-only death dates are
/// compared via the imputation policy (the rules are year-granular anyway
/// except for the Japan August cutoff).
ExclusionResult apply_exclusions(std::span<const LifespanRecord> records,
                                 ImputationPolicy policy = ImputationPolicy::july2);

/// A named analysis group: member countries, their sampling windows, and the
/// age threshold defining "exceedance".
struct GroupSpec {
    std::string name;
    std::vector<std::string> countries;
    std::map<std::string, SamplingWindow> windows; // keyed by country
    double threshold = 110.0;

    void validate() const; // every country must have a window
};

struct GroupConfig {
    std::vector<GroupSpec> groups;
    std::vector<std::pair<std::string, std::string>> comparisons;
    double threshold = 110.0;
    ValidationFilter validation = ValidationFilter::a_only;
    ImputationPolicy imputation = ImputationPolicy::july2;
};

/// Loads the JSON group/window config (see data/groups_default.json for the
/// documented shape). An optional threshold override replaces the file value.
GroupConfig load_group_config(const std::filesystem::path& path,
                              std::optional<double> threshold_override = std::nullopt);

struct ConversionIssue {
    std::size_t record_index = 0;
    std::string id;
    std::string reason;
};

/// to_truncated_observations output. observations[i] came from
/// records[source[i]]; death_dates[i] is the (possibly imputed) death date.
struct ConversionResult {
    std::vector<TruncatedObservation> observations;
    std::vector<std::size_t> source;
    std::vector<Date> death_dates;
    std::vector<ConversionIssue> rejected;     // below threshold
    std::vector<ConversionIssue> inconsistent; // violates the window inclusion constraint
};

/// Turns records into likelihood-ready observations for one group:
/// t_i = fractional_years(birth) + threshold, x_i = age/365.25 - threshold.
/// Applies the validation filter, imputes year-only death dates, and checks
/// the inclusion constraint against the country window. Records from
/// countries outside the group are skipped silently.
ConversionResult to_truncated_observations(std::span<const LifespanRecord> records,
                                           const GroupSpec& spec,
                                           ValidationFilter filter = ValidationFilter::a_only,
                                           ImputationPolicy policy = ImputationPolicy::july2);

/// Index k such that splitting the date-sorted sample into sizes (k, n-k)
/// minimizes the size difference subject to the second part being strictly
/// larger, with tie groups of equal death dates kept whole in the second
/// part. Throws std::invalid_argument when no such split exists.
std::size_t split_index(std::span<const TruncatedObservation> sorted_by_death);

/// Sorts by death time and splits per split_index.
std::pair<std::vector<TruncatedObservation>, std::vector<TruncatedObservation>>
split_halves(std::span<const TruncatedObservation> observations);

/// Explicit-split variant: first part death < split_time, second >= split_time.
std::pair<std::vector<TruncatedObservation>, std::vector<TruncatedObservation>>
split_at(std::span<const TruncatedObservation> observations, double split_time);

const char* gender_name(Gender g);
const char* validation_name(Validation v);

} // namespace lifetail
