#pragma once

#include <json.hpp>

#include "lifetail/fit.hpp"
#include "lifetail/hypotest.hpp"
#include "lifetail/records.hpp"
#include "lifetail/trend.hpp"

namespace lifetail {

/// Ordered JSON keeps key order stable so reruns are byte-identical.
using Json = nlohmann::ordered_json;

Json to_json(const Interval& iv);
Json to_json(const FitResult& fr);
Json to_json(const TestReport& tr);
Json to_json(const TrendModel& tm);
Json to_json(const CountEstimate& ce);
Json to_json(const RecordForecast& rf);
Json to_json(const SurvivalEstimate& se);

} // namespace lifetail
