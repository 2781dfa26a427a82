#pragma once

#include <iosfwd>
#include <string>

#include "fpcredit/calibration.hpp"
#include "fpcredit/mc/engine.hpp"
#include "json.hpp"

namespace fpcredit::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCalibrationSchema = "fpcredit.calibration.v1";
inline constexpr const char* kErsSchema = "fpcredit.ers.v1";
inline constexpr const char* kSignConvention =
    "CDS prices per unit notional from the protection buyer's side: positive means the buyer "
    "receives value (protection leg minus premium leg)";

// Quote CSV: header `tenor_years,spread_bp[,bid_bp,ask_bp]`. An empty spread_bp cell takes the
// bid/ask mid.
CdsQuoteStrip parse_quotes_csv(std::istream& in, double recovery, std::string quote_date = {});
CdsQuoteStrip read_quotes_csv(const std::string& path, double recovery, std::string quote_date = {});
void write_quotes_csv(std::ostream& out, const CdsQuoteStrip& strip);

Json to_json(const DiscountCurve& curve);
DiscountCurve curve_from_json(const Json& j);

Json to_json(const CdsQuoteStrip& strip);
CdsQuoteStrip strip_from_json(const Json& j);

Json to_json(const CreditModel& model);
CreditModel model_from_json(ModelKind kind, const Json& parameters);

Json to_json(const CalibrationSettings& s);
CalibrationSettings settings_from_json(const Json& j, CalibrationSettings defaults = {});

/// Per-model section of a calibration report.
Json to_json(const CalibrationReport& report);

Json to_json(const mc::SimulationConfig& cfg);
mc::SimulationConfig simulation_config_from_json(const Json& j, mc::SimulationConfig defaults = {});

Json to_json(const mc::ErsContract& ers);
mc::ErsContract ers_from_json(const Json& j, mc::ErsContract defaults = {});

Json to_json(const mc::ErsPricingResult& r);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace fpcredit::io
