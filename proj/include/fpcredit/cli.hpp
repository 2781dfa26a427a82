#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fpcredit/calibration.hpp"
#include "fpcredit/io.hpp"
#include "fpcredit/mc/engine.hpp"

namespace fpcredit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitWarnings = 2;

/// Effective configuration of one CLI run, after defaults, config file and flags.
struct RunConfig {
    DiscountCurve curve = DiscountCurve::flat(0.03);
    CalibrationSettings calibration;
    double recovery = 0.4;
    mc::SimulationConfig simulation;
    mc::ErsContract ers;
    std::optional<std::string> preset;
    std::optional<std::string> quotes_path;
    std::string quote_date;
};

io::Json to_json(const RunConfig& cfg);
/// Applies a JSON config document on top of `base`.
RunConfig apply_config(const io::Json& j, RunConfig base);

/// Output directory for reports: FPCREDIT_OUTPUT_DIR when set, else the working directory.
std::string output_dir();

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fpcredit::cli
