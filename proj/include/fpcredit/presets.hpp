#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpcredit/calibration.hpp"
#include "fpcredit/io.hpp"
#include "fpcredit/mc/engine.hpp"

namespace fpcredit {

/// Named, versioned bundles of market inputs: the three Lehman Brothers CDS strips and the
/// equity return swap test case.
struct Preset {
    std::string name;
    std::string version;
    std::string description;
    CdsQuoteStrip strip;
    std::optional<mc::ErsContract> ers;
    std::vector<double> correlations;
};

const std::vector<Preset>& all_presets();
const Preset& find_preset(const std::string& name);

/// Canonical JSON expansion of a preset and its FNV-1a 64-bit checksum (hex).
io::Json expand(const Preset& p);
std::string checksum(const io::Json& j);

}  // namespace fpcredit
