#include "fpcredit/presets.hpp"

#include <cstdint>
#include <cstdio>

#include "fpcredit/errors.hpp"

namespace fpcredit {

namespace {

CdsQuoteStrip lehman_strip(std::string date, std::vector<double> spreads_bp) {
    const std::vector<double> tenors{1, 3, 5, 7, 10};
    CdsQuoteStrip s{std::move(date), {}, 0.4};
    for (std::size_t i = 0; i < tenors.size(); ++i) s.quotes.push_back({tenors[i], spreads_bp[i], {}, {}});
    return s;
}

std::vector<Preset> build() {
    std::vector<Preset> out;
    out.push_back({"lehman-2007-07-10", "1", "Lehman Brothers running CDS, pre-crisis",
                   lehman_strip("2007-07-10", {16, 29, 45, 50, 58}), std::nullopt, {}});
    out.push_back({"lehman-2008-06-12", "1", "Lehman Brothers running CDS, mid-crisis",
                   lehman_strip("2008-06-12", {397, 315, 277, 258, 240}), std::nullopt, {}});
    out.push_back({"lehman-2008-09-12", "1", "Lehman Brothers running CDS, days before default",
                   lehman_strip("2008-09-12", {1437, 902, 710, 636, 588}), std::nullopt, {}});

    // Counterparty strip is quoted bid/ask only; mids are computed.
    CdsQuoteStrip cp{"2009-09-16", {}, 0.4};
    const double tenors[] = {1, 3, 5, 7, 10};
    const double bids[] = {25, 34, 42, 46, 50};
    const double asks[] = {31, 39, 47, 51, 55};
    for (int i = 0; i < 5; ++i) cp.quotes.push_back({tenors[i], 0.5 * (bids[i] + asks[i]), bids[i], asks[i]});
    mc::ErsContract ers;
    ers.stock_count = 1.0;
    ers.s0 = 20.0;
    ers.equity_vol = 0.20;
    ers.dividend_yield = 0.008;
    ers.schedule = make_schedule(0.0, 5.0, 2);
    ers.recovery = 0.4;
    out.push_back({"ers-2009-09-16", "1",
                   "Equity return swap on a hypothetical stock against a counterparty with the given CDS strip",
                   cp, ers, {-1.0, -0.2, 0.0, 0.5, 1.0}});
    return out;
}

}  // namespace

const std::vector<Preset>& all_presets() {
    static const std::vector<Preset> presets = build();
    return presets;
}

const Preset& find_preset(const std::string& name) {
    for (const auto& p : all_presets())
        if (p.name == name) return p;
    std::string known;
    for (const auto& p : all_presets()) known += (known.empty() ? "" : ", ") + p.name;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

io::Json expand(const Preset& p) {
    io::Json j{{"name", p.name}, {"version", p.version}, {"description", p.description},
               {"strip", io::to_json(p.strip)}};
    if (p.ers) j["ers"] = io::to_json(*p.ers);
    if (!p.correlations.empty()) j["correlations"] = p.correlations;
    return j;
}

std::string checksum(const io::Json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fpcredit
