#include "fpcredit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fpcredit/errors.hpp"

namespace fpcredit::io {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, std::size_t line, std::size_t column) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ParseError("malformed number '" + cell + "'", line, column);
    return v;
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

CdsQuoteStrip parse_quotes_csv(std::istream& in, double recovery, std::string quote_date) {
    CdsQuoteStrip strip;
    strip.recovery = recovery;
    strip.quote_date = std::move(quote_date);

    std::string raw;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    bool has_bid_ask = false;
    while (std::getline(in, raw)) {
        ++line_no;
        if (line_no == 1 && raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) raw.erase(0, 3);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        auto cells = split(line);
        if (header.empty()) {
            header = cells;
            if (header.size() < 2 || header[0] != "tenor_years" || header[1] != "spread_bp")
                throw ParseError("header must start with tenor_years,spread_bp", line_no, 1);
            if (header.size() == 4) {
                if (header[2] != "bid_bp") throw ParseError("expected bid_bp", line_no, 3);
                if (header[3] != "ask_bp") throw ParseError("expected ask_bp", line_no, 4);
                has_bid_ask = true;
            } else if (header.size() != 2) {
                throw ParseError("header must have 2 or 4 columns", line_no, header.size());
            }
            continue;
        }
        if (cells.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " columns, found " +
                                 std::to_string(cells.size()),
                             line_no, std::min(cells.size(), header.size()) + 1);
        CdsQuote q{};
        q.tenor = parse_number(cells[0], line_no, 1);
        if (has_bid_ask) {
            q.bid_bp = parse_number(cells[2], line_no, 3);
            q.ask_bp = parse_number(cells[3], line_no, 4);
            if (*q.bid_bp > *q.ask_bp) throw ParseError("bid above ask", line_no, 3);
        }
        if (cells[1].empty()) {
            if (!has_bid_ask) throw ParseError("missing spread_bp", line_no, 2);
            q.spread_bp = 0.5 * (*q.bid_bp + *q.ask_bp);
        } else {
            q.spread_bp = parse_number(cells[1], line_no, 2);
        }
        strip.quotes.push_back(q);
    }
    if (header.empty()) throw ParseError("empty quote file", line_no + 1, 1);
    try {
        strip.validate();
    } catch (const DomainError& e) {
        throw ParseError(e.what(), line_no, 1);
    }
    return strip;
}

CdsQuoteStrip read_quotes_csv(const std::string& path, double recovery, std::string quote_date) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open quote file " + path);
    return parse_quotes_csv(in, recovery, std::move(quote_date));
}

void write_quotes_csv(std::ostream& out, const CdsQuoteStrip& strip) {
    const bool bid_ask = !strip.quotes.empty() && strip.quotes.front().bid_bp.has_value();
    out << (bid_ask ? "tenor_years,spread_bp,bid_bp,ask_bp\n" : "tenor_years,spread_bp\n");
    for (const auto& q : strip.quotes) {
        out << format_number(q.tenor) << ',' << format_number(q.spread_bp);
        if (bid_ask) out << ',' << format_number(q.bid_bp.value_or(q.spread_bp)) << ','
                         << format_number(q.ask_bp.value_or(q.spread_bp));
        out << '\n';
    }
}

Json to_json(const DiscountCurve& curve) {
    if (curve.is_flat()) return Json{{"flat_rate", curve.flat_rate()}};
    Json pillars = Json::array();
    for (const auto& [t, df] : curve.pillars()) pillars.push_back(Json::array({t, df}));
    return Json{{"pillars", pillars}};
}

DiscountCurve curve_from_json(const Json& j) {
    if (j.contains("flat_rate")) return DiscountCurve::flat(j.at("flat_rate").get<double>());
    if (j.contains("pillars")) {
        std::vector<std::pair<double, double>> p;
        for (const auto& row : j.at("pillars")) {
            if (!row.is_array() || row.size() != 2) throw ConfigError("curve pillars must be [t, df] pairs");
            p.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        return DiscountCurve::from_pillars(std::move(p));
    }
    throw ConfigError("curve must have flat_rate or pillars");
}

Json to_json(const CdsQuoteStrip& strip) {
    Json quotes = Json::array();
    for (const auto& q : strip.quotes) {
        Json row{{"tenor_years", q.tenor}, {"spread_bp", q.spread_bp}};
        if (q.bid_bp) row["bid_bp"] = *q.bid_bp;
        if (q.ask_bp) row["ask_bp"] = *q.ask_bp;
        quotes.push_back(row);
    }
    return Json{{"quote_date", strip.quote_date}, {"recovery", strip.recovery}, {"quotes", quotes}};
}

CdsQuoteStrip strip_from_json(const Json& j) {
    CdsQuoteStrip s;
    s.quote_date = j.value("quote_date", "");
    s.recovery = j.at("recovery").get<double>();
    for (const auto& row : j.at("quotes")) {
        CdsQuote q{row.at("tenor_years").get<double>(), row.at("spread_bp").get<double>(), {}, {}};
        if (row.contains("bid_bp")) q.bid_bp = row["bid_bp"].get<double>();
        if (row.contains("ask_bp")) q.ask_bp = row["ask_bp"].get<double>();
        s.quotes.push_back(q);
    }
    s.validate();
    return s;
}

Json to_json(const CreditModel& model) {
    if (const auto* h = std::get_if<HazardCurve>(&model))
        return Json{{"bucket_ends", h->bucket_ends()}, {"lambdas", h->lambdas()}};
    if (const auto* a = std::get_if<At1pParams>(&model))
        return Json{{"barrier_ratio", a->barrier_ratio},
                    {"b", a->b},
                    {"bucket_ends", a->vols.bucket_ends()},
                    {"sigmas", a->vols.sigmas()}};
    const auto& s = std::get<SbtvParams>(model);
    Json scen = Json::array();
    for (const auto& sc : s.scenarios)
        scen.push_back(Json{{"barrier_ratio", sc.barrier_ratio}, {"probability", sc.probability}});
    return Json{{"scenarios", scen},
                {"b", s.b},
                {"bucket_ends", s.vols.bucket_ends()},
                {"sigmas", s.vols.sigmas()}};
}

CreditModel model_from_json(ModelKind kind, const Json& p) {
    switch (kind) {
        case ModelKind::Intensity:
            return HazardCurve(p.at("bucket_ends").get<std::vector<double>>(),
                               p.at("lambdas").get<std::vector<double>>());
        case ModelKind::At1p: {
            At1pParams a{p.at("barrier_ratio").get<double>(), p.value("b", 0.0),
                         VolatilityTermStructure(p.at("bucket_ends").get<std::vector<double>>(),
                                                 p.at("sigmas").get<std::vector<double>>())};
            a.validate();
            return a;
        }
        case ModelKind::Sbtv: {
            SbtvParams s{{}, p.value("b", 0.0),
                         VolatilityTermStructure(p.at("bucket_ends").get<std::vector<double>>(),
                                                 p.at("sigmas").get<std::vector<double>>())};
            for (const auto& sc : p.at("scenarios"))
                s.scenarios.push_back({sc.at("barrier_ratio").get<double>(), sc.at("probability").get<double>()});
            s.validate();
            return s;
        }
    }
    throw ConfigError("unknown model kind");
}

Json to_json(const CalibrationSettings& s) {
    return Json{{"convention", std::string(to_string(s.convention))},
                {"frequency", s.frequency},
                {"steps_per_year", s.steps_per_year},
                {"price_tolerance", s.price_tolerance},
                {"barrier_ratio", s.barrier_ratio},
                {"b", s.b}};
}

CalibrationSettings settings_from_json(const Json& j, CalibrationSettings d) {
    if (j.contains("convention")) d.convention = convention_from_string(j["convention"].get<std::string>());
    d.frequency = j.value("frequency", d.frequency);
    d.steps_per_year = j.value("steps_per_year", d.steps_per_year);
    d.price_tolerance = j.value("price_tolerance", d.price_tolerance);
    d.barrier_ratio = j.value("barrier_ratio", d.barrier_ratio);
    d.b = j.value("b", d.b);
    return d;
}

Json to_json(const CalibrationReport& r) {
    Json pillars = Json::array();
    for (const auto& p : r.pillars)
        pillars.push_back(Json{{"tenor_years", p.tenor},
                               {"quote_bp", p.quote * 1e4},
                               {"model_bp", p.model_spread * 1e4},
                               {"error_bp", p.error_bp},
                               {"survival", p.survival}});
    Json buckets = Json::array();
    for (const auto& b : r.buckets)
        buckets.push_back(Json{{"bucket_end", b.tenor},
                               {"value", b.value},
                               {"iterations", b.iterations},
                               {"residual", b.residual},
                               {"bracket", Json::array({b.bracket_lo, b.bracket_hi})},
                               {"at_bound", b.at_bound}});
    Json out{{"model", std::string(to_string(r.kind))},
             {"exact", r.exact()},
             {"degenerate", r.degenerate},
             {"max_abs_error_bp", r.max_abs_error_bp()},
             {"parameters", to_json(r.model)},
             {"pillars", pillars},
             {"buckets", buckets}};
    if (r.first_step) {
        const auto& s = *r.first_step;
        out["first_step"] = Json{{"upper_barrier", s.upper_barrier},
                                 {"lower_probability", s.lower_probability},
                                 {"sigma_bar", s.sigma_bar},
                                 {"objective_bp2", s.objective_bp2},
                                 {"rms_bp", s.rms_bp},
                                 {"evaluations", s.evaluations},
                                 {"starts", s.starts},
                                 {"max_sigma_shift", s.max_sigma_shift}};
    }
    out["warnings"] = r.warnings;
    return out;
}

Json to_json(const mc::SimulationConfig& c) {
    const char* kernel = c.kernel == mc::KernelChoice::Auto ? "auto"
                         : c.kernel == mc::KernelChoice::Avx2 ? "avx2"
                                                              : "scalar";
    return Json{{"n_paths", c.n_paths},
                {"steps_per_year", c.steps_per_year},
                {"seed", c.seed},
                {"bridge_correction", c.bridge_correction},
                {"control_variate", c.control_variate},
                {"antithetic", c.antithetic},
                {"payout_ratio", c.payout_ratio},
                {"block_size", c.block_size},
                {"kernel", kernel}};
}

mc::SimulationConfig simulation_config_from_json(const Json& j, mc::SimulationConfig d) {
    d.n_paths = j.value("n_paths", d.n_paths);
    d.steps_per_year = j.value("steps_per_year", d.steps_per_year);
    d.seed = j.value("seed", d.seed);
    d.bridge_correction = j.value("bridge_correction", d.bridge_correction);
    d.control_variate = j.value("control_variate", d.control_variate);
    d.antithetic = j.value("antithetic", d.antithetic);
    d.payout_ratio = j.value("payout_ratio", d.payout_ratio);
    d.threads = j.value("threads", d.threads);
    d.block_size = j.value("block_size", d.block_size);
    if (j.contains("kernel")) {
        const auto k = j["kernel"].get<std::string>();
        if (k == "auto") d.kernel = mc::KernelChoice::Auto;
        else if (k == "scalar") d.kernel = mc::KernelChoice::Scalar;
        else if (k == "avx2") d.kernel = mc::KernelChoice::Avx2;
        else throw ConfigError("unknown kernel '" + k + "'");
    }
    d.validate();
    return d;
}

Json to_json(const mc::ErsContract& e) {
    return Json{{"stock_count", e.stock_count},
                {"s0", e.s0},
                {"equity_vol", e.equity_vol},
                {"dividend_yield", e.dividend_yield},
                {"maturity", e.maturity()},
                {"payment_dates", std::vector<double>(e.schedule.dates().begin(), e.schedule.dates().end())},
                {"recovery", e.recovery}};
}

mc::ErsContract ers_from_json(const Json& j, mc::ErsContract d) {
    d.stock_count = j.value("stock_count", d.stock_count);
    d.s0 = j.value("s0", d.s0);
    d.equity_vol = j.value("equity_vol", d.equity_vol);
    d.dividend_yield = j.value("dividend_yield", d.dividend_yield);
    d.recovery = j.value("recovery", d.recovery);
    if (j.contains("maturity") || j.contains("frequency"))
        d.schedule = make_schedule(0.0, j.value("maturity", d.maturity()), j.value("frequency", 2));
    d.validate();
    return d;
}

Json to_json(const mc::ErsPricingResult& r) {
    return Json{{"model", std::string(to_string(r.model))},
                {"rho", r.correlation},
                {"fair_spread_bp", r.fair_spread_bp},
                {"fair_spread_std_error_bp", r.fair_spread_std_error_bp},
                {"plain_fair_spread_bp", r.plain_fair_spread_bp},
                {"plain_std_error_bp", r.plain_std_error_bp},
                {"cva", r.cva.value},
                {"cva_std_error", r.cva.std_error},
                {"cv_coefficient", r.cva.cv_coefficient},
                {"default_probability_mc", r.cva.default_fraction},
                {"default_probability_mc_std_error", r.cva.default_fraction_std_error},
                {"default_probability_closed_form", r.cva.closed_form_default_probability},
                {"paths", r.cva.n_paths},
                {"paths_defaulted", r.cva.defaulted},
                {"variance_reduction_factor", r.variance_reduction_factor},
                {"iteration_trace_bp", r.iteration_trace_bp},
                {"contraction_ok", r.contraction_ok},
                {"low_statistics", r.low_statistics},
                {"kernel", r.kernel},
                {"warnings", r.warnings}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what(), 0, e.byte);
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

}  // namespace fpcredit::io
