#include <sstream>

#include "doctest.h"
#include "fpcredit/calibration.hpp"
#include "fpcredit/errors.hpp"
#include "fpcredit/io.hpp"
#include "fpcredit/presets.hpp"

using namespace fpcredit;

namespace {

CdsQuoteStrip parse(const std::string& text) {
    std::istringstream in(text);
    return io::parse_quotes_csv(in, 0.4, "2008-06-12");
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("parse mid quotes") {
    const auto s = parse("tenor_years,spread_bp\n1,397\n3,315\n5,277.5\n");
    REQUIRE(s.quotes.size() == 3);
    CHECK(s.quotes[2].spread_bp == 277.5);
    CHECK(s.quotes[2].spread() == doctest::Approx(0.02775));
    CHECK(s.quote_date == "2008-06-12");
}

TEST_CASE("mid from bid and ask") {
    const auto s = parse("\xEF\xBB\xBFtenor_years,spread_bp,bid_bp,ask_bp\r\n1,,25,31\r\n3,,34,39\r\n5,44.5,42,47\r\n");
    REQUIRE(s.quotes.size() == 3);
    CHECK(s.quotes[0].spread_bp == 28.0);
    CHECK(s.quotes[1].spread_bp == 36.5);
    CHECK(s.quotes[2].spread_bp == 44.5);
    CHECK(*s.quotes[1].bid_bp == 34.0);
}

TEST_CASE("parse errors name line and column") {
    auto fails_at = [](const std::string& text, std::size_t line, std::size_t column) {
        try {
            parse(text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
            CHECK(e.column() == column);
            CHECK(std::string(e.what()).find("line " + std::to_string(line)) != std::string::npos);
            return;
        }
        FAIL("no parse error for: " << text);
    };
    fails_at("tenor,spread\n1,2\n", 1, 1);
    fails_at("tenor_years,spread_bp\n1,397\n3,abc\n", 3, 2);
    fails_at("tenor_years,spread_bp\n1,397\n3\n", 3, 2);
    fails_at("tenor_years,spread_bp,bid_bp,ask_bp\n1,,31,25\n", 2, 3);
    fails_at("tenor_years,spread_bp\n1x,397\n", 2, 1);
    fails_at("", 1, 1);
}

TEST_CASE("invalid strips are parse errors") {
    CHECK_THROWS_AS(parse("tenor_years,spread_bp\n3,100\n1,90\n"), ParseError);
    CHECK_THROWS_AS(parse("tenor_years,spread_bp\n1,-5\n"), ParseError);
}

TEST_CASE("CSV round trip is the identity") {
    for (const auto& p : all_presets()) {
        std::ostringstream out;
        io::write_quotes_csv(out, p.strip);
        std::istringstream in(out.str());
        const auto back = io::parse_quotes_csv(in, p.strip.recovery, p.strip.quote_date);
        CHECK(back == p.strip);
        std::ostringstream again;
        io::write_quotes_csv(again, back);
        CHECK(again.str() == out.str());
    }
    const auto odd = parse("tenor_years,spread_bp\n0.1,0.1\n0.3,1e-7\n7.25,123.456789012345\n");
    std::ostringstream out;
    io::write_quotes_csv(out, odd);
    CHECK(parse(out.str()) == odd);
}

TEST_CASE("model JSON round trip") {
    const auto strip = find_preset("lehman-2008-09-12").strip;
    const auto curve = DiscountCurve::flat(0.03);
    for (auto k : {ModelKind::Intensity, ModelKind::At1p, ModelKind::Sbtv}) {
        const auto model = calibrate(k, strip, curve).model;
        const auto back = io::model_from_json(k, io::to_json(model));
        for (double t : {0.5, 1.0, 4.0, 10.0, 12.0})
            CHECK(SurvivalCurve::of(back)(t) == SurvivalCurve::of(model)(t));
    }
}

TEST_CASE("curve and settings JSON") {
    const auto c = DiscountCurve::from_pillars({{1.0, 0.97}, {5.0, 0.85}});
    const auto back = io::curve_from_json(io::to_json(c));
    for (double t : {0.3, 2.0, 7.0}) CHECK(back.discount(t) == c.discount(t));
    CHECK(io::curve_from_json(io::Json::parse(R"({"flat_rate": 0.05})")).flat_rate() == 0.05);
    CHECK_THROWS_AS(io::curve_from_json(io::Json::parse("{}")), ConfigError);

    CalibrationSettings s;
    s.convention = CdsConvention::Exact;
    s.barrier_ratio = 0.35;
    const auto sb = io::settings_from_json(io::to_json(s));
    CHECK(sb.convention == CdsConvention::Exact);
    CHECK(sb.barrier_ratio == 0.35);
}

TEST_CASE("simulation and contract JSON") {
    mc::SimulationConfig c;
    c.n_paths = 1234;
    c.seed = 77;
    c.antithetic = true;
    c.kernel = mc::KernelChoice::Scalar;
    const auto cb = io::simulation_config_from_json(io::to_json(c));
    CHECK(cb.n_paths == 1234);
    CHECK(cb.seed == 77);
    CHECK(cb.antithetic);
    CHECK(cb.kernel == mc::KernelChoice::Scalar);

    // correlation is a per-run input and is echoed with the run, not the contract
    mc::ErsContract e;
    e.s0 = 31.0;
    const auto eb = io::ers_from_json(io::to_json(e));
    CHECK(eb.s0 == 31.0);
    CHECK(eb.schedule == e.schedule);
}

TEST_CASE("presets") {
    CHECK(all_presets().size() == 4);
    const auto& p = find_preset("ers-2009-09-16");
    REQUIRE(p.ers);
    CHECK(p.strip.quotes[3].spread_bp == 48.5);
    CHECK(p.correlations == std::vector<double>{-1.0, -0.2, 0.0, 0.5, 1.0});
    CHECK(find_preset("lehman-2008-09-12").strip.quotes[0].spread_bp == 1437.0);
    CHECK_THROWS_AS(find_preset("lehman-2001"), ConfigError);
    // expansion is stable
    CHECK(checksum(expand(p)) == checksum(expand(find_preset("ers-2009-09-16"))));
    CHECK(checksum(expand(p)) != checksum(expand(find_preset("lehman-2007-07-10"))));
    CHECK(checksum(expand(p)).size() == 16);
}

}
