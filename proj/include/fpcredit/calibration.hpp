#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpcredit/cds.hpp"
#include "fpcredit/curves.hpp"
#include "fpcredit/survival.hpp"

namespace fpcredit {

/// Quotes are held in basis points, the unit they are read and reported in.
struct CdsQuote {
    double tenor;      // years
    double spread_bp;  // running mid spread
    std::optional<double> bid_bp;
    std::optional<double> ask_bp;

    double spread() const { return spread_bp * 1e-4; }

    bool operator==(const CdsQuote&) const = default;
};

struct CdsQuoteStrip {
    std::string quote_date;
    std::vector<CdsQuote> quotes;
    double recovery = 0.4;

    void validate() const;
    std::vector<double> tenors() const;
    bool operator==(const CdsQuoteStrip&) const = default;
};

struct CalibrationSettings {
    CdsConvention convention = CdsConvention::Postponed;
    int frequency = 4;  // premium payments per year
    int steps_per_year = kDefaultCdsStepsPerYear;
    double price_tolerance = 1e-12;
    double barrier_ratio = 0.4;  // H for AT1P, H^1 for SBTV
    double b = 0.0;
};

inline constexpr double kHazardBracketLo = 0.0;
inline constexpr double kHazardBracketHi = 10.0;
inline constexpr double kSigmaBracketLo = 1e-4;
inline constexpr double kSigmaBracketHi = 5.0;
inline constexpr double kExactFitBp = 0.01;

struct BucketDiagnostics {
    double tenor = 0.0;
    double value = 0.0;  // fitted lambda or sigma
    int iterations = 0;
    double residual = 0.0;  // CDS price at the root
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool at_bound = false;
};

struct PillarFit {
    double tenor = 0.0;
    double quote = 0.0;
    double model_spread = 0.0;
    double error_bp = 0.0;
    double survival = 0.0;
};

struct SbtvFirstStep {
    double upper_barrier = 0.0;   // H^2
    double lower_probability = 0.0;  // p^1
    double sigma_bar = 0.0;
    double objective_bp2 = 0.0;
    double rms_bp = 0.0;
    int evaluations = 0;
    int starts = 0;
    double max_sigma_shift = 0.0;  // step 2 move of sigma_1..3 away from sigma_bar
};

struct CalibrationReport {
    ModelKind kind;
    CreditModel model;
    CalibrationSettings settings;
    std::vector<PillarFit> pillars;
    std::vector<BucketDiagnostics> buckets;
    std::optional<SbtvFirstStep> first_step;
    std::vector<std::string> warnings;
    bool degenerate = false;

    bool exact() const;
    double max_abs_error_bp() const;
};

CalibrationReport calibrate_intensity_report(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                             const CalibrationSettings& settings = {});
CalibrationReport calibrate_at1p_report(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                        const CalibrationSettings& settings = {});
CalibrationReport calibrate_sbtv_report(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                        const CalibrationSettings& settings = {});
CalibrationReport calibrate(ModelKind kind, const CdsQuoteStrip& strip, const DiscountCurve& curve,
                            const CalibrationSettings& settings = {});

HazardCurve bootstrap_intensity(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                const CalibrationSettings& settings = {});
At1pParams calibrate_at1p(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                          const CalibrationSettings& settings = {});
SbtvParams calibrate_sbtv(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                          const CalibrationSettings& settings = {});

std::vector<double> implied_survivals(const CreditModel& model, const std::vector<double>& pillars);

/// Fair spread of each quote's contract under the given model, for repricing checks.
std::vector<PillarFit> reprice_pillars(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                       const CreditModel& model, const CalibrationSettings& settings);

}  // namespace fpcredit
