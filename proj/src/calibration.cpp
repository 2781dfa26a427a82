#include "fpcredit/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include "fpcredit/errors.hpp"
#include "fpcredit/solvers.hpp"

namespace fpcredit {

void CdsQuoteStrip::validate() const {
    if (quotes.empty()) throw DomainError("quote strip is empty");
    if (!(recovery >= 0.0 && recovery < 1.0)) throw DomainError("recovery must lie in [0, 1)");
    double prev = 0.0;
    for (const auto& q : quotes) {
        if (!(q.tenor > prev)) throw DomainError("quote tenors must be positive and strictly increasing");
        if (!(q.spread_bp >= 0.0) || !std::isfinite(q.spread_bp))
            throw DomainError("quote spreads must be non-negative");
        if (q.bid_bp && *q.bid_bp > q.spread_bp) throw DomainError("quote bid above mid");
        if (q.ask_bp && *q.ask_bp < q.spread_bp) throw DomainError("quote ask below mid");
        prev = q.tenor;
    }
}

std::vector<double> CdsQuoteStrip::tenors() const {
    std::vector<double> t;
    for (const auto& q : quotes) t.push_back(q.tenor);
    return t;
}

bool CalibrationReport::exact() const {
    return !pillars.empty() && max_abs_error_bp() < kExactFitBp;
}

double CalibrationReport::max_abs_error_bp() const {
    double m = 0.0;
    for (const auto& p : pillars) m = std::max(m, std::abs(p.error_bp));
    return m;
}

namespace {

using CurveFactory =
    std::function<SurvivalCurve(const std::vector<double>& ends, const std::vector<double>& values)>;

std::string describe(const RootResult& r, double tenor, double lo, double hi, double f_lo, double f_hi) {
    std::ostringstream os;
    os << "bucket ending " << tenor << "y: bracket [" << lo << ", " << hi << "], price at ends ("
       << f_lo << ", " << f_hi << "), iterations " << r.iterations;
    return os.str();
}

// Sequential bucket-by-bucket solve: value j lives on (T_{j-1}, T_j] and makes the
// T_j CDS reprice to zero with earlier buckets frozen.
std::vector<double> bootstrap_buckets(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                      const CalibrationSettings& settings, double lo, double hi,
                                      const CurveFactory& make_curve, const char* what,
                                      CalibrationReport& report) {
    std::vector<double> ends;
    std::vector<double> values;
    for (const auto& quote : strip.quotes) {
        const CdsContract contract = make_cds(quote.tenor, quote.spread(), strip.recovery, settings.frequency);
        ends.push_back(quote.tenor);
        auto price_at = [&](double v) {
            values.push_back(v);
            const SurvivalCurve surv = make_curve(ends, values);
            values.pop_back();
            return cds_price(contract, curve, surv, settings.convention, settings.steps_per_year);
        };

        const double f_lo = price_at(lo);
        const double f_hi = price_at(hi);
        const RootResult root = find_root(price_at, lo, hi, settings.price_tolerance);
        if (!root.bracketed) {
            throw CalibrationError(std::string(what) + " calibration failed: no sign change for the " +
                                       std::to_string(quote.tenor) + "y bucket",
                                   describe(root, quote.tenor, lo, hi, f_lo, f_hi));
        }
        if (f_lo > f_hi)
            report.warnings.push_back("price not increasing in the bucket parameter: " +
                                      describe(root, quote.tenor, lo, hi, f_lo, f_hi));
        if (!root.converged)
            report.warnings.push_back("root finder stopped before tolerance: " +
                                      describe(root, quote.tenor, lo, hi, f_lo, f_hi));

        BucketDiagnostics d;
        d.tenor = quote.tenor;
        d.value = root.x;
        d.iterations = root.iterations;
        d.residual = root.fx;
        d.bracket_lo = root.bracket_lo;
        d.bracket_hi = root.bracket_hi;
        d.at_bound = std::abs(root.x - lo) <= 1e-10 * std::max(1.0, std::abs(lo)) ||
                     std::abs(root.x - hi) <= 1e-10 * hi;
        report.buckets.push_back(d);
        values.push_back(root.x);
    }
    return values;
}

void finish_report(CalibrationReport& report, const CdsQuoteStrip& strip, const DiscountCurve& curve) {
    report.pillars = reprice_pillars(strip, curve, report.model, report.settings);
    if (!report.exact()) {
        std::ostringstream os;
        os << "repricing error " << report.max_abs_error_bp() << " bp exceeds " << kExactFitBp << " bp";
        report.warnings.push_back(os.str());
    }
}

}  // namespace

std::vector<PillarFit> reprice_pillars(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                       const CreditModel& model, const CalibrationSettings& settings) {
    const SurvivalCurve surv = SurvivalCurve::of(model);
    std::vector<PillarFit> out;
    for (const auto& q : strip.quotes) {
        const CdsContract c = make_cds(q.tenor, q.spread(), strip.recovery, settings.frequency);
        PillarFit p;
        p.tenor = q.tenor;
        p.quote = q.spread();
        p.model_spread = fair_spread(c, curve, surv, settings.convention, settings.steps_per_year);
        p.error_bp = p.model_spread * 1e4 - q.spread_bp;
        p.survival = surv(q.tenor);
        out.push_back(p);
    }
    return out;
}

CalibrationReport calibrate_intensity_report(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                             const CalibrationSettings& settings) {
    strip.validate();
    CalibrationReport report{ModelKind::Intensity, HazardCurve({1.0}, {0.0}), settings, {}, {}, {}, {}, false};
    const auto lambdas = bootstrap_buckets(
        strip, curve, settings, kHazardBracketLo, kHazardBracketHi,
        [](const std::vector<double>& e, const std::vector<double>& v) {
            return SurvivalCurve::of(HazardCurve(e, v));
        },
        "intensity", report);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (lambdas[i] == 0.0 && strip.quotes[i].spread_bp > 0.0)
            report.warnings.push_back("non-monotone nested survival: hazard clipped at zero in the " +
                                      std::to_string(strip.quotes[i].tenor) + "y bucket");
    }
    report.degenerate = std::all_of(lambdas.begin(), lambdas.end(), [](double l) { return l == 0.0; });
    report.model = HazardCurve(strip.tenors(), lambdas);
    finish_report(report, strip, curve);
    return report;
}

CalibrationReport calibrate_at1p_report(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                        const CalibrationSettings& settings) {
    strip.validate();
    const double h = settings.barrier_ratio;
    const double b = settings.b;
    At1pParams{h, b, VolatilityTermStructure::flat(0.2)}.validate();

    CalibrationReport report{ModelKind::At1p, HazardCurve({1.0}, {0.0}), settings, {}, {}, {}, {}, false};
    const auto sigmas = bootstrap_buckets(
        strip, curve, settings, kSigmaBracketLo, kSigmaBracketHi,
        [h, b](const std::vector<double>& e, const std::vector<double>& v) {
            return SurvivalCurve::of(At1pParams{h, b, VolatilityTermStructure(e, v)});
        },
        "AT1P", report);
    for (const auto& d : report.buckets) {
        if (d.at_bound)
            report.warnings.push_back("sigma at bracket bound in the " + std::to_string(d.tenor) + "y bucket");
    }
    report.degenerate = std::any_of(report.buckets.begin(), report.buckets.end(),
                                    [](const BucketDiagnostics& d) { return d.at_bound; });
    report.model = At1pParams{h, b, VolatilityTermStructure(strip.tenors(), sigmas)};
    finish_report(report, strip, curve);
    return report;
}

namespace {

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct StepOneMap {
    double lower_barrier;
    std::array<double, 3> to_params(const std::vector<double>& u) const {
        return {lower_barrier + (1.0 - lower_barrier) * logistic(u[0]), logistic(u[1]),
                kSigmaBracketLo + (kSigmaBracketHi - kSigmaBracketLo) * logistic(u[2])};
    }
    std::vector<double> to_unconstrained(double h2, double p1, double sigma) const {
        return {logit((h2 - lower_barrier) / (1.0 - lower_barrier)), logit(p1),
                logit((sigma - kSigmaBracketLo) / (kSigmaBracketHi - kSigmaBracketLo))};
    }
};

SbtvParams two_scenario(double h1, double h2, double p1, double b, VolatilityTermStructure vols) {
    return SbtvParams{{{h1, p1}, {h2, 1.0 - p1}}, b, std::move(vols)};
}

}  // namespace

CalibrationReport calibrate_sbtv_report(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                        const CalibrationSettings& settings) {
    strip.validate();
    if (strip.quotes.size() < 3) throw DomainError("SBTV requires >= 3 quotes");
    const double h1 = settings.barrier_ratio;
    const double b = settings.b;
    At1pParams{h1, b, VolatilityTermStructure::flat(0.2)}.validate();

    CalibrationReport report{ModelKind::Sbtv, HazardCurve({1.0}, {0.0}), settings, {}, {}, {}, {}, false};

    // Step 1: best fit of (H^2, p^1, sigma_bar) to the first three quotes, in bp^2.
    std::vector<CdsContract> first;
    for (std::size_t i = 0; i < 3; ++i)
        first.push_back(make_cds(strip.quotes[i].tenor, strip.quotes[i].spread(), strip.recovery, settings.frequency));
    const StepOneMap map{h1};
    int evaluations = 0;
    auto objective = [&](const std::vector<double>& u) {
        ++evaluations;
        const auto [h2, p1, sigma] = map.to_params(u);
        if (!(h2 > h1 && h2 < 1.0)) return 1e12;
        const SurvivalCurve surv = SurvivalCurve::of(two_scenario(h1, h2, p1, b, VolatilityTermStructure::flat(sigma)));
        double sum = 0.0;
        for (const auto& c : first) {
            try {
                const double err = (fair_spread(c, curve, surv, settings.convention, settings.steps_per_year) -
                                    c.spread) * 1e4;
                sum += err * err;
            } catch (const DegenerateInputError&) {
                return 1e12;
            }
        }
        return sum;
    };

    constexpr double kStepOneTolerance = 1e-10;  // bp^2
    constexpr double kTieTolerance = 1e-10;
    // starts that drift into a saturated corner of the logistic map run out of budget
    constexpr int kStepOneEvaluations = 2000;
    constexpr int kStartBudget = 6000;
    std::optional<MinimizeResult> best;
    std::array<double, 3> best_params{};
    int starts = 0;
    for (double fh : {0.25, 0.5, 0.75}) {
        for (double p1 : {0.25, 0.5, 0.75}) {
            for (double sigma : {0.1, 0.2, 0.4}) {
                ++starts;
                const double h2 = h1 + (1.0 - h1) * fh;
                MinimizeResult r = nelder_mead(objective, map.to_unconstrained(h2, p1, sigma), 0.5, 1e-14,
                                               kStepOneEvaluations);
                int used = r.evaluations;
                // restart from the incumbent until the improvement stalls
                while (used < kStartBudget) {
                    MinimizeResult again = nelder_mead(objective, r.x, 0.1, 1e-14, kStepOneEvaluations);
                    used += again.evaluations;
                    const bool stalled = r.fx - again.fx < kStepOneTolerance;
                    if (again.fx < r.fx) r = again;
                    if (stalled) break;
                }
                const auto params = map.to_params(r.x);
                const bool better = !best || r.fx < best->fx - kTieTolerance ||
                                    (std::abs(r.fx - best->fx) <= kTieTolerance && params[0] < best_params[0]);
                if (better) {
                    best = r;
                    best_params = params;
                }
            }
        }
    }

    SbtvFirstStep step;
    step.upper_barrier = best_params[0];
    step.lower_probability = best_params[1];
    step.sigma_bar = best_params[2];
    step.objective_bp2 = best->fx;
    step.rms_bp = std::sqrt(best->fx / 3.0);
    step.evaluations = evaluations;
    step.starts = starts;
    if (step.rms_bp > 5.0)
        report.warnings.push_back("scenario structure cannot represent strip: step-1 RMS error " +
                                  std::to_string(step.rms_bp) + " bp");

    // Step 2: exact bootstrap of every bucket volatility with the scenarios frozen.
    const double h2 = step.upper_barrier;
    const double p1 = step.lower_probability;
    std::vector<double> sigmas;
    try {
        sigmas = bootstrap_buckets(
            strip, curve, settings, kSigmaBracketLo, kSigmaBracketHi,
            [=](const std::vector<double>& e, const std::vector<double>& v) {
                return SurvivalCurve::of(two_scenario(h1, h2, p1, b, VolatilityTermStructure(e, v)));
            },
            "SBTV", report);
    } catch (const CalibrationError& e) {
        throw CalibrationError(std::string(e.what()) + " (step 2)", e.diagnostics());
    }
    for (std::size_t j = 0; j < 3; ++j)
        step.max_sigma_shift = std::max(step.max_sigma_shift, std::abs(sigmas[j] - step.sigma_bar));
    if (step.max_sigma_shift > 0.02)
        report.warnings.push_back("step 2 moved sigma_1..3 by " + std::to_string(step.max_sigma_shift) +
                                  " from sigma_bar (soft limit 0.02)");
    for (const auto& d : report.buckets) {
        if (d.at_bound)
            report.warnings.push_back("sigma at bracket bound in the " + std::to_string(d.tenor) + "y bucket");
    }
    report.first_step = step;
    report.model = two_scenario(h1, h2, p1, b, VolatilityTermStructure(strip.tenors(), sigmas));
    finish_report(report, strip, curve);
    return report;
}

CalibrationReport calibrate(ModelKind kind, const CdsQuoteStrip& strip, const DiscountCurve& curve,
                            const CalibrationSettings& settings) {
    switch (kind) {
        case ModelKind::Intensity:
            return calibrate_intensity_report(strip, curve, settings);
        case ModelKind::At1p:
            return calibrate_at1p_report(strip, curve, settings);
        case ModelKind::Sbtv:
            return calibrate_sbtv_report(strip, curve, settings);
    }
    throw DomainError("unknown model kind");
}

HazardCurve bootstrap_intensity(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                                const CalibrationSettings& settings) {
    return std::get<HazardCurve>(calibrate_intensity_report(strip, curve, settings).model);
}

At1pParams calibrate_at1p(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                          const CalibrationSettings& settings) {
    return std::get<At1pParams>(calibrate_at1p_report(strip, curve, settings).model);
}

SbtvParams calibrate_sbtv(const CdsQuoteStrip& strip, const DiscountCurve& curve,
                          const CalibrationSettings& settings) {
    return std::get<SbtvParams>(calibrate_sbtv_report(strip, curve, settings).model);
}

std::vector<double> implied_survivals(const CreditModel& model, const std::vector<double>& pillars) {
    const SurvivalCurve surv = SurvivalCurve::of(model);
    std::vector<double> out;
    out.reserve(pillars.size());
    for (double t : pillars) out.push_back(surv(t));
    return out;
}

}  // namespace fpcredit
