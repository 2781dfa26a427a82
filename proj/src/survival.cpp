#include "fpcredit/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fpcredit/errors.hpp"
#include "fpcredit/normal.hpp"

namespace fpcredit {

namespace {

void check_bucket_ends(const std::vector<double>& ends, std::size_t n_values, const char* what) {
    if (ends.empty() || ends.size() != n_values)
        throw DomainError(std::string(what) + ": bucket ends and values must match and be non-empty");
    double prev = 0.0;
    for (double e : ends) {
        if (!(e > prev)) throw DomainError(std::string(what) + ": bucket ends must be strictly increasing and positive");
        prev = e;
    }
}

std::size_t bucket_of(const std::vector<double>& ends, double t) {
    // first bucket whose end is >= t; buckets are left-open
    auto it = std::lower_bound(ends.begin(), ends.end(), t);
    return std::min<std::size_t>(static_cast<std::size_t>(it - ends.begin()), ends.size() - 1);
}

}  // namespace

VolatilityTermStructure::VolatilityTermStructure(std::vector<double> bucket_ends,
                                                 std::vector<double> sigmas)
    : ends_(std::move(bucket_ends)), sigmas_(std::move(sigmas)) {
    check_bucket_ends(ends_, sigmas_.size(), "volatility term structure");
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j < sigmas_.size(); ++j) {
        if (!(sigmas_[j] > 0.0) || !std::isfinite(sigmas_[j]))
            throw DomainError("volatility term structure: sigmas must be positive");
        acc += sigmas_[j] * sigmas_[j] * (ends_[j] - prev);
        cum_var_.push_back(acc);
        prev = ends_[j];
    }
}

VolatilityTermStructure VolatilityTermStructure::flat(double sigma) {
    return VolatilityTermStructure({1.0}, {sigma});
}

double VolatilityTermStructure::sigma_at(double t) const { return sigmas_[bucket_of(ends_, t)]; }

double VolatilityTermStructure::cumulative_variance(double t) const {
    if (!(t >= 0.0)) throw DomainError("cumulative_variance: negative time");
    const std::size_t j = bucket_of(ends_, t);
    const double start = j == 0 ? 0.0 : ends_[j - 1];
    const double base = j == 0 ? 0.0 : cum_var_[j - 1];
    return base + sigmas_[j] * sigmas_[j] * (t - start);
}

void At1pParams::validate() const {
    if (!(barrier_ratio > 0.0 && barrier_ratio < 1.0))
        throw DomainError("AT1P barrier ratio H/V0 must lie in (0, 1)");
    if (!std::isfinite(b)) throw DomainError("AT1P: B must be finite");
}

void SbtvParams::validate() const {
    if (scenarios.empty()) throw DomainError("SBTV needs at least one barrier scenario");
    double total = 0.0;
    double prev = 0.0;
    for (const auto& s : scenarios) {
        if (!(s.barrier_ratio > 0.0 && s.barrier_ratio < 1.0))
            throw DomainError("SBTV scenario barrier must lie in (0, 1)");
        if (!(s.barrier_ratio > prev))
            throw DomainError("SBTV scenario barriers must be strictly increasing");
        if (!(s.probability >= 0.0 && s.probability <= 1.0))
            throw DomainError("SBTV scenario probability must lie in [0, 1]");
        prev = s.barrier_ratio;
        total += s.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("SBTV scenario probabilities must sum to one");
    if (!std::isfinite(b)) throw DomainError("SBTV: B must be finite");
}

HazardCurve::HazardCurve(std::vector<double> bucket_ends, std::vector<double> lambdas)
    : ends_(std::move(bucket_ends)), lambdas_(std::move(lambdas)) {
    check_bucket_ends(ends_, lambdas_.size(), "hazard curve");
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j < lambdas_.size(); ++j) {
        if (!(lambdas_[j] >= 0.0) || !std::isfinite(lambdas_[j]))
            throw DomainError("hazard curve: intensities must be non-negative");
        acc += lambdas_[j] * (ends_[j] - prev);
        cum_.push_back(acc);
        prev = ends_[j];
    }
}

double HazardCurve::cumulative_hazard(double t) const {
    if (!(t >= 0.0)) throw DomainError("cumulative_hazard: negative time");
    const std::size_t j = bucket_of(ends_, t);
    const double start = j == 0 ? 0.0 : ends_[j - 1];
    const double base = j == 0 ? 0.0 : cum_[j - 1];
    return base + lambdas_[j] * (t - start);
}

double HazardCurve::inverse_cumulative_hazard(double level) const {
    if (!(level >= 0.0)) throw DomainError("inverse_cumulative_hazard: negative level");
    if (level == 0.0) return 0.0;
    double prev_t = 0.0;
    double prev_c = 0.0;
    for (std::size_t j = 0; j < lambdas_.size(); ++j) {
        const bool last = j + 1 == lambdas_.size();
        if (last || level <= cum_[j]) {
            // the last bucket extends flat to infinity
            if (lambdas_[j] > 0.0) return prev_t + (level - prev_c) / lambdas_[j];
            if (last) break;
        }
        prev_t = ends_[j];
        prev_c = cum_[j];
    }
    return std::numeric_limits<double>::infinity();
}

double at1p_survival(double barrier_ratio, double b, double cumulative_variance) {
    if (!(barrier_ratio > 0.0 && barrier_ratio < 1.0))
        throw DomainError("AT1P barrier ratio H/V0 must lie in (0, 1)");
    if (!(cumulative_variance >= 0.0)) throw DomainError("AT1P: negative integrated variance");
    if (cumulative_variance == 0.0) return 1.0;
    if (!std::isfinite(cumulative_variance)) return 0.0;

    const double distance = -std::log(barrier_ratio);  // log(V0/H) > 0
    const double sd = std::sqrt(cumulative_variance);
    const double drift = 0.5 * (2.0 * b - 1.0) * cumulative_variance;
    const double d_up = (distance + drift) / sd;
    const double d_down = (-distance + drift) / sd;

    const double phi_up = norm_cdf(d_up);
    const double phi_down = norm_cdf(d_down);
    if (phi_down == 0.0) return std::clamp(phi_up, 0.0, 1.0);
    // (H/V0)^(2B-1) evaluated in log space
    const double reflection = std::exp(-(2.0 * b - 1.0) * distance);
    if (!std::isfinite(reflection)) return 0.0;
    return std::clamp(phi_up - reflection * phi_down, 0.0, 1.0);
}

double at1p_survival(const At1pParams& params, double t) {
    params.validate();
    if (!(t >= 0.0)) throw DomainError("at1p_survival: negative time");
    return at1p_survival(params.barrier_ratio, params.b, params.vols.cumulative_variance(t));
}

double sbtv_survival(const SbtvParams& params, double t) {
    params.validate();
    if (!(t >= 0.0)) throw DomainError("sbtv_survival: negative time");
    const double var = params.vols.cumulative_variance(t);
    double q = 0.0;
    for (const auto& s : params.scenarios) q += s.probability * at1p_survival(s.barrier_ratio, params.b, var);
    return std::clamp(q, 0.0, 1.0);
}

double intensity_survival(const HazardCurve& curve, double t) {
    if (!(t >= 0.0)) throw DomainError("intensity_survival: negative time");
    return std::exp(-curve.cumulative_hazard(t));
}

double barrier_level(const At1pParams& params, const DiscountCurve& curve, double payout_ratio,
                     double t) {
    params.validate();
    if (!(t >= 0.0)) throw DomainError("barrier_level: negative time");
    // integral of r over [0, t] is -log P(0, t)
    const double rate_integral = -std::log(curve.discount(t));
    return params.barrier_ratio *
           std::exp(rate_integral - payout_ratio * t - params.b * params.vols.cumulative_variance(t));
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Intensity:
            return "intensity";
        case ModelKind::At1p:
            return "at1p";
        case ModelKind::Sbtv:
            return "sbtv";
    }
    return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
    if (name == "intensity") return ModelKind::Intensity;
    if (name == "at1p") return ModelKind::At1p;
    if (name == "sbtv") return ModelKind::Sbtv;
    throw DomainError("unknown model kind '" + std::string(name) + "'");
}

ModelKind kind_of(const CreditModel& model) {
    switch (model.index()) {
        case 0:
            return ModelKind::Intensity;
        case 1:
            return ModelKind::At1p;
        default:
            return ModelKind::Sbtv;
    }
}

SurvivalCurve SurvivalCurve::of(const At1pParams& p) {
    p.validate();
    return SurvivalCurve(ModelKind::At1p, [p](double t) { return at1p_survival(p, t); });
}

SurvivalCurve SurvivalCurve::of(const SbtvParams& p) {
    p.validate();
    return SurvivalCurve(ModelKind::Sbtv, [p](double t) { return sbtv_survival(p, t); });
}

SurvivalCurve SurvivalCurve::of(const HazardCurve& h) {
    return SurvivalCurve(ModelKind::Intensity, [h](double t) { return intensity_survival(h, t); });
}

SurvivalCurve SurvivalCurve::of(const CreditModel& model) {
    return std::visit([](const auto& m) { return SurvivalCurve::of(m); }, model);
}

}  // namespace fpcredit
