#pragma once

#include <functional>
#include <string_view>
#include <variant>
#include <vector>

#include "fpcredit/curves.hpp"

namespace fpcredit {

/// Piecewise-constant instantaneous volatility. sigmas[j] applies on
/// (bucket_ends[j-1], bucket_ends[j]]; the last value is held flat beyond the last end.
class VolatilityTermStructure {
  public:
    VolatilityTermStructure(std::vector<double> bucket_ends, std::vector<double> sigmas);
    static VolatilityTermStructure flat(double sigma);

    const std::vector<double>& bucket_ends() const { return ends_; }
    const std::vector<double>& sigmas() const { return sigmas_; }
    std::size_t size() const { return sigmas_.size(); }

    double sigma_at(double t) const;
    /// Integral of sigma^2 over [0, t].
    double cumulative_variance(double t) const;

  private:
    std::vector<double> ends_;
    std::vector<double> sigmas_;
    std::vector<double> cum_var_;  // at each bucket end
};

struct At1pParams {
    double barrier_ratio;  // H / V0, in (0, 1)
    double b = 0.0;        // barrier-volatility exponent
    VolatilityTermStructure vols;

    void validate() const;
};

struct BarrierScenario {
    double barrier_ratio;
    double probability;
};

struct SbtvParams {
    std::vector<BarrierScenario> scenarios;
    double b = 0.0;
    VolatilityTermStructure vols;

    void validate() const;
    At1pParams scenario_model(std::size_t i) const { return {scenarios[i].barrier_ratio, b, vols}; }
};

/// Piecewise-constant deterministic default intensity.
class HazardCurve {
  public:
    HazardCurve(std::vector<double> bucket_ends, std::vector<double> lambdas);

    const std::vector<double>& bucket_ends() const { return ends_; }
    const std::vector<double>& lambdas() const { return lambdas_; }

    double cumulative_hazard(double t) const;
    /// Smallest t with cumulative_hazard(t) = level; +inf when never reached.
    double inverse_cumulative_hazard(double level) const;

  private:
    std::vector<double> ends_;
    std::vector<double> lambdas_;
    std::vector<double> cum_;  // at each bucket end
};

/// First-passage survival of log(V/H(t)) started at -log(barrier_ratio), written in
/// terms of the integrated variance. This is the AT1P closed form.
double at1p_survival(double barrier_ratio, double b, double cumulative_variance);
double at1p_survival(const At1pParams& params, double t);
double sbtv_survival(const SbtvParams& params, double t);
double intensity_survival(const HazardCurve& curve, double t);

/// Default barrier H(t) with V0 = 1 and a constant payout ratio.
double barrier_level(const At1pParams& params, const DiscountCurve& curve, double payout_ratio,
                     double t);

enum class ModelKind { Intensity, At1p, Sbtv };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

using CreditModel = std::variant<HazardCurve, At1pParams, SbtvParams>;

ModelKind kind_of(const CreditModel& model);

/// Model-tagged evaluable survival curve t -> Q(tau > t).
class SurvivalCurve {
  public:
    SurvivalCurve(ModelKind kind, std::function<double(double)> fn)
        : kind_(kind), fn_(std::move(fn)) {}

    static SurvivalCurve of(const CreditModel& model);
    static SurvivalCurve of(const At1pParams& p);
    static SurvivalCurve of(const SbtvParams& p);
    static SurvivalCurve of(const HazardCurve& h);

    ModelKind kind() const { return kind_; }
    double operator()(double t) const { return fn_(t); }

  private:
    ModelKind kind_;
    std::function<double(double)> fn_;
};

}  // namespace fpcredit
