#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpcredit/curves.hpp"
#include "fpcredit/mc/step_kernel.hpp"
#include "fpcredit/survival.hpp"

namespace fpcredit::mc {

/// Equity return swap between us ("A", default free) and a defaultable counterparty ("B")
/// on K shares of an underlying that is assumed not to default.
struct ErsContract {
    double stock_count = 1.0;  // K; nominal is K * S0
    double s0 = 20.0;
    double equity_vol = 0.20;
    double dividend_yield = 0.008;  // continuous
    PaymentSchedule schedule = make_schedule(0.0, 5.0, 2);
    double spread = 0.0;          // X per year
    double recovery = 0.4;        // of the counterparty
    double correlation = 0.0;     // firm value vs equity drivers

    double maturity() const { return schedule.end(); }
    double nominal() const { return stock_count * s0; }
    double lgd() const { return 1.0 - recovery; }
    /// sum alpha_i P(0, T_i)
    double annuity(const DiscountCurve& curve) const;
    void validate() const;
};

enum class KernelChoice { Auto, Scalar, Avx2 };

struct SimulationConfig {
    std::size_t n_paths = 100000;
    int steps_per_year = 52;
    std::uint64_t seed = 20090916;
    bool bridge_correction = true;
    bool control_variate = true;
    bool antithetic = false;
    double payout_ratio = 0.0;  // k for the counterparty firm; cancels out of log(V/H)
    unsigned threads = 0;       // 0: hardware concurrency
    std::size_t block_size = 4096;
    KernelChoice kernel = KernelChoice::Auto;

    void validate() const;
};

struct PathRecord {
    bool defaulted = false;
    bool bridge_hit = false;
    std::uint8_t scenario = 0;
    double tau = 0.0;  // default time, meaningful when defaulted
    double equity_at_default = 0.0;
    double equity_at_maturity = 0.0;
};

struct SimulationOutput {
    std::vector<PathRecord> paths;
    std::vector<double> grid;
    KernelIsa isa = KernelIsa::Scalar;
    bool grid_refined = false;
    std::vector<std::string> log;
    std::size_t defaulted() const;
};

/// Joint firm/equity paths under AT1P or SBTV with first-passage default detection.
SimulationOutput simulate_joint_paths(const CreditModel& model, const ErsContract& ers,
                                      const DiscountCurve& curve, const SimulationConfig& cfg);

/// Default times drawn from the hazard curve independently of the equity path.
SimulationOutput simulate_intensity_defaults(const HazardCurve& hazard, const ErsContract& ers,
                                             const DiscountCurve& curve, const SimulationConfig& cfg);

/// Uniform grid at steps_per_year on [0, maturity] with volatility bucket ends inserted.
std::vector<double> simulation_grid(double maturity, int steps_per_year,
                                    const std::vector<double>& bucket_ends, bool* refined = nullptr);

/// Discounted NPV at default, P(0,tau) NPV(tau), for K shares:
///   K S0 sum_{i >= beta(tau)} P(0,T_i) alpha_i X + K S0 P(0,T_{beta(tau)-1}) - K P(0,tau) S_tau.
double ers_npv_at_default(const PathRecord& path, const ErsContract& ers, const DiscountCurve& curve,
                          double spread);

struct CvaEstimate {
    double value = 0.0;  // control-variate estimator when enabled, plain otherwise
    double std_error = 0.0;
    double plain_value = 0.0;
    double plain_std_error = 0.0;
    double cv_coefficient = 0.0;
    double default_fraction = 0.0;
    double default_fraction_std_error = 0.0;
    double closed_form_default_probability = 0.0;
    std::size_t defaulted = 0;
    std::size_t n_paths = 0;
    bool control_variate = false;
};

/// LGD * E[1{tau <= T_b} P(0,tau) NPV(tau)^+] from simulated paths.
CvaEstimate estimate_cva(const SimulationOutput& sim, const ErsContract& ers, const DiscountCurve& curve,
                         double closed_form_default_probability, bool control_variate, double spread);

double closed_form_default_probability(const CreditModel& model, double maturity);
SimulationOutput simulate(const CreditModel& model, const ErsContract& ers, const DiscountCurve& curve,
                          const SimulationConfig& cfg);

CvaEstimate ers_cva_term(const CreditModel& model, const ErsContract& ers, const DiscountCurve& curve,
                         const SimulationConfig& cfg, double spread);

struct ErsPricingResult {
    ModelKind model = ModelKind::At1p;
    double correlation = 0.0;
    double fair_spread_bp = 0.0;
    double fair_spread_std_error_bp = 0.0;
    double plain_fair_spread_bp = 0.0;  // plain estimator at the same paths
    double plain_std_error_bp = 0.0;
    CvaEstimate cva;
    double variance_reduction_factor = 1.0;  // plain variance / CV variance
    std::vector<double> iteration_trace_bp;
    bool contraction_ok = true;
    bool low_statistics = false;
    std::vector<std::string> warnings;
    std::string kernel;
};

/// Fixed point X = CVA(X) / (K S0 annuity) on common random numbers.
ErsPricingResult ers_fair_spread(const CreditModel& model, const ErsContract& ers_template,
                                 const DiscountCurve& curve, const SimulationConfig& cfg);
ErsPricingResult price_fair_spread(const SimulationOutput& sim, ModelKind kind,
                                   const ErsContract& ers_template, const DiscountCurve& curve,
                                   const SimulationConfig& cfg, double closed_form_pd);

/// Independence anchor: fair spread with an intensity model for the counterparty.
ErsPricingResult intensity_ers_check(const HazardCurve& hazard, const ErsContract& ers_template,
                                     const DiscountCurve& curve, const SimulationConfig& cfg);

/// Per-path debug dump, at most `cap` rows.
void write_paths_csv(const SimulationOutput& sim, const std::string& path, std::size_t cap = 10000);

}  // namespace fpcredit::mc
