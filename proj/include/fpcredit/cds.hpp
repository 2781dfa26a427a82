#pragma once

#include "fpcredit/curves.hpp"
#include "fpcredit/survival.hpp"

namespace fpcredit {

/// Running CDS, spot starting. Prices are per unit notional from the protection
/// buyer's side: positive means the buyer receives value.
struct CdsContract {
    PaymentSchedule schedule;
    double spread;    // running spread R per year
    double recovery;  // REC

    double lgd() const { return 1.0 - recovery; }
    void validate() const;
};

CdsContract make_cds(double tenor, double spread, double recovery, int frequency = 4);

enum class CdsConvention {
    Exact,      // protection at default, accrued premium on default
    Postponed,  // protection paid at the next schedule date, no accrual term
};

std::string_view to_string(CdsConvention c);
CdsConvention convention_from_string(std::string_view name);

inline constexpr int kDefaultCdsStepsPerYear = 365;

/// Leg values per unit spread / unit LGD, all positive.
struct CdsLegs {
    double premium_annuity = 0.0;     // sum P(0,T_i) alpha_i Q(tau >= T_i)
    double accrual_on_default = 0.0;  // integral of P(0,t) (t - T_{beta(t)-1}) d(-Q)
    double protection = 0.0;          // integral of P(0,t) d(-Q), or its postponed sum

    double risky_annuity() const { return premium_annuity + accrual_on_default; }
};

CdsLegs cds_legs(const PaymentSchedule& schedule, const DiscountCurve& curve,
                 const SurvivalCurve& surv, CdsConvention convention,
                 int steps_per_year = kDefaultCdsStepsPerYear);

double cds_price_exact(const CdsContract& contract, const DiscountCurve& curve,
                       const SurvivalCurve& surv, int steps_per_year = kDefaultCdsStepsPerYear);
double cds_price_postponed(const CdsContract& contract, const DiscountCurve& curve,
                           const SurvivalCurve& surv);
double cds_price(const CdsContract& contract, const DiscountCurve& curve, const SurvivalCurve& surv,
                 CdsConvention convention, int steps_per_year = kDefaultCdsStepsPerYear);

/// Spread making the price zero: protection / risky annuity. The price is affine in R.
double fair_spread(const CdsContract& contract_template, const DiscountCurve& curve,
                   const SurvivalCurve& surv, CdsConvention convention,
                   int steps_per_year = kDefaultCdsStepsPerYear);

}  // namespace fpcredit
