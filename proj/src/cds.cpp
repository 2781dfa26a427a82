#include "fpcredit/cds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpcredit/errors.hpp"

namespace fpcredit {

void CdsContract::validate() const {
    if (!(spread >= 0.0) || !std::isfinite(spread)) throw DomainError("CDS spread must be non-negative");
    if (!(recovery >= 0.0 && recovery < 1.0)) throw DomainError("CDS recovery must lie in [0, 1)");
    if (schedule.start() != 0.0)
        throw ConfigError("forward-starting CDS (T_a > 0) is not supported");
}

CdsContract make_cds(double tenor, double spread, double recovery, int frequency) {
    CdsContract c{make_schedule(0.0, tenor, frequency), spread, recovery};
    c.validate();
    return c;
}

std::string_view to_string(CdsConvention c) {
    return c == CdsConvention::Exact ? "exact" : "postponed";
}

CdsConvention convention_from_string(std::string_view name) {
    if (name == "exact") return CdsConvention::Exact;
    if (name == "postponed") return CdsConvention::Postponed;
    throw DomainError("unknown CDS convention '" + std::string(name) + "'");
}

CdsLegs cds_legs(const PaymentSchedule& schedule, const DiscountCurve& curve,
                 const SurvivalCurve& surv, CdsConvention convention, int steps_per_year) {
    CdsLegs legs;
    double q_prev = surv(schedule.start());
    for (std::size_t i = 1; i <= schedule.size(); ++i) {
        const double t0 = schedule.date(i - 1);
        const double t1 = schedule.date(i);
        const double q1 = surv(t1);
        const double df1 = curve.discount(t1);
        legs.premium_annuity += df1 * schedule.accrual(i) * q1;

        if (convention == CdsConvention::Postponed) {
            legs.protection += df1 * (q_prev - q1);
        } else {
            const double steps = std::round(schedule.accrual(i) * steps_per_year);
            if (steps_per_year <= 0 || steps < 1.0)
                throw ConfigError("CDS integration grid is coarser than the payment schedule");
            const auto n = static_cast<long>(steps);
            const double h = (t1 - t0) / static_cast<double>(n);
            double qa = q_prev;
            for (long k = 0; k < n; ++k) {
                const double ta = t0 + h * static_cast<double>(k);
                const double tb = k + 1 == n ? t1 : t0 + h * static_cast<double>(k + 1);
                const double qb = k + 1 == n ? q1 : surv(tb);
                const double mid = 0.5 * (ta + tb);
                const double dq = qa - qb;  // default probability in (ta, tb]
                const double df = curve.discount(mid);
                legs.protection += df * dq;
                legs.accrual_on_default += df * (mid - t0) * dq;
                qa = qb;
            }
        }
        q_prev = q1;
    }
    return legs;
}

double cds_price(const CdsContract& contract, const DiscountCurve& curve, const SurvivalCurve& surv,
                 CdsConvention convention, int steps_per_year) {
    contract.validate();
    const CdsLegs legs = cds_legs(contract.schedule, curve, surv, convention, steps_per_year);
    return contract.lgd() * legs.protection - contract.spread * legs.risky_annuity();
}

double cds_price_exact(const CdsContract& contract, const DiscountCurve& curve,
                       const SurvivalCurve& surv, int steps_per_year) {
    return cds_price(contract, curve, surv, CdsConvention::Exact, steps_per_year);
}

double cds_price_postponed(const CdsContract& contract, const DiscountCurve& curve,
                           const SurvivalCurve& surv) {
    return cds_price(contract, curve, surv, CdsConvention::Postponed);
}

double fair_spread(const CdsContract& contract_template, const DiscountCurve& curve,
                   const SurvivalCurve& surv, CdsConvention convention, int steps_per_year) {
    contract_template.validate();
    const CdsLegs legs = cds_legs(contract_template.schedule, curve, surv, convention, steps_per_year);
    if (!(legs.risky_annuity() > 0.0))
        throw DegenerateInputError("fair spread undefined: risky annuity is zero (sure default)");
    return contract_template.lgd() * legs.protection / legs.risky_annuity();
}

}  // namespace fpcredit
