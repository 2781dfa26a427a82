#pragma once

// Reference formulas used by the unit and acceptance tests. They are written independently of
// the library code paths they check.

#include <cmath>

#include "fpcredit/curves.hpp"
#include "fpcredit/mc/engine.hpp"
#include "fpcredit/normal.hpp"

namespace oracle {

// Survival of a drifted Brownian motion started at log(v0) above an absorbing level log(h).
inline double drifted_bm_survival(double v0, double h, double mu, double s, double t) {
    const double x0 = std::log(v0) - std::log(h);
    const double sd = s * std::sqrt(t);
    return fpcredit::norm_cdf((x0 + mu * t) / sd) -
           std::exp(-2.0 * mu * x0 / (s * s)) * fpcredit::norm_cdf((-x0 + mu * t) / sd);
}

// P(0,tau) NPV(tau) built from the explicit legs: forward LIBOR from the curve on every remaining
// period plus the spread X, the final notional, and the equity leg valued at S_tau.
inline double npv_term_by_term(const fpcredit::mc::ErsContract& e, const fpcredit::DiscountCurve& curve, double tau,
                               double s_tau, double x) {
    const auto& sch = e.schedule;
    double v = 0.0;
    for (std::size_t i = 1; i <= sch.size(); ++i) {
        if (sch.date(i) <= tau) continue;
        const double a = sch.accrual(i);
        const double libor = (curve.discount(sch.date(i - 1)) / curve.discount(sch.date(i)) - 1.0) / a;
        v += e.nominal() * curve.discount(sch.date(i)) * a * (libor + x);
    }
    v += e.nominal() * curve.discount(sch.end());
    v -= e.stock_count * curve.discount(tau) * s_tau;
    return v;
}

}  // namespace oracle
