#include "fpcredit/curves.hpp"

#include <algorithm>
#include <cmath>

#include "fpcredit/errors.hpp"

namespace fpcredit {

DiscountCurve DiscountCurve::flat(double rate, std::string valuation_date) {
    if (!std::isfinite(rate)) throw DomainError("flat rate must be finite");
    DiscountCurve c;
    c.flat_rate_ = rate;
    c.valuation_date_ = std::move(valuation_date);
    return c;
}

DiscountCurve DiscountCurve::from_pillars(std::vector<std::pair<double, double>> pillars,
                                          std::string valuation_date) {
    if (pillars.empty()) throw DomainError("discount curve needs at least one pillar");
    std::sort(pillars.begin(), pillars.end());
    DiscountCurve c;
    c.valuation_date_ = std::move(valuation_date);
    c.times_.push_back(0.0);
    c.log_dfs_.push_back(0.0);
    for (const auto& [t, df] : pillars) {
        if (!(t >= 0.0) || !(df > 0.0) || !std::isfinite(df))
            throw DomainError("pillar needs t >= 0 and a positive discount factor");
        if (t == 0.0) {
            if (df != 1.0) throw DomainError("discount factor at t = 0 must be 1");
            continue;
        }
        if (t == c.times_.back()) throw DomainError("duplicate pillar time");
        c.times_.push_back(t);
        c.log_dfs_.push_back(std::log(df));
    }
    if (c.times_.size() < 2) throw DomainError("discount curve needs a pillar after t = 0");
    return c;
}

double DiscountCurve::discount(double t) const {
    if (!(t >= 0.0)) throw DomainError("discount: negative time");
    if (times_.empty()) return std::exp(-flat_rate_ * t);
    if (t == 0.0) return 1.0;

    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t hi = it == times_.end() ? times_.size() - 1
                                        : static_cast<std::size_t>(it - times_.begin());
    std::size_t lo = hi - 1;
    if (t == times_[hi]) return std::exp(log_dfs_[hi]);
    const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return std::exp(log_dfs_[lo] + w * (log_dfs_[hi] - log_dfs_[lo]));
}

std::vector<std::pair<double, double>> DiscountCurve::pillars() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i < times_.size(); ++i)
        out.emplace_back(times_[i], std::exp(log_dfs_[i]));
    return out;
}

PaymentSchedule::PaymentSchedule(double start, std::vector<double> dates)
    : start_(start), dates_(std::move(dates)) {
    if (dates_.empty()) throw DomainError("payment schedule needs at least one date");
    double prev = start_;
    for (double d : dates_) {
        if (!(d > prev)) throw DomainError("payment dates must be strictly increasing");
        prev = d;
    }
}

std::size_t PaymentSchedule::beta(double t) const {
    auto it = std::upper_bound(dates_.begin(), dates_.end(), t);
    return static_cast<std::size_t>(it - dates_.begin()) + 1;
}

PaymentSchedule make_schedule(double start, double end, int frequency, DayCount day_count) {
    if (!(end > start)) throw DomainError("make_schedule: non-positive tenor");
    if (frequency != 1 && frequency != 2 && frequency != 4 && frequency != 12)
        throw DomainError("make_schedule: frequency must be 1, 2, 4 or 12");
    switch (day_count) {
        case DayCount::Act365FixedEqualSteps:
            break;
    }

    const double periods = (end - start) * frequency;
    const double whole = std::round(periods);
    std::vector<double> dates;
    if (std::abs(periods - whole) < 1e-9) {
        const auto n = static_cast<long>(whole);
        for (long k = 1; k < n; ++k) dates.push_back(start + static_cast<double>(k) / frequency);
        dates.push_back(end);
    } else {
        // short front stub, regular periods rolled back from the end
        const auto n = static_cast<long>(std::ceil(periods));
        for (long k = n - 1; k >= 1; --k) dates.push_back(end - static_cast<double>(k) / frequency);
        dates.push_back(end);
    }
    return PaymentSchedule(start, std::move(dates));
}

}  // namespace fpcredit
