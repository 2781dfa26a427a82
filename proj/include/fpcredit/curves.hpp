#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fpcredit {

// Times are year fractions from the valuation date throughout the library.

/// Deterministic zero-coupon curve P(0,t). Either a flat continuously-compounded
/// rate or a set of (time, discount factor) pillars interpolated log-linearly.
/// Beyond the last pillar the last segment's forward rate is held flat.
class DiscountCurve {
  public:
    static DiscountCurve flat(double rate, std::string valuation_date = {});
    static DiscountCurve from_pillars(std::vector<std::pair<double, double>> pillars,
                                      std::string valuation_date = {});

    double discount(double t) const;

    bool is_flat() const { return times_.empty(); }
    double flat_rate() const { return flat_rate_; }
    const std::string& valuation_date() const { return valuation_date_; }
    std::vector<std::pair<double, double>> pillars() const;

  private:
    DiscountCurve() = default;

    std::string valuation_date_;
    double flat_rate_ = 0.0;
    // pillar times and log discount factors, time 0 included
    std::vector<double> times_;
    std::vector<double> log_dfs_;
};

enum class DayCount {
    // Every period has accrual 1/frequency; calendar effects are ignored.
    Act365FixedEqualSteps,
};

/// Payment dates T_1 < ... < T_b with T_0 = start, accruals alpha_i = T_i - T_{i-1}.
class PaymentSchedule {
  public:
    PaymentSchedule(double start, std::vector<double> dates);

    double start() const { return start_; }
    std::size_t size() const { return dates_.size(); }
    // 1-based, T_0 is the start
    double date(std::size_t i) const { return i == 0 ? start_ : dates_[i - 1]; }
    double accrual(std::size_t i) const { return date(i) - date(i - 1); }
    double end() const { return dates_.back(); }
    std::span<const double> dates() const { return dates_; }

    /// Index of the first schedule date strictly after t, so that
    /// T_{beta(t)-1} <= t < T_{beta(t)}. Returns size()+1 for t >= T_b and 1 for t < start.
    std::size_t beta(double t) const;

    bool operator==(const PaymentSchedule&) const = default;

  private:
    double start_;
    std::vector<double> dates_;
};

PaymentSchedule make_schedule(double start, double end, int frequency,
                              DayCount day_count = DayCount::Act365FixedEqualSteps);

}  // namespace fpcredit
