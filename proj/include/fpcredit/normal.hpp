#pragma once

#include <cmath>
#include <numbers>

namespace fpcredit {

// Standard normal CDF. erfc keeps full relative accuracy in the lower tail.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace fpcredit
