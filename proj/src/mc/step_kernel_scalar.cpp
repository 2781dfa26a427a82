#include "fpcredit/mc/step_kernel.hpp"

namespace fpcredit::mc {

void advance_scalar(const StepCoefficients& c, const StepBuffers& b) {
    const std::size_t n = b.firm_in.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = b.firm_in[i];
        const double x1 = (x0 + c.firm_drift) + c.firm_vol * b.z_firm[i];
        const double zs = c.rho * b.z_firm[i] + c.rho_bar * b.z_equity[i];
        b.firm_out[i] = x1;
        b.equity_out[i] = (b.equity_in[i] + c.equity_drift) + c.equity_vol * zs;

        std::uint8_t ev = kNoEvent;
        if (b.alive[i]) {
            if (x1 <= 0.0)
                ev = kGridHit;
            else if ((2.0 * x0) * x1 < b.exponential[i] * c.bridge_scale)
                ev = kBridgeHit;
        }
        b.event[i] = ev;
        if (ev != kNoEvent) b.alive[i] = 0;
    }
}

}  // namespace fpcredit::mc
