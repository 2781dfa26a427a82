#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace fpcredit::mc {

// One time step of the joint (firm, equity) simulation, identical for every path in a block.
struct StepCoefficients {
    double firm_drift = 0.0;    // (B - 1/2) * integrated firm variance over the step
    double firm_vol = 0.0;      // sqrt(integrated firm variance)
    double equity_drift = 0.0;  // log(P(t0)/P(t1)) - (q + sigma_S^2 / 2) dt
    double equity_vol = 0.0;    // sigma_S sqrt(dt)
    double rho = 0.0;
    double rho_bar = 1.0;       // sqrt(1 - rho^2)
    double bridge_scale = 0.0;  // integrated firm variance, or 0 to disable the bridge test
};

enum StepEvent : std::uint8_t {
    kNoEvent = 0,
    kGridHit = 1,    // log(V/H) <= 0 at the end of the step
    kBridgeHit = 2,  // crossing sampled inside the step
};

// Views over one block of paths in structure-of-arrays layout. All spans share one length.
struct StepBuffers {
    std::span<const double> firm_in;    // log(V/H(t)) at step start
    std::span<const double> equity_in;  // log S at step start
    std::span<const double> z_firm;
    std::span<const double> z_equity;     // independent normal, correlated inside the kernel
    std::span<const double> exponential;  // Exp(1) variates for the bridge test
    std::span<double> firm_out;
    std::span<double> equity_out;
    std::span<std::uint8_t> alive;  // 1 while not defaulted; cleared on an event
    std::span<std::uint8_t> event;
};

// Bridge test: a path that stays above the barrier at both ends crosses inside the step with
// probability exp(-2 x0 x1 / dvar); with E = -log(U) this is 2 x0 x1 < E * dvar.
using StepKernel = void (*)(const StepCoefficients&, const StepBuffers&);

void advance_scalar(const StepCoefficients& c, const StepBuffers& b);
#if defined(FPCREDIT_HAVE_AVX2_KERNEL)
void advance_avx2(const StepCoefficients& c, const StepBuffers& b);
#endif

enum class KernelIsa { Scalar, Avx2 };

std::string_view to_string(KernelIsa isa);
bool isa_supported(KernelIsa isa);
// Widest supported variant; FPCREDIT_KERNEL=scalar in the environment forces the scalar path.
KernelIsa best_isa();
StepKernel kernel_for(KernelIsa isa);

}  // namespace fpcredit::mc
