// Built with -mavx2 (no FMA) and selected at runtime only when the CPU reports AVX2.
#include <immintrin.h>

#include <cstring>

#include "fpcredit/mc/step_kernel.hpp"

namespace fpcredit::mc {

void advance_avx2(const StepCoefficients& c, const StepBuffers& b) {
    const std::size_t n = b.firm_in.size();
    const __m256d firm_drift = _mm256_set1_pd(c.firm_drift);
    const __m256d firm_vol = _mm256_set1_pd(c.firm_vol);
    const __m256d eq_drift = _mm256_set1_pd(c.equity_drift);
    const __m256d eq_vol = _mm256_set1_pd(c.equity_vol);
    const __m256d rho = _mm256_set1_pd(c.rho);
    const __m256d rho_bar = _mm256_set1_pd(c.rho_bar);
    const __m256d scale = _mm256_set1_pd(c.bridge_scale);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d zero = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x0 = _mm256_loadu_pd(&b.firm_in[i]);
        const __m256d z1 = _mm256_loadu_pd(&b.z_firm[i]);
        const __m256d z2 = _mm256_loadu_pd(&b.z_equity[i]);
        const __m256d x1 = _mm256_add_pd(_mm256_add_pd(x0, firm_drift), _mm256_mul_pd(firm_vol, z1));
        const __m256d zs = _mm256_add_pd(_mm256_mul_pd(rho, z1), _mm256_mul_pd(rho_bar, z2));
        const __m256d s0 = _mm256_loadu_pd(&b.equity_in[i]);
        const __m256d s1 = _mm256_add_pd(_mm256_add_pd(s0, eq_drift), _mm256_mul_pd(eq_vol, zs));
        _mm256_storeu_pd(&b.firm_out[i], x1);
        _mm256_storeu_pd(&b.equity_out[i], s1);

        const __m256d grid = _mm256_cmp_pd(x1, zero, _CMP_LE_OQ);
        const __m256d lhs = _mm256_mul_pd(_mm256_mul_pd(two, x0), x1);
        const __m256d rhs = _mm256_mul_pd(_mm256_loadu_pd(&b.exponential[i]), scale);
        const __m256d bridge = _mm256_andnot_pd(grid, _mm256_cmp_pd(lhs, rhs, _CMP_LT_OQ));
        const int grid_bits = _mm256_movemask_pd(grid);
        const int bridge_bits = _mm256_movemask_pd(bridge);

        std::uint32_t alive4;
        std::memcpy(&alive4, &b.alive[i], 4);
        if (alive4 == 0) {
            std::memset(&b.event[i], kNoEvent, 4);
            continue;
        }
        for (int k = 0; k < 4; ++k) {
            std::uint8_t ev = kNoEvent;
            if (b.alive[i + k]) {
                if (grid_bits & (1 << k))
                    ev = kGridHit;
                else if (bridge_bits & (1 << k))
                    ev = kBridgeHit;
            }
            b.event[i + k] = ev;
            if (ev != kNoEvent) b.alive[i + k] = 0;
        }
    }

    if (i < n) {
        StepBuffers tail{b.firm_in.subspan(i), b.equity_in.subspan(i), b.z_firm.subspan(i),
                         b.z_equity.subspan(i), b.exponential.subspan(i), b.firm_out.subspan(i),
                         b.equity_out.subspan(i), b.alive.subspan(i), b.event.subspan(i)};
        advance_scalar(c, tail);
    }
}

}  // namespace fpcredit::mc
