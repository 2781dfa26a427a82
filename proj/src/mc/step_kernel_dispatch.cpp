#include <cstdlib>
#include <string>

#include "fpcredit/errors.hpp"
#include "fpcredit/mc/step_kernel.hpp"

namespace fpcredit::mc {

std::string_view to_string(KernelIsa isa) { return isa == KernelIsa::Avx2 ? "avx2" : "scalar"; }

bool isa_supported(KernelIsa isa) {
    switch (isa) {
        case KernelIsa::Scalar:
            return true;
        case KernelIsa::Avx2:
#if defined(FPCREDIT_HAVE_AVX2_KERNEL)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

KernelIsa best_isa() {
    if (const char* force = std::getenv("FPCREDIT_KERNEL"); force && std::string(force) == "scalar")
        return KernelIsa::Scalar;
    return isa_supported(KernelIsa::Avx2) ? KernelIsa::Avx2 : KernelIsa::Scalar;
}

StepKernel kernel_for(KernelIsa isa) {
    if (!isa_supported(isa)) throw ConfigError("requested kernel '" + std::string(to_string(isa)) + "' is not available");
#if defined(FPCREDIT_HAVE_AVX2_KERNEL)
    if (isa == KernelIsa::Avx2) return &advance_avx2;
#endif
    return &advance_scalar;
}

}  // namespace fpcredit::mc
