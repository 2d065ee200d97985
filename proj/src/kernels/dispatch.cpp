#include "kernels_internal.hpp"

#include <cstdlib>
#include <string_view>

namespace svloss::kernels {

const KernelTable* avx2_table()
{
#if defined(SVLOSS_HAVE_AVX2)
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") != 0;
    }();
    if (supported)
        return &detail::avx2_table_unchecked();
#endif
    return nullptr;
}

const KernelTable& active()
{
    static const KernelTable& chosen = []() -> const KernelTable& {
        const char* env = std::getenv("SVLOSS_KERNELS");
        const std::string_view want = env ? env : "";
        if (want == "scalar")
            return scalar_table();
        if (const KernelTable* t = avx2_table())
            return *t;
        return scalar_table();
    }();
    return chosen;
}

} // namespace svloss::kernels
