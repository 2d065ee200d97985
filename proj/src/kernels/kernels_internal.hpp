#pragma once

#include "svloss/kernels.hpp"

namespace svloss::kernels::detail {

// Defined in kernels_avx2.cpp; only call after a CPU feature check.
const KernelTable& avx2_table_unchecked();

} // namespace svloss::kernels::detail
