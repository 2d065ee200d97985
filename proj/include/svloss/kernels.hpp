#pragma once

// Data-parallel inner loops used by masks, loss and metrics. Every kernel has
// a scalar reference; an AVX2 variant is picked at runtime when the CPU
// supports it. Integer kernels agree bit-for-bit across variants; `dot`
// agrees up to summation order.

#include "svloss/grid.hpp"

#include <cstddef>
#include <cstdint>

namespace svloss::kernels {

struct OverlapCounts {
    std::uint64_t truth_fg = 0; // truth != 0
    std::uint64_t pred_fg = 0;  // pred != 0
    std::uint64_t both_fg = 0;
    std::uint64_t agree = 0; // foreground membership equal

    bool operator==(const OverlapCounts&) const = default;
};

struct KernelTable {
    const char* name;

    // out[i] = a[i] != 0 && b[i] == 0
    void (*difference_mask)(const Label* a, const Label* b, std::uint8_t* out, std::size_t n);
    // out[i] = mask[i] ? 0 : base[i]
    void (*remove_masked)(const Label* base, const std::uint8_t* mask, Label* out, std::size_t n);
    // out[i] = p[i] >= threshold
    void (*binarize)(const double* p, double threshold, Label* out, std::size_t n);
    // out[i] = base + pos_weight * pos[i] + neg_weight * neg[i]
    void (*fill_weights)(const std::uint8_t* pos, const std::uint8_t* neg, double base, double pos_weight,
                         double neg_weight, double* out, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    OverlapCounts (*overlap)(const Label* truth, const Label* pred, std::size_t n);
    std::uint64_t (*count_set)(const std::uint8_t* bits, std::size_t n);
    // out[i] = scale[i] * d/dp[-t log p - (1-t) log(1-p)] with p clamped to
    // [lo, hi] (derivative 0 outside), t = truth[i] != 0.
    void (*ce_gradient)(const Label* truth, const double* p, const double* scale, double lo, double hi,
                        double* out, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_table();

// Best supported table; SVLOSS_KERNELS=scalar|avx2 overrides.
const KernelTable& active();

} // namespace svloss::kernels
