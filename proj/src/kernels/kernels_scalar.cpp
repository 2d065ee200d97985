#include "kernels_internal.hpp"

namespace svloss::kernels {
namespace {

void difference_mask(const Label* a, const Label* b, std::uint8_t* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<std::uint8_t>(a[i] != 0 && b[i] == 0);
}

void remove_masked(const Label* base, const std::uint8_t* mask, Label* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = mask[i] ? 0 : base[i];
}

void binarize(const double* p, double threshold, Label* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = p[i] >= threshold ? 1 : 0;
}

void fill_weights(const std::uint8_t* pos, const std::uint8_t* neg, double base, double pos_weight,
                  double neg_weight, double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = base + pos_weight * static_cast<double>(pos[i]) + neg_weight * static_cast<double>(neg[i]);
}

double dot(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

OverlapCounts overlap(const Label* truth, const Label* pred, std::size_t n)
{
    OverlapCounts c;
    for (std::size_t i = 0; i < n; ++i) {
        const bool t = truth[i] != 0;
        const bool p = pred[i] != 0;
        c.truth_fg += t;
        c.pred_fg += p;
        c.both_fg += t && p;
        c.agree += t == p;
    }
    return c;
}

std::uint64_t count_set(const std::uint8_t* bits, std::size_t n)
{
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        c += bits[i] != 0;
    return c;
}

void ce_gradient(const Label* truth, const double* p, const double* scale, double lo, double hi, double* out,
                 std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double q = p[i];
        if (q < lo || q > hi) {
            out[i] = 0.0;
            continue;
        }
        const double d = truth[i] != 0 ? -1.0 / q : 1.0 / (1.0 - q);
        out[i] = scale[i] * d;
    }
}

} // namespace

const KernelTable& scalar_table()
{
    static const KernelTable table{
        "scalar", difference_mask, remove_masked, binarize, fill_weights, dot, overlap, count_set, ce_gradient,
    };
    return table;
}

} // namespace svloss::kernels
