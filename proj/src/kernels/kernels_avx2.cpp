// Compiled with -mavx2. Nothing here may run before dispatch.cpp has checked
// the CPU.

#include "kernels_internal.hpp"

#include <immintrin.h>

#include <array>
#include <cstring>

namespace svloss::kernels {
namespace {

// Byte k of entry b is bit k of b.
constexpr std::array<std::uint64_t, 256> make_expand_table()
{
    std::array<std::uint64_t, 256> t{};
    for (std::size_t b = 0; b < 256; ++b)
        for (std::size_t k = 0; k < 8; ++k)
            if (b & (std::size_t{1} << k))
                t[b] |= std::uint64_t{1} << (8 * k);
    return t;
}
constexpr auto kExpand = make_expand_table();

inline __m256i load8(const Label* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }

void difference_mask(const Label* a, const Label* b, std::uint8_t* out, std::size_t n)
{
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i az = _mm256_cmpeq_epi32(load8(a + i), zero);
        const __m256i bz = _mm256_cmpeq_epi32(load8(b + i), zero);
        const int bits = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_andnot_si256(az, bz)));
        std::memcpy(out + i, &kExpand[static_cast<std::size_t>(bits)], 8);
    }
    for (; i < n; ++i)
        out[i] = static_cast<std::uint8_t>(a[i] != 0 && b[i] == 0);
}

void remove_masked(const Label* base, const std::uint8_t* mask, Label* out, std::size_t n)
{
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i m = _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(mask + i)));
        const __m256i keep = _mm256_cmpeq_epi32(m, zero);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(keep, load8(base + i)));
    }
    for (; i < n; ++i)
        out[i] = mask[i] ? 0 : base[i];
}

void binarize(const double* p, double threshold, Label* out, std::size_t n)
{
    const __m256d thr = _mm256_set1_pd(threshold);
    const __m256i pick = _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6);
    const __m128i one = _mm_set1_epi32(1);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ge = _mm256_cmp_pd(_mm256_loadu_pd(p + i), thr, _CMP_GE_OQ);
        const __m256i lanes = _mm256_permutevar8x32_epi32(_mm256_castpd_si256(ge), pick);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i), _mm_and_si128(_mm256_castsi256_si128(lanes), one));
    }
    for (; i < n; ++i)
        out[i] = p[i] >= threshold ? 1 : 0;
}

inline __m256d bytes_to_pd(const std::uint8_t* p)
{
    std::int32_t raw;
    std::memcpy(&raw, p, 4);
    return _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_cvtsi32_si128(raw)));
}

void fill_weights(const std::uint8_t* pos, const std::uint8_t* neg, double base, double pos_weight,
                  double neg_weight, double* out, std::size_t n)
{
    const __m256d vb = _mm256_set1_pd(base);
    const __m256d vp = _mm256_set1_pd(pos_weight);
    const __m256d vn = _mm256_set1_pd(neg_weight);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // Same association as the scalar loop: (base + pw*p) + nw*q.
        const __m256d w = _mm256_add_pd(_mm256_add_pd(vb, _mm256_mul_pd(vp, bytes_to_pd(pos + i))),
                                        _mm256_mul_pd(vn, bytes_to_pd(neg + i)));
        _mm256_storeu_pd(out + i, w);
    }
    for (; i < n; ++i)
        out[i] = base + pos_weight * static_cast<double>(pos[i]) + neg_weight * static_cast<double>(neg[i]);
}

double dot(const double* a, const double* b, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

OverlapCounts overlap(const Label* truth, const Label* pred, std::size_t n)
{
    const __m256i zero = _mm256_setzero_si256();
    OverlapCounts c;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const auto tz = static_cast<unsigned>(
            _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(load8(truth + i), zero))));
        const auto pz = static_cast<unsigned>(
            _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(load8(pred + i), zero))));
        c.truth_fg += 8 - __builtin_popcount(tz);
        c.pred_fg += 8 - __builtin_popcount(pz);
        c.both_fg += __builtin_popcount(~(tz | pz) & 0xffu);
        c.agree += __builtin_popcount(~(tz ^ pz) & 0xffu);
    }
    for (; i < n; ++i) {
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
    const __m256i zero = _mm256_setzero_si256();
    std::uint64_t c = 0;
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
        const auto z = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
        c += 32 - __builtin_popcount(z);
    }
    for (; i < n; ++i)
        c += bits[i] != 0;
    return c;
}

void ce_gradient(const Label* truth, const double* p, const double* scale, double lo, double hi, double* out,
                 std::size_t n)
{
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d minus_one = _mm256_set1_pd(-1.0);
    const __m128i zero = _mm_setzero_si128();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d q = _mm256_loadu_pd(p + i);
        const __m256d in_range = _mm256_and_pd(_mm256_cmp_pd(q, vlo, _CMP_GE_OQ), _mm256_cmp_pd(q, vhi, _CMP_LE_OQ));
        const __m128i t = _mm_loadu_si128(reinterpret_cast<const __m128i*>(truth + i));
        const __m256d bg = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(t, zero)));
        const __m256d d = _mm256_blendv_pd(_mm256_div_pd(minus_one, q), _mm256_div_pd(one, _mm256_sub_pd(one, q)), bg);
        _mm256_storeu_pd(out + i, _mm256_and_pd(in_range, _mm256_mul_pd(_mm256_loadu_pd(scale + i), d)));
    }
    for (; i < n; ++i) {
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

namespace detail {

const KernelTable& avx2_table_unchecked()
{
    static const KernelTable table{
        "avx2", difference_mask, remove_masked, binarize, fill_weights, dot, overlap, count_set, ce_gradient,
    };
    return table;
}

} // namespace detail
} // namespace svloss::kernels
