#include "svloss/masks.hpp"

#include "labeling.hpp"
#include "svloss/error.hpp"
#include "svloss/kernels.hpp"

namespace svloss {
namespace {

void require_same_shape(const Shape& a, const Shape& b)
{
    if (!(a == b))
        throw UsageError("shape mismatch: " + a.to_string() + " vs " + b.to_string());
}

} // namespace

BinaryMask::BinaryMask(Shape s, std::vector<std::uint8_t> b) : shape(s), bits(std::move(b))
{
    if (bits.size() != shape.size())
        throw UsageError("mask length does not match shape " + shape.to_string());
}

std::size_t BinaryMask::count() const
{
    return static_cast<std::size_t>(kernels::active().count_set(bits.data(), bits.size()));
}

BinaryMask false_negative_mask(const LabeledGrid& y, const LabeledGrid& y_hat)
{
    require_same_shape(y.shape(), y_hat.shape());
    BinaryMask out(y.shape());
    kernels::active().difference_mask(y.labels().data(), y_hat.labels().data(), out.bits.data(), y.size());
    return out;
}

BinaryMask false_positive_mask(const LabeledGrid& y, const LabeledGrid& y_hat)
{
    require_same_shape(y.shape(), y_hat.shape());
    BinaryMask out(y.shape());
    kernels::active().difference_mask(y_hat.labels().data(), y.labels().data(), out.bits.data(), y.size());
    return out;
}

LabeledGrid remove(const LabeledGrid& base, const BinaryMask& mask)
{
    require_same_shape(base.shape(), mask.shape);
    LabeledGrid out(base.shape());
    kernels::active().remove_masked(base.labels().data(), mask.bits.data(), out.labels().data(), base.size());
    return out;
}

ComponentLabeling components_wrt(const LabeledGrid& reference, const BinaryMask& mask, Connectivity conn)
{
    require_same_shape(reference.shape(), mask.shape);
    const auto ref = reference.labels();
    const auto bits = std::span<const std::uint8_t>(mask.bits);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] && ref[i] == 0)
            throw UsageError("mask voxel " + std::to_string(i) + " is background in the reference labeling");
    return detail::label_components(
        reference.shape(), conn, [&](std::size_t i) { return bits[i] != 0; },
        [&](std::size_t i, std::size_t j) { return ref[i] == ref[j]; });
}

} // namespace svloss
