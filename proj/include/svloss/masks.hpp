#pragma once

#include "svloss/grid.hpp"

#include <cstdint>
#include <vector>

namespace svloss {

struct BinaryMask {
    Shape shape;
    std::vector<std::uint8_t> bits; // 0 or 1 per voxel

    BinaryMask() = default;
    explicit BinaryMask(Shape s) : shape(s), bits(s.size(), 0) {}
    BinaryMask(Shape s, std::vector<std::uint8_t> b);

    std::size_t count() const;
    bool operator==(const BinaryMask&) const = default;
};

// y != 0 && y_hat == 0. Only foreground membership of y_hat is consulted.
BinaryMask false_negative_mask(const LabeledGrid& y, const LabeledGrid& y_hat);

// y_hat != 0 && y == 0.
BinaryMask false_positive_mask(const LabeledGrid& y, const LabeledGrid& y_hat);

// Zeroes `base` wherever the mask is set.
LabeledGrid remove(const LabeledGrid& base, const BinaryMask& mask);

// Components of the mask with respect to `reference`: two mask voxels join when
// linked by a mask-internal path of constant reference label. Every mask voxel
// must be foreground in the reference.
ComponentLabeling components_wrt(const LabeledGrid& reference, const BinaryMask& mask, Connectivity conn);

} // namespace svloss
