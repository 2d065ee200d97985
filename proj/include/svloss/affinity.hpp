#pragma once

#include "svloss/grid.hpp"
#include "svloss/loss.hpp"
#include "svloss/masks.hpp"

#include <array>
#include <optional>
#include <vector>

namespace svloss {

// Displacement in (depth, row, col) order; 2-d grids use depth 0. Only
// positive unit axis steps are admissible, so the channel value at voxel i
// describes the edge {i, i + offset} and i is its lower-index endpoint.
using AffinityOffset = std::array<int, 3>;

// One unit step per grid axis, axis 0 first.
std::vector<AffinityOffset> default_offsets(std::size_t ndim);

struct AffinityField {
    Shape shape;
    std::vector<AffinityOffset> offsets;
    std::vector<std::vector<double>> channels; // one per offset, shape.size() entries each
    // Foreground evidence for voxels with no incident edge (set by encode).
    std::optional<BinaryMask> foreground;

    std::size_t channel_count() const { return channels.size(); }
};

AffinityField encode_affinities(const LabeledGrid& y, Connectivity conn, const std::vector<AffinityOffset>& offsets);

inline AffinityField encode_affinities(const LabeledGrid& y, Connectivity conn)
{
    return encode_affinities(y, conn, default_offsets(y.shape().ndim()));
}

// Components of the graph whose edges have channel value >= threshold.
// Voxels with no such edge are background unless marked in `foreground`.
ComponentLabeling decode_affinities(const AffinityField& aff, double threshold);

struct AffinityLoss {
    double total = 0.0;
    std::vector<double> per_channel;
};

// Sum over channels of the supervoxel loss, each channel treated as a binary
// grid of the same shape.
AffinityLoss affinity_loss(const AffinityField& truth, const AffinityField& pred, const LossParams& params,
                           Connectivity conn);

inline AffinityLoss affinity_loss(const AffinityField& truth, const AffinityField& pred, const LossParams& params)
{
    return affinity_loss(truth, pred, params, axis_connectivity(truth.shape.ndim()));
}

} // namespace svloss
