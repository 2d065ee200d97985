#pragma once

#include "svloss/grid.hpp"

#include <cstddef>

namespace svloss {

struct OverlapMetrics {
    double accuracy = 1.0; // foreground/background agreement
    double dice = 1.0;     // 1 when both foregrounds are empty
};

struct VoxelMetricsReport {
    double accuracy = 1.0;
    double dice = 1.0;
    double ari = 1.0;
    double voi = 0.0; // bits
    std::size_t betti0_error = 0;
};

OverlapMetrics voxel_overlap_metrics(const LabeledGrid& y, const LabeledGrid& y_hat);

// ARI and VOI compare the component partitions S(y) and S(y_hat) on voxels
// that are foreground in both. Empty partitions score as identical.
double adjusted_rand(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn);
double variation_of_information(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn);

// |#S(y) - #S(y_hat)|
std::size_t betti0_error(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn);

VoxelMetricsReport voxel_metrics(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn);

} // namespace svloss
