#pragma once

#include "svloss/grid.hpp"

#include <array>
#include <cstddef>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace svloss {

struct SkeletonNode {
    long id = 0;                 // SWC sample id
    std::array<long, 3> voxel{}; // (x, y, z) in voxel units
};

// Undirected forest; edges hold node indices (not SWC ids).
struct Skeleton {
    std::string name;
    std::vector<SkeletonNode> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    // Throws FormatError on dangling or duplicate edges and on cycles.
    void validate() const;
};

// Columns: id type x y z radius parent; '#' starts a comment line.
// Coordinates are divided by voxel_size and rounded half away from zero.
Skeleton load_swc(std::istream& in, const std::array<double, 3>& voxel_size);

// Flat index of a node in `shape`: x is the last axis, y the one before it,
// z the first (3-d only; must be 0 on 2-d grids).
std::size_t voxel_index(const SkeletonNode& node, const Shape& shape);

// Per-node predicted labels after gap filling: zero-labeled nodes lying on a
// zero-only tree path between two nodes of the same nonzero label take that
// label. When paths of several labels cross, the smallest label wins.
std::vector<Label> align_correct(const Skeleton& skeleton, const LabeledGrid& seg);

struct SkeletonRecord {
    std::string name;
    std::size_t edges = 0;
    std::size_t splits = 0;
    std::size_t omit_edges = 0;
    std::size_t merged_edges = 0;
    double erl = 0.0; // in edges
    double normalized_erl = 0.0;
};

struct SkeletonEval {
    double splits_per_neuron = 0.0;
    double pct_omit = 0.0;
    double pct_merged = 0.0;
    double edge_accuracy = 100.0;
    double normalized_erl = 1.0;
    std::vector<SkeletonRecord> per_skeleton;
};

struct SkeletonEvalOptions {
    bool align = true; // run align_correct before scoring
};

SkeletonEval evaluate_skeletons(const std::vector<Skeleton>& skeletons, const LabeledGrid& seg,
                                const SkeletonEvalOptions& options = {});

} // namespace svloss
