#pragma once

#include "svloss/grid.hpp"
#include "svloss/masks.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace svloss {

enum class Polarity {
    Negative, // false-negative component, causes a split
    Positive, // false-positive component, causes a merge
};

enum class Condition : int {
    Whole = 1,  // removing C deletes (or adding C creates) an entire object
    Bridge = 2, // C is the only link between parts of one object
};

std::string_view to_string(Polarity p);

struct CriticalComponent {
    std::vector<std::size_t> voxels; // ascending
    Polarity polarity = Polarity::Negative;
    Condition condition = Condition::Whole;
    ComponentId parent_component = 0; // id in S(y) (negative) or S(y_hat) (positive)

    bool operator==(const CriticalComponent&) const = default;
};

struct CriticalReport {
    Shape shape;
    std::vector<CriticalComponent> negative; // ordered by smallest voxel
    std::vector<CriticalComponent> positive;
    BinaryMask negative_mask;
    BinaryMask positive_mask;

    bool empty() const { return negative.empty() && positive.empty(); }
    bool operator==(const CriticalReport&) const = default;
};

// Linear-time detection. The four labelings S(y), S(y - fn), S(y_hat) and
// S(y_hat - fp) are computed once; each mask component is then grown by BFS
// while its boundary nodes that share the root's reference label are checked:
// the component is critical when none of them lies in its parent object, or
// when two of them lie in different components of the reference with the
// whole mask removed.
CriticalReport detect_criticals(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn);

// Brute force: C is critical iff removing it alone changes the global
// component count of the reference. Quadratic; for small instances.
CriticalReport oracle_global(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn);

// Neighborhood definition: C is critical iff the component count of the
// reference restricted to N(C) changes when C is removed.
CriticalReport oracle_local(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn);

} // namespace svloss
