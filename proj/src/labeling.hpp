#pragma once

// Shared BFS labeling core for grid-core and masks.

#include "svloss/grid.hpp"

#include <vector>

namespace svloss::detail {

// Labels every voxel with member(i) true; neighbors i, j join when
// member(j) && same(i, j). Ids are consecutive in scan order of the root.
template <class Member, class Same>
ComponentLabeling label_components(const Shape& shape, Connectivity conn, Member&& member, Same&& same)
{
    require_admissible(conn, shape);
    const Stencil stencil(shape, conn);
    const std::size_t n = shape.size();

    ComponentLabeling out;
    out.shape = shape;
    out.ids.assign(n, 0);

    std::vector<std::size_t> queue;
    queue.reserve(64);
    ComponentId next = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (out.ids[root] != 0 || !member(root))
            continue;
        const ComponentId id = ++next;
        out.ids[root] = id;
        queue.clear();
        queue.push_back(root);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t i = queue[head];
            stencil.for_each(i, [&](std::size_t j) {
                if (out.ids[j] == 0 && member(j) && same(i, j)) {
                    out.ids[j] = id;
                    queue.push_back(j);
                }
            });
        }
    }
    out.count = next;
    return out;
}

} // namespace svloss::detail
