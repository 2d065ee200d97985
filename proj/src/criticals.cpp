#include "svloss/criticals.hpp"

#include "svloss/error.hpp"

#include <algorithm>
#include <utility>

namespace svloss {
namespace {

// The reference labeling and mask for one polarity. For negatives the
// reference is y and the mask is FN; for positives it is y_hat and FP.
struct Side {
    const LabeledGrid& reference;
    const BinaryMask& mask;
    Polarity polarity;
};

void require_inputs(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn)
{
    if (!(y.shape() == y_hat.shape()))
        throw UsageError("shape mismatch: " + y.shape().to_string() + " vs " + y_hat.shape().to_string());
    require_admissible(conn, y.shape());
}

BinaryMask union_mask(const Shape& shape, const std::vector<CriticalComponent>& comps)
{
    BinaryMask m(shape);
    for (const auto& c : comps)
        for (const std::size_t v : c.voxels)
            m.bits[v] = 1;
    return m;
}

CriticalReport assemble(const Shape& shape, std::vector<CriticalComponent> neg, std::vector<CriticalComponent> pos)
{
    CriticalReport r;
    r.shape = shape;
    r.negative_mask = union_mask(shape, neg);
    r.positive_mask = union_mask(shape, pos);
    r.negative = std::move(neg);
    r.positive = std::move(pos);
    return r;
}

// One pass of the boundary test over every component of `side.mask`.
std::vector<CriticalComponent> get_critical(const Side& side, const ComponentLabeling& s_ref,
                                            const ComponentLabeling& s_removed, const Stencil& stencil)
{
    const auto ref = side.reference.labels();
    const auto& mask = side.mask.bits;
    const std::size_t n = ref.size();

    std::vector<CriticalComponent> out;
    std::vector<std::uint8_t> visited(n, 0);
    std::vector<std::size_t> queue;
    // Keyed by S(ref) id of a boundary node, valued by its S(ref - mask) id.
    std::vector<std::pair<ComponentId, ComponentId>> collisions;

    for (std::size_t root = 0; root < n; ++root) {
        if (!mask[root] || visited[root])
            continue;
        const Label root_label = ref[root];
        bool bridges = false;
        collisions.clear();
        queue.clear();
        queue.push_back(root);
        visited[root] = 1;

        for (std::size_t head = 0; head < queue.size(); ++head) {
            stencil.for_each(queue[head], [&](std::size_t j) {
                if (ref[j] != root_label)
                    return;
                if (mask[j]) {
                    if (!visited[j]) {
                        visited[j] = 1;
                        queue.push_back(j);
                    }
                    return;
                }
                const ComponentId key = s_ref.ids[j];
                const ComponentId value = s_removed.ids[j];
                const auto hit = std::find_if(collisions.begin(), collisions.end(),
                                              [key](const auto& kv) { return kv.first == key; });
                if (hit == collisions.end())
                    collisions.emplace_back(key, value);
                else if (hit->second != value)
                    bridges = true;
            });
        }

        const ComponentId parent = s_ref.ids[root];
        const bool touches_parent = std::any_of(collisions.begin(), collisions.end(),
                                                [parent](const auto& kv) { return kv.first == parent; });
        if (touches_parent && !bridges)
            continue;

        CriticalComponent c;
        c.voxels = queue;
        std::sort(c.voxels.begin(), c.voxels.end());
        c.polarity = side.polarity;
        c.condition = touches_parent ? Condition::Bridge : Condition::Whole;
        c.parent_component = parent;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<CriticalComponent> fast_side(const Side& side, Connectivity conn)
{
    if (side.mask.count() == 0)
        return {};
    const Stencil stencil(side.reference.shape(), conn);
    const ComponentLabeling s_ref = connected_components(side.reference, conn);
    const ComponentLabeling s_removed = connected_components(remove(side.reference, side.mask), conn);
    return get_critical(side, s_ref, s_removed, stencil);
}

// Voxel lists of every mask component, indexed by id - 1.
std::vector<std::vector<std::size_t>> mask_components(const Side& side, Connectivity conn)
{
    const ComponentLabeling comps = components_wrt(side.reference, side.mask, conn);
    std::vector<std::vector<std::size_t>> voxels(comps.count);
    for (std::size_t i = 0; i < comps.ids.size(); ++i)
        if (comps.ids[i])
            voxels[comps.ids[i] - 1].push_back(i);
    return voxels;
}

std::vector<CriticalComponent> global_side(const Side& side, Connectivity conn)
{
    const auto components = mask_components(side, conn);
    if (components.empty())
        return {};
    const ComponentLabeling s_ref = connected_components(side.reference, conn);
    const auto parent_sizes = s_ref.sizes();

    std::vector<CriticalComponent> out;
    LabeledGrid scratch = side.reference;
    for (const auto& voxels : components) {
        for (const std::size_t v : voxels)
            scratch[v] = 0;
        const std::size_t after = connected_components(scratch, conn).count;
        for (const std::size_t v : voxels)
            scratch[v] = side.reference[v];
        if (after == s_ref.count)
            continue;
        const ComponentId parent = s_ref.ids[voxels.front()];
        CriticalComponent c;
        c.voxels = voxels;
        c.polarity = side.polarity;
        c.condition = parent_sizes[parent] == voxels.size() ? Condition::Whole : Condition::Bridge;
        c.parent_component = parent;
        out.push_back(std::move(c));
    }
    return out;
}

// Same-label components of `labels` restricted to voxels stamped `epoch`,
// skipping voxels stamped `removed_epoch`.
std::size_t count_within(std::span<const Label> labels, const Stencil& stencil, std::span<const std::size_t> domain,
                         std::vector<std::uint32_t>& stamp, std::uint32_t epoch, std::vector<std::uint32_t>& seen,
                         std::uint32_t seen_epoch, const std::vector<std::uint32_t>& removed,
                         std::uint32_t removed_epoch, std::vector<std::size_t>& queue)
{
    std::size_t count = 0;
    for (const std::size_t root : domain) {
        if (labels[root] == 0 || seen[root] == seen_epoch || removed[root] == removed_epoch)
            continue;
        ++count;
        seen[root] = seen_epoch;
        queue.clear();
        queue.push_back(root);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t i = queue[head];
            stencil.for_each(i, [&](std::size_t j) {
                if (stamp[j] != epoch || seen[j] == seen_epoch || removed[j] == removed_epoch)
                    return;
                if (labels[j] != labels[i])
                    return;
                seen[j] = seen_epoch;
                queue.push_back(j);
            });
        }
    }
    return count;
}

std::vector<CriticalComponent> local_side(const Side& side, Connectivity conn)
{
    const auto components = mask_components(side, conn);
    if (components.empty())
        return {};
    const auto ref = side.reference.labels();
    const std::size_t n = ref.size();
    const Stencil stencil(side.reference.shape(), conn);
    const ComponentLabeling s_ref = connected_components(side.reference, conn);
    const auto parent_sizes = s_ref.sizes();

    std::vector<std::uint32_t> in_nbhd(n, 0), in_c(n, 0), seen(n, 0);
    const std::vector<std::uint32_t> never_removed(n, 0);
    std::vector<std::size_t> domain, queue;
    std::uint32_t epoch = 0, seen_epoch = 0;

    std::vector<CriticalComponent> out;
    for (const auto& voxels : components) {
        ++epoch;
        domain.clear();
        for (const std::size_t v : voxels) {
            in_c[v] = epoch;
            if (in_nbhd[v] != epoch) {
                in_nbhd[v] = epoch;
                domain.push_back(v);
            }
        }
        for (const std::size_t v : voxels)
            stencil.for_each(v, [&](std::size_t j) {
                if (in_nbhd[j] != epoch) {
                    in_nbhd[j] = epoch;
                    domain.push_back(j);
                }
            });

        const std::size_t before = count_within(ref, stencil, domain, in_nbhd, epoch, seen, ++seen_epoch,
                                                never_removed, epoch + 1, queue);
        const std::size_t after =
            count_within(ref, stencil, domain, in_nbhd, epoch, seen, ++seen_epoch, in_c, epoch, queue);
        if (before == after)
            continue;

        const ComponentId parent = s_ref.ids[voxels.front()];
        CriticalComponent c;
        c.voxels = voxels;
        c.polarity = side.polarity;
        c.condition = parent_sizes[parent] == voxels.size() ? Condition::Whole : Condition::Bridge;
        c.parent_component = parent;
        out.push_back(std::move(c));
    }
    return out;
}

template <class SideFn>
CriticalReport run(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn, SideFn&& side_fn)
{
    require_inputs(y, y_hat, conn);
    const BinaryMask fn = false_negative_mask(y, y_hat);
    const BinaryMask fp = false_positive_mask(y, y_hat);
    auto neg = side_fn(Side{y, fn, Polarity::Negative}, conn);
    auto pos = side_fn(Side{y_hat, fp, Polarity::Positive}, conn);
    return assemble(y.shape(), std::move(neg), std::move(pos));
}

} // namespace

std::string_view to_string(Polarity p)
{
    return p == Polarity::Negative ? "negative" : "positive";
}

CriticalReport detect_criticals(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn)
{
    return run(y, y_hat, conn, fast_side);
}

CriticalReport oracle_global(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn)
{
    return run(y, y_hat, conn, global_side);
}

CriticalReport oracle_local(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn)
{
    return run(y, y_hat, conn, local_side);
}

} // namespace svloss
