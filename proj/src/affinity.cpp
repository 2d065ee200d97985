#include "svloss/affinity.hpp"

#include "svloss/error.hpp"

#include <cstdlib>
#include <string>

namespace svloss {
namespace {

void require_offsets(const Shape& shape, const std::vector<AffinityOffset>& offsets)
{
    if (offsets.empty())
        throw UsageError("at least one affinity offset is required");
    for (const auto& o : offsets) {
        const int l1 = std::abs(o[0]) + std::abs(o[1]) + std::abs(o[2]);
        const bool unit = l1 == 1 && o[0] >= 0 && o[1] >= 0 && o[2] >= 0;
        if (!unit || (shape.ndim() == 2 && o[0] != 0))
            throw UsageError("affinity offset (" + std::to_string(o[0]) + "," + std::to_string(o[1]) + "," +
                             std::to_string(o[2]) + ") is not a positive unit axis step for a " +
                             std::to_string(shape.ndim()) + "-d grid");
    }
}

// Index of i + offset, or npos when it leaves the grid.
class OffsetWalker {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit OffsetWalker(const Shape& shape) : e_(shape.extents3()) {}

    std::size_t step(std::size_t i, const AffinityOffset& o) const
    {
        const std::size_t plane = e_[1] * e_[2];
        const std::size_t z = i / plane;
        const std::size_t y = (i % plane) / e_[2];
        const std::size_t x = i % e_[2];
        if (z + o[0] >= e_[0] || y + o[1] >= e_[1] || x + o[2] >= e_[2])
            return npos;
        return i + o[0] * plane + o[1] * e_[2] + o[2];
    }

    // Inverse step, i - offset.
    std::size_t back(std::size_t i, const AffinityOffset& o) const
    {
        const std::size_t plane = e_[1] * e_[2];
        const std::size_t z = i / plane;
        const std::size_t y = (i % plane) / e_[2];
        const std::size_t x = i % e_[2];
        if (z < static_cast<std::size_t>(o[0]) || y < static_cast<std::size_t>(o[1]) ||
            x < static_cast<std::size_t>(o[2]))
            return npos;
        return i - o[0] * plane - o[1] * e_[2] - o[2];
    }

private:
    std::array<std::size_t, 3> e_;
};

} // namespace

std::vector<AffinityOffset> default_offsets(std::size_t ndim)
{
    if (ndim == 2)
        return {{0, 1, 0}, {0, 0, 1}};
    return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
}

AffinityField encode_affinities(const LabeledGrid& y, Connectivity conn, const std::vector<AffinityOffset>& offsets)
{
    require_offsets(y.shape(), offsets);
    const ComponentLabeling s = connected_components(y, conn);
    const OffsetWalker walk(y.shape());
    const std::size_t n = y.size();

    AffinityField aff;
    aff.shape = y.shape();
    aff.offsets = offsets;
    for (const auto& o : offsets) {
        std::vector<double> ch(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (s.ids[i] == 0)
                continue;
            const std::size_t j = walk.step(i, o);
            if (j != OffsetWalker::npos && s.ids[j] == s.ids[i])
                ch[i] = 1.0;
        }
        aff.channels.push_back(std::move(ch));
    }
    BinaryMask fg(y.shape());
    for (std::size_t i = 0; i < n; ++i)
        fg.bits[i] = y[i] != 0;
    aff.foreground = std::move(fg);
    return aff;
}

ComponentLabeling decode_affinities(const AffinityField& aff, double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0))
        throw UsageError("affinity threshold must lie in (0,1)");
    require_offsets(aff.shape, aff.offsets);
    const std::size_t n = aff.shape.size();
    if (aff.channels.size() != aff.offsets.size())
        throw UsageError("affinity field has " + std::to_string(aff.channels.size()) + " channels but " +
                         std::to_string(aff.offsets.size()) + " offsets");
    for (const auto& ch : aff.channels)
        if (ch.size() != n)
            throw UsageError("affinity channel length does not match shape " + aff.shape.to_string());
    if (aff.foreground && !(aff.foreground->shape == aff.shape))
        throw UsageError("foreground evidence shape does not match affinity shape");

    const OffsetWalker walk(aff.shape);
    const std::size_t k = aff.offsets.size();

    // Calls fn(j) for every surviving edge {i, j}.
    auto for_each_edge = [&](std::size_t i, auto&& fn) {
        for (std::size_t c = 0; c < k; ++c) {
            const auto& o = aff.offsets[c];
            if (aff.channels[c][i] >= threshold) {
                if (const std::size_t j = walk.step(i, o); j != OffsetWalker::npos)
                    fn(j);
            }
            if (const std::size_t j = walk.back(i, o); j != OffsetWalker::npos && aff.channels[c][j] >= threshold)
                fn(j);
        }
    };

    ComponentLabeling out;
    out.shape = aff.shape;
    out.ids.assign(n, 0);
    std::vector<std::size_t> queue;
    ComponentId next = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (out.ids[root] != 0)
            continue;
        bool member = aff.foreground && aff.foreground->bits[root];
        if (!member)
            for_each_edge(root, [&](std::size_t) { member = true; });
        if (!member)
            continue;
        const ComponentId id = ++next;
        out.ids[root] = id;
        queue.assign(1, root);
        for (std::size_t head = 0; head < queue.size(); ++head)
            for_each_edge(queue[head], [&](std::size_t j) {
                if (out.ids[j] == 0) {
                    out.ids[j] = id;
                    queue.push_back(j);
                }
            });
    }
    out.count = next;
    return out;
}

AffinityLoss affinity_loss(const AffinityField& truth, const AffinityField& pred, const LossParams& params,
                           Connectivity conn)
{
    params.validate();
    if (!(truth.shape == pred.shape))
        throw UsageError("affinity shape mismatch: " + truth.shape.to_string() + " vs " + pred.shape.to_string());
    if (truth.offsets != pred.offsets || truth.channels.size() != pred.channels.size() ||
        truth.channels.size() != truth.offsets.size())
        throw UsageError("affinity channel/offset mismatch between truth and prediction");

    AffinityLoss out;
    for (std::size_t c = 0; c < truth.channels.size(); ++c) {
        std::vector<Label> labels(truth.channels[c].size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const double v = truth.channels[c][i];
            if (v != 0.0 && v != 1.0)
                throw UsageError("ground-truth affinity channel " + std::to_string(c) + " is not binary");
            labels[i] = v != 0.0 ? 1 : 0;
        }
        const LabeledGrid y(truth.shape, std::move(labels));
        const ProbabilityField p(pred.shape, pred.channels[c]);
        const double l = supervoxel_loss(y, p, params, conn).loss;
        out.per_channel.push_back(l);
        out.total += l;
    }
    return out;
}

} // namespace svloss
