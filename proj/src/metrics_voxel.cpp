#include "svloss/metrics_voxel.hpp"

#include "svloss/error.hpp"
#include "svloss/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace svloss {
namespace {

void require_same_shape(const LabeledGrid& a, const LabeledGrid& b)
{
    if (!(a.shape() == b.shape()))
        throw UsageError("shape mismatch: " + a.shape().to_string() + " vs " + b.shape().to_string());
}

// Joint counts of (S(y) id, S(y_hat) id) over mutually-foreground voxels.
struct Contingency {
    std::unordered_map<std::uint64_t, std::uint64_t> joint;
    std::vector<std::uint64_t> rows; // indexed by S(y) id
    std::vector<std::uint64_t> cols; // indexed by S(y_hat) id
    std::uint64_t total = 0;
};

Contingency contingency(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn)
{
    require_same_shape(y, y_hat);
    const ComponentLabeling a = connected_components(y, conn);
    const ComponentLabeling b = connected_components(y_hat, conn);
    Contingency c;
    c.rows.assign(a.count + 1, 0);
    c.cols.assign(b.count + 1, 0);
    for (std::size_t i = 0; i < a.ids.size(); ++i) {
        const ComponentId u = a.ids[i];
        const ComponentId v = b.ids[i];
        if (u == 0 || v == 0)
            continue;
        ++c.joint[(static_cast<std::uint64_t>(u) << 32) | v];
        ++c.rows[u];
        ++c.cols[v];
        ++c.total;
    }
    return c;
}

double pairs(std::uint64_t k)
{
    const auto x = static_cast<double>(k);
    return x * (x - 1.0) / 2.0;
}

} // namespace

OverlapMetrics voxel_overlap_metrics(const LabeledGrid& y, const LabeledGrid& y_hat)
{
    require_same_shape(y, y_hat);
    const auto c = kernels::active().overlap(y.labels().data(), y_hat.labels().data(), y.size());
    OverlapMetrics m;
    m.accuracy = static_cast<double>(c.agree) / static_cast<double>(y.size());
    const std::uint64_t denom = c.truth_fg + c.pred_fg;
    m.dice = denom == 0 ? 1.0 : 2.0 * static_cast<double>(c.both_fg) / static_cast<double>(denom);
    return m;
}

double adjusted_rand(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn)
{
    const Contingency c = contingency(y, y_hat, conn);
    double index = 0.0;
    for (const auto& [key, count] : c.joint)
        index += pairs(count);
    double row_pairs = 0.0;
    for (const auto r : c.rows)
        row_pairs += pairs(r);
    double col_pairs = 0.0;
    for (const auto k : c.cols)
        col_pairs += pairs(k);
    const double all = pairs(c.total);
    if (all == 0.0)
        return 1.0;
    const double expected = row_pairs * col_pairs / all;
    const double max_index = 0.5 * (row_pairs + col_pairs);
    // Zero denominator only when both partitions are all-one-block or
    // all-singletons, i.e. identical.
    if (max_index == expected)
        return 1.0;
    return (index - expected) / (max_index - expected);
}

double variation_of_information(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn)
{
    const Contingency c = contingency(y, y_hat, conn);
    if (c.total == 0)
        return 0.0;
    const auto n = static_cast<double>(c.total);
    double voi = 0.0;
    for (const auto& [key, count] : c.joint) {
        const auto u = static_cast<std::size_t>(key >> 32);
        const auto v = static_cast<std::size_t>(key & 0xffffffffu);
        const double pij = static_cast<double>(count) / n;
        const double pi = static_cast<double>(c.rows[u]) / n;
        const double pj = static_cast<double>(c.cols[v]) / n;
        voi += pij * (std::log2(pi / pij) + std::log2(pj / pij));
    }
    return voi < 0.0 ? 0.0 : voi;
}

std::size_t betti0_error(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn)
{
    require_same_shape(y, y_hat);
    const std::size_t a = connected_components(y, conn).count;
    const std::size_t b = connected_components(y_hat, conn).count;
    return a > b ? a - b : b - a;
}

VoxelMetricsReport voxel_metrics(const LabeledGrid& y, const LabeledGrid& y_hat, Connectivity conn)
{
    VoxelMetricsReport r;
    const OverlapMetrics o = voxel_overlap_metrics(y, y_hat);
    r.accuracy = o.accuracy;
    r.dice = o.dice;
    r.ari = adjusted_rand(y, y_hat, conn);
    r.voi = variation_of_information(y, y_hat, conn);
    r.betti0_error = betti0_error(y, y_hat, conn);
    return r;
}

} // namespace svloss
