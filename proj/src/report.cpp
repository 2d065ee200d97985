#include "svloss/report.hpp"

namespace svloss::report {
namespace {

std::string_view base_name(BaseLoss b) { return b == BaseLoss::CrossEntropy ? "ce" : "dice"; }

Json components_json(const std::vector<CriticalComponent>& comps)
{
    Json arr = Json::array();
    for (const auto& c : comps) {
        Json j;
        j["polarity"] = to_string(c.polarity);
        j["condition"] = static_cast<int>(c.condition);
        j["parent_component"] = c.parent_component;
        j["size"] = c.voxels.size();
        j["voxels"] = c.voxels;
        arr.push_back(std::move(j));
    }
    return arr;
}

Json params_json(const LossParams& p)
{
    Json j;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["threshold"] = p.threshold;
    j["base"] = base_name(p.base);
    return j;
}

} // namespace

Json criticals_json(const CriticalReport& r, Connectivity conn, std::string_view detector,
                    std::optional<double> wall_clock_ms)
{
    Json j;
    j["format_version"] = kReportVersion;
    j["kind"] = "criticals";
    j["detector"] = detector;
    j["shape"] = r.shape.dims();
    j["connectivity"] = static_cast<int>(conn);
    j["negative_count"] = r.negative.size();
    j["positive_count"] = r.positive.size();
    j["negative_voxels"] = r.negative_mask.count();
    j["positive_voxels"] = r.positive_mask.count();
    if (wall_clock_ms)
        j["wall_clock_ms"] = *wall_clock_ms;
    j["negative"] = components_json(r.negative);
    j["positive"] = components_json(r.positive);
    return j;
}

Json loss_json(const LossResult& r, const LossParams& params, Connectivity conn)
{
    const LossSummary s = summarize(r);
    Json j;
    j["format_version"] = kReportVersion;
    j["kind"] = "loss";
    j["params"] = params_json(params);
    j["connectivity"] = static_cast<int>(conn);
    j["loss"] = r.loss;
    j["base_loss"] = r.base_loss;
    j["negative_whole"] = s.negative_whole;
    j["negative_bridge"] = s.negative_bridge;
    j["positive_whole"] = s.positive_whole;
    j["positive_bridge"] = s.positive_bridge;
    return j;
}

Json voxel_metrics_json(const VoxelMetricsReport& m)
{
    Json j;
    j["format_version"] = kReportVersion;
    j["kind"] = "voxel_metrics";
    j["accuracy"] = m.accuracy;
    j["dice"] = m.dice;
    j["ari"] = m.ari;
    j["voi"] = m.voi;
    j["betti0_error"] = m.betti0_error;
    return j;
}

Json skeleton_metrics_json(const SkeletonEval& e)
{
    Json j;
    j["format_version"] = kReportVersion;
    j["kind"] = "skeleton_metrics";
    j["splits_per_neuron"] = e.splits_per_neuron;
    j["pct_omit"] = e.pct_omit;
    j["pct_merged"] = e.pct_merged;
    j["edge_accuracy"] = e.edge_accuracy;
    j["normalized_erl"] = e.normalized_erl;
    Json per = Json::array();
    for (const auto& s : e.per_skeleton) {
        Json r;
        r["name"] = s.name;
        r["edges"] = s.edges;
        r["splits"] = s.splits;
        r["omit_edges"] = s.omit_edges;
        r["merged_edges"] = s.merged_edges;
        r["erl"] = s.erl;
        r["normalized_erl"] = s.normalized_erl;
        per.push_back(std::move(r));
    }
    j["per_skeleton"] = std::move(per);
    return j;
}

Json affinity_loss_json(const AffinityLoss& l, const LossParams& params)
{
    Json j;
    j["format_version"] = kReportVersion;
    j["kind"] = "affinity_loss";
    j["params"] = params_json(params);
    j["total"] = l.total;
    j["per_channel"] = l.per_channel;
    return j;
}

std::string to_text(const Json& j) { return j.dump(2) + "\n"; }

} // namespace svloss::report
