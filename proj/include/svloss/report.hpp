#pragma once

// Structured-text (JSON) reports with stable key order. Every report carries
// "format_version".

#include "svloss/affinity.hpp"
#include "svloss/criticals.hpp"
#include "svloss/loss.hpp"
#include "svloss/metrics_skeleton.hpp"
#include "svloss/metrics_voxel.hpp"

#include <optional>

#include "json.hpp"

namespace svloss::report {

using Json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

Json criticals_json(const CriticalReport& r, Connectivity conn, std::string_view detector,
                    std::optional<double> wall_clock_ms);
Json loss_json(const LossResult& r, const LossParams& params, Connectivity conn);
Json voxel_metrics_json(const VoxelMetricsReport& m);
Json skeleton_metrics_json(const SkeletonEval& e);
Json affinity_loss_json(const AffinityLoss& l, const LossParams& params);

// Deterministic text: two-space indent, trailing newline.
std::string to_text(const Json& j);

} // namespace svloss::report
