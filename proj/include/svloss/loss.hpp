#pragma once

#include "svloss/criticals.hpp"
#include "svloss/grid.hpp"

#include <span>
#include <vector>

namespace svloss {

enum class BaseLoss {
    CrossEntropy,
    SoftDice,
};

struct LossParams {
    double alpha = 0.5;     // voxel-level vs structure-level weight
    double beta = 0.5;      // merge (positive) vs split (negative) weight
    double threshold = 0.5; // probabilities >= threshold are foreground
    BaseLoss base = BaseLoss::CrossEntropy;

    // Throws UsageError unless alpha, beta in [0,1] and threshold in (0,1).
    void validate() const;
};

// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before the log.
inline constexpr double kProbFloor = 1e-7;
// Additive smoothing in numerator and denominator of the soft Dice ratio.
inline constexpr double kDiceSmooth = 1e-6;

class ProbabilityField {
public:
    ProbabilityField() = default;
    // Throws UsageError on length mismatch or an entry outside [0,1].
    ProbabilityField(Shape shape, std::vector<double> probs);

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return probs_.size(); }
    std::span<const double> probs() const { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    Shape shape_;
    std::vector<double> probs_;
};

struct WeightMap {
    Shape shape;
    std::vector<double> weights;
};

struct LossResult {
    double loss = 0.0;
    double base_loss = 0.0; // plain L0 over the whole image
    CriticalReport report;
};

LabeledGrid binarize(const ProbabilityField& probs, double threshold);

// (1-a) + a*b*[positive critical] + a*(1-b)*[negative critical], per voxel.
WeightMap weight_map(const CriticalReport& report, const LossParams& params, const Shape& shape);

// Plain base loss over all voxels (mean cross-entropy or soft Dice).
double base_loss(const LabeledGrid& y, const ProbabilityField& probs, BaseLoss base);

// Sum of weight * cross-entropy over voxels, divided by n.
double weighted_cross_entropy(const LabeledGrid& y, const ProbabilityField& probs, const WeightMap& weights);

// Binarizes, detects criticals, and evaluates
//   (1-a) L0(all) + a b sum_{C pos} L0(C) + a (1-b) sum_{C neg} L0(C)
// with each term reduced by its own mean.
LossResult supervoxel_loss(const LabeledGrid& y, const ProbabilityField& probs, const LossParams& params,
                           Connectivity conn);

// Same loss for a caller-supplied (fixed) report.
double evaluate_loss(const LabeledGrid& y, const ProbabilityField& probs, const LossParams& params,
                     const CriticalReport& report);

// d loss / d p_i with the report recomputed from probs and then held fixed.
std::vector<double> loss_gradient(const LabeledGrid& y, const ProbabilityField& probs, const LossParams& params,
                                  Connectivity conn);

std::vector<double> evaluate_gradient(const LabeledGrid& y, const ProbabilityField& probs, const LossParams& params,
                                      const CriticalReport& report);

// Entry points over caller-owned dense arrays (row-major, `shape`).
struct LossSummary {
    double loss = 0.0;
    std::size_t negative_whole = 0;
    std::size_t negative_bridge = 0;
    std::size_t positive_whole = 0;
    std::size_t positive_bridge = 0;
};

LossSummary summarize(const LossResult& result);

std::vector<double> dense_weight_map(std::span<const Label> gt, std::span<const double> probs, const Shape& shape,
                                     const LossParams& params, Connectivity conn);

LossSummary dense_supervoxel_loss(std::span<const Label> gt, std::span<const double> probs, const Shape& shape,
                                  const LossParams& params, Connectivity conn);

} // namespace svloss
