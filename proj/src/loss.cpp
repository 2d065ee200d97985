#include "svloss/loss.hpp"

#include "svloss/error.hpp"
#include "svloss/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace svloss {
namespace {

void require_same_shape(const Shape& a, const Shape& b)
{
    if (!(a == b))
        throw UsageError("shape mismatch: " + a.to_string() + " vs " + b.to_string());
}

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

double cross_entropy(Label truth, double p)
{
    const double q = clamp_prob(p);
    return truth != 0 ? -std::log(q) : -std::log(1.0 - q);
}

// Loss sums are accumulated in extended precision so the result carries about
// one ulp of error; finite-difference checks of the gradient depend on it.
using Acc = long double;

template <class Voxels>
Acc mean_cross_entropy(std::span<const Label> y, std::span<const double> p, const Voxels& voxels)
{
    if (voxels.size() == 0)
        return 0.0;
    Acc s = 0.0;
    for (const std::size_t i : voxels)
        s += cross_entropy(y[i], p[i]);
    return s / static_cast<Acc>(voxels.size());
}

struct DiceSums {
    Acc intersection = 0.0; // sum p*t
    Acc pred = 0.0;         // sum p
    Acc truth = 0.0;        // sum t

    Acc denominator() const { return pred + truth + kDiceSmooth; }
    Acc loss() const { return 1.0L - (2.0L * intersection + kDiceSmooth) / denominator(); }

    // d loss / d p_i for a voxel inside the term's domain.
    double derivative(double t) const
    {
        const Acc d = denominator();
        return static_cast<double>(-(2.0L * t * d - (2.0L * intersection + kDiceSmooth)) / (d * d));
    }
};

template <class Voxels>
DiceSums dice_sums(std::span<const Label> y, std::span<const double> p, const Voxels& voxels)
{
    DiceSums s;
    for (const std::size_t i : voxels) {
        const double t = y[i] != 0 ? 1.0 : 0.0;
        s.intersection += p[i] * t;
        s.pred += p[i];
        s.truth += t;
    }
    return s;
}

// Iterable 0..n-1 without materializing it.
struct AllVoxels {
    std::size_t n;
    struct iterator {
        std::size_t i;
        std::size_t operator*() const { return i; }
        iterator& operator++()
        {
            ++i;
            return *this;
        }
        bool operator!=(const iterator& o) const { return i != o.i; }
    };
    iterator begin() const { return {0}; }
    iterator end() const { return {n}; }
    std::size_t size() const { return n; }
};

void require_loss_inputs(const LabeledGrid& y, const ProbabilityField& probs, const LossParams& params)
{
    params.validate();
    require_same_shape(y.shape(), probs.shape());
}

} // namespace

void LossParams::validate() const
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw UsageError("alpha must lie in [0,1], got " + std::to_string(alpha));
    if (!(beta >= 0.0 && beta <= 1.0))
        throw UsageError("beta must lie in [0,1], got " + std::to_string(beta));
    if (!(threshold > 0.0 && threshold < 1.0))
        throw UsageError("threshold must lie in (0,1), got " + std::to_string(threshold));
}

ProbabilityField::ProbabilityField(Shape shape, std::vector<double> probs)
    : shape_(shape), probs_(std::move(probs))
{
    if (probs_.size() != shape_.size())
        throw UsageError("probability count does not match shape " + shape_.to_string());
    for (std::size_t i = 0; i < probs_.size(); ++i)
        if (!(probs_[i] >= 0.0 && probs_[i] <= 1.0))
            throw UsageError("probability at voxel " + std::to_string(i) + " outside [0,1]");
}

LabeledGrid binarize(const ProbabilityField& probs, double threshold)
{
    LabeledGrid out(probs.shape());
    kernels::active().binarize(probs.probs().data(), threshold, out.labels().data(), probs.size());
    return out;
}

WeightMap weight_map(const CriticalReport& report, const LossParams& params, const Shape& shape)
{
    params.validate();
    require_same_shape(report.negative_mask.shape, shape);
    require_same_shape(report.positive_mask.shape, shape);
    WeightMap w{shape, std::vector<double>(shape.size())};
    const double a = params.alpha;
    const double b = params.beta;
    kernels::active().fill_weights(report.positive_mask.bits.data(), report.negative_mask.bits.data(), 1.0 - a, a * b,
                                   a * (1.0 - b), w.weights.data(), shape.size());
    return w;
}

namespace {

template <class Voxels>
Acc term_loss(std::span<const Label> y, std::span<const double> p, const Voxels& voxels, BaseLoss base)
{
    return base == BaseLoss::CrossEntropy ? mean_cross_entropy(y, p, voxels) : dice_sums(y, p, voxels).loss();
}

} // namespace

double base_loss(const LabeledGrid& y, const ProbabilityField& probs, BaseLoss base)
{
    require_same_shape(y.shape(), probs.shape());
    return static_cast<double>(term_loss(y.labels(), probs.probs(), AllVoxels{y.size()}, base));
}

double weighted_cross_entropy(const LabeledGrid& y, const ProbabilityField& probs, const WeightMap& weights)
{
    require_same_shape(y.shape(), probs.shape());
    require_same_shape(y.shape(), weights.shape);
    std::vector<double> ce(y.size());
    for (std::size_t i = 0; i < ce.size(); ++i)
        ce[i] = cross_entropy(y[i], probs[i]);
    return kernels::active().dot(weights.weights.data(), ce.data(), ce.size()) / static_cast<double>(ce.size());
}

double evaluate_loss(const LabeledGrid& y, const ProbabilityField& probs, const LossParams& params,
                     const CriticalReport& report)
{
    require_loss_inputs(y, probs, params);
    require_same_shape(y.shape(), report.shape);
    const auto labels = y.labels();
    const auto p = probs.probs();

    Acc pos = 0.0;
    for (const auto& c : report.positive)
        pos += term_loss(labels, p, c.voxels, params.base);
    Acc neg = 0.0;
    for (const auto& c : report.negative)
        neg += term_loss(labels, p, c.voxels, params.base);

    const Acc a = params.alpha;
    const Acc b = params.beta;
    const Acc all = term_loss(labels, p, AllVoxels{y.size()}, params.base);
    return static_cast<double>((1.0L - a) * all + a * b * pos + a * (1.0L - b) * neg);
}

LossResult supervoxel_loss(const LabeledGrid& y, const ProbabilityField& probs, const LossParams& params,
                           Connectivity conn)
{
    require_loss_inputs(y, probs, params);
    LossResult r;
    r.report = detect_criticals(y, binarize(probs, params.threshold), conn);
    r.loss = evaluate_loss(y, probs, params, r.report);
    r.base_loss = base_loss(y, probs, params.base);
    return r;
}

std::vector<double> evaluate_gradient(const LabeledGrid& y, const ProbabilityField& probs, const LossParams& params,
                                      const CriticalReport& report)
{
    require_loss_inputs(y, probs, params);
    require_same_shape(y.shape(), report.shape);
    const std::size_t n = y.size();
    const auto labels = y.labels();
    const auto p = probs.probs();
    const double a = params.alpha;
    const double b = params.beta;
    std::vector<double> grad(n, 0.0);

    if (params.base == BaseLoss::CrossEntropy) {
        // Each term is a mean, so voxel i carries lambda / |domain| per term.
        std::vector<double> scale(n, (1.0 - a) / static_cast<double>(n));
        for (const auto& c : report.positive)
            for (const std::size_t v : c.voxels)
                scale[v] += a * b / static_cast<double>(c.voxels.size());
        for (const auto& c : report.negative)
            for (const std::size_t v : c.voxels)
                scale[v] += a * (1.0 - b) / static_cast<double>(c.voxels.size());
        kernels::active().ce_gradient(labels.data(), p.data(), scale.data(), kProbFloor, 1.0 - kProbFloor,
                                      grad.data(), n);
        return grad;
    }

    auto accumulate = [&](double lambda, const auto& voxels) {
        if (lambda == 0.0)
            return;
        const DiceSums s = dice_sums(labels, p, voxels);
        for (const std::size_t i : voxels)
            grad[i] += lambda * s.derivative(labels[i] != 0 ? 1.0 : 0.0);
    };
    accumulate(1.0 - a, AllVoxels{n});
    for (const auto& c : report.positive)
        accumulate(a * b, c.voxels);
    for (const auto& c : report.negative)
        accumulate(a * (1.0 - b), c.voxels);
    return grad;
}

std::vector<double> loss_gradient(const LabeledGrid& y, const ProbabilityField& probs, const LossParams& params,
                                  Connectivity conn)
{
    require_loss_inputs(y, probs, params);
    const CriticalReport report = detect_criticals(y, binarize(probs, params.threshold), conn);
    return evaluate_gradient(y, probs, params, report);
}

LossSummary summarize(const LossResult& result)
{
    LossSummary s;
    s.loss = result.loss;
    for (const auto& c : result.report.negative)
        ++(c.condition == Condition::Whole ? s.negative_whole : s.negative_bridge);
    for (const auto& c : result.report.positive)
        ++(c.condition == Condition::Whole ? s.positive_whole : s.positive_bridge);
    return s;
}

std::vector<double> dense_weight_map(std::span<const Label> gt, std::span<const double> probs, const Shape& shape,
                                     const LossParams& params, Connectivity conn)
{
    const LabeledGrid y(shape, {gt.begin(), gt.end()});
    const ProbabilityField p(shape, {probs.begin(), probs.end()});
    params.validate();
    const CriticalReport report = detect_criticals(y, binarize(p, params.threshold), conn);
    return weight_map(report, params, shape).weights;
}

LossSummary dense_supervoxel_loss(std::span<const Label> gt, std::span<const double> probs, const Shape& shape,
                                  const LossParams& params, Connectivity conn)
{
    const LabeledGrid y(shape, {gt.begin(), gt.end()});
    const ProbabilityField p(shape, {probs.begin(), probs.end()});
    return summarize(supervoxel_loss(y, p, params, conn));
}

} // namespace svloss
