// Acceptance suite: one PASS/FAIL line per criterion. `--only <name>` runs a
// single criterion (ctest registers each separately). Tolerances are pinned
// here, next to the checks that use them.

#include "cli.hpp"
#include "support.hpp"

#include "svloss/affinity.hpp"
#include "svloss/criticals.hpp"
#include "svloss/io.hpp"
#include "svloss/loss.hpp"
#include "svloss/metrics_skeleton.hpp"
#include "svloss/metrics_voxel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

using namespace svloss;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kOracleBudgetSeconds = 300.0;
constexpr double kCmdBudgetSeconds = 2.0;
constexpr double kLinearRatio = 3.0;
constexpr double kFdStep = 1e-6;
constexpr double kFdRelError = 1e-5;
constexpr double kAlphaZeroTol = 1e-12;
constexpr double kMetricTol = 1e-9;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Components compared as voxel sets with polarity and condition.
bool same_components(const std::vector<CriticalComponent>& a, const std::vector<CriticalComponent>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].voxels != b[i].voxels || a[i].polarity != b[i].polarity || a[i].condition != b[i].condition)
            return false;
    return true;
}

bool same_report(const CriticalReport& a, const CriticalReport& b)
{
    return same_components(a.negative, b.negative) && same_components(a.positive, b.positive);
}

bool contains_all(const std::vector<CriticalComponent>& big, const std::vector<CriticalComponent>& small)
{
    for (const auto& c : small)
        if (std::find(big.begin(), big.end(), c) == big.end())
            return false;
    return true;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    std::size_t total = 0, mismatched = 0, superset = 0;
    std::map<std::string, std::pair<std::size_t, std::size_t>> by_family; // differ, total

    auto check = [&](const LabeledGrid& y, const LabeledGrid& yh, Connectivity conn, const char* family) {
        const auto fast = detect_criticals(y, yh, conn);
        const auto global = oracle_global(y, yh, conn);
        auto& fam = by_family[std::string(family) + "/" + std::to_string(static_cast<int>(conn))];
        ++total;
        ++fam.second;
        if (same_report(fast, global))
            return;
        ++mismatched;
        ++fam.first;
        if (contains_all(fast.negative, global.negative) && contains_all(fast.positive, global.positive))
            ++superset;
    };

    // every 4x4 binary y, each paired with one perturbed prediction
    const Shape s4({4, 4});
    std::bernoulli_distribution flip(0.25);
    for (const auto conn : {Connectivity::Four, Connectivity::Eight})
        for (std::uint32_t bits = 0; bits < (1u << 16); ++bits) {
            LabeledGrid y(s4);
            for (std::size_t i = 0; i < 16; ++i)
                y[i] = (bits >> i) & 1u;
            check(y, svtest::perturb(y, 0.25, rng), conn, "4x4");
        }
    for (int t = 0; t < 1000; ++t) {
        const auto y = svtest::random_binary(Shape({32, 32}), 0.5, rng);
        check(y, svtest::perturb(y, 0.1, rng), t % 2 ? Connectivity::Eight : Connectivity::Four, "32x32");
    }
    for (int t = 0; t < 200; ++t) {
        const auto y = svtest::random_binary(Shape({16, 16, 16}), 0.5, rng);
        check(y, svtest::perturb(y, 0.1, rng), t % 2 ? Connectivity::TwentySix : Connectivity::Six, "16^3");
    }

    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << (total - mismatched) << "/" << total << " instances equal to the global-count oracle";
    if (mismatched) {
        d << "; differing by family:";
        for (const auto& [name, c] : by_family)
            d << " " << name << " " << c.first << "/" << c.second;
        d << "; the fast report strictly contains the oracle's in " << superset << "/" << mismatched;
    }
    d << "; " << fmt("%.1f", secs) << " s (budget " << kOracleBudgetSeconds << " s)";
    return {mismatched == 0 && secs < kOracleBudgetSeconds, d.str()};
}

Outcome tree_agreement()
{
    std::mt19937_64 rng(1002);
    std::bernoulli_distribution keep(0.7), drop(0.1);
    std::size_t agree = 0, nonempty = 0;
    const int n = 500;
    for (int t = 0; t < n; ++t) {
        const Shape s = t % 2 ? Shape({21, 23}) : Shape({7, 9, 11});
        const auto conn = s.ndim() == 2 ? Connectivity::Four : Connectivity::Six;
        const auto tree = svtest::random_spanning_tree(s, rng);
        std::vector<bool> ky(tree.edges.size()), kh(tree.edges.size());
        for (std::size_t k = 0; k < ky.size(); ++k) {
            ky[k] = keep(rng);
            kh[k] = keep(rng);
        }
        auto y = svtest::rasterize(s, tree, ky), yh = svtest::rasterize(s, tree, kh);
        for (const auto v : tree.nodes) {
            if (drop(rng))
                y[v] = 0;
            if (drop(rng))
                yh[v] = 0;
        }
        const auto g = oracle_global(y, yh, conn);
        agree += same_report(oracle_local(y, yh, conn), g);
        nonempty += !g.empty();
    }
    return {agree == static_cast<std::size_t>(n),
            std::to_string(agree) + "/" + std::to_string(n) + " tree-structured instances agree (" +
                std::to_string(nonempty) + " with critical components)"};
}

// Median wall time of `reps` runs of fn.
double median_seconds(const std::function<void()>& fn, int reps)
{
    std::vector<double> ts;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        ts.push_back(seconds_since(t0));
    }
    std::sort(ts.begin(), ts.end());
    return ts[ts.size() / 2];
}

Outcome runtime()
{
    std::mt19937_64 rng(1003);
    const fs::path dir = fs::path(SVLOSS_TEST_TMP) / "acceptance" / "runtime";
    fs::create_directories(dir);

    // end-to-end command on 512x512
    const auto y = svtest::random_binary(Shape({512, 512}), 0.5, rng);
    io::write_array(io::from_grid(y), dir / "gt.json");
    io::write_array(io::from_grid(svtest::perturb(y, 0.1, rng)), dir / "pred.json");
    std::ostringstream out, err;
    int code = 0;
    const double cmd = median_seconds(
        [&] {
            code = cli::run({"criticals", "--gt", (dir / "gt.json").string(), "--pred", (dir / "pred.json").string(),
                             "--connectivity", "4", "--out", (dir / "report.json").string()},
                            out, err);
        },
        3);

    // linearity: time(2n)/time(n) with n = s*s and 2n = 2s*s
    std::ostringstream d;
    d << "cmd_criticals 512x512: " << fmt("%.3f", cmd) << " s (budget " << kCmdBudgetSeconds << " s, exit " << code
      << "); time(2n)/time(n):";
    double worst = 0.0;
    for (const std::size_t side : {64u, 128u, 256u, 512u}) {
        auto time_for = [&](const Shape& s) {
            const auto a = svtest::random_binary(s, 0.5, rng);
            const auto b = svtest::perturb(a, 0.1, rng);
            const int reps = side <= 128 ? 41 : 9;
            return median_seconds([&] { (void)detect_criticals(a, b, Connectivity::Four); }, reps);
        };
        const double tn = time_for(Shape({side, side})), t2n = time_for(Shape({2 * side, side}));
        const double ratio = t2n / tn;
        worst = std::max(worst, ratio);
        d << " n=" << side << "^2 " << fmt("%.2f", ratio);
    }
    d << " (limit " << kLinearRatio << ")";
    return {code == 0 && cmd < kCmdBudgetSeconds && worst <= kLinearRatio, d.str()};
}

// Relative error of the whole gradient vector, max_i |g_i - fd_i| / max_i |fd_i|.
// Entry-wise ratios are also reported: entries that carry only the (1-alpha)/n
// global weight can sit below the finite-difference noise floor
// ulp(loss) / (2h) when alpha is near 1, whatever the implementation.
Outcome gradient_check()
{
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> u(0.02, 0.98), unit(0.0, 1.0);
    double worst = 0.0, worst_entry = 0.0;
    const int n = 100;
    for (int t = 0; t < n; ++t) {
        LossParams p;
        p.alpha = unit(rng);
        p.beta = unit(rng);
        p.base = t % 2 ? BaseLoss::SoftDice : BaseLoss::CrossEntropy;
        const Shape s = t % 5 == 0 ? Shape({4, 5, 4}) : Shape({9, 9});
        const auto conn = s.ndim() == 3 ? Connectivity::Six : Connectivity::Four;
        const auto y = svtest::random_labels(s, 0.5, 2, rng);
        std::vector<double> v(s.size());
        for (auto& x : v)
            x = u(rng);
        const ProbabilityField probs(s, v);
        const auto report = detect_criticals(y, binarize(probs, p.threshold), conn);
        const auto g = evaluate_gradient(y, probs, p, report);
        double max_diff = 0.0, max_fd = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = v[i];
            v[i] = x + kFdStep;
            const double up = evaluate_loss(y, ProbabilityField(s, v), p, report);
            v[i] = x - kFdStep;
            const double dn = evaluate_loss(y, ProbabilityField(s, v), p, report);
            v[i] = x;
            const double fd = (up - dn) / (2 * kFdStep);
            max_diff = std::max(max_diff, std::abs(g[i] - fd));
            max_fd = std::max(max_fd, std::abs(fd));
            worst_entry = std::max(worst_entry, std::abs(g[i] - fd) / std::max({std::abs(g[i]), std::abs(fd), 1e-300}));
        }
        worst = std::max(worst, max_fd > 0 ? max_diff / max_fd : max_diff);
    }
    return {worst < kFdRelError, "max relative error " + fmt("%.3g", worst) + " over " + std::to_string(n) +
                                     " instances (limit " + fmt("%g", kFdRelError) + "); worst single entry " +
                                     fmt("%.3g", worst_entry)};
}

Outcome degeneracy()
{
    std::mt19937_64 rng(1005);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        LossParams p;
        p.alpha = 0.0;
        p.beta = u(rng);
        p.base = t % 2 ? BaseLoss::SoftDice : BaseLoss::CrossEntropy;
        const auto y = svtest::random_labels(Shape({16, 16}), 0.5, 3, rng);
        std::vector<double> v(y.size());
        for (auto& x : v)
            x = u(rng);
        const ProbabilityField probs(y.shape(), v);
        worst = std::max(worst, std::abs(supervoxel_loss(y, probs, p, Connectivity::Eight).loss -
                                         base_loss(y, probs, p.base)));
    }

    bool perfect_ok = true;
    for (int t = 0; t < 100; ++t) {
        LossParams p;
        p.alpha = u(rng);
        p.beta = u(rng);
        const auto y = svtest::random_labels(Shape({12, 12}), 0.5, 3, rng);
        std::vector<double> v(y.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = y[i] ? 1.0 - 1e-9 : 1e-9;
        const auto r = supervoxel_loss(y, ProbabilityField(y.shape(), v), p, Connectivity::Four);
        const auto w = weight_map(r.report, p, y.shape());
        perfect_ok = perfect_ok && r.report.empty() &&
                     std::all_of(w.weights.begin(), w.weights.end(), [&](double x) { return x == 1.0 - p.alpha; });
    }
    return {worst < kAlphaZeroTol && perfect_ok,
            "alpha=0 max |loss - base| " + fmt("%.3g", worst) + " (limit " + fmt("%g", kAlphaZeroTol) +
                "); perfect predictions " + (perfect_ok ? "empty with constant weight 1-alpha" : "NOT degenerate")};
}

Skeleton path_skeleton(std::size_t n, long y, const std::string& name)
{
    Skeleton s;
    s.name = name;
    for (std::size_t i = 0; i < n; ++i) {
        s.nodes.push_back({static_cast<long>(i + 1), {static_cast<long>(i), y, 0}});
        if (i)
            s.edges.emplace_back(i - 1, i);
    }
    return s;
}

Outcome metrics_sanity()
{
    std::mt19937_64 rng(1006);
    bool ok = true;
    std::string why;
    auto near = [&](double got, double want, const std::string& what) {
        if (std::abs(got - want) > kMetricTol) {
            ok = false;
            if (why.empty())
                why = what + " = " + fmt("%.17g", got);
        }
    };
    for (int t = 0; t < 50; ++t) {
        const bool three = t % 2;
        const auto y = svtest::random_labels(three ? Shape({6, 7, 8}) : Shape({20, 20}), 0.6, 4, rng);
        const auto m = voxel_metrics(y, y, three ? Connectivity::TwentySix : Connectivity::Eight);
        near(m.accuracy, 1, "accuracy");
        near(m.dice, 1, "dice");
        near(m.ari, 1, "ari");
        near(m.voi, 0, "voi");
        near(static_cast<double>(m.betti0_error), 0, "betti0 error");
    }
    // skeletons each inside one distinct predicted object
    LabeledGrid seg(Shape({4, 10}));
    std::vector<Skeleton> sks;
    for (long r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 10; ++c)
            seg[r * 10 + c] = static_cast<Label>(r + 1);
        sks.push_back(path_skeleton(3 + r * 2, r, "n" + std::to_string(r)));
    }
    const auto e = evaluate_skeletons(sks, seg);
    near(e.splits_per_neuron, 0, "splits/neuron");
    near(e.edge_accuracy, 100, "edge accuracy");
    near(e.normalized_erl, 1, "normalized ERL");

    const auto f = evaluate_skeletons({path_skeleton(6, 0, "six")}, LabeledGrid(Shape({1, 6}), {1, 1, 1, 0, 2, 2}));
    near(f.splits_per_neuron, 1, "fixture splits");
    near(f.pct_omit, 40, "fixture omit");
    near(f.edge_accuracy, 60, "fixture edge accuracy");
    near(f.normalized_erl, 0.2, "fixture normalized ERL");
    return {ok, ok ? "identical inputs score perfectly; 6-node fixture gives splits 1, omit 40%, edge accuracy 60, "
                     "normalized ERL 0.2"
                   : "mismatch: " + why};
}

Outcome affinity_roundtrip()
{
    std::mt19937_64 rng(1007);
    const int n = 500;
    int match = 0;
    for (int t = 0; t < n; ++t) {
        const bool three = t % 2;
        const Shape s = three ? Shape({6, 8, 7}) : Shape({17, 19});
        const auto conn = three ? Connectivity::Six : Connectivity::Four;
        const auto y = t % 3 == 0 ? svtest::random_boxes(s, 4, rng) : svtest::random_labels(s, 0.6, 4, rng);
        const auto cc = decode_affinities(encode_affinities(y, conn), 0.5);
        match += svtest::canonical(cc.ids, ComponentId{0}) ==
                 svtest::canonical(connected_components(y, conn).ids, ComponentId{0});
    }
    return {match == n, std::to_string(match) + "/" + std::to_string(n) + " partitions equal"};
}

Outcome duality()
{
    std::mt19937_64 rng(1008);
    const int n = 500;
    int match = 0;
    for (int t = 0; t < n; ++t) {
        const bool three = t % 4 == 0;
        const Shape s = three ? Shape({6, 6, 6}) : Shape({16, 16});
        const Connectivity conns[] = {Connectivity::Four, Connectivity::Eight, Connectivity::Six,
                                      Connectivity::TwentySix};
        const auto conn = conns[(three ? 2 : 0) + t % 2];
        const auto y = svtest::random_binary(s, 0.5, rng);
        const auto yh = svtest::perturb(y, 0.15, rng);
        const auto a = detect_criticals(y, yh, conn), b = detect_criticals(yh, y, conn);
        bool ok = a.positive.size() == b.negative.size();
        for (std::size_t i = 0; ok && i < a.positive.size(); ++i)
            ok = a.positive[i].voxels == b.negative[i].voxels && a.positive[i].condition == b.negative[i].condition;
        match += ok;
    }
    return {match == n, std::to_string(match) + "/" + std::to_string(n) + " pairs dual"};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, Outcome (*)()>> criteria{
        {"oracle_equivalence", oracle_equivalence}, {"tree_agreement", tree_agreement},
        {"runtime", runtime},                       {"gradient_check", gradient_check},
        {"degeneracy", degeneracy},                 {"metrics_sanity", metrics_sanity},
        {"affinity_roundtrip", affinity_roundtrip}, {"duality", duality},
    };
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc)
            only = argv[++i];
        else {
            std::cerr << "usage: " << argv[0] << " [--only <criterion>]\n";
            return 2;
        }
    }
    bool all = true, ran = false;
    for (const auto& [name, fn] : criteria) {
        if (!only.empty() && only != name)
            continue;
        ran = true;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
        all = all && o.pass;
    }
    if (!ran) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    return all ? 0 : 1;
}
