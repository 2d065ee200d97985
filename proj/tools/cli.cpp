#include "cli.hpp"

#include "svloss/affinity.hpp"
#include "svloss/criticals.hpp"
#include "svloss/error.hpp"
#include "svloss/io.hpp"
#include "svloss/loss.hpp"
#include "svloss/metrics_skeleton.hpp"
#include "svloss/metrics_voxel.hpp"
#include "svloss/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

namespace svloss::cli {
namespace {

namespace fs = std::filesystem;

// Flags shared by the loss-style commands.
struct LossFlags {
    double alpha = 0.5;
    double beta = 0.5;
    double threshold = 0.5;
    std::string base = "ce";

    LossParams params() const
    {
        LossParams p;
        p.alpha = alpha;
        p.beta = beta;
        p.threshold = threshold;
        p.base = base == "dice" ? BaseLoss::SoftDice : BaseLoss::CrossEntropy;
        p.validate();
        return p;
    }

    void attach(CLI::App* app)
    {
        app->add_option("--alpha", alpha, "structure-level weight in [0,1]")->capture_default_str();
        app->add_option("--beta", beta, "merge vs split weight in [0,1]")->capture_default_str();
        app->add_option("--threshold", threshold, "binarization threshold in (0,1)")->capture_default_str();
        app->add_option("--base", base, "base loss")->check(CLI::IsMember({"ce", "dice"}))->capture_default_str();
    }
};

// 0 means "face connectivity for the grid's dimension".
Connectivity pick_connectivity(int k, const Shape& shape)
{
    const Connectivity c = k == 0 ? axis_connectivity(shape.ndim()) : connectivity_from_int(k);
    require_admissible(c, shape);
    return c;
}

void require_same_shape(const Shape& a, const Shape& b)
{
    if (!(a == b))
        throw UsageError("shape mismatch: " + a.to_string() + " vs " + b.to_string());
}

std::string format_scalar(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const report::Json& j, const std::string& path, std::ostream& out)
{
    const std::string text = report::to_text(j);
    if (path.empty() || path == "-")
        out << text;
    else
        io::write_text_atomic(path, text);
}

// --- criticals ------------------------------------------------------------

struct CriticalsCmd {
    std::string gt, pred, out, oracle;
    int connectivity = 0;
    bool omit_timing = false;

    int operator()(std::ostream& os) const
    {
        const LabeledGrid y = io::to_grid(io::read_array(gt));
        const LabeledGrid y_hat = io::to_grid(io::read_array(pred));
        require_same_shape(y.shape(), y_hat.shape());
        const Connectivity conn = pick_connectivity(connectivity, y.shape());

        const auto t0 = std::chrono::steady_clock::now();
        const CriticalReport r = oracle == "global" ? oracle_global(y, y_hat, conn)
                                 : oracle == "local" ? oracle_local(y, y_hat, conn)
                                                     : detect_criticals(y, y_hat, conn);
        const auto t1 = std::chrono::steady_clock::now();
        std::optional<double> ms;
        if (!omit_timing)
            ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        emit(report::criticals_json(r, conn, oracle.empty() ? "fast" : oracle, ms), out, os);
        return kOk;
    }
};

// --- loss -----------------------------------------------------------------

struct LossCmd {
    std::string gt, probs, out, emit_weights, emit_grad;
    int connectivity = 0;
    LossFlags flags;

    int operator()(std::ostream& os) const
    {
        const LossParams params = flags.params();
        const LabeledGrid y = io::to_grid(io::read_array(gt));
        const ProbabilityField p = io::to_probs(io::read_array(probs));
        require_same_shape(y.shape(), p.shape());
        const Connectivity conn = pick_connectivity(connectivity, y.shape());

        const LossResult r = supervoxel_loss(y, p, params, conn);
        if (!emit_weights.empty())
            io::write_array(io::from_reals(y.shape(), weight_map(r.report, params, y.shape()).weights),
                            emit_weights);
        if (!emit_grad.empty())
            io::write_array(io::from_reals(y.shape(), evaluate_gradient(y, p, params, r.report)), emit_grad);
        if (!out.empty())
            io::write_text_atomic(out, report::to_text(report::loss_json(r, params, conn)));
        os << format_scalar(r.loss) << "\n";
        return kOk;
    }
};

// --- metrics --------------------------------------------------------------

struct VoxelMetricsCmd {
    std::string gt, pred, out;
    int connectivity = 0;

    int operator()(std::ostream& os) const
    {
        const LabeledGrid y = io::to_grid(io::read_array(gt));
        const LabeledGrid y_hat = io::to_grid(io::read_array(pred));
        require_same_shape(y.shape(), y_hat.shape());
        const Connectivity conn = pick_connectivity(connectivity, y.shape());
        emit(report::voxel_metrics_json(voxel_metrics(y, y_hat, conn)), out, os);
        return kOk;
    }
};

struct SkeletonMetricsCmd {
    std::string swc_dir, pred, out;
    std::vector<double> voxel_size{1.0, 1.0, 1.0};
    bool no_align = false;

    int operator()(std::ostream& os, std::ostream& err) const
    {
        if (voxel_size.size() != 3)
            throw UsageError("--voxel-size takes three values (x y z)");
        if (!fs::is_directory(swc_dir))
            throw IoError("not a directory: " + swc_dir);

        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(swc_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".swc")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());

        std::vector<Skeleton> skeletons;
        for (const auto& f : files) {
            std::ifstream in(f);
            if (!in)
                throw IoError("cannot open " + f.string());
            try {
                Skeleton s = load_swc(in, {voxel_size[0], voxel_size[1], voxel_size[2]});
                s.name = f.stem().string();
                skeletons.push_back(std::move(s));
            } catch (const FormatError& e) {
                err << "skipping " << f.string() << ": " << e.what() << "\n";
            }
        }
        if (skeletons.empty()) {
            err << "no parseable SWC files in " << swc_dir << "\n";
            return kEmptyInput;
        }

        const LabeledGrid seg = io::to_grid(io::read_array(pred));
        SkeletonEvalOptions opts;
        opts.align = !no_align;
        emit(report::skeleton_metrics_json(evaluate_skeletons(skeletons, seg, opts)), out, os);
        return kOk;
    }
};

// --- affinity -------------------------------------------------------------

struct AffinityEncodeCmd {
    std::string gt, out, foreground;
    int connectivity = 0;

    int operator()(std::ostream&) const
    {
        const LabeledGrid y = io::to_grid(io::read_array(gt));
        const Connectivity conn = pick_connectivity(connectivity, y.shape());
        const AffinityField aff = encode_affinities(y, conn);
        io::write_array(io::from_affinity(aff, io::DType::U8), out);
        if (!foreground.empty() && aff.foreground)
            io::write_array(io::from_mask(*aff.foreground), foreground);
        return kOk;
    }
};

AffinityField read_affinity(const std::string& path, const std::string& foreground)
{
    AffinityField aff = io::to_affinity(io::read_array(path));
    if (!foreground.empty()) {
        const LabeledGrid g = io::to_grid(io::read_array(foreground));
        require_same_shape(aff.shape, g.shape());
        BinaryMask m(g.shape());
        for (std::size_t i = 0; i < g.size(); ++i)
            m.bits[i] = g[i] != 0;
        aff.foreground = std::move(m);
    }
    return aff;
}

struct AffinityDecodeCmd {
    std::string affinity, out, foreground;
    double threshold = 0.5;

    int operator()(std::ostream&) const
    {
        const AffinityField aff = read_affinity(affinity, foreground);
        const ComponentLabeling cc = decode_affinities(aff, threshold);
        io::write_array(io::from_grid(LabeledGrid(cc.shape, cc.ids)), out);
        return kOk;
    }
};

struct AffinityLossCmd {
    std::string gt, pred, out;
    int connectivity = 0;
    LossFlags flags;

    int operator()(std::ostream& os) const
    {
        const LossParams params = flags.params();
        const AffinityField truth = io::to_affinity(io::read_array(gt));
        const AffinityField pred_aff = io::to_affinity(io::read_array(pred));
        if (truth.channel_count() != pred_aff.channel_count())
            throw UsageError("channel count mismatch: " + std::to_string(truth.channel_count()) + " vs " +
                             std::to_string(pred_aff.channel_count()));
        if (truth.offsets != pred_aff.offsets)
            throw UsageError("affinity offsets differ between inputs");
        require_same_shape(truth.shape, pred_aff.shape);
        const Connectivity conn = pick_connectivity(connectivity, truth.shape);
        emit(report::affinity_loss_json(affinity_loss(truth, pred_aff, params, conn), params), out, os);
        return kOk;
    }
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Critical supervoxel detection, topological loss, and segmentation metrics"};
    app.name("svloss");
    app.require_subcommand(1);

    CriticalsCmd criticals;
    auto* c = app.add_subcommand("criticals", "detect critical components of the error masks");
    c->add_option("--gt", criticals.gt, "ground-truth label array header")->required();
    c->add_option("--pred", criticals.pred, "predicted label array header")->required();
    c->add_option("--connectivity", criticals.connectivity, "4/8 (2-d) or 6/18/26 (3-d); default face");
    c->add_option("--out", criticals.out, "report path ('-' for stdout)")->required();
    c->add_option("--oracle", criticals.oracle, "run a brute-force detector instead")
        ->check(CLI::IsMember({"global", "local"}));
    c->add_flag("--omit-timing", criticals.omit_timing, "leave wall_clock_ms out of the report");

    LossCmd loss;
    auto* l = app.add_subcommand("loss", "evaluate the topological loss; prints the scalar");
    l->add_option("--gt", loss.gt, "ground-truth label array header")->required();
    l->add_option("--pred-probs", loss.probs, "f32 probability array header")->required();
    l->add_option("--connectivity", loss.connectivity, "default face");
    l->add_option("--out", loss.out, "write the full loss report here");
    l->add_option("--emit-weights", loss.emit_weights, "write the per-voxel weight map");
    l->add_option("--emit-grad", loss.emit_grad, "write d loss / d p");
    loss.flags.attach(l);

    auto* m = app.add_subcommand("metrics", "segmentation metrics");
    m->require_subcommand(1);
    VoxelMetricsCmd voxel;
    auto* mv = m->add_subcommand("voxel", "accuracy, Dice, ARI, VOI, Betti-0 error");
    mv->add_option("--gt", voxel.gt)->required();
    mv->add_option("--pred", voxel.pred)->required();
    mv->add_option("--connectivity", voxel.connectivity, "default face");
    mv->add_option("--out", voxel.out, "report path (default stdout)");
    SkeletonMetricsCmd skel;
    auto* ms = m->add_subcommand("skeleton", "splits, omit/merge, edge accuracy, normalized ERL");
    ms->add_option("--swc-dir", skel.swc_dir)->required();
    ms->add_option("--pred", skel.pred)->required();
    ms->add_option("--voxel-size", skel.voxel_size, "x y z")->expected(3);
    ms->add_flag("--no-align", skel.no_align, "use raw node labels");
    ms->add_option("--out", skel.out, "report path (default stdout)");

    auto* a = app.add_subcommand("affinity", "affinity-graph encode/decode/loss");
    a->require_subcommand(1);
    AffinityEncodeCmd enc;
    auto* ae = a->add_subcommand("encode", "label array -> channel-first u8 affinities");
    ae->add_option("--gt", enc.gt)->required();
    ae->add_option("--out", enc.out)->required();
    ae->add_option("--connectivity", enc.connectivity, "default face");
    ae->add_option("--foreground", enc.foreground, "also write the foreground evidence mask");
    AffinityDecodeCmd dec;
    auto* ad = a->add_subcommand("decode", "affinities -> component labeling");
    ad->add_option("--affinity", dec.affinity)->required();
    ad->add_option("--out", dec.out)->required();
    ad->add_option("--threshold", dec.threshold)->capture_default_str();
    ad->add_option("--foreground", dec.foreground, "foreground evidence mask from encode");
    AffinityLossCmd aloss;
    auto* al = a->add_subcommand("loss", "per-channel topological loss");
    al->add_option("--gt", aloss.gt)->required();
    al->add_option("--pred", aloss.pred)->required();
    al->add_option("--connectivity", aloss.connectivity, "default face");
    al->add_option("--out", aloss.out, "report path (default stdout)");
    aloss.flags.attach(al);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*c)
            return criticals(out);
        if (*l)
            return loss(out);
        if (*mv)
            return voxel(out);
        if (*ms)
            return skel(out, err);
        if (*ae)
            return enc(out);
        if (*ad)
            return dec(out);
        if (*al)
            return aloss(out);
    } catch (const std::exception& e) {
        // UsageError, IoError, FormatError and anything unexpected from I/O.
        err << "svloss: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

} // namespace svloss::cli
