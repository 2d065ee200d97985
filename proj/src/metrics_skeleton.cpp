#include "svloss/metrics_skeleton.hpp"

#include "svloss/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace svloss {
namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // False when a and b were already joined.
    bool unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

std::vector<std::vector<std::size_t>> adjacency(const Skeleton& s)
{
    std::vector<std::vector<std::size_t>> adj(s.nodes.size());
    for (const auto& [a, b] : s.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

std::vector<Label> raw_labels(const Skeleton& s, const LabeledGrid& seg)
{
    std::vector<Label> out(s.nodes.size());
    for (std::size_t u = 0; u < s.nodes.size(); ++u)
        out[u] = seg[voxel_index(s.nodes[u], seg.shape())];
    return out;
}

// Fills zero runs in one connected zero-labeled subtree `zone`.
void fill_zone(const std::vector<std::size_t>& zone, const std::vector<std::vector<std::size_t>>& adj,
               const std::vector<Label>& raw, std::vector<Label>& corrected, std::vector<std::uint8_t>& in_zone)
{
    // label -> zero nodes of the zone touching a node of that label, one entry
    // per touching edge.
    std::map<Label, std::vector<std::size_t>> terminals;
    for (const std::size_t w : zone)
        for (const std::size_t u : adj[w])
            if (raw[u] != 0)
                terminals[raw[u]].push_back(w);

    std::vector<std::size_t> order, parent, hits;
    for (const auto& [label, ends] : terminals) {
        if (ends.size() < 2)
            continue;
        // Root the zone at a terminal; a node lies on a path between
        // terminals iff its subtree holds one.
        const std::size_t root = ends.front();
        order.assign(1, root);
        std::unordered_map<std::size_t, std::size_t> pos{{root, 0}};
        parent.assign(1, root);
        for (std::size_t h = 0; h < order.size(); ++h)
            for (const std::size_t v : adj[order[h]])
                if (in_zone[v] && !pos.count(v)) {
                    pos[v] = order.size();
                    order.push_back(v);
                    parent.push_back(order[h]);
                }
        hits.assign(order.size(), 0);
        for (const std::size_t w : ends)
            ++hits[pos[w]];
        for (std::size_t h = order.size(); h-- > 1;)
            hits[pos[parent[h]]] += hits[h];
        for (std::size_t h = 0; h < order.size(); ++h)
            if (hits[h] > 0 && corrected[order[h]] == 0)
                corrected[order[h]] = label;
    }
}

} // namespace

void Skeleton::validate() const
{
    DisjointSets sets(nodes.size());
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [a, b] : edges) {
        if (a >= nodes.size() || b >= nodes.size())
            throw FormatError("skeleton '" + name + "': edge references a missing node");
        const auto key = std::minmax(a, b);
        if (!seen.insert(key).second)
            throw FormatError("skeleton '" + name + "': duplicate edge");
        if (!sets.unite(a, b))
            throw FormatError("skeleton '" + name + "': cycle detected");
    }
}

Skeleton load_swc(std::istream& in, const std::array<double, 3>& voxel_size)
{
    for (const double v : voxel_size)
        if (!(v > 0.0))
            throw UsageError("voxel size must be positive on every axis");

    Skeleton s;
    std::vector<long> parents;
    std::unordered_map<long, std::size_t> index_of;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream row(line);
        long id = 0, type = 0, parent = 0;
        double x = 0, y = 0, z = 0, radius = 0;
        if (!(row >> id >> type >> x >> y >> z >> radius >> parent))
            throw FormatError("SWC line " + std::to_string(line_no) + ": expected 7 columns");
        if (!index_of.emplace(id, s.nodes.size()).second)
            throw FormatError("SWC line " + std::to_string(line_no) + ": duplicate id " + std::to_string(id));
        SkeletonNode node;
        node.id = id;
        node.voxel = {std::lround(x / voxel_size[0]), std::lround(y / voxel_size[1]), std::lround(z / voxel_size[2])};
        s.nodes.push_back(node);
        parents.push_back(parent);
    }
    if (s.nodes.empty())
        throw FormatError("SWC input has no nodes");

    for (std::size_t u = 0; u < s.nodes.size(); ++u) {
        if (parents[u] < 0)
            continue;
        const auto it = index_of.find(parents[u]);
        if (it == index_of.end())
            throw FormatError("SWC node " + std::to_string(s.nodes[u].id) + ": parent " + std::to_string(parents[u]) +
                              " not found");
        if (it->second == u)
            throw FormatError("SWC node " + std::to_string(s.nodes[u].id) + ": cycle detected (self parent)");
        s.edges.emplace_back(it->second, u);
    }
    s.validate();
    return s;
}

std::size_t voxel_index(const SkeletonNode& node, const Shape& shape)
{
    const auto [x, y, z] = node.voxel;
    const auto e = shape.extents3(); // depth, rows, cols
    const bool ok = x >= 0 && y >= 0 && z >= 0 && static_cast<std::size_t>(x) < e[2] &&
                    static_cast<std::size_t>(y) < e[1] && static_cast<std::size_t>(z) < e[0];
    if (!ok)
        throw UsageError("skeleton node " + std::to_string(node.id) + " at (" + std::to_string(x) + "," +
                         std::to_string(y) + "," + std::to_string(z) + ") lies outside grid " + shape.to_string());
    return (static_cast<std::size_t>(z) * e[1] + static_cast<std::size_t>(y)) * e[2] + static_cast<std::size_t>(x);
}

std::vector<Label> align_correct(const Skeleton& skeleton, const LabeledGrid& seg)
{
    const auto raw = raw_labels(skeleton, seg);
    const auto adj = adjacency(skeleton);
    std::vector<Label> corrected = raw;
    std::vector<std::uint8_t> in_zone(raw.size(), 0), done(raw.size(), 0);
    std::vector<std::size_t> zone;

    for (std::size_t start = 0; start < raw.size(); ++start) {
        if (raw[start] != 0 || done[start])
            continue;
        zone.assign(1, start);
        done[start] = 1;
        for (std::size_t h = 0; h < zone.size(); ++h)
            for (const std::size_t v : adj[zone[h]])
                if (raw[v] == 0 && !done[v]) {
                    done[v] = 1;
                    zone.push_back(v);
                }
        for (const std::size_t w : zone)
            in_zone[w] = 1;
        fill_zone(zone, adj, raw, corrected, in_zone);
        for (const std::size_t w : zone)
            in_zone[w] = 0;
    }
    return corrected;
}

SkeletonEval evaluate_skeletons(const std::vector<Skeleton>& skeletons, const LabeledGrid& seg,
                                const SkeletonEvalOptions& options)
{
    if (skeletons.empty())
        throw UsageError("no skeletons to evaluate");
    std::size_t total_edges = 0;
    for (const auto& s : skeletons)
        total_edges += s.edges.size();
    if (total_edges == 0)
        throw UsageError("skeletons have no edges");

    struct Component {
        std::size_t edges = 0;
        std::set<Label> labels;
    };
    struct Work {
        std::vector<Component> components;
        std::size_t omit = 0;
    };

    std::vector<Work> work(skeletons.size());
    std::map<Label, std::set<std::size_t>> owners; // label -> skeletons it appears in

    for (std::size_t k = 0; k < skeletons.size(); ++k) {
        const Skeleton& s = skeletons[k];
        const auto labels = options.align ? align_correct(s, seg) : raw_labels(s, seg);

        // Components of the subgraph induced by nonzero nodes.
        DisjointSets sets(s.nodes.size());
        for (const auto& [a, b] : s.edges) {
            if (labels[a] == 0 || labels[b] == 0)
                ++work[k].omit;
            else
                sets.unite(a, b);
        }
        std::unordered_map<std::size_t, std::size_t> slot;
        auto& comps = work[k].components;
        for (std::size_t u = 0; u < s.nodes.size(); ++u) {
            if (labels[u] == 0)
                continue;
            const auto [it, fresh] = slot.emplace(sets.find(u), comps.size());
            if (fresh)
                comps.emplace_back();
            comps[it->second].labels.insert(labels[u]);
            owners[labels[u]].insert(k);
        }
        for (const auto& [a, b] : s.edges)
            if (labels[a] != 0 && labels[b] != 0)
                ++comps[slot.at(sets.find(a))].edges;
    }

    SkeletonEval eval;
    const auto total = static_cast<double>(total_edges);
    std::size_t omit_sum = 0, merged_sum = 0;
    double splits = 0.0, nerl = 0.0;
    for (std::size_t k = 0; k < skeletons.size(); ++k) {
        SkeletonRecord rec;
        rec.name = skeletons[k].name;
        rec.edges = skeletons[k].edges.size();
        rec.omit_edges = work[k].omit;
        const auto& comps = work[k].components;
        rec.splits = comps.empty() ? 0 : comps.size() - 1;

        double erl = 0.0;
        for (const auto& c : comps) {
            const bool merged = std::any_of(c.labels.begin(), c.labels.end(),
                                            [&](Label l) { return owners.at(l).size() > 1; });
            if (merged) {
                rec.merged_edges += c.edges;
            } else if (rec.edges > 0) {
                const auto len = static_cast<double>(c.edges);
                erl += len * len / static_cast<double>(rec.edges);
            }
        }
        rec.erl = erl;
        rec.normalized_erl = rec.edges > 0 ? erl / static_cast<double>(rec.edges) : 0.0;

        const double w = static_cast<double>(rec.edges) / total;
        splits += w * static_cast<double>(rec.splits);
        nerl += w * rec.normalized_erl;
        omit_sum += rec.omit_edges;
        merged_sum += rec.merged_edges;
        eval.per_skeleton.push_back(std::move(rec));
    }

    eval.splits_per_neuron = splits;
    eval.pct_omit = 100.0 * static_cast<double>(omit_sum) / total;
    eval.pct_merged = 100.0 * static_cast<double>(merged_sum) / total;
    eval.edge_accuracy = 100.0 - (eval.pct_omit + eval.pct_merged);
    eval.normalized_erl = nerl;
    return eval;
}

} // namespace svloss
