#pragma once

// Test-side oracles and generators. Nothing here calls into the library's
// labeling code so it can serve as an independent reference.

#include "svloss/grid.hpp"
#include "svloss/masks.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>
#include <vector>

namespace svtest {

using svloss::Connectivity;
using svloss::Label;
using svloss::LabeledGrid;
using svloss::Shape;

struct UnionFind {
    std::vector<std::size_t> p;
    explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), std::size_t{0}); }
    std::size_t find(std::size_t x)
    {
        while (p[x] != x)
            x = p[x] = p[p[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { p[find(a)] = find(b); }
};

// Neighbor offsets by definition: 4/6 share a face, 18 share an edge,
// 8/26 share a corner.
inline std::vector<std::array<int, 3>> offsets_for(Connectivity conn, std::size_t ndim)
{
    const int k = static_cast<int>(conn);
    std::vector<std::array<int, 3>> out;
    const int zr = ndim == 3 ? 1 : 0;
    for (int dz = -zr; dz <= zr; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int m = std::abs(dz) + std::abs(dy) + std::abs(dx);
                if (m == 0)
                    continue;
                const bool ok = (k == 4 || k == 6) ? m == 1 : k == 18 ? m <= 2 : true;
                if (ok)
                    out.push_back({dz, dy, dx});
            }
    return out;
}

// Same-label components by union-find over explicit coordinates. Returns a
// per-voxel representative (SIZE_MAX on background).
inline std::vector<std::size_t> uf_components(const LabeledGrid& g, Connectivity conn)
{
    const auto e = g.shape().extents3();
    const auto offs = offsets_for(conn, g.shape().ndim());
    UnionFind uf(g.size());
    auto idx = [&](long z, long y, long x) { return (static_cast<std::size_t>(z) * e[1] + y) * e[2] + x; };
    for (long z = 0; z < static_cast<long>(e[0]); ++z)
        for (long y = 0; y < static_cast<long>(e[1]); ++y)
            for (long x = 0; x < static_cast<long>(e[2]); ++x) {
                const std::size_t i = idx(z, y, x);
                if (g[i] == 0)
                    continue;
                for (const auto& o : offs) {
                    const long zz = z + o[0], yy = y + o[1], xx = x + o[2];
                    if (zz < 0 || yy < 0 || xx < 0 || zz >= static_cast<long>(e[0]) ||
                        yy >= static_cast<long>(e[1]) || xx >= static_cast<long>(e[2]))
                        continue;
                    const std::size_t j = idx(zz, yy, xx);
                    if (g[j] == g[i])
                        uf.unite(i, j);
                }
            }
    std::vector<std::size_t> rep(g.size(), SIZE_MAX);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] != 0)
            rep[i] = uf.find(i);
    return rep;
}

inline std::size_t uf_count(const LabeledGrid& g, Connectivity conn)
{
    const auto rep = uf_components(g, conn);
    std::set<std::size_t> roots;
    for (const auto r : rep)
        if (r != SIZE_MAX)
            roots.insert(r);
    return roots.size();
}

// Relabels a partition (0 = unassigned) by order of first appearance.
template <class T>
std::vector<std::size_t> canonical(const std::vector<T>& ids, T background)
{
    std::unordered_map<T, std::size_t> map;
    std::vector<std::size_t> out(ids.size(), 0);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == background)
            continue;
        out[i] = map.emplace(ids[i], map.size() + 1).first->second;
    }
    return out;
}

// Brute-force criticality of every component of `mask` w.r.t. `reference`:
// components are grouped by union-find (same reference label, inside the
// mask), then each is removed alone and the global count compared.
struct BruteCritical {
    std::vector<std::size_t> voxels;
    bool whole = false;
};

inline std::vector<BruteCritical> brute_criticals(const LabeledGrid& reference, const svloss::BinaryMask& mask,
                                                  Connectivity conn)
{
    LabeledGrid masked = reference;
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        if (!mask.bits[i])
            masked[i] = 0;
    const auto rep = uf_components(masked, conn);
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < rep.size(); ++i)
        if (rep[i] != SIZE_MAX)
            groups[rep[i]].push_back(i);

    const auto ref_rep = uf_components(reference, conn);
    const std::size_t base = uf_count(reference, conn);
    std::vector<BruteCritical> out;
    for (auto& [root, vox] : groups) {
        LabeledGrid removed = reference;
        for (const auto v : vox)
            removed[v] = 0;
        if (uf_count(removed, conn) == base)
            continue;
        std::size_t parent_size = 0;
        for (const auto r : ref_rep)
            parent_size += r == ref_rep[vox.front()];
        out.push_back({vox, parent_size == vox.size()});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.voxels < b.voxels; });
    return out;
}

// ---- generators ----------------------------------------------------------

inline LabeledGrid random_binary(const Shape& s, double density, std::mt19937_64& rng)
{
    std::bernoulli_distribution on(density);
    LabeledGrid g(s);
    for (auto& v : g.labels())
        v = on(rng) ? 1 : 0;
    return g;
}

// Labels 0..max_label with the given foreground density.
inline LabeledGrid random_labels(const Shape& s, double density, Label max_label, std::mt19937_64& rng)
{
    std::bernoulli_distribution on(density);
    std::uniform_int_distribution<Label> pick(1, max_label);
    LabeledGrid g(s);
    for (auto& v : g.labels())
        v = on(rng) ? pick(rng) : 0;
    return g;
}

// Flips foreground membership of each voxel with probability `rate`; new
// foreground takes label 1.
inline LabeledGrid perturb(const LabeledGrid& y, double rate, std::mt19937_64& rng)
{
    std::bernoulli_distribution flip(rate);
    LabeledGrid out = y;
    for (auto& v : out.labels())
        if (flip(rng))
            v = v == 0 ? 1 : 0;
    return out;
}

// Blobby instance: labels grown as axis-aligned boxes on an empty grid.
inline LabeledGrid random_boxes(const Shape& s, std::size_t count, std::mt19937_64& rng)
{
    LabeledGrid g(s);
    const auto e = s.extents3();
    for (std::size_t k = 0; k < count; ++k) {
        std::array<std::size_t, 3> lo{}, hi{};
        for (int a = 0; a < 3; ++a) {
            std::uniform_int_distribution<std::size_t> d(0, e[a] - 1);
            std::size_t p = d(rng), q = d(rng);
            if (p > q)
                std::swap(p, q);
            lo[a] = p;
            hi[a] = std::min(q, p + std::max<std::size_t>(e[a] / 3, 1));
        }
        for (auto z = lo[0]; z <= hi[0]; ++z)
            for (auto y = lo[1]; y <= hi[1]; ++y)
                for (auto x = lo[2]; x <= hi[2]; ++x)
                    g[(z * e[1] + y) * e[2] + x] = static_cast<Label>(k + 1);
    }
    return g;
}

// Rasterized random spanning tree of a coarse lattice. Lattice node (a,b,c)
// maps to voxel (2a,2b,2c); each tree edge fills the voxel between its ends.
// `keep` drops a random subset of edges (their midpoint voxel) so the result
// is a forest; with keep = 1 it is a single tree. Face adjacency only, so
// under 4/6-connectivity every component is a tree.
struct TreeRaster {
    std::vector<std::size_t> nodes;                       // voxel of each lattice node
    std::vector<std::array<std::size_t, 3>> edges;        // (node voxel, node voxel, midpoint voxel)
};

inline TreeRaster random_spanning_tree(const Shape& s, std::mt19937_64& rng)
{
    const auto e = s.extents3();
    const std::size_t cz = (e[0] + 1) / 2, cy = (e[1] + 1) / 2, cx = (e[2] + 1) / 2;
    auto vox = [&](std::size_t a, std::size_t b, std::size_t c) { return ((2 * a) * e[1] + 2 * b) * e[2] + 2 * c; };
    auto mid = [&](std::size_t i, std::size_t j) { return (i + j) / 2; };
    struct E {
        std::size_t u, v;
    };
    std::vector<E> cand;
    auto id = [&](std::size_t a, std::size_t b, std::size_t c) { return (a * cy + b) * cx + c; };
    for (std::size_t a = 0; a < cz; ++a)
        for (std::size_t b = 0; b < cy; ++b)
            for (std::size_t c = 0; c < cx; ++c) {
                if (a + 1 < cz)
                    cand.push_back({id(a, b, c), id(a + 1, b, c)});
                if (b + 1 < cy)
                    cand.push_back({id(a, b, c), id(a, b + 1, c)});
                if (c + 1 < cx)
                    cand.push_back({id(a, b, c), id(a, b, c + 1)});
            }
    std::shuffle(cand.begin(), cand.end(), rng);
    TreeRaster t;
    std::vector<std::size_t> node_vox(cz * cy * cx);
    for (std::size_t a = 0; a < cz; ++a)
        for (std::size_t b = 0; b < cy; ++b)
            for (std::size_t c = 0; c < cx; ++c)
                node_vox[id(a, b, c)] = vox(a, b, c);
    t.nodes = node_vox;
    UnionFind uf(node_vox.size());
    for (const auto& ed : cand) {
        if (uf.find(ed.u) == uf.find(ed.v))
            continue;
        uf.unite(ed.u, ed.v);
        const std::size_t p = node_vox[ed.u], q = node_vox[ed.v];
        t.edges.push_back({p, q, mid(p, q)});
    }
    return t;
}

// Grid holding the tree's nodes plus the midpoints of edges with keep[k].
inline LabeledGrid rasterize(const Shape& s, const TreeRaster& t, const std::vector<bool>& keep)
{
    LabeledGrid g(s);
    for (const auto v : t.nodes)
        g[v] = 1;
    for (std::size_t k = 0; k < t.edges.size(); ++k)
        if (keep[k])
            g[t.edges[k][2]] = 1;
    return g;
}

} // namespace svtest
