#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace svloss {

using Label = std::uint32_t;
using ComponentId = std::uint32_t;

// Extents of a dense 2-d (rows, cols) or 3-d (depth, rows, cols) grid,
// row-major.
class Shape {
public:
    Shape() = default;
    Shape(std::initializer_list<std::size_t> dims);
    explicit Shape(std::span<const std::size_t> dims);

    std::size_t ndim() const { return ndim_; }
    std::size_t operator[](std::size_t axis) const { return dims_[axis]; }
    std::size_t size() const;
    std::vector<std::size_t> dims() const;

    // {depth, rows, cols}; depth is 1 for 2-d grids.
    std::array<std::size_t, 3> extents3() const;

    std::string to_string() const;

    bool operator==(const Shape&) const = default;

private:
    std::array<std::size_t, 3> dims_{};
    std::size_t ndim_ = 0;
};

enum class Connectivity : int {
    Four = 4,
    Eight = 8,
    Six = 6,
    Eighteen = 18,
    TwentySix = 26,
};

bool is_admissible(Connectivity conn, std::size_t ndim);
void require_admissible(Connectivity conn, const Shape& shape);

// Parses 4/8/6/18/26; throws UsageError otherwise.
Connectivity connectivity_from_int(int k);

// Face connectivity: 4 in 2-d, 6 in 3-d.
Connectivity axis_connectivity(std::size_t ndim);

class LabeledGrid {
public:
    LabeledGrid() = default;
    explicit LabeledGrid(Shape shape);
    LabeledGrid(Shape shape, std::vector<Label> labels);

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return labels_.size(); }

    std::span<const Label> labels() const { return labels_; }
    std::span<Label> labels() { return labels_; }

    Label operator[](std::size_t i) const { return labels_[i]; }
    Label& operator[](std::size_t i) { return labels_[i]; }

    bool operator==(const LabeledGrid&) const = default;

private:
    Shape shape_;
    std::vector<Label> labels_;
};

struct ComponentLabeling {
    Shape shape;
    std::vector<ComponentId> ids; // 0 = background, else 1..count
    std::size_t count = 0;

    // Voxel count of each component, indexed by id (entry 0 unused).
    std::vector<std::size_t> sizes() const;
};

// Neighborhood offsets for one grid, in lexicographic (dz, dy, dx) order.
class Stencil {
public:
    Stencil(const Shape& shape, Connectivity conn);

    template <class Fn>
    void for_each(std::size_t index, Fn&& fn) const
    {
        const std::size_t plane = rows_ * cols_;
        const std::size_t z = index / plane;
        const std::size_t rem = index - z * plane;
        const std::size_t y = rem / cols_;
        const std::size_t x = rem - y * cols_;
        const bool interior = (depth_ == 1 || (z > 0 && z + 1 < depth_)) &&
                              y > 0 && y + 1 < rows_ && x > 0 && x + 1 < cols_;
        if (interior) {
            for (const auto& o : offsets_)
                fn(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(index) + o.delta));
            return;
        }
        for (const auto& o : offsets_) {
            if (!in_range(z, o.dz, depth_) || !in_range(y, o.dy, rows_) || !in_range(x, o.dx, cols_))
                continue;
            fn(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(index) + o.delta));
        }
    }

    std::size_t max_degree() const { return offsets_.size(); }

private:
    struct Offset {
        int dz, dy, dx;
        std::ptrdiff_t delta;
    };

    static bool in_range(std::size_t c, int d, std::size_t extent)
    {
        return d == 0 || (d < 0 ? c > 0 : c + 1 < extent);
    }

    std::size_t depth_ = 1, rows_ = 1, cols_ = 1;
    std::vector<Offset> offsets_;
};

// In-bounds neighbors of `index`, lexicographic by offset.
std::vector<std::size_t> neighbors(std::size_t index, const Shape& shape, Connectivity conn);

// Same-label foreground components, ids assigned in scan order from 1.
ComponentLabeling connected_components(const LabeledGrid& grid, Connectivity conn);

} // namespace svloss
