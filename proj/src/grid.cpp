#include "svloss/grid.hpp"

#include "labeling.hpp"
#include "svloss/error.hpp"

#include <cstdlib>
#include <sstream>

namespace svloss {

Shape::Shape(std::initializer_list<std::size_t> dims)
    : Shape(std::span<const std::size_t>(dims.begin(), dims.size()))
{
}

Shape::Shape(std::span<const std::size_t> dims)
{
    if (dims.size() != 2 && dims.size() != 3)
        throw UsageError("grid must be 2-d or 3-d, got " + std::to_string(dims.size()) + " axes");
    for (std::size_t a = 0; a < dims.size(); ++a) {
        if (dims[a] == 0)
            throw UsageError("grid extent must be >= 1 on every axis");
        dims_[a] = dims[a];
    }
    ndim_ = dims.size();
}

std::size_t Shape::size() const
{
    if (ndim_ == 0)
        return 0;
    std::size_t n = 1;
    for (std::size_t a = 0; a < ndim_; ++a)
        n *= dims_[a];
    return n;
}

std::vector<std::size_t> Shape::dims() const
{
    return {dims_.begin(), dims_.begin() + static_cast<std::ptrdiff_t>(ndim_)};
}

std::array<std::size_t, 3> Shape::extents3() const
{
    if (ndim_ == 2)
        return {1, dims_[0], dims_[1]};
    return dims_;
}

std::string Shape::to_string() const
{
    std::ostringstream os;
    os << '[';
    for (std::size_t a = 0; a < ndim_; ++a)
        os << (a ? "," : "") << dims_[a];
    os << ']';
    return os.str();
}

bool is_admissible(Connectivity conn, std::size_t ndim)
{
    switch (conn) {
    case Connectivity::Four:
    case Connectivity::Eight:
        return ndim == 2;
    case Connectivity::Six:
    case Connectivity::Eighteen:
    case Connectivity::TwentySix:
        return ndim == 3;
    }
    return false;
}

void require_admissible(Connectivity conn, const Shape& shape)
{
    if (!is_admissible(conn, shape.ndim()))
        throw UsageError("connectivity " + std::to_string(static_cast<int>(conn)) +
                         " is not admissible for a " + std::to_string(shape.ndim()) + "-d grid");
}

Connectivity connectivity_from_int(int k)
{
    switch (k) {
    case 4: return Connectivity::Four;
    case 8: return Connectivity::Eight;
    case 6: return Connectivity::Six;
    case 18: return Connectivity::Eighteen;
    case 26: return Connectivity::TwentySix;
    default: throw UsageError("unknown connectivity " + std::to_string(k));
    }
}

Connectivity axis_connectivity(std::size_t ndim)
{
    return ndim == 3 ? Connectivity::Six : Connectivity::Four;
}

LabeledGrid::LabeledGrid(Shape shape) : shape_(shape), labels_(shape.size(), 0) {}

LabeledGrid::LabeledGrid(Shape shape, std::vector<Label> labels)
    : shape_(shape), labels_(std::move(labels))
{
    if (labels_.size() != shape_.size())
        throw UsageError("label count " + std::to_string(labels_.size()) + " does not match shape " +
                         shape_.to_string());
}

std::vector<std::size_t> ComponentLabeling::sizes() const
{
    std::vector<std::size_t> out(count + 1, 0);
    for (const ComponentId id : ids)
        ++out[id];
    out[0] = 0;
    return out;
}

Stencil::Stencil(const Shape& shape, Connectivity conn)
{
    require_admissible(conn, shape);
    const auto e = shape.extents3();
    depth_ = e[0];
    rows_ = e[1];
    cols_ = e[2];

    const int dz_reach = shape.ndim() == 3 ? 1 : 0;
    // Manhattan radius: 1 for face, 2 for face+edge, 3 for full stencil.
    int radius = 1;
    if (conn == Connectivity::Eight || conn == Connectivity::TwentySix)
        radius = 3;
    else if (conn == Connectivity::Eighteen)
        radius = 2;

    for (int dz = -dz_reach; dz <= dz_reach; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int l1 = std::abs(dz) + std::abs(dy) + std::abs(dx);
                if (l1 == 0 || l1 > radius)
                    continue;
                const auto delta = static_cast<std::ptrdiff_t>(dz) * static_cast<std::ptrdiff_t>(rows_ * cols_) +
                                   static_cast<std::ptrdiff_t>(dy) * static_cast<std::ptrdiff_t>(cols_) + dx;
                offsets_.push_back({dz, dy, dx, delta});
            }
}

std::vector<std::size_t> neighbors(std::size_t index, const Shape& shape, Connectivity conn)
{
    if (index >= shape.size())
        throw UsageError("voxel index " + std::to_string(index) + " out of bounds for shape " +
                         shape.to_string());
    const Stencil stencil(shape, conn);
    std::vector<std::size_t> out;
    out.reserve(stencil.max_degree());
    stencil.for_each(index, [&](std::size_t j) { out.push_back(j); });
    return out;
}

ComponentLabeling connected_components(const LabeledGrid& grid, Connectivity conn)
{
    const auto labels = grid.labels();
    return detail::label_components(
        grid.shape(), conn, [&](std::size_t i) { return labels[i] != 0; },
        [&](std::size_t i, std::size_t j) { return labels[i] == labels[j]; });
}

} // namespace svloss
