#include "svloss/io.hpp"

#include "svloss/error.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>

namespace svloss::io {
namespace {

using json = nlohmann::ordered_json;

template <class T>
void append_le(std::vector<std::uint8_t>& out, const std::vector<T>& values)
{
    const std::size_t base = out.size();
    out.resize(base + values.size() * sizeof(T));
    std::memcpy(out.data() + base, values.data(), values.size() * sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1)
        for (std::size_t i = base; i < out.size(); i += sizeof(T))
            std::reverse(out.begin() + static_cast<std::ptrdiff_t>(i),
                         out.begin() + static_cast<std::ptrdiff_t>(i + sizeof(T)));
}

template <class T>
std::vector<T> parse_le(const std::vector<std::uint8_t>& bytes)
{
    std::vector<T> out(bytes.size() / sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
        std::vector<std::uint8_t> copy = bytes;
        for (std::size_t i = 0; i < copy.size(); i += sizeof(T))
            std::reverse(copy.begin() + static_cast<std::ptrdiff_t>(i),
                         copy.begin() + static_cast<std::ptrdiff_t>(i + sizeof(T)));
        std::memcpy(out.data(), copy.data(), copy.size());
    } else {
        std::memcpy(out.data(), bytes.data(), bytes.size());
    }
    return out;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + p.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + p.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_bytes_atomic(const std::filesystem::path& path, const void* data, std::size_t size)
{
    std::random_device rd;
    auto tmp = path;
    tmp += ".tmp" + std::to_string(rd());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot write " + tmp.string());
        f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!f)
            throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

Shape grid_shape(const std::vector<std::size_t>& dims)
{
    try {
        return Shape(std::span<const std::size_t>(dims));
    } catch (const UsageError& e) {
        throw FormatError(std::string("array is not a 2-d/3-d grid: ") + e.what());
    }
}

} // namespace

std::string_view to_string(DType t)
{
    switch (t) {
    case DType::U8: return "u8";
    case DType::U16: return "u16";
    case DType::U32: return "u32";
    case DType::F32: return "f32";
    }
    return "?";
}

DType dtype_from_string(std::string_view s)
{
    if (s == "u8") return DType::U8;
    if (s == "u16") return DType::U16;
    if (s == "u32") return DType::U32;
    if (s == "f32") return DType::F32;
    throw FormatError("unknown dtype '" + std::string(s) + "'");
}

std::size_t dtype_size(DType t)
{
    switch (t) {
    case DType::U8: return 1;
    case DType::U16: return 2;
    case DType::U32:
    case DType::F32: return 4;
    }
    return 0;
}

std::size_t Array::element_count() const
{
    std::size_t n = 1;
    for (const auto d : shape)
        n *= d;
    return n;
}

Encoded encode_array(const Array& a, const std::string& payload_name)
{
    if (a.shape.empty())
        throw UsageError("cannot write an array with an empty shape");
    for (const auto d : a.shape)
        if (d == 0)
            throw UsageError("cannot write an array with a zero extent");
    const std::size_t n = a.element_count();

    Encoded out;
    std::visit(
        [&](const auto& v) {
            using T = typename std::decay_t<decltype(v)>::value_type;
            if (sizeof(T) != dtype_size(a.dtype) || v.size() != n)
                throw UsageError("array storage does not match its dtype/shape");
            append_le(out.payload, v);
        },
        a.data);

    json h;
    h["format_version"] = kFormatVersion;
    h["shape"] = a.shape;
    h["dtype"] = to_string(a.dtype);
    h["order"] = "row-major";
    h["encoding"] = "raw-le";
    h["payload"] = payload_name;
    if (!a.attributes.empty())
        h["attributes"] = a.attributes;
    out.header = h.dump(2) + "\n";
    return out;
}

Array decode_array(const std::string& header, const std::vector<std::uint8_t>& payload)
{
    json h;
    try {
        h = json::parse(header);
    } catch (const json::exception& e) {
        throw FormatError(std::string("array header is not valid JSON: ") + e.what());
    }
    Array a;
    try {
        if (h.at("format_version").get<int>() != kFormatVersion)
            throw FormatError("unsupported array format_version " + h["format_version"].dump());
        if (h.value("order", std::string("row-major")) != "row-major")
            throw FormatError("unsupported array order '" + h["order"].get<std::string>() + "'");
        if (h.value("encoding", std::string("raw-le")) != "raw-le")
            throw FormatError("unsupported array encoding '" + h["encoding"].get<std::string>() + "'");
        a.dtype = dtype_from_string(h.at("dtype").get<std::string>());
        a.shape = h.at("shape").get<std::vector<std::size_t>>();
        if (h.contains("attributes"))
            a.attributes = h["attributes"];
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed array header: ") + e.what());
    }
    if (a.shape.empty())
        throw FormatError("array header has an empty shape");

    const std::size_t expected = a.element_count() * dtype_size(a.dtype);
    if (payload.size() != expected)
        throw FormatError("payload length " + std::to_string(payload.size()) + " does not match header (" +
                          std::to_string(expected) + " bytes expected)");
    switch (a.dtype) {
    case DType::U8: a.data = parse_le<std::uint8_t>(payload); break;
    case DType::U16: a.data = parse_le<std::uint16_t>(payload); break;
    case DType::U32: a.data = parse_le<std::uint32_t>(payload); break;
    case DType::F32: a.data = parse_le<float>(payload); break;
    }
    return a;
}

Array read_array(const std::filesystem::path& header_path, const std::filesystem::path& payload_path)
{
    return decode_array(read_text(header_path), read_bytes(payload_path));
}

Array read_array(const std::filesystem::path& header_path)
{
    const std::string text = read_text(header_path);
    std::string payload;
    try {
        payload = json::parse(text).at("payload").get<std::string>();
    } catch (const json::exception& e) {
        throw FormatError("array header " + header_path.string() + " names no payload: " + e.what());
    }
    return decode_array(text, read_bytes(header_path.parent_path() / payload));
}

void write_array(const Array& a, const std::filesystem::path& header_path)
{
    auto payload_path = header_path;
    payload_path.replace_extension(".raw");
    write_array(a, header_path, payload_path);
}

void write_array(const Array& a, const std::filesystem::path& header_path, const std::filesystem::path& payload_path)
{
    const bool sibling = payload_path.parent_path() == header_path.parent_path();
    const Encoded e = encode_array(a, sibling ? payload_path.filename().string() : payload_path.string());
    write_bytes_atomic(payload_path, e.payload.data(), e.payload.size());
    write_text_atomic(header_path, e.header);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text)
{
    write_bytes_atomic(path, text.data(), text.size());
}

std::variant<LabeledGrid, ProbabilityField> to_volume(const Array& a)
{
    if (a.dtype == DType::F32)
        return to_probs(a);
    return to_grid(a);
}

LabeledGrid to_grid(const Array& a)
{
    if (a.dtype == DType::F32)
        throw FormatError("expected an integer label array, got f32");
    const Shape shape = grid_shape(a.shape);
    std::vector<Label> labels;
    std::visit([&](const auto& v) { labels.assign(v.begin(), v.end()); }, a.data);
    return LabeledGrid(shape, std::move(labels));
}

ProbabilityField to_probs(const Array& a)
{
    if (a.dtype != DType::F32)
        throw FormatError("expected an f32 probability array, got " + std::string(to_string(a.dtype)));
    const Shape shape = grid_shape(a.shape);
    const auto& v = std::get<std::vector<float>>(a.data);
    return ProbabilityField(shape, std::vector<double>(v.begin(), v.end()));
}

AffinityField to_affinity(const Array& a)
{
    if (a.shape.size() < 3)
        throw FormatError("affinity array must be channel-first [k, ...grid]");
    const std::size_t k = a.shape.front();
    const std::vector<std::size_t> dims(a.shape.begin() + 1, a.shape.end());
    AffinityField aff;
    aff.shape = grid_shape(dims);
    if (a.attributes.contains("offsets")) {
        try {
            aff.offsets = a.attributes["offsets"].get<std::vector<AffinityOffset>>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("malformed affinity offsets: ") + e.what());
        }
    } else {
        aff.offsets = default_offsets(aff.shape.ndim());
    }
    if (aff.offsets.size() != k)
        throw FormatError("affinity array has " + std::to_string(k) + " channels but " +
                          std::to_string(aff.offsets.size()) + " offsets");
    const std::size_t n = aff.shape.size();
    std::visit(
        [&](const auto& v) {
            for (std::size_t c = 0; c < k; ++c)
                aff.channels.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(c * n),
                                          v.begin() + static_cast<std::ptrdiff_t>((c + 1) * n));
        },
        a.data);
    return aff;
}

Array from_grid(const LabeledGrid& g)
{
    Label top = 0;
    for (const Label l : g.labels())
        top = std::max(top, l);
    const DType t = top <= 0xff ? DType::U8 : top <= 0xffff ? DType::U16 : DType::U32;
    return from_grid(g, t);
}

Array from_grid(const LabeledGrid& g, DType dtype)
{
    Array a;
    a.shape = g.shape().dims();
    a.dtype = dtype;
    const auto labels = g.labels();
    auto fill = [&](auto tag) {
        using T = decltype(tag);
        std::vector<T> v(labels.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (labels[i] > std::numeric_limits<T>::max())
                throw UsageError("label " + std::to_string(labels[i]) + " does not fit dtype " +
                                 std::string(to_string(dtype)));
            v[i] = static_cast<T>(labels[i]);
        }
        a.data = std::move(v);
    };
    switch (dtype) {
    case DType::U8: fill(std::uint8_t{}); break;
    case DType::U16: fill(std::uint16_t{}); break;
    case DType::U32: fill(std::uint32_t{}); break;
    case DType::F32: throw UsageError("labels cannot be stored as f32");
    }
    return a;
}

Array from_reals(const Shape& shape, const std::vector<double>& values)
{
    if (values.size() != shape.size())
        throw UsageError("value count does not match shape " + shape.to_string());
    Array a;
    a.shape = shape.dims();
    a.dtype = DType::F32;
    a.data = std::vector<float>(values.begin(), values.end());
    return a;
}

Array from_affinity(const AffinityField& aff, DType dtype)
{
    Array a;
    a.shape.push_back(aff.channels.size());
    for (const auto d : aff.shape.dims())
        a.shape.push_back(d);
    a.dtype = dtype;
    a.attributes["offsets"] = aff.offsets;
    const std::size_t n = aff.shape.size();
    if (dtype == DType::F32) {
        std::vector<float> v;
        v.reserve(aff.channels.size() * n);
        for (const auto& ch : aff.channels)
            v.insert(v.end(), ch.begin(), ch.end());
        a.data = std::move(v);
    } else if (dtype == DType::U8) {
        std::vector<std::uint8_t> v;
        v.reserve(aff.channels.size() * n);
        for (const auto& ch : aff.channels)
            for (const double x : ch) {
                if (x != 0.0 && x != 1.0)
                    throw UsageError("non-binary affinity cannot be stored as u8");
                v.push_back(static_cast<std::uint8_t>(x));
            }
        a.data = std::move(v);
    } else {
        throw UsageError("affinities are stored as u8 or f32");
    }
    return a;
}

Array from_mask(const BinaryMask& m)
{
    Array a;
    a.shape = m.shape.dims();
    a.dtype = DType::U8;
    a.data = m.bits;
    return a;
}

} // namespace svloss::io
