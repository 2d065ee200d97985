#pragma once

// Array container: a JSON header sidecar plus a raw little-endian row-major
// payload.
//
//   {"format_version":1,"shape":[64,64],"dtype":"u8","order":"row-major",
//    "encoding":"raw-le","payload":"gt.raw"}
//
// An optional "attributes" object carries metadata such as affinity offsets.

#include "svloss/affinity.hpp"
#include "svloss/grid.hpp"
#include "svloss/loss.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace svloss::io {

inline constexpr int kFormatVersion = 1;

enum class DType { U8, U16, U32, F32 };

std::string_view to_string(DType t);
DType dtype_from_string(std::string_view s); // throws FormatError
std::size_t dtype_size(DType t);

struct Array {
    std::vector<std::size_t> shape;
    DType dtype = DType::U8;
    std::variant<std::vector<std::uint8_t>, std::vector<std::uint16_t>, std::vector<std::uint32_t>, std::vector<float>>
        data;
    nlohmann::ordered_json attributes = nlohmann::ordered_json::object();

    std::size_t element_count() const;
};

struct Encoded {
    std::string header;
    std::vector<std::uint8_t> payload;
};

// Pure serialization; `payload_name` is recorded in the header.
Encoded encode_array(const Array& a, const std::string& payload_name);
Array decode_array(const std::string& header, const std::vector<std::uint8_t>& payload);

Array read_array(const std::filesystem::path& header_path, const std::filesystem::path& payload_path);
// Payload located through the header's "payload" field, relative to the header.
Array read_array(const std::filesystem::path& header_path);

// Writes both files atomically. The payload defaults to the header path with
// extension ".raw".
void write_array(const Array& a, const std::filesystem::path& header_path);
void write_array(const Array& a, const std::filesystem::path& header_path, const std::filesystem::path& payload_path);

// Integer dtypes -> LabeledGrid, f32 -> ProbabilityField.
std::variant<LabeledGrid, ProbabilityField> to_volume(const Array& a);
LabeledGrid to_grid(const Array& a);
ProbabilityField to_probs(const Array& a);
// Channel-first [k, ...grid] array; offsets from attributes or the defaults.
AffinityField to_affinity(const Array& a);

// Narrowest unsigned dtype that holds every label.
Array from_grid(const LabeledGrid& g);
Array from_grid(const LabeledGrid& g, DType dtype);
Array from_reals(const Shape& shape, const std::vector<double>& values); // f32
Array from_affinity(const AffinityField& aff, DType dtype);
Array from_mask(const BinaryMask& m);

void write_text_atomic(const std::filesystem::path& path, const std::string& text);

} // namespace svloss::io
