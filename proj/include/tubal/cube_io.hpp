#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "tubal/cube.hpp"
#include "tubal/noise.hpp"

// HSC1 cube files, raw imports, key = value configs and atomic file output.
//
// HSC1 layout (all multi-byte fields little-endian):
//   offset 0   4 bytes  magic "HSC1"
//   offset 4   u32      n1
//   offset 8   u32      n2
//   offset 12  u32      n3
//   offset 16  u8       dtype (1 = f32, 2 = f64)
//   offset 17  3 bytes  reserved, zero
//   offset 20  payload  frontal slices in order, each row-major
namespace tubal::io {

enum class Dtype : std::uint8_t { f32 = 1, f64 = 2 };

struct CubeHeader {
    std::array<char, 4> magic{'H', 'S', 'C', '1'};
    std::uint32_t n1 = 0;
    std::uint32_t n2 = 0;
    std::uint32_t n3 = 0;
    Dtype dtype = Dtype::f64;
};

inline constexpr std::size_t kHeaderBytes = 20;

std::size_t dtype_size(Dtype d);

/// Writes header + payload to a temporary sibling, then renames over `path`.
void write_cube(const std::filesystem::path& path, const Cube& x, Dtype dtype = Dtype::f64);

/// Throws BadMagic, TruncatedFile, BadDtype or IoError.
Cube read_cube(const std::filesystem::path& path);

/// Parses and validates the 20-byte header of `path` without reading the payload.
CubeHeader read_header(const std::filesystem::path& path);

enum class RawLayout { bsq, bip };
enum class Endian { little, big };

struct RawFormat {
    RawLayout layout = RawLayout::bsq;
    Dtype dtype = Dtype::f32;
    Endian endian = Endian::little;
};

/// "bsq" (band-sequential) or "bip" (band-interleaved-by-pixel); BadLayout otherwise.
RawLayout parse_layout(std::string_view name);
Dtype parse_dtype(std::string_view name);
Endian parse_endian(std::string_view name);

/// Headerless import. Throws SizeMismatch when the file length is not
/// n1*n2*n3*sizeof(dtype).
Cube import_raw(const std::filesystem::path& path, const Dims& dims, const RawFormat& format);

void export_raw(const std::filesystem::path& path, const Cube& x, const RawFormat& format);

/// Atomic text-file write (temporary sibling + rename).
void write_text(const std::filesystem::path& path, std::string_view text);

using ConfigMap = std::map<std::string, std::string>;

/// Line-oriented `key = value` text; `#` starts a comment. Throws
/// InvalidArgument naming the offending line.
ConfigMap parse_config(std::string_view text);
ConfigMap read_config(const std::filesystem::path& path);

/// NoiseSpec keys: gaussian_sigma, impulse_fraction, stripe_bands,
/// stripe_width_min/max, deadline_bands, deadline_width_min/max,
/// groups_min/max, stripe_amplitude_min/max, seed. Missing keys keep `base`.
NoiseSpec noise_spec_from_config(const ConfigMap& cfg, NoiseSpec base = {});
std::string noise_spec_to_config(const NoiseSpec& spec);

} // namespace tubal::io
