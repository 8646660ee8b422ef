#pragma once

#include "hubprior/latent.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace hubprior {

/**
 * LatentFile layout (all integers little-endian, no padding):
 *
 *   offset  size  field
 *   0       4     magic "HUBL"
 *   4       4     version (u32) = 1
 *   8       4     dims (u32)
 *   12      8     count (u64)
 *   20      1     dtype (u8): 0 = float32
 *   21      1     normalization (u8): 0 raw, 1 sphere
 *   22      4     metadata_len (u32)
 *   26      L     metadata, UTF-8 JSON object
 *   26+L    4*count*dims  payload, row-major float32
 */
namespace latent_file {
inline constexpr char kMagic[4] = {'H', 'U', 'B', 'L'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 0;
inline constexpr std::size_t kHeaderSize = 26;
} // namespace latent_file

/// Metadata object written for a set: seed, generator ids, sphere radius, notes.
nlohmann::json latent_metadata(const LatentSet& set);

std::string encode_latents(const LatentSet& set);

/// Parses a LatentFile image. Errors: BadMagic, UnsupportedVersion,
/// UnsupportedDtype, InvalidHeader, TruncatedPayload, TrailingData,
/// MetadataParse, plus LatentSet validation failures.
LatentSet decode_latents(std::string_view bytes);

void write_latents(const std::filesystem::path& path, const LatentSet& set);
LatentSet read_latents(const std::filesystem::path& path);

/// Whole-file helpers that raise Error(Io).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

} // namespace hubprior
