#pragma once

// Binary field files and the on-disk cache built from them.
//
// File layout (all little-endian):
//   "KGL1" | u32 n | u32 m | u32 kind | u32 components | [u64 source, green only]
//   followed by f64 values, point-major in row-major axis order.
// Each cached file has a JSON sidecar with the input hash and an FNV-1a
// checksum of the payload.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "kgl/grid.hpp"

namespace kgl {

enum class FieldKind : std::uint32_t { scalar = 0, metric = 1, green = 2 };

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string encode_scalar(const ScalarField& f);
std::string encode_metric(const MetricField& f);
std::string encode_green(const ScalarField& G, std::uint64_t source);

/// Throws CacheCorrupt on malformed input or a kind mismatch.
ScalarField decode_scalar(std::string_view bytes);
MetricField decode_metric(std::string_view bytes);
std::pair<ScalarField, std::uint64_t> decode_green(std::string_view bytes);

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Content-addressed store: entries are keyed by a caller-supplied input
/// hash. Writes go through a temporary file and a rename.
class FieldCache {
 public:
  explicit FieldCache(std::filesystem::path dir);
  /// KGL_CACHE_DIR if set, otherwise `fallback`.
  static FieldCache from_environment(const std::filesystem::path& fallback);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// nullopt on a miss; CacheCorrupt when the entry exists but its sidecar
  /// or checksum does not match.
  std::optional<std::string> load(std::string_view tag, std::uint64_t input_hash) const;
  void store(std::string_view tag, std::uint64_t input_hash, std::string_view payload) const;

  std::optional<ScalarField> load_scalar(std::string_view tag, std::uint64_t input_hash) const;
  void store_scalar(std::string_view tag, std::uint64_t input_hash, const ScalarField& f) const;

 private:
  std::filesystem::path dir_;
  std::filesystem::path payload_path(std::string_view tag, std::uint64_t input_hash) const;
};

}  // namespace kgl
