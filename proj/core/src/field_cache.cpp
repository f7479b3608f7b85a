#include "kgl/field_cache.hpp"

#include "json.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "kgl/errors.hpp"

namespace kgl {
namespace {

constexpr char kMagic[4] = {'K', 'G', 'L', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

class Reader {
 public:
  explicit Reader(std::string_view b) : b_(b) {}
  std::uint64_t u(int bytes) {
    if (pos_ + static_cast<std::size_t>(bytes) > b_.size()) throw CacheCorrupt("field file: truncated");
    std::uint64_t v = 0;
    for (int k = 0; k < bytes; ++k)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_ + k])) << (8 * k);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  double f64() { return std::bit_cast<double>(u(8)); }
  bool done() const { return pos_ == b_.size(); }
  void expect_magic() {
    if (b_.size() < 4 || std::memcmp(b_.data(), kMagic, 4) != 0) throw CacheCorrupt("field file: bad magic");
    pos_ = 4;
  }

 private:
  std::string_view b_;
  std::size_t pos_ = 0;
};

std::string header(const GridSpec& g, FieldKind kind, std::uint32_t components) {
  std::string out(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(g.n()));
  put_u32(out, static_cast<std::uint32_t>(g.m()));
  put_u32(out, static_cast<std::uint32_t>(kind));
  put_u32(out, components);
  return out;
}

struct Header {
  GridSpec grid;
  std::uint32_t components;
};

Header read_header(Reader& r, FieldKind expected) {
  r.expect_magic();
  const auto n = static_cast<int>(r.u(4));
  const auto m = static_cast<int>(r.u(4));
  const auto kind = static_cast<FieldKind>(r.u(4));
  const auto comps = static_cast<std::uint32_t>(r.u(4));
  if (kind != expected) throw CacheCorrupt("field file: unexpected field kind");
  try {
    return {GridSpec(n, m), comps};
  } catch (const ConfigInvalid&) {
    throw CacheCorrupt("field file: invalid grid in header");
  }
}

ScalarField read_scalar_body(Reader& r, const Header& h) {
  if (h.components != 1) throw CacheCorrupt("field file: scalar with component count != 1");
  ScalarField f(h.grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = r.f64();
  if (!r.done()) throw CacheCorrupt("field file: trailing bytes");
  return f;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) s[k] = digits[v & 0xf];
  return s;
}

std::string encode_scalar(const ScalarField& f) {
  std::string out = header(f.grid(), FieldKind::scalar, 1);
  for (double v : f.values()) put_f64(out, v);
  return out;
}

std::string encode_metric(const MetricField& f) {
  std::string out = header(f.grid(), FieldKind::metric, static_cast<std::uint32_t>(f.components()));
  for (double v : f.raw()) put_f64(out, v);
  return out;
}

std::string encode_green(const ScalarField& G, std::uint64_t source) {
  std::string out = header(G.grid(), FieldKind::green, 1);
  put_u64(out, source);
  for (double v : G.values()) put_f64(out, v);
  return out;
}

ScalarField decode_scalar(std::string_view bytes) {
  Reader r(bytes);
  const Header h = read_header(r, FieldKind::scalar);
  return read_scalar_body(r, h);
}

MetricField decode_metric(std::string_view bytes) {
  Reader r(bytes);
  const Header h = read_header(r, FieldKind::metric);
  MetricField f(h.grid);
  if (h.components != static_cast<std::uint32_t>(f.components()))
    throw CacheCorrupt("field file: metric component count does not match n");
  for (double& v : f.raw()) v = r.f64();
  if (!r.done()) throw CacheCorrupt("field file: trailing bytes");
  return f;
}

std::pair<ScalarField, std::uint64_t> decode_green(std::string_view bytes) {
  Reader r(bytes);
  const Header h = read_header(r, FieldKind::green);
  const std::uint64_t source = r.u(8);
  ScalarField G = read_scalar_body(r, h);
  if (source >= G.size()) throw CacheCorrupt("field file: green source out of range");
  return {std::move(G), source};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ostringstream tmpname;
  tmpname << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id())
          << '.' << counter++;
  const auto tmp = path.parent_path() / tmpname.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FieldCache::FieldCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

FieldCache FieldCache::from_environment(const std::filesystem::path& fallback) {
  const char* env = std::getenv("KGL_CACHE_DIR");
  return FieldCache(env && *env ? std::filesystem::path(env) : fallback);
}

std::filesystem::path FieldCache::payload_path(std::string_view tag, std::uint64_t input_hash) const {
  return dir_ / (std::string(tag) + "-" + hex64(input_hash) + ".bin");
}

std::optional<std::string> FieldCache::load(std::string_view tag, std::uint64_t input_hash) const {
  const auto path = payload_path(tag, input_hash);
  auto sidecar = path;
  sidecar.replace_extension(".json");
  if (!std::filesystem::exists(path) || !std::filesystem::exists(sidecar)) return std::nullopt;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(sidecar));
  } catch (const nlohmann::json::exception&) {
    throw CacheCorrupt("cache: unreadable sidecar " + sidecar.string());
  }
  std::string payload = read_file(path);
  if (meta.value("input_hash", std::string()) != hex64(input_hash))
    throw CacheCorrupt("cache: input hash mismatch for " + path.string());
  if (meta.value("checksum", std::string()) != hex64(fnv1a(payload)))
    throw CacheCorrupt("cache: checksum mismatch for " + path.string());
  return payload;
}

void FieldCache::store(std::string_view tag, std::uint64_t input_hash, std::string_view payload) const {
  const auto path = payload_path(tag, input_hash);
  auto sidecar = path;
  sidecar.replace_extension(".json");
  const nlohmann::json meta = {{"input_hash", hex64(input_hash)},
                               {"checksum", hex64(fnv1a(payload))},
                               {"tag", std::string(tag)},
                               {"bytes", payload.size()}};
  write_file_atomic(path, payload);
  write_file_atomic(sidecar, meta.dump());
}

std::optional<ScalarField> FieldCache::load_scalar(std::string_view tag, std::uint64_t input_hash) const {
  auto payload = load(tag, input_hash);
  if (!payload) return std::nullopt;
  return decode_scalar(*payload);
}

void FieldCache::store_scalar(std::string_view tag, std::uint64_t input_hash, const ScalarField& f) const {
  store(tag, input_hash, encode_scalar(f));
}

}  // namespace kgl
