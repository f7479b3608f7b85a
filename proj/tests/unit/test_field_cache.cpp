#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "kgl/errors.hpp"
#include "kgl/field_cache.hpp"

using namespace kgl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kgl-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

ScalarField random_field(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = N01(rng);
  return f;
}

}  // namespace

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Codec, ScalarRoundTripIsBitExact) {
  const GridSpec g(2, 8);
  const ScalarField f = random_field(g, 1);
  const std::string bytes = encode_scalar(f);
  EXPECT_EQ(bytes.size(), 20u + 8u * g.size());
  EXPECT_EQ(bytes.substr(0, 4), "KGL1");
  const ScalarField back = decode_scalar(bytes);
  EXPECT_TRUE(back.grid() == g);
  EXPECT_EQ(std::memcmp(back.values().data(), f.values().data(), 8 * g.size()), 0);
}

TEST(Codec, MetricAndGreenRoundTrip) {
  const GridSpec g(2, 8);
  MetricField m(g);
  for (std::size_t i = 0; i < g.size(); ++i) m.set(i, Hermitian::make(2, 1.0 + i, 2.0, {0.1 * i, -0.5}));
  const MetricField mb = decode_metric(encode_metric(m));
  for (std::size_t i = 0; i < m.raw().size(); ++i) EXPECT_EQ(mb.raw()[i], m.raw()[i]);

  const ScalarField G = random_field(g, 2);
  const auto [Gb, src] = decode_green(encode_green(G, 123));
  EXPECT_EQ(src, 123u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(Gb[i], G[i]);
  EXPECT_THROW(decode_green(encode_green(G, g.size())), CacheCorrupt);
}

TEST(Codec, RejectsMalformedInput) {
  const GridSpec g(1, 8);
  const std::string good = encode_scalar(random_field(g, 3));
  EXPECT_THROW(decode_scalar(good.substr(0, good.size() - 1)), CacheCorrupt);
  EXPECT_THROW(decode_scalar(good + "x"), CacheCorrupt);
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_scalar(bad_magic), CacheCorrupt);
  EXPECT_THROW(decode_metric(good), CacheCorrupt);
  std::string bad_grid = good;
  bad_grid[8] = 7;  // m = 7
  EXPECT_THROW(decode_scalar(bad_grid), CacheCorrupt);
  EXPECT_THROW(decode_scalar(""), CacheCorrupt);
}

TEST(Cache, StoreLoadAndMiss) {
  const FieldCache cache(scratch("cache"));
  const ScalarField f = random_field(GridSpec(1, 16), 4);
  EXPECT_FALSE(cache.load_scalar("phi", 42).has_value());
  cache.store_scalar("phi", 42, f);
  const auto back = cache.load_scalar("phi", 42);
  ASSERT_TRUE(back.has_value());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ((*back)[i], f[i]);
  EXPECT_FALSE(cache.load_scalar("phi", 43).has_value());
  EXPECT_FALSE(cache.load_scalar("green", 42).has_value());
  fs::remove_all(cache.dir());
}

TEST(Cache, DetectsCorruption) {
  const FieldCache cache(scratch("corrupt"));
  const ScalarField f = random_field(GridSpec(1, 16), 5);
  cache.store_scalar("phi", 7, f);
  fs::path bin;
  for (const auto& e : fs::directory_iterator(cache.dir()))
    if (e.path().extension() == ".bin") bin = e.path();
  ASSERT_FALSE(bin.empty());
  {
    std::fstream io(bin, std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(40);
    io.put('\x55');
  }
  EXPECT_THROW(cache.load_scalar("phi", 7), CacheCorrupt);

  cache.store_scalar("phi", 8, f);
  auto sidecar = cache.dir() / ("phi-" + hex64(8) + ".json");
  {
    std::ofstream out(sidecar);
    out << "{not json";
  }
  EXPECT_THROW(cache.load("phi", 8), CacheCorrupt);
  fs::remove_all(cache.dir());
}

TEST(Cache, EnvironmentOverride) {
  const fs::path env_dir = scratch("env");
  ::setenv("KGL_CACHE_DIR", env_dir.c_str(), 1);
  EXPECT_EQ(FieldCache::from_environment("fallback").dir(), env_dir);
  ::setenv("KGL_CACHE_DIR", "", 1);
  EXPECT_EQ(FieldCache::from_environment("fallback").dir(), fs::path("fallback"));
  ::unsetenv("KGL_CACHE_DIR");
  EXPECT_EQ(FieldCache::from_environment("fallback").dir(), fs::path("fallback"));
}

TEST(Files, AtomicWriteLeavesNoTemporaries) {
  const fs::path dir = scratch("atomic");
  fs::create_directories(dir);
  write_file_atomic(dir / "a.bin", "hello");
  write_file_atomic(dir / "a.bin", "world!");
  EXPECT_EQ(read_file(dir / "a.bin"), "world!");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1);
  EXPECT_THROW(read_file(dir / "missing"), Error);
  fs::remove_all(dir);
}
