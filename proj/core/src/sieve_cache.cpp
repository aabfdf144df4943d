#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "curverat/sieve.hpp"

namespace curverat {

namespace {

constexpr char kMagic[8] = {'R', '2', 'S', 'I', 'E', 'V', 'E', '1'};

// 32 bytes: magic[8] | version u32 | flags u32 | N_max u64 | checksum u64, all little-endian
struct Header {
  std::uint32_t version = 0;
  std::uint32_t flags = 0;
  std::uint64_t n_max = 0;
  std::uint64_t checksum = 0;
};

void put_le(unsigned char* out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint64_t get_le(const unsigned char* in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

std::vector<unsigned char> d_bytes(const std::vector<std::uint16_t>& d) {
  std::vector<unsigned char> out(d.size() * 2);
  for (std::size_t i = 0; i < d.size(); ++i) put_le(&out[2 * i], d[i], 2);
  return out;
}

}  // namespace

std::uint64_t SieveTable::fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string SieveTable::cache_file_name(std::uint64_t n_max, bool with_divisors) {
  return "r2sieve_v" + std::to_string(kFormatVersion) + "_" + std::to_string(n_max) + (with_divisors ? "_rd" : "_r") + ".bin";
}

bool SieveTable::save(const std::string& path) const {
  std::vector<unsigned char> dpay = d_bytes(d_);
  std::uint64_t sum = fnv1a(r4_.data(), r4_.size());
  sum = fnv1a(dpay.data(), dpay.size(), sum);
  unsigned char head[32];
  std::memcpy(head, kMagic, 8);
  put_le(head + 8, kFormatVersion, 4);
  put_le(head + 12, d_.empty() ? 0 : 1, 4);
  put_le(head + 16, n_max_, 8);
  put_le(head + 24, sum, 8);
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out.write(reinterpret_cast<const char*>(head), 32);
    out.write(reinterpret_cast<const char*>(r4_.data()), static_cast<std::streamsize>(r4_.size()));
    out.write(reinterpret_cast<const char*>(dpay.data()), static_cast<std::streamsize>(dpay.size()));
    if (!out) return false;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  return !ec;
}

bool SieveTable::load(const std::string& path, std::uint64_t n_max, bool with_divisors, SieveTable& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  unsigned char head[32];
  if (!in.read(reinterpret_cast<char*>(head), 32)) return false;
  if (std::memcmp(head, kMagic, 8) != 0) return false;
  Header h;
  h.version = static_cast<std::uint32_t>(get_le(head + 8, 4));
  h.flags = static_cast<std::uint32_t>(get_le(head + 12, 4));
  h.n_max = get_le(head + 16, 8);
  h.checksum = get_le(head + 24, 8);
  if (h.version != kFormatVersion || h.n_max != n_max || h.flags != (with_divisors ? 1u : 0u)) return false;
  SieveTable t;
  t.n_max_ = n_max;
  t.r4_.resize(n_max + 1);
  if (!in.read(reinterpret_cast<char*>(t.r4_.data()), static_cast<std::streamsize>(t.r4_.size()))) return false;
  std::uint64_t sum = fnv1a(t.r4_.data(), t.r4_.size());
  if (with_divisors) {
    std::vector<unsigned char> dpay((n_max + 1) * 2);
    if (!in.read(reinterpret_cast<char*>(dpay.data()), static_cast<std::streamsize>(dpay.size()))) return false;
    sum = fnv1a(dpay.data(), dpay.size(), sum);
    t.d_.resize(n_max + 1);
    for (std::size_t i = 0; i <= n_max; ++i) t.d_[i] = static_cast<std::uint16_t>(get_le(&dpay[2 * i], 2));
  }
  if (in.peek() != std::char_traits<char>::eof()) return false;
  if (sum != h.checksum) return false;
  t.finish_aux();
  out = std::move(t);
  return true;
}

}  // namespace curverat
