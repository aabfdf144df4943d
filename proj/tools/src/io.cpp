#include "io.hpp"

#include <openssl/evp.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "curverat/cli/cli.hpp"

namespace curverat::cli {

namespace {

std::string to_hex(const unsigned char* p, unsigned n) {
  static const char* digits = "0123456789abcdef";
  std::string s(2 * n, '0');
  for (unsigned i = 0; i < n; ++i) {
    s[2 * i] = digits[p[i] >> 4];
    s[2 * i + 1] = digits[p[i] & 15];
  }
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::int64_t parse_i64(const std::string& s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw UsageError("not an integer: '" + s + "'");
  return v;
}

// integer or 2^k; sets pow2 when written as a power of two
std::int64_t parse_atom(const std::string& s, bool& pow2) {
  pow2 = s.rfind("2^", 0) == 0;
  if (!pow2) return parse_i64(s);
  std::int64_t k = parse_i64(s.substr(2));
  if (k < 0 || k > 62) throw UsageError("exponent out of range: '" + s + "'");
  return std::int64_t{1} << k;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  return to_hex(md, len);
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "': " + std::strerror(errno));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Interval parse_interval(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("interval must be 'a,b': '" + text + "'");
  Interval I;
  try {
    I.a = std::stod(parts[0]);
    I.b = std::stod(parts[1]);
  } catch (const std::exception&) {
    throw UsageError("bad interval '" + text + "'");
  }
  if (!(I.a < I.b)) throw UsageError("interval needs a < b: '" + text + "'");
  return I;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      bool p = false;
      out.push_back(parse_atom(item, p));
      continue;
    }
    bool p1 = false, p2 = false;
    std::int64_t lo = parse_atom(item.substr(0, dots), p1);
    std::int64_t hi = parse_atom(item.substr(dots + 2), p2);
    if (p1 != p2) throw UsageError("range mixes powers of two and integers: '" + item + "'");
    if (lo > hi) throw UsageError("empty range: '" + item + "'");
    if (p1) {
      for (std::int64_t v = lo; v <= hi; v *= 2) out.push_back(v);
    } else {
      if (hi - lo > 10'000'000) throw UsageError("range too long: '" + item + "'");
      for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    if (item.find('^') != std::string::npos || item.find("..") != std::string::npos) {
      for (auto v : parse_int_list(item)) out.push_back(static_cast<double>(v));
      continue;
    }
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw UsageError("");
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

Csv& Csv::add(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    rows_.back().push_back(s);
  } else {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    rows_.back().push_back(q + "\"");
  }
  return *this;
}

Csv& Csv::add(double v) {
  rows_.back().push_back(fmt17(v));
  return *this;
}

Csv& Csv::add(std::int64_t v) {
  rows_.back().push_back(std::to_string(v));
  return *this;
}

std::string Csv::str(const std::string& params_hash) const {
  std::string s;
  for (const auto& h : header_) s += h + ",";
  s += "params_hash\n";
  for (const auto& r : rows_) {
    for (const auto& c : r) s += c + ",";
    s += params_hash + "\n";
  }
  return s;
}

}  // namespace curverat::cli
