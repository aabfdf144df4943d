#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "curverat/interval_set.hpp"
#include "json.hpp"

namespace curverat::cli {

using ojson = nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// a verification ran and did not hold
struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& bytes);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::string fmt17(double v);

// "a,b"
Interval parse_interval(const std::string& text);
// comma separated; each item is an integer, 2^k, or a range 2^a..2^b (powers of two) / a..b
std::vector<std::int64_t> parse_int_list(const std::string& text);
// same, plus plain reals
std::vector<double> parse_double_list(const std::string& text);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  Csv& row() {
    rows_.emplace_back();
    return *this;
  }
  Csv& add(const std::string& s);
  Csv& add(double v);
  Csv& add(std::int64_t v);
  Csv& add(int v) { return add(static_cast<std::int64_t>(v)); }
  Csv& add(bool v) { return add(std::string(v ? "true" : "false")); }
  // the params hash is appended as the last column of every row
  std::string str(const std::string& params_hash) const;
  bool empty() const { return rows_.empty(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace curverat::cli
