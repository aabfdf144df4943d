#include "curverat/approx.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace curverat {

namespace {

// shortest text that round-trips
std::string fmt(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double term_log(const PsiTerm& t, double lh) {
  double L = std::max(lh, t.log_floor);
  double out = std::log(t.c) - t.v * lh;
  if (t.alpha != 0.0) out -= t.alpha * std::log(L);
  return out;
}

double term_value(const PsiTerm& t, double h, double lh) {
  double out = t.c;
  if (t.v != 0.0) out *= std::pow(h, -t.v);
  if (t.alpha != 0.0) out *= std::pow(std::max(lh, t.log_floor), -t.alpha);
  return out;
}

void check_term(const PsiTerm& t) {
  if (!(t.c > 0.0) || !std::isfinite(t.c)) throw DomainError("psi coefficient must be positive");
  if (t.v < 0.0) throw DomainError("psi exponent must be non-negative");
  if (t.v == 0.0 && t.alpha < 0.0) throw DomainError("psi would be increasing");
  if (!(t.log_floor > 0.0)) throw DomainError("log floor must be positive");
  if (t.alpha < 0.0 && t.log_floor < -t.alpha / t.v - 1e-12)
    throw DomainError("log floor too small for a monotone psi");
}

}  // namespace

ApproximatingFunction ApproximatingFunction::power(double v, double c) {
  PsiTerm t{c, v, 0.0, 1.0};
  check_term(t);
  ApproximatingFunction f;
  f.kind_ = Kind::Power;
  f.terms_ = {t};
  f.tag_ = c == 1.0 ? "pow:" + fmt(v) : fmt(c) + "*pow:" + fmt(v);
  return f;
}

ApproximatingFunction ApproximatingFunction::power_log(double v, double alpha, double log_floor) {
  if (log_floor < 0.0) log_floor = (alpha < 0.0 && v > 0.0) ? std::max(1.0, -alpha / v) : 1.0;
  PsiTerm t{1.0, v, alpha, log_floor};
  check_term(t);
  ApproximatingFunction f;
  f.kind_ = Kind::PowerLog;
  f.terms_ = {t};
  f.tag_ = "powlog:" + fmt(v) + "," + fmt(alpha);
  if (log_floor != 1.0 && !(alpha < 0.0 && log_floor == std::max(1.0, -alpha / v))) f.tag_ += "," + fmt(log_floor);
  return f;
}

ApproximatingFunction ApproximatingFunction::constant(double c) {
  PsiTerm t{c, 0.0, 0.0, 1.0};
  check_term(t);
  ApproximatingFunction f;
  f.kind_ = Kind::Constant;
  f.terms_ = {t};
  f.tag_ = "const:" + fmt(c);
  return f;
}

ApproximatingFunction ApproximatingFunction::table(std::vector<double> values, std::string source) {
  if (values.empty()) throw DomainError("empty psi table");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) throw DomainError("psi table value not positive at h=" + std::to_string(i + 1));
    if (i > 0 && values[i] > values[i - 1]) throw DomainError("psi table increases at h=" + std::to_string(i + 1));
  }
  ApproximatingFunction f;
  f.kind_ = Kind::Table;
  f.table_ = std::move(values);
  f.table_source_ = source;
  f.tag_ = "table:" + source;
  return f;
}

ApproximatingFunction ApproximatingFunction::auxiliary_half() const {
  ApproximatingFunction f = *this;
  f.kind_ = Kind::Composite;
  // folded into the terms so that scale() still applies to the original part
  f.terms_.push_back(PsiTerm{1.0 / scale_, 0.5, 1.0, 1.0});
  f.tag_ = "auxhalf(" + tag_ + ")";
  return f;
}

ApproximatingFunction ApproximatingFunction::auxiliary_260() const {
  ApproximatingFunction f = *this;
  f.kind_ = Kind::Composite;
  f.terms_.push_back(PsiTerm{1.0 / scale_, 1.0, -260.0, 260.0});
  f.tag_ = "aux260(" + tag_ + ")";
  return f;
}

ApproximatingFunction ApproximatingFunction::phi() const {
  ApproximatingFunction f = *this;
  f.kind_ = Kind::Composite;
  for (auto& t : f.terms_) {
    // keep monotone floors valid under the larger exponent
    t.v += 1.0;
  }
  f.table_extra_v_ += 1.0;
  f.tag_ = "phi(" + tag_ + ")";
  return f;
}

ApproximatingFunction ApproximatingFunction::scaled(double k) const {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("scale must be positive");
  ApproximatingFunction f = *this;
  f.scale_ *= k;
  f.tag_ = fmt(k) + "*(" + tag_ + ")";
  if (kind_ == Kind::Constant) {
    f.terms_[0].c *= f.scale_;
    f.scale_ = 1.0;
    f.tag_ = "const:" + fmt(f.terms_[0].c);
  }
  return f;
}

double ApproximatingFunction::log_value(std::int64_t h) const {
  if (h < 1) throw DomainError("psi evaluated at h < 1");
  double lh = std::log(static_cast<double>(h));
  double best = -std::numeric_limits<double>::infinity();
  if (!table_.empty()) {
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(h - 1), table_.size() - 1);
    best = std::log(table_[i]) - table_extra_v_ * lh;
  }
  for (const auto& t : terms_) best = std::max(best, term_log(t, lh));
  return best + std::log(scale_);
}

double ApproximatingFunction::operator()(std::int64_t h) const {
  if (h < 1) throw DomainError("psi evaluated at h < 1");
  double hd = static_cast<double>(h);
  double lh = std::log(hd);
  double best = 0.0;
  if (!table_.empty()) {
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(h - 1), table_.size() - 1);
    best = table_[i];
    if (table_extra_v_ != 0.0) best *= std::pow(hd, -table_extra_v_);
  }
  for (const auto& t : terms_) best = std::max(best, term_value(t, hd, lh));
  best *= scale_;
  if (!std::isfinite(best)) throw DomainError("psi overflows double at h=" + std::to_string(h));
  if (!(best > 0.0)) throw DomainError("psi underflows double at h=" + std::to_string(h));
  return best;
}

double ApproximatingFunction::at_real(double Q) const {
  double c = std::ceil(Q);
  if (c < 1.0) c = 1.0;
  return (*this)(static_cast<std::int64_t>(c));
}

bool ApproximatingFunction::values_exact() const {
  if (table_extra_v_ != 0.0) return false;
  for (const auto& t : terms_)
    if (t.v != 0.0 || t.alpha != 0.0) return false;
  return true;
}

std::optional<double> ApproximatingFunction::symbolic_lower_order() const {
  if (!table_.empty()) return std::nullopt;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) m = std::min(m, t.v);
  return m;
}

std::string ApproximatingFunction::describe() const { return tag_; }

double lower_order(const ApproximatingFunction& psi, std::int64_t hMax) {
  if (auto s = psi.symbolic_lower_order()) return *s;
  if (hMax < 100) throw DomainError("lower_order needs hMax >= 100");
  double m = std::numeric_limits<double>::infinity();
  for (std::int64_t h = hMax / 2; h <= hMax; ++h) m = std::min(m, -psi.log_value(h) / std::log(static_cast<double>(h)));
  return m;
}

ApproximatingFunction parse_psi(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("psi must look like kind:args, got '" + text + "'");
  std::string kind = text.substr(0, colon);
  std::string rest = text.substr(colon + 1);
  auto nums = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> out;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double x = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument("bad number '" + item + "' in psi");
      out.push_back(x);
    }
    if (out.size() < lo || out.size() > hi) throw std::invalid_argument("wrong argument count in psi '" + text + "'");
    return out;
  };
  if (kind == "pow") {
    auto a = nums(1, 1);
    return ApproximatingFunction::power(a[0]);
  }
  if (kind == "powlog") {
    auto a = nums(2, 3);
    return ApproximatingFunction::power_log(a[0], a[1], a.size() == 3 ? a[2] : -1.0);
  }
  if (kind == "const") {
    auto a = nums(1, 1);
    return ApproximatingFunction::constant(a[0]);
  }
  if (kind == "table") {
    std::ifstream in(rest);
    if (!in) throw std::runtime_error("cannot open psi table '" + rest + "'");
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
      auto p = line.find_first_not_of(" \t\r");
      if (p == std::string::npos || line[p] == '#') continue;
      v.push_back(std::stod(line));
    }
    return ApproximatingFunction::table(std::move(v), rest);
  }
  throw std::invalid_argument("unknown psi kind '" + kind + "'");
}

std::int64_t first_monotonicity_violation(const ApproximatingFunction& psi, std::int64_t hMax) {
  double prev = psi.log_value(1);
  for (std::int64_t h = 2; h <= hMax; ++h) {
    double cur = psi.log_value(h);
    if (cur > prev + 1e-12 * std::max(1.0, std::abs(prev))) return h;
    prev = cur;
  }
  return 0;
}

}  // namespace curverat
