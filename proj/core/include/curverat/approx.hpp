#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace curverat {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// One monomial c * h^-v * L(h)^-alpha with L(h) = max(log h, log_floor).
struct PsiTerm {
  double c = 1.0;
  double v = 0.0;
  double alpha = 0.0;
  double log_floor = 1.0;
};

// Positive non-increasing psi on the integers h >= 1.
//
// Value is  scale * max( table(h) * h^-table_extra_v , max_i term_i(h) ).
// Every factory keeps the result monotone, so evaluation needs no cache.
class ApproximatingFunction {
 public:
  enum class Kind { Power, PowerLog, Constant, Table, Composite };

  static ApproximatingFunction power(double v, double c = 1.0);
  // log_floor < 0 selects max(1, -alpha/v), the smallest floor that keeps psi monotone.
  static ApproximatingFunction power_log(double v, double alpha, double log_floor = -1.0);
  static ApproximatingFunction constant(double c);
  // values[0] = psi(1); constant extension past the end.
  static ApproximatingFunction table(std::vector<double> values, std::string source = "inline");

  // max{psi(h), h^-1/2 (log h)^-1}
  ApproximatingFunction auxiliary_half() const;
  // max{psi(h), h^-1 (log h)^260}; overflows double for every desk-scale h
  ApproximatingFunction auxiliary_260() const;
  // psi(t)/t
  ApproximatingFunction phi() const;
  ApproximatingFunction scaled(double k) const;

  double operator()(std::int64_t h) const;
  double log_value(std::int64_t h) const;
  // psi at a real argument, read at ceil(Q)
  double at_real(double Q) const;

  Kind kind() const { return kind_; }
  bool has_table() const { return !table_.empty(); }
  bool is_symbolic() const { return table_.empty(); }
  // True when every value psi(h) is, by definition, the double returned (constants, tables).
  bool values_exact() const;
  // True when h >= table size (constant tail in use).
  bool in_table_tail(std::int64_t h) const { return has_table() && h > static_cast<std::int64_t>(table_.size()); }
  std::int64_t table_size() const { return static_cast<std::int64_t>(table_.size()); }

  const std::vector<PsiTerm>& terms() const { return terms_; }
  double scale() const { return scale_; }
  double table_extra_v() const { return table_extra_v_; }

  // Exact liminf of -log psi / log h for symbolic kinds.
  std::optional<double> symbolic_lower_order() const;
  // Grammar form: pow:v, powlog:v,a, const:c, table:path, or a composite description.
  std::string describe() const;

 private:
  Kind kind_ = Kind::Constant;
  std::vector<PsiTerm> terms_;
  std::vector<double> table_;
  std::string table_source_;
  double table_extra_v_ = 0.0;
  double scale_ = 1.0;
  std::string tag_;
};

// liminf_{h} -log psi(h)/log h: exact for symbolic forms, else running min over [hMax/2, hMax].
double lower_order(const ApproximatingFunction& psi, std::int64_t hMax = 1 << 20);

// Parse pow:v | powlog:v,a[,floor] | const:c | table:path
ApproximatingFunction parse_psi(const std::string& text);

// Checks psi(h+1) <= psi(h) over [1, hMax]; returns the first violating h or 0.
std::int64_t first_monotonicity_violation(const ApproximatingFunction& psi, std::int64_t hMax);

}  // namespace curverat
