#pragma once

#include <vector>

namespace curverat {

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b > a ? b - a : 0.0; }
  bool contains(double x) const { return a <= x && x <= b; }
};

// Disjoint, sorted, closed intervals. Touching intervals are merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> raw);

  void add(Interval iv);
  void add_all(const std::vector<Interval>& ivs);
  void unite(const IntervalSet& other);
  IntervalSet intersect(const IntervalSet& other) const;

  double measure() const;
  const std::vector<Interval>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  bool contains(double x) const;

 private:
  std::vector<Interval> pieces_;
};

// |(union of s) intersected with clip|
double union_measure(const IntervalSet& s, Interval clip);

// Measure of the union of [c_i - r, c_i + r] inside clip without building a set.
// centers need not be sorted.
double balls_union_measure(std::vector<double> centers, double r, Interval clip);

}  // namespace curverat
