#include "curverat/interval_set.hpp"

#include <algorithm>

namespace curverat {

IntervalSet::IntervalSet(std::vector<Interval> raw) { add_all(raw); }

void IntervalSet::add(Interval iv) { add_all({iv}); }

void IntervalSet::add_all(const std::vector<Interval>& ivs) {
  std::vector<Interval> all = pieces_;
  for (const auto& iv : ivs)
    if (iv.a <= iv.b) all.push_back(iv);
  std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.a < y.a || (x.a == y.a && x.b < y.b); });
  std::vector<Interval> out;
  for (const auto& iv : all) {
    if (!out.empty() && iv.a <= out.back().b) {
      out.back().b = std::max(out.back().b, iv.b);
    } else {
      out.push_back(iv);
    }
  }
  pieces_ = std::move(out);
}

void IntervalSet::unite(const IntervalSet& other) { add_all(other.pieces_); }

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < pieces_.size() && j < other.pieces_.size()) {
    double a = std::max(pieces_[i].a, other.pieces_[j].a);
    double b = std::min(pieces_[i].b, other.pieces_[j].b);
    if (a <= b) out.push_back({a, b});
    if (pieces_[i].b < other.pieces_[j].b) ++i; else ++j;
  }
  IntervalSet s;
  s.pieces_ = std::move(out);
  return s;
}

double IntervalSet::measure() const {
  double m = 0.0;
  for (const auto& iv : pieces_) m += iv.b - iv.a;
  return m;
}

bool IntervalSet::contains(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x, [](double v, const Interval& iv) { return v < iv.a; });
  if (it == pieces_.begin()) return false;
  --it;
  return x <= it->b;
}

double union_measure(const IntervalSet& s, Interval clip) {
  if (!(clip.a < clip.b)) return 0.0;
  double m = 0.0;
  for (const auto& iv : s.pieces()) {
    double a = std::max(iv.a, clip.a), b = std::min(iv.b, clip.b);
    if (a < b) m += b - a;
  }
  return m;
}

double balls_union_measure(std::vector<double> centers, double r, Interval clip) {
  if (centers.empty() || !(r > 0.0) || !(clip.a < clip.b)) return 0.0;
  std::sort(centers.begin(), centers.end());
  double m = 0.0;
  double cur_a = 0.0, cur_b = 0.0;
  bool open = false;
  for (double c : centers) {
    double a = std::max(c - r, clip.a), b = std::min(c + r, clip.b);
    if (a >= b) continue;
    if (open && a <= cur_b) {
      cur_b = std::max(cur_b, b);
    } else {
      if (open) m += cur_b - cur_a;
      cur_a = a;
      cur_b = b;
      open = true;
    }
  }
  if (open) m += cur_b - cur_a;
  return m;
}

}  // namespace curverat
