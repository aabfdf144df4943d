#include "curverat/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace curverat {

PlanarCurve::PlanarCurve(std::string id, Interval domain, Fn f, Fn df, Fn d2f,
                         std::vector<CurvatureBound> bounds, ExactForm exact)
    : id_(std::move(id)), domain_(domain), f_(std::move(f)), df_(std::move(df)), d2f_(std::move(d2f)),
      bounds_(std::move(bounds)), exact_(exact) {
  for (const auto& b : bounds_)
    if (!(b.c1 > 0.0) || !(b.c1 <= b.c2) || !std::isfinite(b.c2))
      throw std::invalid_argument("curvature bounds need 0 < c1 <= c2 < inf");
}

double PlanarCurve::log_f(double x) const {
  if (log_f_) return log_f_(x);
  return std::log(f_(x));
}

PlanarCurve parabola() {
  return PlanarCurve("parabola", {-2.0, 2.0}, [](double x) { return x * x; }, [](double x) { return 2 * x; },
                     [](double) { return 2.0; }, {{{-2.0, 2.0}, 2.0, 2.0}}, {ExactForm::Kind::Parabola, 0, 0});
}

namespace {

PlanarCurve sqrt_quadratic(std::string id, long long A, long long B, Interval dom, std::vector<CurvatureBound> bounds) {
  double a = static_cast<double>(A), b = static_cast<double>(B);
  auto f = [a, b](double x) { return std::sqrt(std::max(0.0, a + b * x * x)); };
  auto df = [a, b](double x) { return b * x / std::sqrt(a + b * x * x); };
  // f'' = a b / (a + b x^2)^{3/2}
  auto d2f = [a, b](double x) { return a * b / std::pow(a + b * x * x, 1.5); };
  return PlanarCurve(std::move(id), dom, f, df, d2f, std::move(bounds), {ExactForm::Kind::SqrtQuadratic, A, B});
}

CurvatureBound circle_bound(double R2, double x0) {
  // |f''| = R2 / (R2 - x^2)^{3/2} on [-x0, x0]
  return {{-x0, x0}, 1.0 / std::sqrt(R2), R2 / std::pow(R2 - x0 * x0, 1.5)};
}

}  // namespace

PlanarCurve unit_circle_upper() {
  return sqrt_quadratic("circle", 1, -1, {-1.0, 1.0}, {circle_bound(1.0, 0.9)});
}

PlanarCurve circle_sqrt3_upper() {
  double r = std::sqrt(3.0);
  return sqrt_quadratic("circle-sqrt3", 3, -1, {-r, r}, {circle_bound(3.0, 1.5)});
}

PlanarCurve hyperbola_upper() {
  // |f''| = (1 + x^2)^{-3/2} on [-2, 2]
  return sqrt_quadratic("hyperbola", 1, 1, {-2.0, 2.0}, {{{-2.0, 2.0}, std::pow(5.0, -1.5), 1.0}});
}

std::vector<CantorGap> cantor_gaps(int depth) {
  if (depth < 0 || depth > 24) throw std::invalid_argument("cantor depth out of range [0, 24]");
  std::vector<CantorGap> gaps;
  std::vector<std::pair<double, double>> alive{{0.0, 1.0}};
  for (int i = 1; i <= depth; ++i) {
    std::vector<std::pair<double, double>> next;
    next.reserve(alive.size() * 2);
    for (auto [a, b] : alive) {
      double third = (b - a) / 3.0;
      gaps.push_back({i, a + third, b - third});
      next.push_back({a, a + third});
      next.push_back({b - third, b});
    }
    alive = std::move(next);
  }
  std::sort(gaps.begin(), gaps.end(), [](const CantorGap& x, const CantorGap& y) { return x.a < y.a; });
  return gaps;
}

std::vector<double> cantor_endpoints(int depth) {
  std::vector<std::pair<double, double>> alive{{0.0, 1.0}};
  for (int i = 1; i <= depth; ++i) {
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : alive) {
      double third = (b - a) / 3.0;
      next.push_back({a, a + third});
      next.push_back({b - third, b});
    }
    alive = std::move(next);
  }
  std::vector<double> out;
  for (auto [a, b] : alive) {
    out.push_back(a);
    out.push_back(b);
  }
  return out;
}

PlanarCurve cantor_curve(int depth) {
  auto gaps = std::make_shared<std::vector<CantorGap>>(cantor_gaps(depth));
  // gap strictly containing x, or null
  auto find = [gaps](double x) -> const CantorGap* {
    auto it = std::upper_bound(gaps->begin(), gaps->end(), x, [](double v, const CantorGap& g) { return v < g.a; });
    if (it == gaps->begin()) return nullptr;
    --it;
    return (x > it->a && x < it->b) ? &*it : nullptr;
  };
  // on a gap (a,b) at level i:  f = exp(phi), phi = -i - 1/p, p = (x-a)(b-x)
  auto log_f = [find](double x) {
    const CantorGap* g = find(x);
    if (!g) return -std::numeric_limits<double>::infinity();
    double p = (x - g->a) * (g->b - x);
    return -g->level - 1.0 / p;
  };
  auto f = [log_f](double x) { return std::exp(log_f(x)); };
  auto df = [find](double x) {
    const CantorGap* g = find(x);
    if (!g) return 0.0;
    double p = (x - g->a) * (g->b - x), dp = g->a + g->b - 2 * x;
    return std::exp(-g->level - 1.0 / p) * dp / (p * p);
  };
  auto d2f = [find](double x) {
    const CantorGap* g = find(x);
    if (!g) return 0.0;
    double p = (x - g->a) * (g->b - x), dp = g->a + g->b - 2 * x;
    double phi1 = dp / (p * p);
    double phi2 = -2.0 / (p * p) - 2.0 * dp * dp / (p * p * p);
    return std::exp(-g->level - 1.0 / p) * (phi1 * phi1 + phi2);
  };
  PlanarCurve c("cantor:" + std::to_string(depth), {0.0, 1.0}, f, df, d2f);
  c.set_log_f(log_f);
  return c;
}

PlanarCurve curve_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CurveFileError("cannot open curve file '" + path + "'");
  struct Row { double x, f, df, d2f; };
  auto rows = std::make_shared<std::vector<Row>>();
  std::string line;
  while (std::getline(in, line)) {
    auto p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == '#' || std::isalpha(static_cast<unsigned char>(line[p]))) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Row r{};
    if (!(ss >> r.x >> r.f >> r.df >> r.d2f)) throw std::invalid_argument("bad curve row: " + line);
    rows->push_back(r);
  }
  if (rows->size() < 2) throw std::runtime_error("curve file needs at least two rows");
  for (std::size_t i = 1; i < rows->size(); ++i)
    if (!((*rows)[i].x > (*rows)[i - 1].x)) throw std::runtime_error("curve file x values must increase");
  auto interp = [rows](double x, double Row::*field) {
    const auto& r = *rows;
    if (x <= r.front().x) return r.front().*field;
    if (x >= r.back().x) return r.back().*field;
    auto it = std::upper_bound(r.begin(), r.end(), x, [](double v, const Row& row) { return v < row.x; });
    const Row& hi = *it;
    const Row& lo = *(it - 1);
    double t = (x - lo.x) / (hi.x - lo.x);
    return lo.*field + t * (hi.*field - lo.*field);
  };
  return PlanarCurve("file:" + path, {rows->front().x, rows->back().x},
                     [interp](double x) { return interp(x, &Row::f); },
                     [interp](double x) { return interp(x, &Row::df); },
                     [interp](double x) { return interp(x, &Row::d2f); });
}

PlanarCurve parse_curve(const std::string& text) {
  if (text == "parabola") return parabola();
  if (text == "circle") return unit_circle_upper();
  if (text == "circle-sqrt3") return circle_sqrt3_upper();
  if (text == "hyperbola") return hyperbola_upper();
  if (text.rfind("cantor:", 0) == 0) return cantor_curve(std::stoi(text.substr(7)));
  if (text.rfind("file:", 0) == 0) return curve_from_file(text.substr(5));
  throw std::invalid_argument("unknown curve '" + text + "'");
}

std::optional<double> check_curvature_bounds(const PlanarCurve& c, int samples) {
  for (const auto& b : c.curvature_bounds()) {
    for (int i = 0; i <= samples; ++i) {
      double x = b.on.a + (b.on.b - b.on.a) * i / samples;
      double k = std::abs(c.d2f(x));
      double tol = 1e-12 * std::max(1.0, b.c2);
      if (k < b.c1 - tol || k > b.c2 + tol) return x;
    }
  }
  return std::nullopt;
}

}  // namespace curverat
