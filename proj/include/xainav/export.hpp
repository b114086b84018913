#pragma once
/**
 * @file export.hpp
 * @brief Attribution traces and the two figure formats: histograms of raw
 * and processed scores (log count axis) and the top-down scene map. Each
 * figure comes as CSV data plus an SVG rendering of the same data.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xainav/study.hpp"

namespace xainav {

// ---------------------------------------------------------------------------
// Trace CSV
//
// timestep,g0..g14,goal_r,goal_theta,gs0..gs14,obj_<id>... (one column per
// obstacle in scene order). g is the raw gradient, gs the processed g*.

inline std::string trace_csv(const TrialRecord& rec) {
  std::ostringstream os;
  os.precision(17);
  os << "timestep";
  for (std::size_t j = 0; j < kNumSectors; ++j) os << ",g" << j;
  os << ",goal_r,goal_theta";
  for (std::size_t j = 0; j < kNumSectors; ++j) os << ",gs" << j;
  if (!rec.frames.empty())
    for (const auto& s : rec.frames.front().attribution.importance.scores) os << ",obj_" << s.id;
  os << '\n';
  for (const auto& f : rec.frames) {
    const auto& a = f.attribution;
    os << f.tick;
    for (double v : a.raw.g) os << ',' << v;
    for (double v : a.raw.goal()) os << ',' << v;
    for (double v : a.processed.g_star) os << ',' << v;
    for (const auto& s : a.importance.scores) os << ',' << s.score;
    os << '\n';
  }
  return os.str();
}

struct TraceSamples {
  std::vector<double> lidar;   // raw g entries
  std::vector<double> goal;    // raw goal-slice entries
  std::vector<double> g_star;  // processed entries
};

/// Reads trace CSV text (header required) and appends its samples.
inline void read_trace_csv(std::istream& in, TraceSamples& out) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("timestep,g0", 0) != 0)
    throw std::invalid_argument("not an attribution trace (header)");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        cells.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::invalid_argument("trace row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
    }
    const std::size_t need = 1 + kNumSectors + 2 + kNumSectors;
    if (cells.size() < need) throw std::invalid_argument("trace row " + std::to_string(row) + ": too few columns");
    out.lidar.insert(out.lidar.end(), cells.begin() + 1, cells.begin() + 1 + kNumSectors);
    out.goal.insert(out.goal.end(), cells.begin() + 1 + kNumSectors, cells.begin() + 3 + kNumSectors);
    out.g_star.insert(out.g_star.end(), cells.begin() + 3 + kNumSectors, cells.begin() + need);
  }
}

// ---------------------------------------------------------------------------
// Histograms

struct Histogram {
  std::string series;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<long> counts;

  double bin_width() const { return (hi - lo) / double(counts.size()); }
  long total() const {
    long n = 0;
    for (long c : counts) n += c;
    return n;
  }
};

/// Equal-width histogram over [lo, hi]; the top edge belongs to the last bin.
/// Values outside the range throw.
inline Histogram histogram(std::string series, const std::vector<double>& values, double lo, double hi, int bins) {
  if (bins <= 0 || !(hi > lo)) throw std::invalid_argument("histogram needs bins > 0 and hi > lo");
  Histogram h{std::move(series), lo, hi, std::vector<long>(std::size_t(bins), 0)};
  for (double v : values) {
    if (!std::isfinite(v) || v < lo || v > hi) throw std::invalid_argument("histogram value outside range");
    auto b = std::size_t((v - lo) / h.bin_width());
    ++h.counts[std::min(b, std::size_t(bins - 1))];
  }
  return h;
}

/// Raw lidar and goal scores share one symmetric range so the two series
/// are directly comparable; g* uses [0, 1].
inline std::vector<Histogram> attribution_histograms(const TraceSamples& s, int bins = 40) {
  double m = 0.0;
  for (double v : s.lidar) m = std::max(m, std::abs(v));
  for (double v : s.goal) m = std::max(m, std::abs(v));
  if (m == 0.0) m = 1.0;
  return {histogram("raw_lidar", s.lidar, -m, m, bins), histogram("raw_goal", s.goal, -m, m, bins),
          histogram("g_star", s.g_star, 0.0, 1.0, bins)};
}

/// series,bin_lo,bin_hi,count
inline std::string histograms_csv(const std::vector<Histogram>& hs) {
  std::ostringstream os;
  os.precision(17);
  os << "series,bin_lo,bin_hi,count\n";
  for (const auto& h : hs)
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      os << h.series << ',' << h.lo + double(b) * h.bin_width() << ',' << h.lo + double(b + 1) * h.bin_width() << ','
         << h.counts[b] << '\n';
  return os.str();
}

namespace detail {

inline std::string svg_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Blue (0) to red (1).
inline std::string score_color(double s) {
  s = std::clamp(s, 0.0, 1.0);
  const int r = int(std::lround(40 + 215 * s));
  const int g = int(std::lround(90 * (1.0 - std::abs(2.0 * s - 1.0))));
  const int b = int(std::lround(255 - 215 * s));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

/// One panel per histogram, bars on a log10 count axis (empty bins omitted).
inline std::string histograms_svg(const std::vector<Histogram>& hs) {
  const double pw = 360, ph = 220, pad = 40;
  const double width = pad + double(hs.size()) * (pw + pad);
  const double height = ph + 2 * pad;
  long max_count = 1;
  for (const auto& h : hs)
    for (long c : h.counts) max_count = std::max(max_count, c);
  const double decades = std::max(1.0, std::ceil(std::log10(double(max_count))));
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const auto& h = hs[i];
    const double x0 = pad + double(i) * (pw + pad), y0 = pad;
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n"
       << "<text x=\"" << x0 << "\" y=\"" << y0 - 8 << "\">" << h.series << " (log count)</text>\n"
       << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int d = 0; d <= int(decades); ++d) {
      const double y = y0 + ph - ph * d / decades;
      os << "<text x=\"" << x0 - 4 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    const double bw = pw / double(h.counts.size());
    const std::string fill = h.series == "raw_goal" ? "#d62728" : h.series == "g_star" ? "#2ca02c" : "#1f77b4";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      if (h.counts[b] == 0) continue;
      // a single count still gets a visible sliver above the baseline
      const double bar = std::max(2.0, ph * std::log10(double(h.counts[b])) / decades);
      os << "<rect x=\"" << detail::svg_number(x0 + double(b) * bw) << "\" y=\"" << detail::svg_number(y0 + ph - bar)
         << "\" width=\"" << detail::svg_number(bw) << "\" height=\"" << detail::svg_number(bar) << "\" fill=\"" << fill
         << "\"/>\n";
    }
    os << "<text x=\"" << x0 << "\" y=\"" << y0 + ph + 14 << "\">" << detail::svg_number(h.lo) << "</text>\n"
       << "<text x=\"" << x0 + pw << "\" y=\"" << y0 + ph + 14 << "\" text-anchor=\"end\">" << detail::svg_number(h.hi)
       << "</text>\n</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Top-down scene map
//
// CSV rows: element,id,x,y,x2,y2,value
//   robot     -1  position          heading direction tip   heading
//   ray       j   robot position    contributing ray end    g*_j
//   obstacle  id  center            half extents / (r, r)   object score
//   goal      -1  goal              goal                    0

inline std::string scene_map_csv(const Scene& scene, const TrialFrame& f) {
  std::ostringstream os;
  os.precision(17);
  os << "element,id,x,y,x2,y2,value\n";
  const Pose& p = f.pose;
  const Vec2 tip = p.position + unit_from_angle(p.heading) * 0.4;
  os << "robot,-1," << p.position.x << ',' << p.position.y << ',' << tip.x << ',' << tip.y << ',' << p.heading << '\n';
  const auto& obs = f.attribution.observation;
  for (std::size_t j = 0; j < kNumSectors; ++j) {
    const std::size_t k = obs.pooled.contributing_ray[j];
    const Vec2 end = p.position + unit_from_angle(ray_angle(p, k)) * obs.raw.distances[k];
    os << "ray," << j << ',' << p.position.x << ',' << p.position.y << ',' << end.x << ',' << end.y << ','
       << f.attribution.processed.g_star[j] << '\n';
  }
  for (std::size_t i = 0; i < scene.obstacles.size(); ++i) {
    const auto& o = scene.obstacles[i];
    const Vec2 c = o.center();
    const Vec2 ext = o.is_circle() ? Vec2{std::get<Circle>(o.shape).radius, std::get<Circle>(o.shape).radius}
                                   : std::get<Rect>(o.shape).half_extents;
    os << "obstacle," << o.id << ',' << c.x << ',' << c.y << ',' << ext.x << ',' << ext.y << ','
       << f.attribution.importance.score_of(o.id) << '\n';
  }
  os << "goal,-1," << scene.goal.x << ',' << scene.goal.y << ',' << scene.goal.x << ',' << scene.goal.y << ",0\n";
  return os.str();
}

inline std::string scene_map_svg(const Scene& scene, const TrialFrame& f, const OutlineStyle& style = {}) {
  const double scale = 50.0;
  const Vec2 lo = scene.bounds.min, hi = scene.bounds.max;
  const double w = (hi.x - lo.x) * scale, h = (hi.y - lo.y) * scale;
  auto X = [&](double x) { return detail::svg_number((x - lo.x) * scale); };
  auto Y = [&](double y) { return detail::svg_number((hi.y - y) * scale); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#f7f7f7\" stroke=\"black\"/>\n";
  const Pose& p = f.pose;
  const auto& obs = f.attribution.observation;
  for (std::size_t j = 0; j < kNumSectors; ++j) {
    const std::size_t k = obs.pooled.contributing_ray[j];
    const Vec2 end = p.position + unit_from_angle(ray_angle(p, k)) * obs.raw.distances[k];
    os << "<line x1=\"" << X(p.position.x) << "\" y1=\"" << Y(p.position.y) << "\" x2=\"" << X(end.x) << "\" y2=\""
       << Y(end.y) << "\" stroke=\"" << detail::score_color(f.attribution.processed.g_star[j])
       << "\" stroke-width=\"2\"/>\n";
  }
  for (const auto& o : scene.obstacles) {
    const double s = f.attribution.importance.score_of(o.id);
    const std::string stroke = "stroke=\"" + detail::score_color(s) + "\" stroke-width=\"" +
                               detail::svg_number(style.width(s)) + "\" fill=\"#bbbbbb\"";
    if (const auto* c = std::get_if<Circle>(&o.shape)) {
      os << "<circle cx=\"" << X(c->center.x) << "\" cy=\"" << Y(c->center.y) << "\" r=\""
         << detail::svg_number(c->radius * scale) << "\" " << stroke << "/>\n";
    } else {
      const auto& r = std::get<Rect>(o.shape);
      os << "<rect x=\"" << X(r.center.x - r.half_extents.x) << "\" y=\"" << Y(r.center.y + r.half_extents.y)
         << "\" width=\"" << detail::svg_number(2 * r.half_extents.x * scale) << "\" height=\""
         << detail::svg_number(2 * r.half_extents.y * scale) << "\" " << stroke << "/>\n";
    }
    os << "<text x=\"" << X(o.center().x) << "\" y=\"" << Y(o.center().y)
       << "\" font-size=\"12\" text-anchor=\"middle\">" << o.id << "</text>\n";
  }
  os << "<circle cx=\"" << X(scene.goal.x) << "\" cy=\"" << Y(scene.goal.y) << "\" r=\"" << 0.3 * scale
     << "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"3\"/>\n";
  // robot as a triangle pointing along the heading
  const Vec2 fwd = unit_from_angle(p.heading), left = unit_from_angle(p.heading + kPi / 2);
  const Vec2 a = p.position + fwd * 0.35, b = p.position - fwd * 0.2 + left * 0.2, c = p.position - fwd * 0.2 - left * 0.2;
  os << "<polygon points=\"" << X(a.x) << ',' << Y(a.y) << ' ' << X(b.x) << ',' << Y(b.y) << ' ' << X(c.x) << ','
     << Y(c.y) << "\" fill=\"black\"/>\n</svg>\n";
  return os.str();
}

}  // namespace xainav
