#pragma once

// Minimal SVG output for the simulation figures: line charts on linear or
// log axes, scatter plots, and the ARI table.

#include "error.hpp"
#include "io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace hsbm::svg {

inline std::string num(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

inline std::string escape(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    default: out += c;
    }
  }
  return out;
}

inline const std::array<const char*, 10>& palette()
{
  static const std::array<const char*, 10> colors{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors;
}

inline std::string color(std::size_t i) { return palette()[i % palette().size()]; }

class Canvas
{
public:
  Canvas(double width, double height) : width_(width), height_(height) {}

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double w = 1.0,
            const std::string& dash = {})
  {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
          << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(w) << '"';
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << '"';
    body_ << "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double w = 1.5,
                const std::string& dash = {})
  {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(w) << '"';
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << '"';
    body_ << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
    body_ << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill, double opacity = 1.0)
  {
    body_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\" fill=\"" << fill << '"';
    if (opacity < 1.0) body_ << " fill-opacity=\"" << num(opacity) << '"';
    body_ << "/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill, const std::string& stroke = "none")
  {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
          << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, double size = 11, const std::string& anchor = "middle",
            double rotate = 0.0)
  {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size)
          << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << '"';
    if (rotate != 0.0) body_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y) << ")\"";
    body_ << '>' << escape(s) << "</text>\n";
  }

  /// Complete document; the timestamp comment is the only non-deterministic
  /// byte range and is omitted when `timestamp` is false.
  std::string str(bool timestamp) const
  {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    if (timestamp) {
      const std::time_t now = std::time(nullptr);
      char buf[32];
      std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      out << "<!-- generated " << buf << " -->\n";
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
        << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

private:
  double width_;
  double height_;
  std::ostringstream body_;
};

/// Maps data coordinates into a rectangle, optionally on log10 scales.
struct Axes
{
  double left = 0, top = 0, width = 0, height = 0;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool log_x = false, log_y = false;

  double tx(double v) const { return log_x ? std::log10(v) : v; }
  double ty(double v) const { return log_y ? std::log10(v) : v; }
  double px(double v) const { return left + (tx(v) - tx(x_min)) / (tx(x_max) - tx(x_min)) * width; }
  double py(double v) const { return top + height - (ty(v) - ty(y_min)) / (ty(y_max) - ty(y_min)) * height; }
};

struct Series
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string dash;
};

namespace detail {

inline std::string tick_label(double v)
{
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-2)) std::snprintf(buf, sizeof(buf), "%.0e", v);
  else std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline std::vector<double> ticks(double lo, double hi, bool log)
{
  std::vector<double> out;
  if (log) {
    const int a = static_cast<int>(std::floor(std::log10(lo)));
    const int b = static_cast<int>(std::ceil(std::log10(hi)));
    for (int e = a; e <= b; ++e)
      for (double m : {1.0, 2.0, 5.0}) {
        const double v = m * std::pow(10.0, e);
        if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) out.push_back(v);
      }
    return out;
  }
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

inline void pad_range(double& lo, double& hi, bool log)
{
  if (log) {
    if (lo == hi) {
      lo /= 2;
      hi *= 2;
    } else {
      lo /= 1.15;
      hi *= 1.15;
    }
  } else {
    const double span = hi - lo == 0.0 ? std::max(1.0, std::abs(lo)) : hi - lo;
    lo -= 0.05 * span;
    hi += 0.05 * span;
  }
}

} // namespace detail

/// Frame, ticks, labels, and a title for `ax`.
inline void draw_frame(Canvas& c, const Axes& ax, const std::string& title, const std::string& x_label,
                       const std::string& y_label)
{
  c.rect(ax.left, ax.top, ax.width, ax.height, "none", "#333333");
  for (double v : detail::ticks(ax.x_min, ax.x_max, ax.log_x)) {
    const double x = ax.px(v);
    c.line(x, ax.top + ax.height, x, ax.top + ax.height + 4, "#333333");
    c.line(x, ax.top, x, ax.top + ax.height, "#e5e5e5", 0.5);
    c.text(x, ax.top + ax.height + 16, detail::tick_label(v), 10);
  }
  for (double v : detail::ticks(ax.y_min, ax.y_max, ax.log_y)) {
    const double y = ax.py(v);
    c.line(ax.left - 4, y, ax.left, y, "#333333");
    c.line(ax.left, y, ax.left + ax.width, y, "#e5e5e5", 0.5);
    c.text(ax.left - 6, y + 3, detail::tick_label(v), 10, "end");
  }
  c.text(ax.left + ax.width / 2, ax.top - 8, title, 12);
  c.text(ax.left + ax.width / 2, ax.top + ax.height + 32, x_label, 11);
  c.text(ax.left - 44, ax.top + ax.height / 2, y_label, 11, "middle", -90);
}

/// Line chart of `series` inside `ax`; ranges are fitted to the data.
inline void draw_lines(Canvas& c, Axes ax, const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label)
{
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((ax.log_x && s.x[i] <= 0) || (ax.log_y && s.y[i] <= 0)) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  if (!std::isfinite(x_lo)) throw ParseError("nothing to plot");
  detail::pad_range(x_lo, x_hi, ax.log_x);
  detail::pad_range(y_lo, y_hi, ax.log_y);
  ax.x_min = x_lo;
  ax.x_max = x_hi;
  ax.y_min = y_lo;
  ax.y_max = y_hi;
  draw_frame(c, ax, title, x_label, y_label);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string col = s.dash.empty() ? color(k) : "#555555";
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((ax.log_x && s.x[i] <= 0) || (ax.log_y && s.y[i] <= 0)) continue;
      pts.emplace_back(ax.px(s.x[i]), ax.py(s.y[i]));
    }
    c.polyline(pts, col, 1.5, s.dash);
    if (s.dash.empty())
      for (const auto& [x, y] : pts) c.circle(x, y, 2.5, col);
    const double ly = ax.top + 14 + 14 * static_cast<double>(k);
    c.line(ax.left + ax.width - 90, ly - 4, ax.left + ax.width - 72, ly - 4, col, 1.5, s.dash);
    c.text(ax.left + ax.width - 68, ly, s.label, 10, "start");
  }
}

/// Grid CSV rows averaged by (regime, n, m) for one metric column.
struct CellMeans
{
  // regime -> n -> m -> mean
  std::map<std::string, std::map<Index, std::map<Index, double>>> values;
};

inline CellMeans cell_means(const CsvTable& t, const std::string& metric)
{
  const std::size_t c_regime = t.require("regime"), c_n = t.require("n"), c_m = t.require("m"),
                    c_v = t.require(metric);
  std::map<std::tuple<std::string, Index, Index>, std::pair<double, int>> acc;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double v = t.number(r, c_v);
    if (!std::isfinite(v)) continue;
    auto& a = acc[{t.rows[r][c_regime], static_cast<Index>(t.number(r, c_n)), static_cast<Index>(t.number(r, c_m))}];
    a.first += v;
    a.second += 1;
  }
  CellMeans out;
  for (const auto& [key, a] : acc)
    out.values[std::get<0>(key)][std::get<1>(key)][std::get<2>(key)] = a.first / a.second;
  return out;
}

/// Log-log mean of `metric` against m, one curve per n, one panel per regime.
/// With `reference`, adds a dashed log(m)/sqrt(m) curve scaled to sit above
/// every empirical point.
inline std::string plot_metric_vs_m(const CsvTable& t, const std::vector<std::string>& metrics, bool reference,
                                    bool timestamp)
{
  if (t.rows.empty()) throw ParseError("results table has no rows");
  std::vector<CellMeans> means;
  for (const auto& metric : metrics) means.push_back(cell_means(t, metric));
  std::set<std::string> regimes;
  for (const auto& cm : means)
    for (const auto& [regime, rest] : cm.values) regimes.insert(regime);
  if (regimes.empty()) throw ParseError("results table has no finite values");

  const double pw = 360, ph = 260, margin = 70;
  Canvas c(margin + metrics.size() * (pw + margin), margin + regimes.size() * (ph + margin));
  std::size_t row = 0;
  for (const auto& regime : regimes) {
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      Axes ax;
      ax.left = margin + k * (pw + margin);
      ax.top = margin + row * (ph + margin);
      ax.width = pw;
      ax.height = ph;
      ax.log_x = ax.log_y = true;
      std::vector<Series> series;
      double scale = 0.0;
      std::set<Index> ms;
      auto it = means[k].values.find(regime);
      if (it == means[k].values.end()) continue;
      for (const auto& [n, by_m] : it->second) {
        Series s;
        s.label = "n=" + std::to_string(n);
        for (const auto& [m, v] : by_m) {
          s.x.push_back(static_cast<double>(m));
          s.y.push_back(v);
          ms.insert(m);
          const double shape = std::log(static_cast<double>(m)) / std::sqrt(static_cast<double>(m));
          if (v > 0) scale = std::max(scale, v / shape);
        }
        series.push_back(std::move(s));
      }
      if (reference && scale > 0 && ms.size() > 1) {
        Series ref;
        ref.label = "log(m)/sqrt(m)";
        ref.dash = "5,4";
        for (Index m : ms) {
          ref.x.push_back(static_cast<double>(m));
          ref.y.push_back(1.25 * scale * std::log(static_cast<double>(m)) / std::sqrt(static_cast<double>(m)));
        }
        series.push_back(std::move(ref));
      }
      draw_lines(c, ax, series, metrics[k] + " (" + regime + ")", "m", "mean");
    }
    ++row;
  }
  return c.str(timestamp);
}

inline std::string plot_convergence(const CsvTable& t, bool timestamp)
{
  return plot_metric_vs_m(t, {"norm_VS_2inf"}, true, timestamp);
}

inline std::string plot_diagnostics(const CsvTable& t, bool timestamp)
{
  return plot_metric_vs_m(t,
                          {"norm_R_Gamma", "norm_hollow", "norm_SW", "norm_Sinv", "norm_V_2inf", "norm_VS_2inf"},
                          false, timestamp);
}

/// Mean ari_true_k per cell laid out with n down the rows and m across.
inline std::string plot_ari_table(const CsvTable& t, bool timestamp, const std::string& metric = "ari_true_k")
{
  if (t.rows.empty()) throw ParseError("results table has no rows");
  const CellMeans cm = cell_means(t, metric);
  if (cm.values.empty()) throw ParseError("results table has no finite values");
  const double cw = 72, ch = 24, head = 64;
  std::set<Index> all_m;
  std::set<Index> all_n;
  for (const auto& [regime, by_n] : cm.values)
    for (const auto& [n, by_m] : by_n) {
      all_n.insert(n);
      for (const auto& [m, v] : by_m) all_m.insert(m);
    }
  const double table_h = head + ch * (static_cast<double>(all_n.size()) + 1) + 30;
  Canvas c(40 + cw * (static_cast<double>(all_m.size()) + 1), 20 + table_h * static_cast<double>(cm.values.size()));
  double y0 = 20;
  for (const auto& [regime, by_n] : cm.values) {
    c.text(20, y0 + 20, metric + ", " + regime + " k_max", 13, "start");
    const double top = y0 + head - ch;
    c.text(20 + cw / 2, top + 16, "n \\ m", 11);
    std::size_t col = 1;
    for (Index m : all_m) c.text(20 + cw * col++ + cw / 2, top + 16, std::to_string(m), 11);
    c.line(20, top + ch, 20 + cw * (all_m.size() + 1), top + ch, "#333333");
    c.line(20 + cw, top, 20 + cw, top + ch * (all_n.size() + 1), "#333333");
    std::size_t row = 1;
    for (Index n : all_n) {
      const double y = top + ch * row;
      c.text(20 + cw / 2, y + 16, std::to_string(n), 11);
      col = 1;
      auto it = by_n.find(n);
      for (Index m : all_m) {
        const double x = 20 + cw * col++;
        if (it == by_n.end() || !it->second.count(m)) continue;
        const double v = it->second.at(m);
        const double shade = std::clamp(v, 0.0, 1.0);
        char fill[16];
        std::snprintf(fill, sizeof(fill), "#%02x%02x%02x", static_cast<int>(255 - 80 * shade),
                      static_cast<int>(255 - 30 * shade), 255);
        c.rect(x + 1, y + 1, cw - 2, ch - 2, fill);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        c.text(x + cw / 2, y + 16, buf, 11);
      }
      ++row;
    }
    y0 += table_h;
  }
  return c.str(timestamp);
}

/// First two coordinates of an embedding CSV, colored by its type column when
/// present.
inline std::string plot_scatter(const CsvTable& t, bool timestamp)
{
  if (t.rows.empty()) throw ParseError("embedding table has no rows");
  const std::size_t cx = t.require("x1");
  const std::size_t cy = t.require("x2");
  const auto ctype = t.column("type");
  const double pw = 480, ph = 420, margin = 70;
  Canvas c(pw + 2 * margin, ph + 2 * margin);
  Axes ax;
  ax.left = margin;
  ax.top = margin;
  ax.width = pw;
  ax.height = ph;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    x_lo = std::min(x_lo, t.number(r, cx));
    x_hi = std::max(x_hi, t.number(r, cx));
    y_lo = std::min(y_lo, t.number(r, cy));
    y_hi = std::max(y_hi, t.number(r, cy));
  }
  detail::pad_range(x_lo, x_hi, false);
  detail::pad_range(y_lo, y_hi, false);
  ax.x_min = x_lo;
  ax.x_max = x_hi;
  ax.y_min = y_lo;
  ax.y_max = y_hi;
  draw_frame(c, ax, ctype ? "embedding, colored by type" : "embedding", "x1", "x2");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::size_t type = ctype ? static_cast<std::size_t>(t.number(r, *ctype)) : 0;
    c.circle(ax.px(t.number(r, cx)), ax.py(t.number(r, cy)), 2.2, color(type), 0.7);
  }
  return c.str(timestamp);
}

} // namespace hsbm::svg
