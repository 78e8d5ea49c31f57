#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrotter {

// Minimal static line plot. Output depends only on the data, so identical
// inputs give identical bytes.
class SvgPlot {
 public:
  struct Series {
    std::string name;
    std::vector<double> x, y;
    bool dashed = false;
    bool markers = true;
    bool lines = true;
  };

  SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx = false,
          bool logy = false)
      : title_(std::move(title)),
        xlabel_(std::move(xlabel)),
        ylabel_(std::move(ylabel)),
        logx_(logx),
        logy_(logy) {}

  void add(Series s) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y lengths differ");
    series_.push_back(std::move(s));
  }

  bool empty() const { return series_.empty(); }

  std::string render() const {
    double x0 = inf(), x1 = -inf(), y0 = inf(), y1 = -inf();
    for (const auto& s : series_)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!usable(s.x[i], logx_) || !usable(s.y[i], logy_)) continue;
        const double x = tx(s.x[i]), y = ty(s.y[i]);
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    if (x0 > x1) x0 = 0, x1 = 1;
    if (y0 > y1) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double padx = 0.04 * (x1 - x0), pady = 0.06 * (y1 - y0);
    x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;

    auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * kPlotW; };
    auto py = [&](double y) { return kTop + kPlotH - (ty(y) - y0) / (y1 - y0) * kPlotH; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape(title_) << "</text>\n";
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW << "\" height=\""
      << kPlotH << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int k = 0; k <= 4; ++k) {
      const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
      const double sx = kLeft + kPlotW * k / 4.0, sy = kTop + kPlotH - kPlotH * k / 4.0;
      o << "<line x1=\"" << num(sx) << "\" y1=\"" << kTop + kPlotH << "\" x2=\"" << num(sx)
        << "\" y2=\"" << kTop + kPlotH + 5 << "\" stroke=\"black\"/>\n";
      o << "<text x=\"" << num(sx) << "\" y=\"" << kTop + kPlotH + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(logx_ ? std::pow(10.0, fx) : fx) << "</text>\n";
      o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(sy) << "\" x2=\"" << kLeft << "\" y2=\""
        << num(sy) << "\" stroke=\"black\"/>\n";
      o << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(sy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(logy_ ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    o << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(xlabel_)
      << (logx_ ? " (log)" : "") << "</text>\n";
    o << "<text transform=\"translate(18," << kTop + kPlotH / 2
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(ylabel_) << (logy_ ? " (log)" : "") << "</text>\n";

    for (std::size_t si = 0; si < series_.size(); ++si) {
      const auto& s = series_[si];
      const char* colour = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (usable(s.x[i], logx_) && usable(s.y[i], logy_)) pts.emplace_back(px(s.x[i]), py(s.y[i]));
      if (s.lines && pts.size() > 1) {
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
          o << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
        o << "\"/>\n";
      }
      if (s.markers)
        for (const auto& [x, y] : pts)
          o << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << colour
            << "\"/>\n";
      const double ly = kTop + 14 + 16.0 * static_cast<double>(si);
      o << "<line x1=\"" << kLeft + kPlotW + 12 << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << kLeft + kPlotW + 32 << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << colour
        << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
      o << "<text x=\"" << kLeft + kPlotW + 36 << "\" y=\"" << num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
  }

 private:
  static constexpr int kWidth = 820, kHeight = 480;
  static constexpr int kLeft = 70, kTop = 40, kPlotW = 520, kPlotH = 380;
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  static double inf() { return std::numeric_limits<double>::infinity(); }
  static bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }
  double tx(double x) const { return logx_ ? std::log10(x) : x; }
  double ty(double y) const { return logy_ ? std::log10(y) : y; }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
      }
    }
    return out;
  }

  std::string title_, xlabel_, ylabel_;
  bool logx_, logy_;
  std::vector<Series> series_;
};

}  // namespace entrotter
