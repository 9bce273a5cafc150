#include "uq/svg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace uq::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
                                    "#393b79", "#637939", "#8c6d31", "#843c39"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string open_svg(int w, int h) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
      w, h, w, h, w, h);
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                 int size = 11, double rotate = 0.0) {
  std::string transform;
  if (rotate != 0.0) transform = fmt::format(" transform=\"rotate({:.0f} {:.1f} {:.1f})\"", rotate, x, y);
  return fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"{}\" font-size=\"{}\"{}>{}</text>\n",
                     x, y, anchor, size, transform, esc(s));
}

}  // namespace

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(sorted.size() - 1, lo + 1);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
}

std::string line_chart(const Axes& axes, const std::vector<Series>& series) {
  constexpr int kW = 640;
  constexpr int kH = 420;
  constexpr double kLeft = 60;
  constexpr double kRight = 170;
  constexpr double kTop = 36;
  constexpr double kBottom = 50;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  const double xspan = axes.x_max > axes.x_min ? axes.x_max - axes.x_min : 1.0;
  const double yspan = axes.y_max > axes.y_min ? axes.y_max - axes.y_min : 1.0;
  auto px = [&](double x) { return kLeft + (x - axes.x_min) / xspan * pw; };
  auto py = [&](double y) { return kTop + ph - (y - axes.y_min) / yspan * ph; };

  std::string out = open_svg(kW, kH);
  out += text(kW / 2.0, 20, axes.title, "middle", 13);
  out += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
      "stroke=\"#333\"/>\n",
      kLeft, kTop, pw, ph);
  for (int t = 0; t <= 5; ++t) {
    const double fx = axes.x_min + xspan * t / 5.0;
    const double fy = axes.y_min + yspan * t / 5.0;
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"#eee\"/>\n",
                       px(fx), kTop, kTop + ph);
    out += fmt::format("<line x1=\"{1:.1f}\" y1=\"{0:.1f}\" x2=\"{2:.1f}\" y2=\"{0:.1f}\" stroke=\"#eee\"/>\n",
                       py(fy), kLeft, kLeft + pw);
    out += text(px(fx), kTop + ph + 16, fmt::format("{:.2f}", fx));
    out += text(kLeft - 6, py(fy) + 4, fmt::format("{:.2f}", fy), "end");
  }
  out += text(kLeft + pw / 2, kH - 12, axes.x_label);
  out += text(16, kTop + ph / 2, axes.y_label, "middle", 11, -90);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    std::string pts;
    for (const auto& p : series[s].points) {
      if (!pts.empty()) pts.push_back(' ');
      pts += fmt::format("{:.2f},{:.2f}", px(p.x), py(std::clamp(p.y, axes.y_min, axes.y_max)));
    }
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                       color, pts);
    const double ly = kTop + 10 + 16.0 * static_cast<double>(s);
    out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       kLeft + pw + 12, ly, kLeft + pw + 30, ly, color);
    out += text(kLeft + pw + 36, ly + 4, series[s].name, "start");
  }
  out += "</svg>\n";
  return out;
}

std::string heatmap(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<std::vector<std::optional<double>>>& values) {
  const int n = static_cast<int>(labels.size());
  constexpr int kCell = 36;
  constexpr int kLeft = 110;
  constexpr int kTop = 110;
  const int w = kLeft + n * kCell + 20;
  const int h = kTop + n * kCell + 20;
  std::string out = open_svg(w, h);
  out += "<defs><pattern id=\"na\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
         "<rect width=\"6\" height=\"6\" fill=\"#ddd\"/><path d=\"M0,6 L6,0\" stroke=\"#999\"/>"
         "</pattern></defs>\n";
  out += text(w / 2.0, 18, title, "middle", 13);
  for (int i = 0; i < n; ++i) {
    out += text(kLeft - 6, kTop + i * kCell + kCell / 2.0 + 4, labels[i], "end");
    const double lx = kLeft + i * kCell + kCell / 2.0;
    out += text(lx, kTop - 8, labels[i], "start", 11, -60);
    for (int j = 0; j < n; ++j) {
      const auto& v = values[i][j];
      std::string fill = "url(#na)";
      if (v) {
        // Diverging blue (-1) / white (0) / red (+1).
        const double t = std::clamp(*v, -1.0, 1.0);
        const int r = t >= 0 ? 255 : static_cast<int>(std::lround(255 * (1 + t)));
        const int b = t <= 0 ? 255 : static_cast<int>(std::lround(255 * (1 - t)));
        const int g = static_cast<int>(std::lround(255 * (1 - std::abs(t))));
        fill = fmt::format("rgb({},{},{})", r, g, b);
      }
      out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"white\"/>\n",
                         kLeft + j * kCell, kTop + i * kCell, kCell, kCell, fill);
      if (v) {
        out += text(kLeft + j * kCell + kCell / 2.0, kTop + i * kCell + kCell / 2.0 + 4,
                    fmt::format("{:.2f}", *v), "middle", 9);
      }
    }
  }
  out += "</svg>\n";
  return out;
}

std::string box_plot(const std::string& title, const std::string& y_label,
                     const std::vector<BoxGroup>& groups) {
  constexpr int kSlot = 44;
  constexpr double kLeft = 60;
  constexpr double kTop = 36;
  constexpr double kPh = 300;
  const int w = static_cast<int>(kLeft) + kSlot * static_cast<int>(groups.size()) + 30;
  const int h = static_cast<int>(kTop + kPh) + 90;

  double lo = 0.0;
  double hi = 1.0;
  bool first = true;
  for (const auto& g : groups) {
    for (double v : g.values) {
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi <= lo) hi = lo + 1.0;
  auto py = [&](double v) { return kTop + (v - lo) / (hi - lo) * kPh; };  // rank 1 on top

  std::string out = open_svg(w, h);
  out += text(w / 2.0, 20, title, "middle", 13);
  out += text(16, kTop + kPh / 2, y_label, "middle", 11, -90);
  for (int t = static_cast<int>(lo); t <= static_cast<int>(hi); ++t) {
    out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#eee\"/>\n",
                       kLeft, py(t), w - 20, py(t));
    out += text(kLeft - 6, py(t) + 4, std::to_string(t), "end");
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const double cx = kLeft + kSlot * (static_cast<double>(gi) + 0.5);
    std::vector<double> v = groups[gi].values;
    std::sort(v.begin(), v.end());
    out += text(cx, kTop + kPh + 14, groups[gi].name, "end", 10, -45);
    if (v.empty()) continue;
    const double q1 = quantile(v, 0.25);
    const double med = quantile(v, 0.5);
    const double q3 = quantile(v, 0.75);
    const char* color = kPalette[gi % kPaletteSize];
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"#555\"/>\n",
                       cx, py(v.front()), py(v.back()));
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{}\" height=\"{:.1f}\" fill=\"{}\" "
                       "fill-opacity=\"0.6\" stroke=\"#333\"/>\n",
                       cx - 12, py(q1), 24, std::max(1.0, py(q3) - py(q1)), color);
    out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"black\" stroke-width=\"2\"/>\n",
                       cx - 12, py(med), cx + 12, py(med));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace uq::svg
