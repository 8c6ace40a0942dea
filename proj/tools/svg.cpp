#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "cli.hpp"

namespace plvote::cli {

namespace {

constexpr double kWidth = 760, kHeight = 480;
constexpr double kLeft = 70, kRight = 190, kTop = 44, kBottom = 56;
constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;
// Reference curves can grow like e^beta; keep the data readable.
constexpr double kMaxSpanOverData = 1e3;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

bool usable(const CsvRow& r) { return r.status.rfind("error", 0) != 0; }

struct Axes {
  double x0, x1, ylog0, ylog1;

  double px(double beta) const { return kLeft + (beta - x0) / (x1 - x0) * kPlotW; }
  // Log scale; values above the range are clipped to the top edge.
  double py(double v) const {
    const double l = std::clamp(std::log10(std::max(v, 1e-300)), ylog0, ylog1);
    return kTop + kPlotH - (l - ylog0) / (ylog1 - ylog0) * kPlotH;
  }
  bool clipped(double v) const { return std::isinf(v) || std::log10(v) > ylog1; }
};

Axes make_axes(const std::vector<CsvRow>& rows) {
  double x0 = INFINITY, x1 = -INFINITY, data_max = 1.0, ref_max = 1.0, lo = 1.0;
  for (const auto& r : rows) {
    if (!usable(r)) continue;
    x0 = std::min(x0, r.beta);
    x1 = std::max(x1, r.beta);
    for (const auto& v : {r.empirical_mean, r.population_distortion, r.ci_hi})
      if (v && std::isfinite(*v)) data_max = std::max(data_max, *v);
    for (const auto& v : {r.ub, r.lb})
      if (v && std::isfinite(*v)) ref_max = std::max(ref_max, *v);
    for (const auto& v : {r.empirical_mean, r.population_distortion, r.ci_lo, r.lb})
      if (v && *v > 0.0) lo = std::min(lo, *v);
  }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0;
  if (x0 == x1) x0 -= 1.0, x1 += 1.0;
  const double top = std::min(std::max(data_max, ref_max), data_max * kMaxSpanOverData);
  double ylog0 = std::floor(std::log10(lo));
  double ylog1 = std::ceil(std::log10(top * 1.05));
  if (ylog1 <= ylog0) ylog1 = ylog0 + 1.0;
  return {x0, x1, ylog0, ylog1};
}

void draw_frame(std::ostringstream& os, const Axes& ax, const std::string& title) {
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"16\" font-family=\"sans-serif\">" << esc(title)
     << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW << "\" height=\"" << kPlotH
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  // Decade ticks on y, five ticks on x.
  for (double l = ax.ylog0; l <= ax.ylog1 + 1e-9; l += 1.0) {
    const double y = ax.py(std::pow(10.0, l));
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft + kPlotW << "\" y2=\"" << y
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
       << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" << num(std::pow(10.0, l))
       << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double b = ax.x0 + (ax.x1 - ax.x0) * i / 4.0;
    const double x = ax.px(b);
    os << "<line x1=\"" << x << "\" y1=\"" << kTop + kPlotH << "\" x2=\"" << x << "\" y2=\""
       << kTop + kPlotH + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << kTop + kPlotH + 18
       << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" << num(b) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 14
     << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">beta</text>\n";
  os << "<text x=\"18\" y=\"" << kTop + kPlotH / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" transform=\"rotate(-90 18 " << kTop + kPlotH / 2
     << ")\">distortion (log scale)</text>\n";
}

void polyline(std::ostringstream& os, const std::vector<std::pair<double, double>>& pts, const Axes& ax,
              const char* color, const char* dash) {
  if (pts.size() < 2) return;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (*dash) os << " stroke-dasharray=\"" << dash << "\"";
  os << " points=\"";
  for (const auto& [b, v] : pts) os << ax.px(b) << ',' << ax.py(v) << ' ';
  os << "\"/>\n";
}

}  // namespace

std::string render_svg(const std::vector<CsvRow>& rows, const std::string& title) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  const Axes ax = make_axes(rows);
  draw_frame(os, ax, title);

  std::map<std::string, std::vector<const CsvRow*>> by_rule;
  for (const auto& r : rows)
    if (usable(r)) by_rule[r.rule].push_back(&r);

  if (by_rule.empty()) {
    os << "<text class=\"warning\" x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kTop + kPlotH / 2
       << "\" font-size=\"14\" fill=\"#b00\" text-anchor=\"middle\" font-family=\"sans-serif\">"
       << "warning: no data rows</text>\n";
    os << "</svg>\n";
    return os.str();
  }

  std::size_t color_index = 0;
  double legend_y = kTop + 8;
  for (auto& [rule, pts] : by_rule) {
    const char* color = kPalette[color_index++ % std::size(kPalette)];
    std::stable_sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->beta < b->beta; });
    std::vector<std::pair<double, double>> emp, ub, lb;
    for (const CsvRow* r : pts) {
      if (r->empirical_mean && std::isfinite(*r->empirical_mean)) emp.emplace_back(r->beta, *r->empirical_mean);
      if (r->ub && std::isfinite(*r->ub)) ub.emplace_back(r->beta, *r->ub);
      if (r->lb && std::isfinite(*r->lb) && *r->lb > 0.0) lb.emplace_back(r->beta, *r->lb);
    }
    polyline(os, emp, ax, color, "");
    polyline(os, ub, ax, color, "6 4");
    polyline(os, lb, ax, color, "2 3");
    for (const CsvRow* r : pts) {
      const double x = ax.px(r->beta);
      if (r->empirical_mean) {
        const double v = *r->empirical_mean;
        if (ax.clipped(v)) {
          // Clipped marker: downward triangle on the top edge.
          os << "<path class=\"clipped\" d=\"M" << x - 5 << ',' << kTop << " L" << x + 5 << ',' << kTop << " L"
             << x << ',' << kTop + 8 << " Z\" fill=\"" << color << "\"><title>" << esc(rule) << " beta="
             << num(r->beta) << ": " << (std::isinf(v) ? std::string("unbounded") : num(v))
             << "</title></path>\n";
        } else {
          os << "<circle cx=\"" << x << "\" cy=\"" << ax.py(v) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
          if (r->ci_lo && r->ci_hi)
            os << "<line x1=\"" << x << "\" y1=\"" << ax.py(std::max(*r->ci_lo, 1e-300)) << "\" x2=\"" << x
               << "\" y2=\"" << ax.py(*r->ci_hi) << "\" stroke=\"" << color << "\"/>\n";
        }
      }
      if (r->population_distortion && std::isfinite(*r->population_distortion))
        os << "<circle cx=\"" << x << "\" cy=\"" << ax.py(*r->population_distortion) << "\" r=\"5\" fill=\"none\" stroke=\""
           << color << "\"/>\n";
    }
    const double lx = kLeft + kPlotW + 14;
    os << "<line x1=\"" << lx << "\" y1=\"" << legend_y << "\" x2=\"" << lx + 22 << "\" y2=\"" << legend_y
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << lx + 28 << "\" y=\"" << legend_y + 4 << "\" font-size=\"12\" font-family=\"sans-serif\">"
       << esc(rule) << "</text>\n";
    legend_y += 18;
  }
  const double lx = kLeft + kPlotW + 14;
  legend_y += 8;
  os << "<line x1=\"" << lx << "\" y1=\"" << legend_y << "\" x2=\"" << lx + 22 << "\" y2=\"" << legend_y
     << "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n<text x=\"" << lx + 28 << "\" y=\"" << legend_y + 4
     << "\" font-size=\"11\" font-family=\"sans-serif\">upper bound</text>\n";
  legend_y += 16;
  os << "<line x1=\"" << lx << "\" y1=\"" << legend_y << "\" x2=\"" << lx + 22 << "\" y2=\"" << legend_y
     << "\" stroke=\"black\" stroke-dasharray=\"2 3\"/>\n<text x=\"" << lx + 28 << "\" y=\"" << legend_y + 4
     << "\" font-size=\"11\" font-family=\"sans-serif\">lower bound</text>\n";
  legend_y += 16;
  os << "<circle cx=\"" << lx + 11 << "\" cy=\"" << legend_y << "\" r=\"5\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << lx + 28 << "\" y=\"" << legend_y + 4
     << "\" font-size=\"11\" font-family=\"sans-serif\">population limit</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace plvote::cli
