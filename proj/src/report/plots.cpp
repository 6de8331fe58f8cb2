// Copyright 2026 The SwinScan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "swinscan/report/plots.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>

#include "swinscan/error.hpp"

namespace swinscan::report {

namespace {

constexpr double kW = 640, kH = 400;
constexpr double kLeft = 60, kRight = 20, kTop = 40, kBottom = 60;
constexpr double kPlotW = kW - kLeft - kRight, kPlotH = kH - kTop - kBottom;

std::string xml_escape(std::string_view s) {
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

std::string header(std::string_view title) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" font-family=\"Helvetica\" font-size=\"16\" text-anchor=\"middle\">{3}</text>\n"
      "<line x1=\"{4}\" y1=\"{5}\" x2=\"{4}\" y2=\"{6}\" stroke=\"black\"/>\n"
      "<line x1=\"{4}\" y1=\"{6}\" x2=\"{7}\" y2=\"{6}\" stroke=\"black\"/>\n",
      kW, kH, kW / 2, xml_escape(title), kLeft, kTop, kTop + kPlotH, kLeft + kPlotW);
}

// Maps a value in [lo, hi] to a y coordinate.
double y_of(double v, double lo, double hi) { return kTop + kPlotH * (1.0 - (v - lo) / (hi - lo)); }

void y_ticks(std::string& out, double lo, double hi, int n, std::string_view suffix) {
  for (int i = 0; i <= n; ++i) {
    const double v = lo + (hi - lo) * i / n;
    const double y = y_of(v, lo, hi);
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#cccccc\"/>\n"
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"Helvetica\" font-size=\"10\" text-anchor=\"end\">{:g}{}</text>\n",
        kLeft, y, kLeft + kPlotW, y, kLeft - 6, y + 3, v, suffix);
  }
}

}  // namespace

std::string epoch_chart_svg(const std::vector<train::EpochMetrics>& history) {
  if (history.empty()) throw InputError("cannot plot an empty history");
  struct Series {
    const char* name;
    const char* colour;
    metrics::Rate train::EpochMetrics::*field;
  };
  static constexpr std::array<Series, 4> series{{
      {"accuracy", "#1f77b4", &train::EpochMetrics::accuracy},
      {"precision", "#ff7f0e", &train::EpochMetrics::precision},
      {"recall", "#2ca02c", &train::EpochMetrics::recall},
      {"f1", "#d62728", &train::EpochMetrics::f1},
  }};

  std::string out = header("Epoch comparison");
  y_ticks(out, 0.0, 1.0, 5, "");
  const std::size_t first = history.front().epoch, last = history.back().epoch;
  const auto x_of = [&](std::size_t epoch) {
    return last == first ? kLeft + kPlotW / 2
                         : kLeft + kPlotW * static_cast<double>(epoch - first) / static_cast<double>(last - first);
  };
  for (const auto& m : history)
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"Helvetica\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
                       x_of(m.epoch), kTop + kPlotH + 14, m.epoch);
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"Helvetica\" font-size=\"12\" text-anchor=\"middle\">epoch</text>\n",
                     kLeft + kPlotW / 2, kH - 24);

  for (std::size_t s = 0; s < series.size(); ++s) {
    std::string points;
    for (const auto& m : history) {
      const auto v = m.*(series[s].field);
      if (!v) continue;
      if (!points.empty()) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", x_of(m.epoch), y_of(std::clamp(*v, 0.0, 1.0), 0.0, 1.0));
    }
    out += fmt::format("<polyline data-series=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                       series[s].name, series[s].colour, points);
    const double ly = kH - 8;
    const double lx = kLeft + 130.0 * static_cast<double>(s);
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"/>"
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"Helvetica\" font-size=\"11\">{}</text>\n",
        lx, ly - 4, lx + 20, ly - 4, series[s].colour, lx + 24, ly, series[s].name);
  }
  return out + "</svg>\n";
}

std::string comparison_chart_svg(const std::vector<metrics::ComparisonRow>& rows) {
  std::vector<const metrics::ComparisonRow*> bars;
  for (const auto& r : rows)
    if (r.accuracy_percent) bars.push_back(&r);
  if (bars.empty()) throw InputError("no accuracies to plot");

  std::string out = header("Comparison of algorithms (accuracy %)");
  y_ticks(out, 0.0, 100.0, 5, "");
  const double slot = kPlotW / static_cast<double>(bars.size());
  const double bw = slot * 0.7;
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double v = std::clamp(*bars[i]->accuracy_percent, 0.0, 100.0);
    const double x = kLeft + slot * static_cast<double>(i) + (slot - bw) / 2;
    const double y = y_of(v, 0.0, 100.0);
    const bool own = i + 1 == bars.size();
    out += fmt::format(
        "<rect data-label=\"{}\" data-value=\"{:.2f}\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
        "fill=\"{}\"{}/>\n",
        xml_escape(bars[i]->algorithm), *bars[i]->accuracy_percent, x, y, bw, kTop + kPlotH - y,
        own ? "#f2c200" : "#4a6fa5", own ? " stroke=\"black\" stroke-width=\"1.5\"" : "");
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"Helvetica\" font-size=\"9\" text-anchor=\"middle\">{}</text>\n"
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"Helvetica\" font-size=\"9\" text-anchor=\"middle\">{}</text>\n",
        x + bw / 2, y - 4, xml_escape(bars[i]->accuracy), x + bw / 2, kTop + kPlotH + 14, xml_escape(bars[i]->algorithm));
  }
  return out + "</svg>\n";
}

}  // namespace swinscan::report
