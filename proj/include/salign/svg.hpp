// Copyright 2026  salign authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "salign/align.hpp"
#include "salign/dsp.hpp"
#include "salign/error.hpp"

// Stacked-panel SVG: one row per alignment tier (interval boxes, centered
// symbols, boundary ticks), a log-magnitude spectrogram heat panel, and the
// waveform envelope at the bottom, all on a shared time axis.

namespace salign {

struct NamedTier {
  std::string name;
  AlignmentTier tier;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string gray(double v01) {
  const int g = 255 - static_cast<int>(std::lround(std::clamp(v01, 0.0, 1.0) * 255.0));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", g, g, g);
  return buf;
}

}  // namespace detail

struct SvgLayout {
  double px_per_s = 200.0;
  double tier_height = 36.0;
  double spectrogram_height = 180.0;
  double waveform_height = 90.0;
  double margin = 28.0;
  std::size_t max_spec_cols = 512;
  std::size_t max_spec_rows = 128;
};

/// Renders the figure-style stack: tiers on top, spectrogram, waveform.
inline std::string render_alignment_svg(const Waveform& w, const std::vector<NamedTier>& tiers,
                                        const FrameSpec& spec, std::size_t n_fft,
                                        const SvgLayout& layout = {}) {
  if (w.samples.empty()) throw_error("cannot render an empty waveform");
  if (tiers.empty()) throw_error("need at least one tier to render");
  for (const auto& t : tiers) t.tier.validate();

  const double dur = w.duration_s();
  const double left = layout.margin;
  const double width = dur * layout.px_per_s;
  const double total_w = width + 2 * layout.margin;
  auto x_of = [&](double t) { return left + t * layout.px_per_s; };

  std::string svg;
  double y = layout.margin;
  const double total_h = layout.margin * 2 + tiers.size() * layout.tier_height +
                         layout.spectrogram_height + layout.waveform_height + 20.0;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         detail::fmt(total_w) + "\" height=\"" + detail::fmt(total_h) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + detail::fmt(total_w) + "\" height=\"" +
         detail::fmt(total_h) + "\" fill=\"white\"/>\n";

  // tier rows
  for (const auto& nt : tiers) {
    svg += "<g class=\"tier\">\n";
    svg += "<text x=\"2\" y=\"" + detail::fmt(y + layout.tier_height * 0.65) +
           "\" font-size=\"10\" fill=\"#444\">" + detail::xml_escape(nt.name) + "</text>\n";
    for (const auto& iv : nt.tier.intervals) {
      const double x0 = x_of(iv.start_s), x1 = x_of(iv.end_s);
      svg += "<rect class=\"iv\" x=\"" + detail::fmt(x0) + "\" y=\"" + detail::fmt(y) +
             "\" width=\"" + detail::fmt(x1 - x0) + "\" height=\"" +
             detail::fmt(layout.tier_height) +
             "\" fill=\"none\" stroke=\"#333\" stroke-width=\"0.75\"/>\n";
      svg += "<text class=\"sym\" x=\"" + detail::fmt((x0 + x1) / 2.0) + "\" y=\"" +
             detail::fmt(y + layout.tier_height * 0.65) +
             "\" font-size=\"12\" text-anchor=\"middle\">" + detail::xml_escape(iv.symbol) +
             "</text>\n";
    }
    for (std::size_t i = 0; i + 1 < nt.tier.size(); ++i) {
      const double xb = x_of(nt.tier.intervals[i].end_s);
      svg += "<line class=\"tick\" x1=\"" + detail::fmt(xb) + "\" y1=\"" + detail::fmt(y) +
             "\" x2=\"" + detail::fmt(xb) + "\" y2=\"" + detail::fmt(y + layout.tier_height) +
             "\" stroke=\"#c00\" stroke-width=\"1\"/>\n";
    }
    svg += "</g>\n";
    y += layout.tier_height;
  }

  // spectrogram heat panel, max-pooled onto a bounded cell grid
  {
    const auto spectra = magnitude_spectrogram(w, spec, n_fft);
    const std::size_t m = spectra.size();
    const std::size_t n_bins = n_fft / 2 + 1;
    const std::size_t cols = std::min(layout.max_spec_cols, std::max<std::size_t>(m, 1));
    const std::size_t rows = std::min(layout.max_spec_rows, n_bins);
    std::vector<double> cell(cols * rows, 0.0);
    double lo = 1e30, hi = -1e30;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t f0 = c * m / cols, f1 = std::max(f0 + 1, (c + 1) * m / cols);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t b0 = r * n_bins / rows, b1 = std::max(b0 + 1, (r + 1) * n_bins / rows);
        double v = 0.0;
        for (std::size_t f = f0; f < f1 && f < m; ++f)
          for (std::size_t b = b0; b < b1; ++b) v = std::max(v, spectra[f][b]);
        const double db = std::log10(std::max(v, 1e-10));
        cell[c * rows + r] = db;
        lo = std::min(lo, db);
        hi = std::max(hi, db);
      }
    }
    const double range = (hi > lo) ? hi - lo : 1.0;
    svg += "<g class=\"spectrogram\">\n";
    const double cell_w = width / static_cast<double>(cols);
    const double cell_h = layout.spectrogram_height / static_cast<double>(rows);
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t r = 0; r < rows; ++r) {
        const double v01 = (cell[c * rows + r] - lo) / range;
        // row 0 is DC; draw low frequencies at the bottom
        const double cy = y + layout.spectrogram_height - (r + 1) * cell_h;
        svg += "<rect x=\"" + detail::fmt(left + c * cell_w) + "\" y=\"" + detail::fmt(cy) +
               "\" width=\"" + detail::fmt(cell_w + 0.1) + "\" height=\"" +
               detail::fmt(cell_h + 0.1) + "\" fill=\"" + detail::gray(v01) + "\"/>\n";
      }
    }
    svg += "</g>\n";
    y += layout.spectrogram_height;
  }

  // waveform min/max envelope per pixel column
  {
    svg += "<g class=\"waveform\">\n";
    const double mid = y + layout.waveform_height / 2.0;
    const double half = layout.waveform_height / 2.0 - 2.0;
    const auto n_cols = static_cast<std::size_t>(std::max(1.0, std::floor(width)));
    std::string path;
    for (std::size_t c = 0; c < n_cols; ++c) {
      const std::size_t s0 = c * w.samples.size() / n_cols;
      const std::size_t s1 = std::max(s0 + 1, (c + 1) * w.samples.size() / n_cols);
      double vmin = 1.0, vmax = -1.0;
      for (std::size_t s = s0; s < s1 && s < w.samples.size(); ++s) {
        vmin = std::min(vmin, w.samples[s]);
        vmax = std::max(vmax, w.samples[s]);
      }
      const double xx = left + static_cast<double>(c);
      svg += "<line x1=\"" + detail::fmt(xx) + "\" y1=\"" + detail::fmt(mid - vmax * half) +
             "\" x2=\"" + detail::fmt(xx) + "\" y2=\"" + detail::fmt(mid - vmin * half) +
             "\" stroke=\"#06c\" stroke-width=\"1\"/>\n";
    }
    svg += "<line x1=\"" + detail::fmt(left) + "\" y1=\"" + detail::fmt(mid) + "\" x2=\"" +
           detail::fmt(left + width) + "\" y2=\"" + detail::fmt(mid) +
           "\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
    svg += "</g>\n";
    y += layout.waveform_height;
  }

  // time axis
  svg += "<g class=\"axis\">\n";
  for (double t = 0.0; t <= dur + 1e-9; t += 0.1) {
    const double xx = x_of(t);
    svg += "<line x1=\"" + detail::fmt(xx) + "\" y1=\"" + detail::fmt(y) + "\" x2=\"" +
           detail::fmt(xx) + "\" y2=\"" + detail::fmt(y + 4.0) +
           "\" stroke=\"#333\" stroke-width=\"0.5\"/>\n";
    char label[16];
    std::snprintf(label, sizeof label, "%.1f", t);
    svg += "<text x=\"" + detail::fmt(xx) + "\" y=\"" + detail::fmt(y + 14.0) +
           "\" font-size=\"8\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace salign
