#pragma once

// Minimal SVG line charts with standard-error bands.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "viboost/error.hpp"
#include "viboost/harness/experiment.hpp"

namespace viboost::harness {

struct Series {
  std::string name;
  const Summary* values = nullptr;
  std::string colour;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

/// Renders one chart; rounds are 1-based on the x axis. NaN entries are skipped.
inline std::string render_chart(const std::string& title, const std::string& y_label,
                                const std::vector<Series>& series) {
  constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  std::size_t rounds = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    rounds = std::max(rounds, s.values->mean.size());
    for (std::size_t i = 0; i < s.values->mean.size(); ++i) {
      const double m = s.values->mean[i];
      const double e = std::isfinite(s.values->se[i]) ? s.values->se[i] : 0.0;
      if (!std::isfinite(m)) continue;
      lo = std::min(lo, m - e);
      hi = std::max(hi, m + e);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    const double pad = std::max(1e-3, std::fabs(lo) * 0.1);
    lo -= pad;
    hi += pad;
  }
  const double x_span = rounds > 1 ? static_cast<double>(rounds - 1) : 1.0;
  auto px = [&](std::size_t i) {
    const double frac = rounds > 1 ? static_cast<double>(i) / x_span : 0.5;
    return kLeft + frac * (kW - kLeft - kRight);
  };
  auto py = [&](double v) { return kTop + (hi - v) / (hi - lo) * (kH - kTop - kBottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
     << "</text>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
     << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
     << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << detail::fmt(py(v) + 4)
       << "\" text-anchor=\"end\">" << detail::fmt(v) << "</text>\n";
  }
  os << "<text x=\"" << kLeft << "\" y=\"" << kH - kBottom + 18 << "\">1</text>\n";
  os << "<text x=\"" << kW - kRight << "\" y=\"" << kH - kBottom + 18
     << "\" text-anchor=\"end\">" << rounds << "</text>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">round</text>\n";
  os << "<text x=\"16\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 16 " << kH / 2
     << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const auto& mean = s.values->mean;
    const auto& se = s.values->se;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      if (std::isfinite(mean[i])) idx.push_back(i);
    }
    if (idx.empty()) continue;
    auto err = [&](std::size_t i) { return std::isfinite(se[i]) ? se[i] : 0.0; };
    if (idx.size() > 1) {
      os << "<polygon fill=\"" << s.colour << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t i : idx) os << detail::fmt(px(i)) << ',' << detail::fmt(py(mean[i] + err(i))) << ' ';
      for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
        os << detail::fmt(px(*it)) << ',' << detail::fmt(py(mean[*it] - err(*it))) << ' ';
      }
      os << "\"/>\n";
      os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i : idx) os << detail::fmt(px(i)) << ',' << detail::fmt(py(mean[i])) << ' ';
      os << "\"/>\n";
    } else {
      const std::size_t i = idx.front();
      os << "<line x1=\"" << detail::fmt(px(i)) << "\" y1=\"" << detail::fmt(py(mean[i] + err(i)))
         << "\" x2=\"" << detail::fmt(px(i)) << "\" y2=\"" << detail::fmt(py(mean[i] - err(i)))
         << "\" stroke=\"" << s.colour << "\"/>\n";
      os << "<circle cx=\"" << detail::fmt(px(i)) << "\" cy=\"" << detail::fmt(py(mean[i]))
         << "\" r=\"3\" fill=\"" << s.colour << "\"/>\n";
    }
    const double ly = kTop + 16.0 * static_cast<double>(k);
    os << "<text x=\"" << kW - kRight - 4 << "\" y=\"" << ly << "\" text-anchor=\"end\" fill=\""
       << s.colour << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

/// Writes error.svg, snr.svg and grade.svg into `dir`.
inline void emit_plots(const ResultTable& table, const std::filesystem::path& dir) {
  if (table.rounds() == 0) throw DomainError("emit_plots: empty result table");
  std::filesystem::create_directories(dir);
  write_text_file(dir / "error.svg",
                  render_chart("Error by round", "error",
                               {{"train", &table.train_error, "#1f77b4"},
                                {"test", &table.test_error, "#d62728"}}));
  write_text_file(dir / "snr.svg",
                  render_chart("SNR by round", "SNR", {{"SNR", &table.snr, "#2ca02c"}}));
  write_text_file(dir / "grade.svg",
                  render_chart("Noise grade by round", "noise grade",
                               {{"noise grade", &table.noise_grade, "#9467bd"}}));
}

}  // namespace viboost::harness
