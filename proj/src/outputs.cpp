// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "semlink/errors.hpp"
#include "semlink/harness.hpp"

namespace semlink {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double parse_double_field(const std::string& s, std::size_t lineno) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw IoError("csv line " + std::to_string(lineno) + ": bad number '" + s + "'");
  }
  return v;
}

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

}  // namespace

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw InvalidArgument("write_csv: no rows");
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << g17(r.snr_db) << ',' << r.trial << ',' << r.metric << ',' << g17(r.value) << ','
       << r.config_hash << '\n';
  }
}

std::vector<SweepRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw IoError("csv: missing or wrong header");
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 5) throw IoError("csv line " + std::to_string(lineno) + ": expected 5 fields");
    SweepRow r;
    r.snr_db = parse_double_field(f[0], lineno);
    const auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), r.trial);
    if (ec != std::errc{} || ptr != f[1].data() + f[1].size()) {
      throw IoError("csv line " + std::to_string(lineno) + ": bad trial index");
    }
    r.metric = f[2];
    r.value = parse_double_field(f[3], lineno);
    r.config_hash = f[4];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_svg_plot(std::ostream& os, const std::vector<SweepRow>& rows, std::string_view title) {
  if (rows.empty()) throw InvalidArgument("write_svg_plot: no rows");

  // metric -> snr -> (sum, count), metrics in first-seen order
  std::vector<std::string> metrics;
  std::map<std::string, std::map<double, std::pair<double, std::size_t>>> acc;
  for (const auto& r : rows) {
    if (!std::isfinite(r.snr_db) || !std::isfinite(r.value)) continue;
    if (!acc.count(r.metric)) metrics.push_back(r.metric);
    auto& cell = acc[r.metric][r.snr_db];
    cell.first += r.value;
    ++cell.second;
  }

  constexpr double width = 640, panel_h = 200, left = 80, right = 20, top = 40, gap = 50;
  const double height = top + static_cast<double>(metrics.size()) * (panel_h + gap) + 10;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
     << " font-size=\"14\">" << xml_escape(title) << "</text>\n";

  double y0 = top;
  for (const auto& m : metrics) {
    const auto& pts = acc[m];
    std::vector<std::pair<double, double>> xy;
    for (const auto& [snr, sc] : pts) xy.emplace_back(snr, sc.first / static_cast<double>(sc.second));
    const bool log_y = std::all_of(xy.begin(), xy.end(), [](const auto& p) { return p.second > 0.0; });
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

    double xmin = xy.front().first, xmax = xy.back().first;
    if (xmax == xmin) {
      xmin -= 1.0;
      xmax += 1.0;
    }
    double ymin = ty(xy.front().second), ymax = ymin;
    for (const auto& p : xy) {
      ymin = std::min(ymin, ty(p.second));
      ymax = std::max(ymax, ty(p.second));
    }
    if (ymax == ymin) {
      ymin -= 0.5;
      ymax += 0.5;
    }
    const double pw = width - left - right;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return y0 + panel_h - (ty(y) - ymin) / (ymax - ymin) * panel_h; };

    os << "<g>\n"
       << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\"" << panel_h
       << "\" fill=\"none\" stroke=\"#888\"/>\n"
       << "<text x=\"" << left << "\" y=\"" << y0 - 6 << "\" font-family=\"sans-serif\" font-size=\"12\">"
       << xml_escape(m) << (log_y ? " (log scale)" : "") << "</text>\n"
       << "<text x=\"" << left - 6 << "\" y=\"" << y0 + 10
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
       << g4(log_y ? std::pow(10.0, ymax) : ymax) << "</text>\n"
       << "<text x=\"" << left - 6 << "\" y=\"" << y0 + panel_h
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
       << g4(log_y ? std::pow(10.0, ymin) : ymin) << "</text>\n"
       << "<text x=\"" << left << "\" y=\"" << y0 + panel_h + 14
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << g4(xmin) << " dB</text>\n"
       << "<text x=\"" << left + pw << "\" y=\"" << y0 + panel_h + 14
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << g4(xmax)
       << " dB</text>\n"
       << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xy.size(); ++i) {
      if (i) os << ' ';
      os << g4(px(xy[i].first)) << ',' << g4(py(xy[i].second));
    }
    os << "\"/>\n";
    for (const auto& p : xy) {
      os << "<circle cx=\"" << g4(px(p.first)) << "\" cy=\"" << g4(py(p.second))
         << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    os << "</g>\n";
    y0 += panel_h + gap;
  }
  os << "</svg>\n";
}

void emit_outputs(const std::string& dir, const std::vector<SweepRow>& rows,
                  const ExperimentConfig& cfg) {
  if (rows.empty()) throw InvalidArgument("emit_outputs: no rows");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());

  auto open = [&](const char* name) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    return out;
  };
  auto finish = [&](std::ofstream& out, const char* name) {
    out.flush();
    if (!out) throw IoError(std::string("failed writing ") + name);
  };

  std::ofstream csv = open("sweep.csv");
  write_csv(csv, rows);
  finish(csv, "sweep.csv");

  std::ofstream svg = open("sweep.svg");
  write_svg_plot(svg, rows, "semlink sweep " + config_hash(cfg));
  finish(svg, "sweep.svg");

  std::ofstream conf = open("config.txt");
  conf << canonical_config(cfg);
  finish(conf, "config.txt");
}

}  // namespace semlink
