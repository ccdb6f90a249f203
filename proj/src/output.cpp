#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "zeno/runner.hpp"

namespace zeno {
namespace {

constexpr const char* kCsvHeader = "j,dispersion,norm,p_m0";

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

// Round maximum up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v) {
  if (!(v > 0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * p >= v) return m * p;
  }
  return 10.0 * p;
}

}  // namespace

std::string format_csv(const DispersionSeries& series) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& e : series.entries()) {
    out += std::to_string(e.j);
    out += ',' + number(e.dispersion) + ',' + number(e.norm) + ',' + number(e.p_m0) + '\n';
  }
  return out;
}

void write_csv(const RunRecord& record, const std::string& path) { write_file(path, format_csv(record.aggregate)); }

DispersionSeries read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError("'" + path + "' lacks the CSV header");
  DispersionSeries series;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    DispersionEntry e;
    long long j = 0;
    if (std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf", &j, &e.dispersion, &e.norm, &e.p_m0) != 4) {
      throw IoError("'" + path + "' line " + std::to_string(line_no) + " is malformed");
    }
    e.j = j;
    series.push_back(e);
  }
  return series;
}

std::string render_chart(std::span<const RunRecord> records) {
  if (records.empty()) throw InvalidArgument("emit_chart: no records to plot");

  constexpr double width = 800, height = 500;
  constexpr double left = 90, right = 230, top = 30, bottom = 60;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  double j_max = 1, d_max = 0;
  for (const auto& r : records) {
    for (const auto& e : r.aggregate.entries()) {
      j_max = std::max(j_max, static_cast<double>(e.j));
      d_max = std::max(d_max, e.dispersion);
    }
  }
  j_max = nice_ceiling(j_max);
  d_max = nice_ceiling(d_max);
  auto x_of = [&](double j) { return left + plot_w * j / j_max; };
  auto y_of = [&](double d) { return top + plot_h * (1.0 - d / d_max); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g stroke=\"black\" fill=\"none\">\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h << "\"/>\n";
  svg << "</g>\n";

  for (int t = 0; t <= 5; ++t) {
    const double j = j_max * t / 5.0;
    const double d = d_max * t / 5.0;
    svg << "<line x1=\"" << coord(x_of(j)) << "\" y1=\"" << coord(top + plot_h) << "\" x2=\"" << coord(x_of(j))
        << "\" y2=\"" << coord(top + plot_h + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << coord(x_of(j)) << "\" y=\"" << coord(top + plot_h + 20) << "\" text-anchor=\"middle\">"
        << number(j) << "</text>\n";
    svg << "<line x1=\"" << coord(left - 5) << "\" y1=\"" << coord(y_of(d)) << "\" x2=\"" << coord(left)
        << "\" y2=\"" << coord(y_of(d)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(y_of(d) + 4) << "\" text-anchor=\"end\">"
        << number(d) << "</text>\n";
  }
  svg << "<text x=\"" << coord(left + plot_w / 2) << "\" y=\"" << coord(height - 15)
      << "\" text-anchor=\"middle\">j (kicks)</text>\n";
  svg << "<text x=\"20\" y=\"" << coord(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << coord(top + plot_h / 2) << ")\">dispersion &lt;(m - m0)^2&gt;</text>\n";

  for (std::size_t i = 0; i < records.size(); ++i) {
    const char* color = colors[i % std::size(colors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    bool first = true;
    for (const auto& e : records[i].aggregate.entries()) {
      if (!first) svg << ' ';
      first = false;
      svg << coord(x_of(static_cast<double>(e.j))) << ',' << coord(y_of(e.dispersion));
    }
    svg << "\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(i);
    svg << "<line x1=\"" << coord(left + plot_w + 15) << "\" y1=\"" << coord(ly) << "\" x2=\""
        << coord(left + plot_w + 40) << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << coord(left + plot_w + 45) << "\" y=\"" << coord(ly + 4) << "\">"
        << escape_xml(records[i].config.legend()) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_chart(std::span<const RunRecord> records, const std::string& path) {
  write_file(path, render_chart(records));
}

}  // namespace zeno
