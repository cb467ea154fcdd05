#include "wavenet/cli/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wavenet::cli {

using nlohmann::json;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

namespace {

constexpr double W = 720, H = 440, L = 80, R = 24, T = 40, B = 56;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-300) {
      double pad = std::max(std::fabs(lo) * 0.05, 0.5);
      lo -= pad;
      hi += pad;
    }
  }
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string frame(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 14
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(xlabel) << "</text>\n";
  o << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"13\" transform=\"rotate(-90 18 " << (T + H - B) / 2 << ")\">" << escape(ylabel) << "</text>\n";
  return o.str();
}

double px(double x, const Range& r) { return L + (x - r.lo) / (r.hi - r.lo) * (W - L - R); }
double py(double y, const Range& r) { return H - B - (y - r.lo) / (r.hi - r.lo) * (H - T - B); }

std::string tick_label(double v, bool decade) {
  if (decade) return "1e" + fmt("%.0f", v);
  return fmt("%.3g", v);
}

std::string axes(const Range& xr, const Range& yr, bool log_y) {
  std::ostringstream o;
  for (int i = 0; i <= 5; ++i) {
    double x = xr.lo + (xr.hi - xr.lo) * i / 5;
    o << "<line x1=\"" << fmt("%.2f", px(x, xr)) << "\" y1=\"" << H - B << "\" x2=\"" << fmt("%.2f", px(x, xr))
      << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt("%.2f", px(x, xr)) << "\" y=\"" << H - B + 19
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(x, false)
      << "</text>\n";
  }
  std::vector<double> ys;
  if (log_y) {
    double first = std::ceil(yr.lo), last = std::floor(yr.hi);
    double stride = std::max(1.0, std::ceil((last - first + 1) / 8));
    for (double d = first; d <= last + 1e-9; d += stride) ys.push_back(d);
  }
  if (ys.empty())
    for (int i = 0; i <= 5; ++i) ys.push_back(yr.lo + (yr.hi - yr.lo) * i / 5);
  bool decade = log_y && std::fabs(ys[0] - std::round(ys[0])) < 1e-9;
  for (double y : ys) {
    o << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt("%.2f", py(y, yr)) << "\" x2=\"" << L << "\" y2=\""
      << fmt("%.2f", py(y, yr)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << L - 8 << "\" y=\"" << fmt("%.2f", py(y, yr) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << (decade ? tick_label(y, true) : tick_label(log_y ? std::pow(10.0, y) : y, false)) << "</text>\n";
  }
  return o.str();
}

}  // namespace

std::string svg_line_plot(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, bool log_y) {
  auto tr = [&](double y) {
    if (!log_y) return y;
    return y > 0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN();
  };
  Range xr, yr;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double y = tr(s.y[i]);
      if (!std::isfinite(y)) continue;
      xr.add(s.x[i]);
      yr.add(y);
    }
  xr.settle();
  yr.settle();
  std::string out = frame(title, xlabel, log_y ? ylabel + " (log scale)" : ylabel);
  out += axes(xr, yr, log_y);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double y = tr(s.y[i]);
      if (!std::isfinite(y) || !std::isfinite(s.x[i])) continue;
      pts += fmt("%.2f", px(s.x[i], xr)) + "," + fmt("%.2f", py(y, yr)) + " ";
    }
    if (!pts.empty()) pts.pop_back();
    const char* c = kColors[k % 6];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    if (!s.label.empty())
      out += "<text x=\"" + fmt("%.0f", W - R - 8) + "\" y=\"" + fmt("%.0f", T + 18 + 16 * k) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + c + "\">" +
             escape(s.label) + "</text>\n";
  }
  return out + "</svg>\n";
}

std::string svg_scatter(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel) {
  Range xr, yr;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xr.add(x[i]);
    yr.add(y[i]);
  }
  xr.settle();
  yr.settle();
  // keep the imaginary axis in view
  if (xr.hi < 0) xr.hi = 0.05 * (xr.hi - xr.lo);
  std::string out = frame(title, xlabel, ylabel);
  out += axes(xr, yr, false);
  if (xr.lo <= 0 && xr.hi >= 0)
    out += "<line x1=\"" + fmt("%.2f", px(0, xr)) + "\" y1=\"" + fmt("%.0f", T) + "\" x2=\"" + fmt("%.2f", px(0, xr)) +
           "\" y2=\"" + fmt("%.0f", H - B) + "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out += "<circle cx=\"" + fmt("%.2f", px(x[i], xr)) + "\" cy=\"" + fmt("%.2f", py(y[i], yr)) +
           "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  return out + "</svg>\n";
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_))
    throw std::runtime_error("cannot create output directory '" + dir_.string() + "'");
}

void OutputDir::write_text(const std::string& name, const std::string& text) {
  std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + (dir_ / name).string() + "'");
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void OutputDir::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
  write_text(name, csv_text(header, rows));
}

void OutputDir::write_json(const std::string& name, const json& j) { write_text(name, json_text(j)); }

json to_json(const RunManifest& m) {
  return {{"subcommand", m.subcommand}, {"config", m.config},         {"parameters", m.parameters},
          {"output_dir", m.output_dir}, {"version", m.version},       {"wall_clock_seconds", m.wall_clock},
          {"files", m.files}};
}

void OutputDir::finish(RunManifest m) {
  m.output_dir = dir_.string();
  m.files = files_;
  m.files.push_back("manifest.json");
  std::sort(m.files.begin(), m.files.end());
  m.files.erase(std::unique(m.files.begin(), m.files.end()), m.files.end());
  write_json("manifest.json", to_json(m));
}

}  // namespace wavenet::cli
