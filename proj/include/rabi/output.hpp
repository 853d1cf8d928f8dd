#pragma once

// Deterministic CSV/JSON/SVG emission. Files are staged in memory and
// written atomically (temp file + rename), so a failing run never leaves
// partial output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabi::out {

inline constexpr const char* kVersion = "rabi-spectra 0.1.0";

// 12 significant digits; exceeds every tolerance in the suite.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f.good()) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// CSV staged in memory: a `# key=value` comment block capturing the full
// configuration, then a header row, then data rows.
class Csv {
 public:
  void comment(const std::string& key, const std::string& value) {
    comments_ += "# " + key + "=" + value + "\n";
  }
  void comment(const std::string& key, double value) { comment(key, fmt(value)); }
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      body_ += (i ? "," : "") + csv_quote(cols[i]);
    body_ += "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      body_ += (i ? "," : "") + csv_quote(cells[i]);
    body_ += "\n";
  }
  std::string str() const { return comments_ + body_; }

 private:
  std::string comments_;
  std::string body_;
};

// Minimal SVG plot: polylines, markers, frame and tick labels. No
// external plotting dependency.
class Svg {
 public:
  Svg(double x_lo, double x_hi, double y_lo, double y_hi, int w = 760, int h = 540)
      : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), w_(w), h_(h) {}

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& color = "#222222", double width = 1.0) {
    if (pts.size() < 2) return;
    std::ostringstream s;
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
      << "\" points=\"";
    for (const auto& [x, y] : pts) s << px(x) << "," << py(y) << " ";
    s << "\"/>\n";
    shapes_ += s.str();
  }

  void dashed_hline(double y, const std::string& color) {
    std::ostringstream s;
    s << "<line x1=\"" << px(x_lo_) << "\" y1=\"" << py(y) << "\" x2=\"" << px(x_hi_)
      << "\" y2=\"" << py(y) << "\" stroke=\"" << color
      << "\" stroke-dasharray=\"6,4\" stroke-width=\"0.7\"/>\n";
    shapes_ += s.str();
  }

  // shape: "circle", "triangle" or "cross"
  void marker(double x, double y, const std::string& shape,
              const std::string& color = "#cc3311") {
    std::ostringstream s;
    const double cx = px(x), cy = py(y);
    if (shape == "triangle") {
      s << "<polygon fill=\"none\" stroke=\"" << color << "\" points=\"" << cx << ","
        << cy - 5 << " " << cx - 4.5 << "," << cy + 3.5 << " " << cx + 4.5 << ","
        << cy + 3.5 << "\"/>\n";
    } else if (shape == "cross") {
      s << "<path stroke=\"" << color << "\" d=\"M" << cx - 4 << " " << cy - 4 << "L"
        << cx + 4 << " " << cy + 4 << "M" << cx - 4 << " " << cy + 4 << "L" << cx + 4
        << " " << cy - 4 << "\"/>\n";
    } else {
      s << "<circle fill=\"none\" stroke=\"" << color << "\" cx=\"" << cx << "\" cy=\""
        << cy << "\" r=\"4\"/>\n";
    }
    shapes_ += s.str();
  }

  std::string str(const std::string& x_label, const std::string& y_label) const {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\""
      << h_ << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n"
      << "<rect x=\"" << m_ << "\" y=\"" << m_ << "\" width=\"" << w_ - 2 * m_
      << "\" height=\"" << h_ - 2 * m_
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double fx = x_lo_ + (x_hi_ - x_lo_) * i / 5.0;
      const double fy = y_lo_ + (y_hi_ - y_lo_) * i / 5.0;
      s << "<line x1=\"" << px(fx) << "\" y1=\"" << h_ - m_ << "\" x2=\"" << px(fx)
        << "\" y2=\"" << h_ - m_ + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px(fx) << "\" y=\"" << h_ - m_ + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt_tick(fx) << "</text>\n"
        << "<line x1=\"" << m_ - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << m_
        << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << m_ - 8 << "\" y=\"" << py(fy) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt_tick(fy) << "</text>\n";
    }
    s << "<text x=\"" << w_ / 2 << "\" y=\"" << h_ - 8
      << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n"
      << "<text x=\"14\" y=\"" << h_ / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << h_ / 2 << ")\">" << y_label << "</text>\n"
      << shapes_ << "</svg>\n";
    return s.str();
  }

 private:
  static std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
  }
  double px(double x) const {
    return m_ + (x - x_lo_) / (x_hi_ - x_lo_) * (w_ - 2.0 * m_);
  }
  double py(double y) const {
    return h_ - m_ - (y - y_lo_) / (y_hi_ - y_lo_) * (h_ - 2.0 * m_);
  }
  double x_lo_, x_hi_, y_lo_, y_hi_;
  int w_, h_;
  int m_ = 48;
  std::string shapes_;
};

}  // namespace rabi::out
