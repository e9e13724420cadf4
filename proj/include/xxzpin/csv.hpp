#pragma once

// CSV emission: UTF-8, header row, comma separators, LF line endings,
// numbers at 12 significant digits.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace xxzpin {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {
    line(header_);
  }

  void row(const std::vector<std::string>& cells) { line(cells); }

  void row_numeric(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_number(v));
    line(s);
  }

  const std::string& str() const { return out_; }

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << out_;
  }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }

  std::vector<std::string> header_;
  std::string out_;
};

}  // namespace xxzpin
