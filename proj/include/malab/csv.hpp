#pragma once

// CSV output: comma separated, header row, LF endings, doubles at 17
// significant digits so reruns are byte-identical.

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace malab {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  using Field = std::variant<double, long, std::string>;

  CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), width_(header.size()) {
    write_strings(header);
  }

  void row(const std::vector<Field>& fields) {
    if (fields.size() != width_) throw std::invalid_argument("CsvWriter: row width does not match the header");
    std::vector<std::string> cells;
    for (const auto& f : fields) {
      if (auto d = std::get_if<double>(&f))
        cells.push_back(format_double(*d));
      else if (auto i = std::get_if<long>(&f))
        cells.push_back(std::to_string(*i));
      else
        cells.push_back(std::get<std::string>(f));
    }
    write_strings(cells);
  }

 private:
  void write_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << escape(cells[i]);
    }
    os_ << '\n';
  }

  static std::string escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + '"';
  }

  std::ostream& os_;
  std::size_t width_;
};

}  // namespace malab
