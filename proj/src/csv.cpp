#include "svmm/csv.hpp"

#include "svmm/error.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace svmm::csv {

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw ConfigError("cannot open output file " + path.string());
  for (const auto& h : header) cell(h);
  end_row();
}

void Writer::separator() {
  if (in_row_ > 0) out_ << ',';
  ++in_row_;
}

Writer& Writer::cell(std::string_view s) {
  separator();
  out_ << quote(s);
  return *this;
}

Writer& Writer::cell(double v) {
  separator();
  out_ << format(v);
  return *this;
}

Writer& Writer::cell(long long v) {
  separator();
  out_ << v;
  return *this;
}

void Writer::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error("csv row has " + std::to_string(in_row_) + " cells, header has " +
                           std::to_string(columns_));
  }
  out_ << "\r\n";
  in_row_ = 0;
}

void Writer::close() {
  out_.close();
  if (!out_) throw std::runtime_error("failed writing " + path_.string());
}

}  // namespace svmm::csv
