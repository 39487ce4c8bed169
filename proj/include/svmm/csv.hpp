#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace svmm::csv {

// Shortest round-trip representation, '.' decimal separator.
std::string format(double v);

// RFC-4180 field quoting.
std::string quote(std::string_view field);

class Writer {
public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);

  Writer& cell(std::string_view s);
  Writer& cell(double v);
  Writer& cell(long long v);
  Writer& cell(int v) { return cell(static_cast<long long>(v)); }
  Writer& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  void end_row();
  void close();

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
  void separator();

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace svmm::csv
