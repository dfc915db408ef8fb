#include "dsts/io.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "dsts/error.hpp"

namespace dsts::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw DataError(fmt::format("{}: '{}' is not a number", context, text));
  }
  return v;
}

long long parse_int(std::string_view text, std::string_view context) {
  long long v = 0;
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw DataError(fmt::format("{}: '{}' is not an integer", context, text));
  }
  return v;
}

}  // namespace dsts::io
