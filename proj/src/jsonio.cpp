#include "forge/jsonio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "forge/errors.hpp"
#include "forge/text.hpp"

namespace forge::jsonio {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot read '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw ValidationError("read failed on '" + path.string() + "'");
  }
  return std::move(buffer).str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ValidationError("cannot write '" + tmp.string() + "'");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.string().c_str());
      throw ValidationError("write failed on '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.string().c_str());
    throw ValidationError("cannot rename '" + tmp.string() + "' to '" +
                          path.string() + "': " + ec.message());
  }
}

std::vector<std::string> jsonl_lines(std::string_view content) {
  std::vector<std::string> lines;
  for (std::string& line : text::split_lines(content)) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace forge::jsonio
