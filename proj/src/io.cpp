#include "cuesync/io.hpp"

#include <fstream>
#include <iterator>

#include "cuesync/error.hpp"

namespace cuesync {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void write_raw(const std::filesystem::path& path, const char* data, std::size_t size) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(data, static_cast<std::streamsize>(size));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return bytes;
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return text;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  write_raw(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_raw(path, text.data(), text.size());
}

}  // namespace cuesync
