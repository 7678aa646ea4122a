#include "fpl/binary_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fpl/error.hpp"

namespace fpl {

namespace {

template <typename T>
void append_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.append(raw, sizeof(T));
}

template <typename T>
T read_le(std::string_view bytes, std::size_t& pos) {
  if (bytes.size() - pos < sizeof(T))
    throw FormatError("unexpected end of data: needed " + std::to_string(sizeof(T)) +
                      " bytes at offset " + std::to_string(pos) + ", have " +
                      std::to_string(bytes.size() - pos));
  char raw[sizeof(T)];
  std::memcpy(raw, bytes.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ByteWriter::put_u32(std::uint32_t v) { append_le(bytes_, v); }
void ByteWriter::put_u64(std::uint64_t v) { append_le(bytes_, v); }
void ByteWriter::put_f64(double v) { append_le(bytes_, v); }

void ByteWriter::put_f64_span(std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    bytes_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
  } else {
    for (double v : values) put_f64(v);
  }
}

std::uint32_t ByteReader::get_u32() { return read_le<std::uint32_t>(bytes_, pos_); }
std::uint64_t ByteReader::get_u64() { return read_le<std::uint64_t>(bytes_, pos_); }
double ByteReader::get_f64() { return read_le<double>(bytes_, pos_); }

std::string_view ByteReader::get_bytes(std::size_t count) {
  if (remaining() < count)
    throw FormatError("unexpected end of data: needed " + std::to_string(count) +
                      " bytes at offset " + std::to_string(pos_));
  auto out = bytes_.substr(pos_, count);
  pos_ += count;
  return out;
}

void ByteReader::get_f64_span(std::span<double> out) {
  const auto raw = get_bytes(out.size_bytes());
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), raw.data(), raw.size());
  } else {
    ByteReader sub(raw);
    for (double& v : out) v = sub.get_f64();
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw FormatError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fpl
