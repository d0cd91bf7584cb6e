#include "attgrasp/tensor_io.h"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "attgrasp/errors.h"

namespace attgrasp {

namespace {

void put_u32le(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

void write_tensor_f32(const std::string& path, const TensorF32& t) {
  std::string buf;
  buf.reserve(12 + t.data.size() * 4);
  put_u32le(buf, static_cast<uint32_t>(t.dims[0]));
  put_u32le(buf, static_cast<uint32_t>(t.dims[1]));
  put_u32le(buf, static_cast<uint32_t>(t.dims[2]));
  for (float f : t.data) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32le(buf, bits);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for write: " + path);
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw IoError("short write: " + path);
}

TensorF32 read_tensor_f32(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for read: " + path);
  std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (buf.size() < 12) throw IoError("truncated tensor file: " + path);
  const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
  TensorF32 t;
  t.dims[0] = static_cast<int>(get_u32le(p));
  t.dims[1] = static_cast<int>(get_u32le(p + 4));
  t.dims[2] = static_cast<int>(get_u32le(p + 8));
  t.ndim = t.dims[2] > 1 ? 3 : (t.dims[1] > 1 ? 2 : 1);
  size_t n = static_cast<size_t>(t.dims[0]) * t.dims[1] * t.dims[2];
  if (buf.size() != 12 + n * 4) throw IoError("size mismatch in tensor file: " + path);
  t.data.resize(n);
  for (size_t i = 0; i < n; ++i) {
    uint32_t bits = get_u32le(p + 12 + i * 4);
    float f;
    std::memcpy(&f, &bits, 4);
    t.data[i] = f;
  }
  return t;
}

}  // namespace attgrasp
