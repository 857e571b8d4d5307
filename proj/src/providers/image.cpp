#include "providers/image.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/error.hpp"

namespace mempal {

namespace {

constexpr std::string_view kB64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Reads the next whitespace-delimited PPM header token, skipping comments.
std::string next_header_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return std::string(bytes.substr(start, pos - start));
}

}  // namespace

Image::Image(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) fail(ErrorCode::InvalidArgument, "image dimensions must be positive");
  rgb.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

Image Image::solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image img(w, h);
  for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
    img.rgb[i] = r;
    img.rgb[i + 1] = g;
    img.rgb[i + 2] = b;
  }
  return img;
}

std::string encode_ppm(const Image& img) {
  std::ostringstream os;
  os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  return os.str();
}

Image decode_ppm(std::string_view bytes) {
  std::size_t pos = 0;
  if (next_header_token(bytes, pos) != "P6") fail(ErrorCode::InvalidArgument, "not a binary PPM image");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_header_token(bytes, pos));
    h = std::stoi(next_header_token(bytes, pos));
    maxval = std::stoi(next_header_token(bytes, pos));
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "malformed PPM header");
  }
  if (maxval != 255) fail(ErrorCode::InvalidArgument, "only 8-bit PPM images are supported");
  ++pos;  // single whitespace byte after maxval
  Image img(w, h);
  if (bytes.size() < pos + img.rgb.size()) fail(ErrorCode::InvalidArgument, "truncated PPM pixel data");
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), img.rgb.size(), img.rgb.begin());
  return img;
}

Image read_ppm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open image '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_ppm(ss.str());
}

ImageRef frame_from_spec(std::string_view spec, const std::string& base_dir) {
  ImageRef ref;
  ref.id = std::string(spec);
  if (spec.rfind("color:#", 0) == 0 && spec.size() == 13) {
    std::uint8_t c[3];
    for (int i = 0; i < 3; ++i) {
      const int hi = hex_nibble(spec[7 + 2 * i]);
      const int lo = hex_nibble(spec[8 + 2 * i]);
      if (hi < 0 || lo < 0) fail(ErrorCode::InvalidArgument, "bad color frame '" + std::string(spec) + "'");
      c[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    ref.pixels = std::make_shared<const Image>(Image::solid(32, 24, c[0], c[1], c[2]));
  } else if (spec.size() > 4 && spec.substr(spec.size() - 4) == ".ppm") {
    std::filesystem::path p{std::string(spec)};
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    ref.pixels = std::make_shared<const Image>(read_ppm_file(p.string()));
  }
  return ref;
}

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) | static_cast<unsigned char>(bytes[i + 2]);
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back(kB64[v & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.append("==");
  } else if (rest == 2) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  std::string out;
  unsigned acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    const int v = b64_value(c);
    if (v < 0) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      fail(ErrorCode::InvalidArgument, "invalid base64 input");
    }
    acc = (acc << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xff));
    }
  }
  return out;
}

}  // namespace mempal
