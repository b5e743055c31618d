#pragma once

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "probewarp/errors.hpp"
#include "probewarp/image.hpp"

namespace probewarp {

namespace detail {

struct FileHandle {
  std::FILE* f = nullptr;
  explicit FileHandle(std::FILE* p) : f(p) {}
  ~FileHandle() {
    if (f) std::fclose(f);
  }
  FileHandle(const FileHandle&) = delete;
  FileHandle& operator=(const FileHandle&) = delete;
  operator std::FILE*() const { return f; }
};

inline void require_readable(const std::string& path) {
  if (!std::filesystem::exists(path)) throw IoError("cannot open " + path);
}

inline std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFF000000u) >> 24) | ((v & 0x00FF0000u) >> 8) | ((v & 0x0000FF00u) << 8) |
         ((v & 0x000000FFu) << 24);
}

}  // namespace detail

// ---- 8-bit RGB frames (PNG) ----
//
// Bytes map linearly to [0,1] (value / 255); no gamma decode is applied.

inline FrameImage read_frame(const std::string& path) {
  detail::require_readable(path);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw FormatError(path + ": " + image.message);
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr))
    throw FormatError(path + ": " + image.message);
  FrameImage out(int(image.width), int(image.height));
  const std::size_t n = out.data.size();
  for (std::size_t i = 0; i < n; ++i) out.data[i] = bytes[i] / 255.0;
  return out;
}

inline void write_frame(const std::string& path, const FrameImage& frame) {
  std::vector<std::uint8_t> bytes(frame.data.size());
  for (std::size_t i = 0; i < frame.data.size(); ++i) {
    const double v = frame.data[i];
    const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    bytes[i] = std::uint8_t(std::lround(c * 255.0));
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = png_uint_32(frame.width);
  image.height = png_uint_32(frame.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr))
    throw IoError(path + ": " + image.message);
}

// Reads just the dimensions from a PNG header.
inline std::pair<int, int> read_frame_dims(const std::string& path) {
  detail::require_readable(path);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw FormatError(path + ": " + image.message);
  const std::pair<int, int> dims{int(image.width), int(image.height)};
  png_image_free(&image);
  return dims;
}

// ---- depth maps (PFM, grayscale "Pf") ----
//
// Scale field -1.0 marks little-endian data; rows are stored bottom-up in the
// file and top-down in memory. Raw float bits pass through unchanged, so
// non-finite hole markers survive a round trip bit-exactly.

namespace detail {

inline std::string pfm_token(std::FILE* f, const std::string& path) {
  int c = std::fgetc(f);
  while (c != EOF && std::isspace(c)) c = std::fgetc(f);
  if (c == EOF) throw FormatError(path + ": truncated PFM header");
  std::string tok;
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(char(c));
    c = std::fgetc(f);
  }
  // The single whitespace terminating the token is consumed; after the scale
  // token this is the separator preceding the binary payload.
  return tok;
}

}  // namespace detail

inline DepthMap read_depth(const std::string& path) {
  detail::require_readable(path);
  detail::FileHandle f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open " + path);
  const std::string magic = detail::pfm_token(f, path);
  if (magic != "Pf") throw FormatError(path + ": not a grayscale PFM (magic '" + magic + "')");
  int w = 0, h = 0;
  double scale = 0.0;
  try {
    w = std::stoi(detail::pfm_token(f, path));
    h = std::stoi(detail::pfm_token(f, path));
    scale = std::stod(detail::pfm_token(f, path));
  } catch (const std::logic_error&) {
    throw FormatError(path + ": malformed PFM header");
  }
  if (w <= 0 || h <= 0) throw FormatError(path + ": non-positive PFM dimensions");
  if (scale == 0.0) throw FormatError(path + ": zero PFM scale");
  DepthMap out(w, h);
  std::vector<std::uint32_t> row(static_cast<std::size_t>(w));
  for (int y = h - 1; y >= 0; --y) {
    if (std::fread(row.data(), 4, std::size_t(w), f) != std::size_t(w))
      throw FormatError(path + ": truncated PFM data");
    const bool file_big_endian = scale > 0.0;
    const bool host_little = std::endian::native == std::endian::little;
    float* dst = &out.at(0, y);
    for (int x = 0; x < w; ++x) {
      std::uint32_t bits = row[std::size_t(x)];
      if (file_big_endian == host_little) bits = detail::byteswap32(bits);
      std::memcpy(&dst[x], &bits, 4);
    }
  }
  return out;
}

inline void write_depth(const std::string& path, const DepthMap& depth) {
  detail::FileHandle f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open " + path + " for writing");
  if (std::fprintf(f, "Pf\n%d %d\n-1.0\n", depth.width, depth.height) < 0)
    throw IoError(path + ": write failed");
  const bool host_little = std::endian::native == std::endian::little;
  std::vector<std::uint32_t> row(static_cast<std::size_t>(depth.width));
  for (int y = depth.height - 1; y >= 0; --y) {
    const float* src = &depth.data[std::size_t(y) * depth.width];
    for (int x = 0; x < depth.width; ++x) {
      std::uint32_t bits;
      std::memcpy(&bits, &src[x], 4);
      if (!host_little) bits = detail::byteswap32(bits);
      row[std::size_t(x)] = bits;
    }
    if (std::fwrite(row.data(), 4, row.size(), f) != row.size())
      throw IoError(path + ": write failed");
  }
}

// Reads just the dimensions from a PFM header.
inline std::pair<int, int> read_depth_dims(const std::string& path) {
  detail::require_readable(path);
  detail::FileHandle f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open " + path);
  if (detail::pfm_token(f, path) != "Pf") throw FormatError(path + ": not a grayscale PFM");
  int w = 0, h = 0;
  try {
    w = std::stoi(detail::pfm_token(f, path));
    h = std::stoi(detail::pfm_token(f, path));
  } catch (const std::logic_error&) {
    throw FormatError(path + ": malformed PFM header");
  }
  if (w <= 0 || h <= 0) throw FormatError(path + ": non-positive PFM dimensions");
  return {w, h};
}

// ---- sequence naming ----
//
// Frames are frame_00000.png ..., depths depth_00000.pfm ..., warped balls
// ball_00000.png ...

inline std::string sequence_name(const std::string& stem, int index, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%05d.", index);
  return stem + buf + ext;
}

// Collects stem_#####.ext files in a directory; indices must be contiguous
// from 00000. Returns full paths ordered by index.
inline std::vector<std::string> list_sequence(const std::string& dir, const std::string& stem,
                                              const std::string& ext) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError(dir + " is not a directory");
  std::vector<int> indices;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const std::string prefix = stem + "_";
    const std::string suffix = "." + ext;
    if (name.size() != prefix.size() + 5 + suffix.size()) continue;
    if (name.compare(0, prefix.size(), prefix) != 0) continue;
    if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    const std::string digits = name.substr(prefix.size(), 5);
    if (digits.find_first_not_of("0123456789") != std::string::npos) continue;
    indices.push_back(std::stoi(digits));
  }
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (indices[i] != int(i))
      throw ConfigError(dir + ": " + stem + " sequence is not contiguous from " +
                        sequence_name(stem, 0, ext));
  std::vector<std::string> paths;
  paths.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i)
    paths.push_back((std::filesystem::path(dir) / sequence_name(stem, int(i), ext)).string());
  return paths;
}

}  // namespace probewarp
