/* Copyright 2026 The parteval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "parteval/raster_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace parteval {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProtocolError(path.string() + ": cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ProtocolError(tmp.string() + ": cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw ProtocolError(tmp.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw ProtocolError(path.string() + ": cannot move file into place: " +
                        ec.message());
  }
}

// INGF rasters

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i]))
         << (8 * i);
  }
  return v;
}

[[noreturn]] void raster_error(const std::string& source, std::size_t offset,
                               const std::string& what) {
  throw ProtocolError(source + ": " + what + " at byte offset " +
                      std::to_string(offset));
}

}  // namespace

std::string encode_raster(const Raster<float>& raster) {
  if (raster.values.size() != raster.height * raster.width) {
    throw ProtocolError("raster payload does not match its dimensions");
  }
  if (raster.height > UINT32_MAX || raster.width > UINT32_MAX) {
    throw ProtocolError("raster dimensions exceed the u32 header fields");
  }
  std::string out(kRasterMagic, sizeof kRasterMagic);
  out.reserve(kRasterHeaderBytes + 4 * raster.values.size());
  put_u32(out, static_cast<std::uint32_t>(raster.height));
  put_u32(out, static_cast<std::uint32_t>(raster.width));
  for (std::size_t i = 0; i < raster.values.size(); ++i) {
    const float v = raster.values[i];
    if (!std::isfinite(v)) {
      throw ProtocolError("refusing to write non-finite raster value at index " +
                          std::to_string(i));
    }
    put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

Raster<float> decode_raster(std::string_view bytes, const std::string& source) {
  if (bytes.size() < sizeof kRasterMagic ||
      std::memcmp(bytes.data(), kRasterMagic, sizeof kRasterMagic) != 0) {
    raster_error(source, 0, "bad magic (expected \"INGF\")");
  }
  if (bytes.size() < kRasterHeaderBytes) {
    raster_error(source, bytes.size(), "truncated header");
  }
  const std::uint64_t height = get_u32(bytes, 4);
  const std::uint64_t width = get_u32(bytes, 8);
  const std::uint64_t expected = kRasterHeaderBytes + 4 * height * width;
  if (bytes.size() < expected) {
    raster_error(source, bytes.size(),
                 "truncated payload (" + std::to_string(height) + "x" +
                     std::to_string(width) + " needs " +
                     std::to_string(expected) + " bytes)");
  }
  if (bytes.size() > expected) {
    raster_error(source, expected, "trailing data");
  }
  Raster<float> raster(height, width);
  for (std::size_t i = 0; i < raster.values.size(); ++i) {
    const std::size_t offset = kRasterHeaderBytes + 4 * i;
    const float v = std::bit_cast<float>(get_u32(bytes, offset));
    if (!std::isfinite(v)) raster_error(source, offset, "non-finite value");
    raster.values[i] = v;
  }
  return raster;
}

void write_raster(const fs::path& path, const Raster<float>& raster) {
  write_file_atomic(path, encode_raster(raster));
}

Raster<float> read_raster(const fs::path& path) {
  return decode_raster(read_file(path), path.string());
}

// PNG masks

namespace {

struct PngSource {
  const unsigned char* data;
  std::size_t size;
  std::size_t pos;
  char error[256];
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->size - src->pos < n) png_error(png, "truncated PNG data");
  std::memcpy(out, src->data + src->pos, n);
  src->pos += n;
}

void png_record_error(png_structp png, png_const_charp msg) {
  auto* src = static_cast<PngSource*>(png_get_error_ptr(png));
  std::snprintf(src->error, sizeof src->error, "%s", msg);
  png_longjmp(png, 1);
}

void png_ignore_warning(png_structp, png_const_charp) {}

enum class PngStatus { kOk, kLibpngError, kWrongFormat };

// Decodes into `pixels`.  Kept free of objects that would need unwinding
// between setjmp and longjmp; the buffers are owned by the caller.
PngStatus decode_gray8(PngSource* src, png_uint_32* width, png_uint_32* height,
                       int* bit_depth, int* color_type,
                       std::vector<unsigned char>* pixels,
                       std::vector<png_bytep>* rows) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, src,
                                           png_record_error, png_ignore_warning);
  if (!png) return PngStatus::kLibpngError;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return PngStatus::kLibpngError;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::kLibpngError;
  }
  png_set_read_fn(png, src, png_read_from_memory);
  png_read_info(png, info);
  int interlace = 0;
  png_get_IHDR(png, info, width, height, bit_depth, color_type, &interlace,
               nullptr, nullptr);
  if (*color_type != PNG_COLOR_TYPE_GRAY || *bit_depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::kWrongFormat;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  pixels->resize(static_cast<std::size_t>(*width) * *height);
  rows->resize(*height);
  for (png_uint_32 r = 0; r < *height; ++r) {
    (*rows)[r] = pixels->data() + static_cast<std::size_t>(r) * *width;
  }
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return PngStatus::kOk;
}

std::string describe_png_format(int color_type, int bit_depth) {
  std::string kind;
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY: kind = "grayscale"; break;
    case PNG_COLOR_TYPE_GRAY_ALPHA: kind = "grayscale+alpha (2 channels)"; break;
    case PNG_COLOR_TYPE_RGB: kind = "RGB (3 channels)"; break;
    case PNG_COLOR_TYPE_RGB_ALPHA: kind = "RGBA (4 channels)"; break;
    case PNG_COLOR_TYPE_PALETTE: kind = "palette"; break;
    default: kind = "unknown color type";
  }
  return kind + ", " + std::to_string(bit_depth) + "-bit";
}

}  // namespace

Raster<PartId> read_mask_png(const fs::path& path) {
  const std::string bytes = read_file(path);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 8 || png_sig_cmp(data, 0, 8) != 0) {
    throw ProtocolError(path.string() + ": not a PNG file");
  }
  PngSource src{data, bytes.size(), 0, {}};
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;
  switch (decode_gray8(&src, &width, &height, &bit_depth, &color_type, &pixels,
                       &rows)) {
    case PngStatus::kLibpngError:
      throw ProtocolError(path.string() + ": PNG decode failed: " + src.error);
    case PngStatus::kWrongFormat:
      throw ProtocolError(path.string() +
                          ": mask must be single-channel 8-bit, got " +
                          describe_png_format(color_type, bit_depth));
    case PngStatus::kOk:
      break;
  }
  Raster<PartId> mask(height, width);
  for (std::size_t i = 0; i < pixels.size(); ++i) mask.values[i] = pixels[i];
  return mask;
}

PartAnnotation read_mask(const fs::path& path, const std::string& image_id) {
  Raster<PartId> mask = read_mask_png(path);
  try {
    return PartAnnotation(image_id, std::move(mask));
  } catch (const ProtocolError& e) {
    throw ProtocolError(path.string() + ": " + e.what());
  }
}

void write_mask_png(const fs::path& path, const Raster<PartId>& mask) {
  std::vector<unsigned char> pixels(mask.values.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const PartId v = mask.values[i];
    if (v < 0 || v > 255) {
      throw ProtocolError(path.string() + ": mask label " + std::to_string(v) +
                          " does not fit in 8 bits");
    }
    pixels[i] = static_cast<unsigned char>(v);
  }
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(mask.width);
  image.height = static_cast<png_uint_32>(mask.height);
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0,
                                 nullptr)) {
    throw ProtocolError(path.string() + ": PNG encode failed: " +
                        image.message);
  }
  std::string encoded(size, '\0');
  if (!png_image_write_to_memory(&image, encoded.data(), &size, 0,
                                 pixels.data(), 0, nullptr)) {
    throw ProtocolError(path.string() + ": PNG encode failed: " +
                        image.message);
  }
  encoded.resize(size);
  write_file_atomic(path, encoded);
}

// Logits

LogitRecord parse_logits(std::string_view json_text, std::size_t class_count,
                         const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(source + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ProtocolError(source + ": expected a JSON object");
  const auto image_id = doc.find("image_id");
  const auto subset = doc.find("subset");
  const auto logits = doc.find("logits");
  if (image_id == doc.end() || !image_id->is_string()) {
    throw ProtocolError(source + ": missing string field 'image_id'");
  }
  if (subset == doc.end() || !subset->is_string()) {
    throw ProtocolError(source + ": missing string field 'subset'");
  }
  if (logits == doc.end() || !logits->is_array()) {
    throw ProtocolError(source + ": missing array field 'logits'");
  }
  std::vector<double> values;
  values.reserve(logits->size());
  for (const auto& v : *logits) {
    if (!v.is_number()) {
      throw ProtocolError(source + ": logits must be numbers");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      throw ProtocolError(source + ": logits contain a non-finite value");
    }
    values.push_back(x);
  }
  if (class_count != 0 && values.size() != class_count) {
    throw ProtocolError(source + ": " + std::to_string(values.size()) +
                        " logits but the manifest declares " +
                        std::to_string(class_count) + " classes");
  }
  try {
    return LogitRecord(image_id->get<std::string>(),
                       PartSubset::parse_key(subset->get<std::string>()),
                       std::move(values));
  } catch (const ProtocolError& e) {
    throw ProtocolError(source + ": " + e.what());
  }
}

LogitRecord read_logits(const fs::path& path, std::size_t class_count) {
  return parse_logits(read_file(path), class_count, path.string());
}

void write_logits(const fs::path& path, const LogitRecord& rec) {
  nlohmann::ordered_json doc;
  doc["image_id"] = rec.image_id();
  doc["subset"] = rec.variant().key();
  doc["logits"] = rec.logits();
  write_file_atomic(path, doc.dump() + "\n");
}

}  // namespace parteval
