#include "omnizoom/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace omnizoom {

namespace {

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t count) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + count > cursor->bytes.size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, cursor->bytes.data() + cursor->offset, count);
  cursor->offset += count;
}

void write_callback(png_structp png, png_bytep data, png_size_t count) {
  auto* sink = static_cast<std::string*>(png_get_io_ptr(png));
  sink->append(reinterpret_cast<const char*>(data), count);
}

void flush_callback(png_structp) {}

[[noreturn]] void error_callback(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text != nullptr) *text = message;
  png_longjmp(png, 1);
}

void warning_callback(png_structp, png_const_charp) {}

}  // namespace

std::uint16_t quantize(double v, BitDepth depth) {
  const double max = depth == BitDepth::eight ? 255.0 : 65535.0;
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint16_t>(std::floor(clamped * max + 0.5));
}

ErpImage decode_png(std::span<const std::uint8_t> bytes, AspectPolicy policy) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::io_error, "not a PNG stream");
  }
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, error_callback, warning_callback);
  if (png == nullptr) throw Error(ErrorCode::io_error, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::io_error, "png_create_info_struct failed");
  }

  ReadCursor cursor{bytes};
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  int depth = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::io_error, "PNG decode failed: " + message);
  }

  png_set_read_fn(png, &cursor, read_callback);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
  png_read_update_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = buffer.data() + r * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ErpImage image(height, width, channels, policy);
  const double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  double* out = image.samples().data();
  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  if (depth == 16) {
    for (std::size_t k = 0; k < count; ++k) {
      std::uint16_t v;
      std::memcpy(&v, buffer.data() + 2 * k, 2);
      out[k] = v * scale;
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) out[k] = buffer[k] * scale;
  }
  return image;
}

ErpImage read_png(const std::filesystem::path& path, AspectPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_png(bytes, policy);
}

std::string encode_png(const ErpImage& image, BitDepth depth) {
  if (image.empty()) throw Error(ErrorCode::bad_dims, "cannot encode an empty image");
  if (image.channels() < 1 || image.channels() > 4) {
    throw Error(ErrorCode::bad_dims, "PNG supports 1 to 4 channels");
  }
  static constexpr int kColorTypes[] = {PNG_COLOR_TYPE_GRAY, PNG_COLOR_TYPE_GRAY_ALPHA, PNG_COLOR_TYPE_RGB,
                                        PNG_COLOR_TYPE_RGB_ALPHA};
  const int bits = static_cast<int>(depth);
  const std::size_t bytes_per_sample = depth == BitDepth::eight ? 1 : 2;
  const std::size_t row_bytes = static_cast<std::size_t>(image.width()) * image.channels() * bytes_per_sample;

  std::vector<std::uint8_t> buffer(row_bytes * image.height());
  const double* in = image.samples().data();
  const std::size_t count = static_cast<std::size_t>(image.samples().size());
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint16_t q = quantize(in[k], depth);
    if (depth == BitDepth::eight) {
      buffer[k] = static_cast<std::uint8_t>(q);
    } else {
      buffer[2 * k] = static_cast<std::uint8_t>(q >> 8);  // PNG is big-endian
      buffer[2 * k + 1] = static_cast<std::uint8_t>(q & 0xff);
    }
  }

  std::string message;
  std::string output;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, error_callback, warning_callback);
  if (png == nullptr) throw Error(ErrorCode::io_error, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::io_error, "png_create_info_struct failed");
  }
  std::vector<png_bytep> rows(image.height());
  for (Index r = 0; r < image.height(); ++r) rows[r] = buffer.data() + r * row_bytes;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::io_error, "PNG encode failed: " + message);
  }
  png_set_write_fn(png, &output, write_callback, flush_callback);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), bits,
               kColorTypes[image.channels() - 1], PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return output;
}

void write_png(const ErpImage& image, const std::filesystem::path& path, BitDepth depth) {
  const std::string bytes = encode_png(image, depth);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io_error, "short write to " + path.string());
}

}  // namespace omnizoom
