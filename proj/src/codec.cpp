#include "lapseg/codec.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "lapseg/error.hpp"

namespace lapseg {
namespace {

constexpr std::array<std::array<std::uint8_t, 3>, 12> kPalette = {{
    {230, 25, 75},
    {60, 180, 75},
    {255, 225, 25},
    {0, 130, 200},
    {245, 130, 48},
    {145, 30, 180},
    {70, 240, 240},
    {240, 50, 230},
    {210, 245, 60},
    {250, 190, 212},
    {0, 128, 128},
    {170, 110, 40},
}};

// State shared with the libpng callbacks. Lives on the heap and is created
// before setjmp so a longjmp never skips its destructor.
struct PngState {
  ByteSpan input;
  std::size_t offset = 0;
  std::string message;
  Bytes output;
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngState*>(png_get_error_ptr(png));
  state->message = msg ? msg : "unknown libpng error";
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

void on_png_read(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngState*>(png_get_io_ptr(png));
  if (state->offset + length > state->input.size()) {
    png_error(png, "unexpected end of stream");
  }
  std::memcpy(out, state->input.data() + state->offset, length);
  state->offset += length;
}

void on_png_write(png_structp png, png_bytep data, png_size_t length) {
  auto* state = static_cast<PngState*>(png_get_io_ptr(png));
  state->output.insert(state->output.end(), data, data + length);
}

void on_png_flush(png_structp) {}

Error decode_error(std::size_t offset, const std::string& what) {
  return Error(ErrorCode::kDecode,
               "decode error at byte offset " + std::to_string(offset) + ": " + what);
}

bool is_png(ByteSpan bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

RawImage decode_png(ByteSpan bytes, bool expand_palette) {
  auto state = std::make_unique<PngState>();
  state->input = bytes;
  auto raw = std::make_unique<RawImage>();
  auto rows = std::make_unique<std::vector<png_bytep>>();
  auto buffer = std::make_unique<std::vector<std::uint8_t>>();

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, state.get(),
                                           on_png_error, on_png_warning);
  if (png == nullptr) throw Error(ErrorCode::kDecode, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::kDecode, "libpng initialisation failed");
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw decode_error(state->offset, state->message);
  }

  png_set_read_fn(png, state.get(), on_png_read);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  raw->indexed = color_type == PNG_COLOR_TYPE_PALETTE && !expand_palette;
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_colorp palette = nullptr;
    int entries = 0;
    if (png_get_PLTE(png, info, &palette, &entries) != 0) {
      raw->palette_size = static_cast<std::size_t>(entries);
    }
    if (expand_palette) {
      png_set_palette_to_rgb(png);
    } else if (depth < 8) {
      png_set_packing(png);
    }
  } else if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (depth == 16 && std::endian::native == std::endian::little) {
    png_set_swap(png);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);

  buffer->resize(rowbytes * height);
  rows->resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    (*rows)[y] = buffer->data() + y * rowbytes;
  }
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  raw->width = width;
  raw->height = height;
  raw->channels = channels;
  raw->bit_depth = out_depth;
  raw->max_value = out_depth == 16 ? 65535u : 255u;
  const std::size_t count = std::size_t{width} * height * static_cast<std::size_t>(channels);
  raw->samples.resize(count);
  for (std::size_t y = 0; y < height; ++y) {
    const std::uint8_t* src = buffer->data() + y * rowbytes;
    std::uint16_t* dst = raw->samples.data() + y * width * static_cast<std::size_t>(channels);
    const std::size_t row_samples = std::size_t{width} * static_cast<std::size_t>(channels);
    if (out_depth == 16) {
      std::memcpy(dst, src, row_samples * 2);
    } else {
      std::copy(src, src + row_samples, dst);
    }
  }
  return std::move(*raw);
}

class PnmParser {
 public:
  explicit PnmParser(ByteSpan bytes) : bytes_(bytes) {}

  RawImage parse() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') {
      throw Error(ErrorCode::kUnsupportedFormat, "not a PNG or PNM stream");
    }
    const char kind = static_cast<char>(bytes_[1]);
    if (kind != '5' && kind != '6') {
      throw Error(ErrorCode::kUnsupportedFormat,
                  std::string("unsupported PNM variant P") + kind);
    }
    pos_ = 2;
    const std::size_t width = read_number();
    const std::size_t height = read_number();
    const std::size_t maxval = read_number();
    if (width == 0 || height == 0) throw decode_error(pos_, "zero image dimension");
    if (maxval == 0 || maxval > 65535) throw decode_error(pos_, "maxval out of range");
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw decode_error(pos_, "missing whitespace after header");
    }
    ++pos_;

    RawImage raw;
    raw.width = width;
    raw.height = height;
    raw.channels = kind == '6' ? 3 : 1;
    raw.bit_depth = maxval > 255 ? 16 : 8;
    raw.max_value = static_cast<std::uint32_t>(maxval);
    const std::size_t count = width * height * static_cast<std::size_t>(raw.channels);
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t needed = count * bytes_per_sample;
    if (bytes_.size() - pos_ < needed) {
      throw decode_error(bytes_.size(), "pixel data truncated, expected " +
                                            std::to_string(needed) + " bytes from offset " +
                                            std::to_string(pos_));
    }
    raw.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t v = bytes_[pos_ + i * bytes_per_sample];
      if (bytes_per_sample == 2) v = (v << 8) | bytes_[pos_ + i * 2 + 1];
      if (v > maxval) throw decode_error(pos_ + i * bytes_per_sample, "sample exceeds maxval");
      raw.samples[i] = static_cast<std::uint16_t>(v);
    }
    return raw;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t read_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw decode_error(pos_, "expected a decimal number in PNM header");
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (1u << 30)) throw decode_error(pos_, "header value too large");
      ++pos_;
    }
    return value;
  }

  ByteSpan bytes_;
  std::size_t pos_ = 0;
};

Bytes write_png(std::size_t width, std::size_t height, int color_type,
                const std::vector<png_color>& palette,
                const std::vector<std::uint8_t>& pixels, std::size_t channels) {
  auto state = std::make_unique<PngState>();
  auto rows = std::make_unique<std::vector<png_bytep>>(height);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, state.get(),
                                            on_png_error, on_png_warning);
  if (png == nullptr) throw Error(ErrorCode::kIo, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::kIo, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "PNG encode failed: " + state->message);
  }
  png_set_write_fn(png, state.get(), on_png_write, on_png_flush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
  }
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  auto* base = const_cast<std::uint8_t*>(pixels.data());
  for (std::size_t y = 0; y < height; ++y) {
    (*rows)[y] = base + y * width * channels;
  }
  png_write_image(png, rows->data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return std::move(state->output);
}

std::uint8_t to_byte(double channel) {
  const double v = std::clamp(channel, 0.0, 1.0) * 255.0 + 0.5;
  return static_cast<std::uint8_t>(v);
}

}  // namespace

RawImage decode_raw(ByteSpan bytes, bool expand_palette) {
  if (bytes.empty()) throw Error(ErrorCode::kDecode, "decode error at byte offset 0: empty input");
  RawImage raw = is_png(bytes) ? decode_png(bytes, expand_palette) : PnmParser(bytes).parse();
  if (raw.width == 0 || raw.height == 0) throw decode_error(0, "zero image dimension");
  return raw;
}

RgbImage decode_image(ByteSpan bytes) {
  const RawImage raw = decode_raw(bytes, true);
  RgbImage img(raw.width, raw.height);
  const double scale = 1.0 / static_cast<double>(raw.max_value);
  const auto ch = static_cast<std::size_t>(raw.channels);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const std::uint16_t* s = raw.samples.data() + i * ch;
    if (ch <= 2) {
      const double v = s[0] * scale;
      img.pixels[i] = {v, v, v};
    } else {
      img.pixels[i] = {s[0] * scale, s[1] * scale, s[2] * scale};
    }
  }
  return img;
}

GrayImage decode_gray(ByteSpan bytes) {
  const RawImage raw = decode_raw(bytes, true);
  GrayImage gray(raw.width, raw.height);
  const auto ch = static_cast<std::size_t>(raw.channels);
  const auto rescale = [&](std::uint32_t v) -> std::uint8_t {
    if (raw.max_value == 255) return static_cast<std::uint8_t>(v);
    return static_cast<std::uint8_t>((v * 255u + raw.max_value / 2) / raw.max_value);
  };
  for (std::size_t i = 0; i < gray.values.size(); ++i) {
    const std::uint16_t* s = raw.samples.data() + i * ch;
    if (ch >= 3 && (s[0] != s[1] || s[1] != s[2])) {
      throw Error(ErrorCode::kFormat, "expected a grayscale image, pixel " +
                                          std::to_string(i) + " has distinct channels");
    }
    gray.values[i] = rescale(s[0]);
  }
  return gray;
}

LabelMap decode_labelmap(ByteSpan bytes) {
  const RawImage raw = decode_raw(bytes, false);
  if (raw.channels != 1 || raw.bit_depth != 8) {
    throw Error(ErrorCode::kUnsupportedFormat, "label maps must be 8-bit indexed or grayscale");
  }
  LabelMap labels(raw.width, raw.height, 0);
  std::size_t max_id = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels.labels[i] = raw.samples[i];
    max_id = std::max<std::size_t>(max_id, raw.samples[i]);
  }
  labels.num_classes = raw.indexed && raw.palette_size > 0
                           ? std::max(raw.palette_size - 1, max_id)
                           : max_id;
  return labels;
}

std::array<std::uint8_t, 3> label_color(ClassId id) {
  if (id == kUnlabeled) return {0, 0, 0};
  return kPalette[(id - 1u) % kPalette.size()];
}

Bytes encode_labelmap(const LabelMap& labels) {
  if (labels.num_classes > 255) {
    throw Error(ErrorCode::kTooManyClasses, "label maps hold at most 255 classes, got " +
                                                std::to_string(labels.num_classes));
  }
  validate(labels);
  if (labels.width == 0 || labels.height == 0) {
    throw Error(ErrorCode::kDimension, "cannot encode an empty label map");
  }
  std::vector<png_color> palette(labels.num_classes + 1);
  for (std::size_t c = 0; c < palette.size(); ++c) {
    const auto rgb = label_color(static_cast<ClassId>(c));
    palette[c] = {rgb[0], rgb[1], rgb[2]};
  }
  std::vector<std::uint8_t> pixels(labels.labels.begin(), labels.labels.end());
  return write_png(labels.width, labels.height, PNG_COLOR_TYPE_PALETTE, palette, pixels, 1);
}

Bytes encode_png(const RgbImage& img) {
  std::vector<std::uint8_t> pixels;
  pixels.reserve(img.size() * 3);
  for (const Rgb& p : img.pixels) {
    pixels.push_back(to_byte(p.r));
    pixels.push_back(to_byte(p.g));
    pixels.push_back(to_byte(p.b));
  }
  return write_png(img.width, img.height, PNG_COLOR_TYPE_RGB, {}, pixels, 3);
}

Bytes encode_png(const GrayImage& img) {
  return write_png(img.width, img.height, PNG_COLOR_TYPE_GRAY, {}, img.values, 1);
}

Bytes encode_ppm(const RgbImage& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  for (const Rgb& p : img.pixels) {
    out.push_back(to_byte(p.r));
    out.push_back(to_byte(p.g));
    out.push_back(to_byte(p.b));
  }
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, ByteSpan bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace lapseg
