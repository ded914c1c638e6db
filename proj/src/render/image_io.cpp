#include "qrf/render/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qrf/errors.hpp"

namespace qrf {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::vector<std::uint8_t> to_bytes(const Image& image) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(image.size()) * 3);
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(i * 3 + c)] = to_byte(image.pixels()(i, c));
  }
  return out;
}

Image from_bytes(int w, int h, const std::vector<std::uint8_t>& bytes) {
  Image image(w, h);
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    for (int c = 0; c < 3; ++c) image.pixels()(i, c) = bytes[static_cast<std::size_t>(i * 3 + c)] / 255.0;
  }
  return image;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                    [](char a, char b) { return std::tolower(static_cast<unsigned char>(a)) == b; });
}

// libpng reports errors by longjmp; these frames hold no objects with destructors.
bool png_write_raw(std::FILE* file, int w, int h, png_bytep* rows, png_text* text, int n_text) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (n_text > 0) png_set_text(png, info, text, n_text);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct PngReadResult {
  int w = 0;
  int h = 0;
  std::uint8_t* pixels = nullptr;  // malloc'd, w * h * 3 bytes
  ImageMetadata* metadata = nullptr;
};

void collect_text(png_structp png, png_infop info, ImageMetadata* metadata) {
  png_textp text = nullptr;
  int n = 0;
  png_get_text(png, info, &text, &n);
  for (int i = 0; i < n; ++i) (*metadata)[text[i].key] = std::string(text[i].text, text[i].text_length);
}

bool png_read_raw(std::FILE* file, PngReadResult* out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  png_bytep* volatile rows = nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    std::free(rows);
    std::free(out->pixels);
    out->pixels = nullptr;
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  out->w = static_cast<int>(png_get_image_width(png, info));
  out->h = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(out->w) * 3) png_error(png, "unsupported pixel layout");
  out->pixels = static_cast<std::uint8_t*>(std::malloc(static_cast<std::size_t>(out->w) * out->h * 3));
  rows = static_cast<png_bytep*>(std::malloc(sizeof(png_bytep) * static_cast<std::size_t>(out->h)));
  if (!out->pixels || !rows) png_error(png, "out of memory");
  for (int y = 0; y < out->h; ++y) rows[y] = out->pixels + static_cast<std::size_t>(y) * out->w * 3;
  png_read_image(png, rows);
  png_read_end(png, info);
  if (out->metadata) collect_text(png, info, out->metadata);
  std::free(rows);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

void write_png(const std::string& path, const Image& image, const ImageMetadata& metadata) {
  detail::require(image.size() > 0, "write_png: empty image");
  auto file = open_file(path, "wb");
  auto bytes = to_bytes(image);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) {
    rows[static_cast<std::size_t>(y)] = bytes.data() + static_cast<std::size_t>(y) * image.width() * 3;
  }
  std::vector<std::string> keys, values;
  for (const auto& [k, v] : metadata) {
    keys.push_back(k);
    values.push_back(v);
  }
  std::vector<png_text> text(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    text[i] = png_text{};
    text[i].compression = PNG_TEXT_COMPRESSION_NONE;
    text[i].key = keys[i].data();
    text[i].text = values[i].data();
    text[i].text_length = values[i].size();
  }
  if (!png_write_raw(file.get(), image.width(), image.height(), rows.data(), text.data(), static_cast<int>(text.size()))) {
    throw std::runtime_error("write_png: failed writing " + path);
  }
}

Image read_png(const std::string& path, ImageMetadata* metadata) {
  auto file = open_file(path, "rb");
  PngReadResult raw;
  raw.metadata = metadata;
  if (!png_read_raw(file.get(), &raw)) throw std::runtime_error("read_png: failed reading " + path);
  std::vector<std::uint8_t> bytes(raw.pixels, raw.pixels + static_cast<std::size_t>(raw.w) * raw.h * 3);
  std::free(raw.pixels);
  return from_bytes(raw.w, raw.h, bytes);
}

void write_ppm(const std::string& path, const Image& image, const ImageMetadata& metadata) {
  detail::require(image.size() > 0, "write_ppm: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "P6\n";
  for (const auto& [k, v] : metadata) {
    detail::require(v.find('\n') == std::string::npos, "write_ppm: metadata values must be single-line");
    out << "# " << k << '=' << v << '\n';
  }
  out << image.width() << ' ' << image.height() << "\n255\n";
  const auto bytes = to_bytes(image);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write_ppm: failed writing " + path);
}

Image read_ppm(const std::string& path, ImageMetadata* metadata) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto next_token = [&]() {
    std::string token;
    while (in) {
      const int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
        const auto eq = line.find('=');
        if (metadata && eq != std::string::npos) {
          const auto start = line.find_first_not_of("# ");
          (*metadata)[line.substr(start, eq - start)] = line.substr(eq + 1);
        }
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    in >> token;
    return token;
  };
  if (next_token() != "P6") throw std::runtime_error("read_ppm: not a binary PPM: " + path);
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  detail::require(w > 0 && h > 0 && maxval == 255, "read_ppm: only 8-bit images are supported");
  in.get();
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * 3);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw std::runtime_error("read_ppm: truncated file " + path);
  return from_bytes(w, h, bytes);
}

void write_image(const std::string& path, const Image& image, const ImageMetadata& metadata) {
  if (has_suffix(path, ".ppm")) return write_ppm(path, image, metadata);
  if (has_suffix(path, ".png")) return write_png(path, image, metadata);
  throw InvalidArgument("write_image: unknown image extension: " + path);
}

Image read_image(const std::string& path, ImageMetadata* metadata) {
  if (has_suffix(path, ".ppm")) return read_ppm(path, metadata);
  if (has_suffix(path, ".png")) return read_png(path, metadata);
  throw InvalidArgument("read_image: unknown image extension: " + path);
}

}  // namespace qrf
