#pragma once

#include <map>
#include <string>

#include "qrf/render/image.hpp"

namespace qrf {

/// Text metadata stored alongside an image (PNG tEXt chunks, PPM comment lines).
using ImageMetadata = std::map<std::string, std::string>;

/// 8-bit RGB PNG. Values are clamped to [0, 1] and rounded.
void write_png(const std::string& path, const Image& image, const ImageMetadata& metadata = {});
Image read_png(const std::string& path, ImageMetadata* metadata = nullptr);

/// Binary PPM (P6, maxval 255) with one "# key=value" comment per metadata entry.
void write_ppm(const std::string& path, const Image& image, const ImageMetadata& metadata = {});
Image read_ppm(const std::string& path, ImageMetadata* metadata = nullptr);

/// Dispatches on the extension (.png or .ppm).
void write_image(const std::string& path, const Image& image, const ImageMetadata& metadata = {});
Image read_image(const std::string& path, ImageMetadata* metadata = nullptr);

}  // namespace qrf
