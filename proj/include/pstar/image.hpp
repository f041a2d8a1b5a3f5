#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace pstar {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

// Interleaved 8-bit RGB raster, row-major.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return pixel_count() == 0; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);

  std::span<const std::uint8_t> bytes() const noexcept { return data_; }
  std::span<std::uint8_t> bytes() noexcept { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Decodes a PNG or JPEG file to 8-bit RGB. Throws Error{IoError|ImageDecode}.
RgbImage load_image(const std::filesystem::path& path);

// Writes PNG (used by tooling and tests to materialize fixtures).
void save_png(const RgbImage& image, const std::filesystem::path& path);

}  // namespace pstar
