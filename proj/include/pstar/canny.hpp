#pragma once

#include <cstdint>
#include <vector>

#include "pstar/image.hpp"

namespace pstar {

struct CannyParams {
  int gaussian_size = 5;  // odd, >= 3
  double sigma = 1.4;
  double low_threshold = 50.0;   // on Sobel L2 magnitude of the 8-bit image
  double high_threshold = 150.0;
};

struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;  // 1 = edge pixel

  std::size_t edge_count() const;
};

// 8-bit luma with integer weights 0.299/0.587/0.114, rounded half up.
std::vector<std::uint8_t> to_gray(const RgbImage& image);

// Canny edge detector: grayscale, Gaussian smoothing (fixed-point, replicate
// border, rounded back to 8 bits), 3x3 Sobel, non-maximum suppression along
// the quantized gradient direction, double-threshold hysteresis over the
// 8-neighbourhood. Magnitudes outside the image count as zero during
// suppression. Throws ImageTooSmall below 3x3.
EdgeMap canny(const RgbImage& image, const CannyParams& params = {});

}  // namespace pstar
