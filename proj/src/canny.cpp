#include "pstar/canny.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "pstar/error.hpp"

namespace pstar {
namespace {

constexpr int kKernelBits = 12;

std::vector<std::int64_t> fixed_point_gaussian(int size, double sigma) {
  const int half = size / 2;
  std::vector<double> w(size);
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - half;
    w[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += w[i];
  }
  std::vector<std::int64_t> k(size);
  const double scale = static_cast<double>(1 << kKernelBits);
  for (int i = 0; i < size; ++i) k[i] = std::llround(w[i] / sum * scale);
  // Force the taps to sum to exactly 2^bits so smoothing preserves constants.
  const auto total = std::accumulate(k.begin(), k.end(), std::int64_t{0});
  k[half] += (std::int64_t{1} << kKernelBits) - total;
  return k;
}

int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

std::vector<std::uint8_t> smooth(const std::vector<std::uint8_t>& gray, int w, int h,
                                 const CannyParams& p) {
  const auto k = fixed_point_gaussian(p.gaussian_size, p.sigma);
  const int half = p.gaussian_size / 2;
  std::vector<std::int64_t> horiz(gray.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t acc = 0;
      for (int i = -half; i <= half; ++i) {
        acc += k[i + half] * gray[static_cast<std::size_t>(y) * w + clampi(x + i, 0, w - 1)];
      }
      horiz[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  std::vector<std::uint8_t> out(gray.size());
  const std::int64_t round = std::int64_t{1} << (2 * kKernelBits - 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t acc = 0;
      for (int i = -half; i <= half; ++i) {
        acc += k[i + half] * horiz[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(std::clamp<std::int64_t>((acc + round) >> (2 * kKernelBits), 0, 255));
    }
  }
  return out;
}

}  // namespace

std::size_t EdgeMap::edge_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::vector<std::uint8_t> to_gray(const RgbImage& image) {
  std::vector<std::uint8_t> gray(image.pixel_count());
  const auto bytes = image.bytes();
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const int v = 299 * bytes[3 * i] + 587 * bytes[3 * i + 1] + 114 * bytes[3 * i + 2];
    gray[i] = static_cast<std::uint8_t>((v + 500) / 1000);
  }
  return gray;
}

EdgeMap canny(const RgbImage& image, const CannyParams& params) {
  const int w = image.width();
  const int h = image.height();
  if (w < 3 || h < 3) throw Error(ErrorKind::ImageTooSmall, "Canny needs at least 3x3 pixels");
  if (params.gaussian_size < 3 || params.gaussian_size % 2 == 0 || params.sigma <= 0.0) {
    throw Error(ErrorKind::Usage, "invalid Gaussian kernel parameters");
  }

  const auto blurred = smooth(to_gray(image), w, h, params);
  const auto px = [&](int x, int y) -> int {
    return blurred[static_cast<std::size_t>(clampi(y, 0, h - 1)) * w + clampi(x, 0, w - 1)];
  };

  const std::size_t n = image.pixel_count();
  std::vector<int> gx(n), gy(n);
  std::vector<std::int64_t> mag2(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int dx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                     (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
      const int dy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                     (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
      const auto i = static_cast<std::size_t>(y) * w + x;
      gx[i] = dx;
      gy[i] = dy;
      mag2[i] = std::int64_t{dx} * dx + std::int64_t{dy} * dy;
    }
  }
  const auto m = [&](int x, int y) -> std::int64_t {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0;
    return mag2[static_cast<std::size_t>(y) * w + x];
  };

  // Squared magnitudes keep the comparisons exact on integer gradients.
  const double low2 = params.low_threshold * params.low_threshold;
  const double high2 = params.high_threshold * params.high_threshold;
  const double tan22 = std::tan(std::acos(-1.0) / 8.0);
  const double tan67 = 1.0 / tan22;

  // 0 = none, 1 = weak candidate, 2 = strong
  std::vector<std::uint8_t> cls(n, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = static_cast<std::size_t>(y) * w + x;
      const auto v = mag2[i];
      if (static_cast<double>(v) <= low2) continue;
      const double ax = std::abs(gx[i]);
      const double ay = std::abs(gy[i]);
      bool is_max = false;
      if (ay < tan22 * ax) {
        is_max = v > m(x - 1, y) && v >= m(x + 1, y);
      } else if (ay > tan67 * ax) {
        is_max = v > m(x, y - 1) && v >= m(x, y + 1);
      } else {
        const int s = (gx[i] < 0) != (gy[i] < 0) ? -1 : 1;
        is_max = v > m(x - s, y - 1) && v > m(x + s, y + 1);
      }
      if (!is_max) continue;
      cls[i] = static_cast<double>(v) > high2 ? 2 : 1;
    }
  }

  EdgeMap edges{w, h, std::vector<std::uint8_t>(n, 0)};
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (cls[i] == 2) {
      edges.mask[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const auto j = static_cast<std::size_t>(ny) * w + nx;
        if (cls[j] == 1 && edges.mask[j] == 0) {
          edges.mask[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return edges;
}

}  // namespace pstar
