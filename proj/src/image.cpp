#include "pstar/image.hpp"

#include <opencv2/imgcodecs.hpp>

#include "pstar/error.hpp"

namespace pstar {

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error(ErrorKind::EmptyImage, "negative image dimensions");
  data_.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    data_[3 * i] = fill.r;
    data_[3 * i + 1] = fill.g;
    data_[3 * i + 2] = fill.b;
  }
}

Rgb RgbImage::at(int x, int y) const {
  const auto i = 3 * (static_cast<std::size_t>(y) * width_ + x);
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
  const auto i = 3 * (static_cast<std::size_t>(y) * width_ + x);
  data_[i] = c.r;
  data_[i + 1] = c.g;
  data_[i + 2] = c.b;
}

RgbImage load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::IoError, "image not found: " + path.string());
  }
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty() || bgr.depth() != CV_8U) {
    throw Error(ErrorKind::ImageDecode, "cannot decode image: " + path.string());
  }
  RgbImage out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) out.set(x, y, {row[x][2], row[x][1], row[x][0]});
  }
  return out;
}

void save_png(const RgbImage& image, const std::filesystem::path& path) {
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width(); ++x) {
      const auto c = image.at(x, y);
      row[x] = cv::Vec3b(c.b, c.g, c.r);
    }
  }
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  if (!cv::imwrite(path.string(), bgr)) {
    throw Error(ErrorKind::IoError, "cannot write image: " + path.string());
  }
}

}  // namespace pstar
