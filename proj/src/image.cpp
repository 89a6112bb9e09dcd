// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#include "mito/image.hpp"

#include <opencv2/imgcodecs.hpp>

#include "mito/util.hpp"

namespace mito {

ImageBuffer load_image(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) throw Error("cannot decode image: " + path.string());
  if (mat.depth() != CV_8U) {
    throw Error("unsupported image depth (want 8-bit): " + path.string());
  }
  const int src_channels = mat.channels();
  const int dst_channels = src_channels >= 3 ? 3 : 1;
  ImageBuffer out(mat.cols, mat.rows, dst_channels);
  for (int y = 0; y < mat.rows; ++y) {
    const uint8_t* row = mat.ptr<uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) {
      if (dst_channels == 3) {
        // OpenCV decodes BGR(A); keep RGB in memory, drop alpha.
        out.at(x, y, 0) = row[x * src_channels + 2];
        out.at(x, y, 1) = row[x * src_channels + 1];
        out.at(x, y, 2) = row[x * src_channels + 0];
      } else {
        out.at(x, y, 0) = row[x * src_channels];
      }
    }
  }
  return out;
}

void save_png(const std::filesystem::path& path, const ImageBuffer& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error("save_png supports 1 or 3 channels, got " +
                std::to_string(image.channels));
  }
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  cv::Mat mat(image.height, image.width,
              image.channels == 3 ? CV_8UC3 : CV_8UC1);
  for (int y = 0; y < image.height; ++y) {
    uint8_t* row = mat.ptr<uint8_t>(y);
    for (int x = 0; x < image.width; ++x) {
      if (image.channels == 3) {
        row[x * 3 + 0] = image.at(x, y, 2);
        row[x * 3 + 1] = image.at(x, y, 1);
        row[x * 3 + 2] = image.at(x, y, 0);
      } else {
        row[x] = image.at(x, y, 0);
      }
    }
  }
  if (!cv::imwrite(path.string(), mat)) {
    throw Error("cannot write image: " + path.string());
  }
}

ImageBuffer crop(const ImageBuffer& image, const Box& rect) {
  if (rect.x_min < 0 || rect.y_min < 0 || rect.x_max > image.width ||
      rect.y_max > image.height || !rect.valid()) {
    throw Error("crop rect [" + std::to_string(rect.x_min) + "," +
                std::to_string(rect.y_min) + "," + std::to_string(rect.x_max) +
                "," + std::to_string(rect.y_max) + ") leaves image bounds " +
                std::to_string(image.width) + "×" +
                std::to_string(image.height));
  }
  ImageBuffer out(rect.width(), rect.height(), image.channels);
  const size_t row_bytes =
      static_cast<size_t>(rect.width()) * image.channels;
  for (int y = 0; y < rect.height(); ++y) {
    const size_t src = image.index(rect.x_min, rect.y_min + y, 0);
    const size_t dst = out.index(0, y, 0);
    std::copy_n(image.data.begin() + static_cast<ptrdiff_t>(src), row_bytes,
                out.data.begin() + static_cast<ptrdiff_t>(dst));
  }
  return out;
}

std::shared_ptr<const ImageBuffer> SlideCache::get(
    const std::filesystem::path& path) {
  const std::string key = path.string();
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  // Decode outside the lock; a racing duplicate decode is harmless.
  auto image = std::make_shared<const ImageBuffer>(load_image(path));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.emplace(key, std::move(image));
  return it->second;
}

void SlideCache::clear() {
  std::lock_guard lock(mutex_);
  cache_.clear();
}

}  // namespace mito
