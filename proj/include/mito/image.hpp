// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mito/geometry.hpp"

namespace mito {

// Interleaved 8-bit image, row-major, RGB channel order for 3-channel data.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> data;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, int c)
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, 0) {}

  size_t index(int x, int y, int c) const {
    return (static_cast<size_t>(y) * width + x) * channels + c;
  }
  uint8_t at(int x, int y, int c) const { return data[index(x, y, c)]; }
  uint8_t& at(int x, int y, int c) { return data[index(x, y, c)]; }

  bool operator==(const ImageBuffer&) const = default;
};

// Decodes PNG/TIFF/JPEG from disk; throws on unreadable files.
ImageBuffer load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const ImageBuffer& image);

// Exact pixel copy of `rect`; throws if the rect leaves the image.
ImageBuffer crop(const ImageBuffer& image, const Box& rect);

// Keeps decoded slides alive across tile reads. get() is safe to call from
// multiple threads; decoded images are immutable and shared.
class SlideCache {
 public:
  std::shared_ptr<const ImageBuffer> get(const std::filesystem::path& path);
  void clear();

 private:
  std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const ImageBuffer>> cache_;
};

}  // namespace mito
