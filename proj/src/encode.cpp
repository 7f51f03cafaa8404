#include "tnn/encode.hpp"

#include <cassert>
#include <cstdio>
#include <fstream>

#include "tnn/util.hpp"

namespace tnn {

namespace {

constexpr uint32_t kImageMagic = 0x00000803;
constexpr uint32_t kLabelMagic = 0x00000801;

uint32_t read_be32(std::ifstream& f, const std::string& path, size_t offset,
                   const char* what) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  if (!f) {
    throw DataError(path + ": truncated while reading " + what +
                    " at byte offset " + std::to_string(offset));
  }
  return (uint32_t{b[0]} << 24) | (uint32_t{b[1]} << 16) |
         (uint32_t{b[2]} << 8) | uint32_t{b[3]};
}

std::string hex32(uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

}  // namespace

void load_idx_pair(const std::string& images_path,
                   const std::string& labels_path, Dataset& ds) {
  std::ifstream imf(images_path, std::ios::binary);
  if (!imf) throw DataError("cannot open image file " + images_path);
  uint32_t magic = read_be32(imf, images_path, 0, "magic");
  if (magic != kImageMagic) {
    throw DataError(images_path + ": bad image magic " + hex32(magic) +
                    " at byte offset 0, expected " + hex32(kImageMagic));
  }
  uint32_t count = read_be32(imf, images_path, 4, "image count");
  uint32_t rows = read_be32(imf, images_path, 8, "row count");
  uint32_t cols = read_be32(imf, images_path, 12, "column count");
  if (rows != kImageSide || cols != kImageSide) {
    throw DataError(images_path + ": expected 28x28 images, got " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  size_t pixel_bytes = size_t{count} * kImagePixels;
  size_t old_pixels = ds.pixels.size();
  ds.pixels.resize(old_pixels + pixel_bytes);
  imf.read(reinterpret_cast<char*>(ds.pixels.data() + old_pixels),
           static_cast<std::streamsize>(pixel_bytes));
  if (static_cast<size_t>(imf.gcount()) != pixel_bytes) {
    throw DataError(images_path + ": truncated pixel data at byte offset " +
                    std::to_string(16 + imf.gcount()) + ", expected " +
                    std::to_string(16 + pixel_bytes) + " bytes total");
  }

  std::ifstream lbf(labels_path, std::ios::binary);
  if (!lbf) throw DataError("cannot open label file " + labels_path);
  uint32_t lmagic = read_be32(lbf, labels_path, 0, "magic");
  if (lmagic != kLabelMagic) {
    throw DataError(labels_path + ": bad label magic " + hex32(lmagic) +
                    " at byte offset 0, expected " + hex32(kLabelMagic));
  }
  uint32_t lcount = read_be32(lbf, labels_path, 4, "label count");
  if (lcount != count) {
    throw DataError(labels_path + ": label count " + std::to_string(lcount) +
                    " does not match image count " + std::to_string(count) +
                    " from " + images_path);
  }
  size_t old_labels = ds.labels.size();
  ds.labels.resize(old_labels + lcount);
  lbf.read(reinterpret_cast<char*>(ds.labels.data() + old_labels), lcount);
  if (static_cast<size_t>(lbf.gcount()) != lcount) {
    throw DataError(labels_path + ": truncated label data at byte offset " +
                    std::to_string(8 + lbf.gcount()) + ", expected " +
                    std::to_string(8 + size_t{lcount}) + " bytes total");
  }
}

BinaryImage binarize_image(std::span<const uint8_t> pixels,
                           uint8_t threshold) {
  assert(pixels.size() == kImagePixels);
  BinaryImage out{};
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = pixels[i] >= threshold ? 1 : 0;
  }
  return out;
}

BinaryImage transpose(const BinaryImage& img) {
  BinaryImage out{};
  for (int32_t r = 0; r < kImageSide; ++r) {
    for (int32_t c = 0; c < kImageSide; ++c) {
      out[static_cast<size_t>(c) * kImageSide + r] =
          img[static_cast<size_t>(r) * kImageSide + c];
    }
  }
  return out;
}

void posneg_encode(const BinaryImage& img, EncodedFrame& out) {
  out.lines.assign(static_cast<size_t>(kRfCount) * kRfLines,
                   SpikeTime::inf());
  static constexpr int32_t kCorner[4][2] = {{0, 0}, {0, 2}, {2, 0}, {2, 2}};
  size_t line = 0;
  for (int32_t r = 0; r < kRfGrid; ++r) {
    for (int32_t c = 0; c < kRfGrid; ++c) {
      for (int32_t k = 0; k < 4; ++k) {
        uint8_t px = img[static_cast<size_t>(r + kCorner[k][0]) * kImageSide +
                         (c + kCorner[k][1])];
        if (px) out.lines[line + k] = SpikeTime(0);
        else out.lines[line + 4 + k] = SpikeTime(0);
      }
      line += kRfLines;
    }
  }
}

void posneg_encode_window(const BinaryImage& img, int32_t top, int32_t left,
                          int32_t side, Volley& out) {
  assert(top >= 0 && left >= 0 && top + side <= kImageSide &&
         left + side <= kImageSide);
  size_t n = static_cast<size_t>(side) * side;
  out.assign(2 * n, SpikeTime::inf());
  size_t k = 0;
  for (int32_t r = 0; r < side; ++r) {
    for (int32_t c = 0; c < side; ++c, ++k) {
      uint8_t px = img[static_cast<size_t>(top + r) * kImageSide + (left + c)];
      if (px) out[k] = SpikeTime(0);
      else out[n + k] = SpikeTime(0);
    }
  }
}

StreamSpec one_phase_spec(uint64_t length) {
  return StreamSpec{{{length, PhaseTransform::kIdentity}}};
}

StreamSpec three_phase_spec() {
  return StreamSpec{{{20000, PhaseTransform::kIdentity},
                     {20000, PhaseTransform::kTranspose},
                     {30000, PhaseTransform::kTransposeSwap}}};
}

Stream::Stream(const Dataset* data, StreamSpec spec,
               uint8_t binarize_threshold, uint64_t start)
    : data_(data), spec_(std::move(spec)), threshold_(binarize_threshold),
      pos_(start) {
  assert(data_);
  if (spec_.total() > data_->size()) {
    throw DataError("stream needs " + std::to_string(spec_.total()) +
                    " images but the dataset holds " +
                    std::to_string(data_->size()));
  }
  if (start > spec_.total()) {
    throw DataError("stream start " + std::to_string(start) +
                    " is past the stream end " +
                    std::to_string(spec_.total()));
  }
}

bool Stream::next(StreamItem& out) {
  if (pos_ >= spec_.total()) return false;
  uint64_t idx = pos_;
  PhaseTransform tf = PhaseTransform::kIdentity;
  uint64_t off = idx;
  for (const StreamPhase& ph : spec_.phases) {
    if (off < ph.length) {
      tf = ph.transform;
      break;
    }
    off -= ph.length;
  }
  out.index = idx;
  out.label = data_->labels[idx];
  out.binary = binarize_image(data_->image(idx), threshold_);
  if (tf != PhaseTransform::kIdentity) out.binary = transpose(out.binary);
  if (tf == PhaseTransform::kTransposeSwap) out.label = swap_label(out.label);
  posneg_encode(out.binary, out.frame);
  ++pos_;
  return true;
}

}  // namespace tnn
