#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tnn/types.hpp"

namespace tnn {

inline constexpr int32_t kImageSide = 28;
inline constexpr int32_t kImagePixels = kImageSide * kImageSide;
inline constexpr int32_t kRfGrid = kImageSide - 2;  // 26: 3x3 windows, stride 1
inline constexpr int32_t kRfCount = kRfGrid * kRfGrid;
inline constexpr int32_t kRfLines = 8;  // 4 corner pixels, pos + neg

// Grayscale images plus labels, flattened row-major.
struct Dataset {
  std::vector<uint8_t> pixels;  // size * 784
  std::vector<uint8_t> labels;  // size

  size_t size() const { return labels.size(); }
  std::span<const uint8_t> image(size_t i) const {
    return std::span<const uint8_t>(pixels).subspan(i * kImagePixels,
                                                    kImagePixels);
  }
};

// Loads one IDX image/label file pair, appending to ds. Validates magic
// numbers, dimensions, and lengths; errors cite the file and byte offset.
void load_idx_pair(const std::string& images_path,
                   const std::string& labels_path, Dataset& ds);

using BinaryImage = std::array<uint8_t, kImagePixels>;  // 0 or 1 per pixel

// Pixel >= threshold becomes 1.
BinaryImage binarize_image(std::span<const uint8_t> pixels, uint8_t threshold);

BinaryImage transpose(const BinaryImage& img);
constexpr int32_t swap_label(int32_t label) { return label ^ 1; }

// PosNeg-encoded frame: 676 receptive fields x 8 lines. Each window covers
// the 4 corner pixels of a 3x3 patch; lines 0..3 are positive (spike at 0
// when the pixel is 1), lines 4..7 negative. Every window emits exactly 4
// spikes.
struct EncodedFrame {
  std::vector<SpikeTime> lines;  // kRfCount * kRfLines

  std::span<const SpikeTime> window(int32_t rf) const {
    return std::span<const SpikeTime>(lines).subspan(
        static_cast<size_t>(rf) * kRfLines, kRfLines);
  }
};

void posneg_encode(const BinaryImage& img, EncodedFrame& out);

// General PosNeg encoding of a square window with corner step 1 (all pixels
// in the window participate): 2 * side * side lines. Used by probe columns.
void posneg_encode_window(const BinaryImage& img, int32_t top, int32_t left,
                          int32_t side, Volley& out);

enum class PhaseTransform { kIdentity, kTranspose, kTransposeSwap };

struct StreamPhase {
  uint64_t length = 0;
  PhaseTransform transform = PhaseTransform::kIdentity;
};

struct StreamSpec {
  std::vector<StreamPhase> phases;
  uint64_t total() const {
    uint64_t n = 0;
    for (const auto& p : phases) n += p.length;
    return n;
  }
};

StreamSpec one_phase_spec(uint64_t length = 70000);
StreamSpec three_phase_spec();

struct StreamItem {
  uint64_t index = 0;
  int32_t label = 0;
  BinaryImage binary{};
  EncodedFrame frame;
};

// Sequential pass over the dataset with per-phase transforms and encoding.
class Stream {
 public:
  Stream(const Dataset* data, StreamSpec spec, uint8_t binarize_threshold,
         uint64_t start = 0);

  bool next(StreamItem& out);
  uint64_t position() const { return pos_; }
  const StreamSpec& spec() const { return spec_; }

 private:
  const Dataset* data_;
  StreamSpec spec_;
  uint8_t threshold_;
  uint64_t pos_ = 0;
};

}  // namespace tnn
