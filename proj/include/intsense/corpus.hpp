#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace intsense {

// A set of grayscale images with stable ids. Pixel intensities are real
// values in [0, 1]; 8-bit sources convert as x / 255 exactly.
struct Corpus {
    std::vector<Eigen::VectorXd> images;
    std::vector<std::pair<int, int>> dims;  // rows, cols per image
    std::vector<std::string> ids;
    std::string split;  // "train" or "test"
};

// loads every *.pgm under dir, sorted by filename
Corpus load_corpus_dir(const std::string& dir, const std::string& split);

// Deterministic synthetic corpus: smoothed Gaussian random fields with a
// small per-image mean jitter, clamped to [0, 1]. Smoothing is a fixed
// circular separable blur, so pixel values are (up to the rare clamp) exact
// linear images of white Gaussian noise.
Corpus make_synthetic_corpus(int count, int rows, int cols, std::uint64_t seed,
                             const std::string& split);

// center-crop to a multiple of f, then average each cell; result is f x f
Eigen::VectorXd downsample_area(const Eigen::VectorXd& image, int rows, int cols, int f);

} // namespace intsense
