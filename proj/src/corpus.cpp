#include "intsense/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "intsense/io.hpp"
#include "intsense/rng.hpp"

namespace intsense {

Corpus load_corpus_dir(const std::string& dir, const std::string& split) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw std::runtime_error(dir + ": not a directory");
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".pgm") names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) throw std::runtime_error(dir + ": no .pgm images found");
    Corpus corpus;
    corpus.split = split;
    for (const auto& name : names) {
        PgmImage img = read_pgm((fs::path(dir) / name).string());
        corpus.images.push_back(pgm_to_real(img));
        corpus.dims.emplace_back(img.rows, img.cols);
        corpus.ids.push_back(name);
    }
    return corpus;
}

namespace {

// circular box blur along rows then columns, applied in place
void circular_blur(Eigen::MatrixXd& img, int w) {
    const int rows = static_cast<int>(img.rows());
    const int cols = static_cast<int>(img.cols());
    Eigen::MatrixXd tmp(rows, cols);
    const double inv = 1.0 / w;
    const int h = w / 2;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int k = -h; k <= h; ++k) acc += img(r, (c + k + cols) % cols);
            tmp(r, c) = acc * inv;
        }
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) {
            double acc = 0.0;
            for (int k = -h; k <= h; ++k) acc += tmp((r + k + rows) % rows, c);
            img(r, c) = acc * inv;
        }
}

} // namespace

Corpus make_synthetic_corpus(int count, int rows, int cols, std::uint64_t seed,
                             const std::string& split) {
    if (count < 1) throw std::invalid_argument("make_synthetic_corpus: count must be positive");
    if (rows < 2 || cols < 2)
        throw std::invalid_argument("make_synthetic_corpus: images must be at least 2x2");
    const int w = std::max(3, (std::min(rows, cols) / 8) | 1);

    // marginal std of the blurred unit white noise (stationary under the
    // circular blur), measured once on a delta image
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(rows, cols);
    delta(rows / 2, cols / 2) = 1.0;
    circular_blur(delta, w);
    const double kernel_norm = std::sqrt(delta.array().square().sum());

    Rng rng(seed);
    Corpus corpus;
    corpus.split = split;
    for (int i = 0; i < count; ++i) {
        Eigen::MatrixXd field(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) field(r, c) = rng.normal();
        circular_blur(field, w);
        double mean = 0.5 + 0.1 * (rng.uniform() - 0.5);
        field = (mean + (0.13 / kernel_norm) * field.array()).matrix();
        Eigen::VectorXd img(static_cast<Eigen::Index>(rows) * cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                double v = field(r, c);
                img[static_cast<Eigen::Index>(r) * cols + c] = v < 0.0 ? 0.0 : v > 1.0 ? 1.0 : v;
            }
        corpus.images.push_back(std::move(img));
        corpus.dims.emplace_back(rows, cols);
        corpus.ids.push_back("synthetic_" + std::to_string(i));
    }
    return corpus;
}

Eigen::VectorXd downsample_area(const Eigen::VectorXd& image, int rows, int cols, int f) {
    if (image.size() != static_cast<Eigen::Index>(rows) * cols)
        throw std::invalid_argument("downsample_area: size mismatch");
    if (rows < f || cols < f)
        throw std::invalid_argument("downsample_area: image smaller than target");
    const int cell_r = rows / f;
    const int cell_c = cols / f;
    const int r0 = (rows - cell_r * f) / 2;
    const int c0 = (cols - cell_c * f) / 2;
    Eigen::VectorXd out(static_cast<Eigen::Index>(f) * f);
    for (int br = 0; br < f; ++br)
        for (int bc = 0; bc < f; ++bc) {
            double acc = 0.0;
            for (int r = 0; r < cell_r; ++r)
                for (int c = 0; c < cell_c; ++c)
                    acc += image[(r0 + br * cell_r + r) * static_cast<Eigen::Index>(cols) +
                                 c0 + bc * cell_c + c];
            out[static_cast<Eigen::Index>(br) * f + bc] = acc / (cell_r * cell_c);
        }
    return out;
}

} // namespace intsense
