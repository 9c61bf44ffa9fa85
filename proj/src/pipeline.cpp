#include "intsense/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace intsense {
namespace {

void append_hash(std::uint64_t& h, const void* data, std::size_t len) {
    // FNV-1a
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

void append_hash_matrix(std::uint64_t& h, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double v = m(r, c);
            append_hash(h, &v, sizeof v);
        }
}

} // namespace

PcaBasis pca_components(const std::vector<Eigen::VectorXd>& blocks, int n_components) {
    if (blocks.empty()) throw std::invalid_argument("pca_components: no blocks");
    if (n_components < 1)
        throw std::invalid_argument("pca_components: n_components must be positive");
    const Eigen::Index n = blocks.front().size();
    const Eigen::Index cnt = static_cast<Eigen::Index>(blocks.size());
    Eigen::MatrixXd data(cnt, n);
    for (Eigen::Index i = 0; i < cnt; ++i) {
        if (blocks[i].size() != n)
            throw std::invalid_argument("pca_components: inconsistent block sizes");
        data.row(i) = blocks[i].transpose();
    }
    PcaBasis basis;
    basis.mean = data.colwise().mean().transpose();
    data.rowwise() -= basis.mean.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int avail = 0;
    double thresh = sv.size() ? 1e-12 * sv[0] : 0.0;
    for (Eigen::Index i = 0; i < sv.size() && i < n_components; ++i)
        if (sv[i] > thresh && sv[i] > 0.0) ++avail;
    basis.components = svd.matrixV().leftCols(avail).transpose();
    return basis;
}

DeltaTargets compute_delta_targets(const std::vector<Eigen::VectorXd>& blocks, int f,
                                   int n_components, double quantile,
                                   const std::string& corpus_id) {
    if (static_cast<int>(blocks.size()) < n_components + 1)
        throw std::invalid_argument("compute_delta_targets: need more than n_components blocks");
    if (!(quantile > 0.0) || quantile > 1.0)
        throw std::invalid_argument("compute_delta_targets: quantile must lie in (0, 1]");
    const int n = f * f;
    for (const auto& b : blocks)
        if (b.size() != n)
            throw std::invalid_argument("compute_delta_targets: block size must be f^2");

    // PCA sensing with phi = phi_dual = top components; a degenerate corpus
    // yields fewer (possibly zero) components and the distortion is measured
    // against whatever survived
    PcaBasis pca = pca_components(blocks, n_components);
    IntegralOperator op(f, f);
    const auto cnt = static_cast<Eigen::Index>(blocks.size());
    Eigen::MatrixXd abs_d(cnt, n);
    for (Eigen::Index j = 0; j < cnt; ++j) {
        Eigen::VectorXd proxy = pca.components.transpose() * (pca.components * blocks[j]);
        abs_d.row(j) = integral_transform(proxy - blocks[j], op).cwiseAbs().transpose();
    }

    // nearest-rank quantile per location
    DeltaTargets t{Eigen::VectorXd(n), corpus_id, n_components, quantile};
    std::vector<double> col(cnt);
    const auto rank = static_cast<Eigen::Index>(std::ceil(quantile * cnt));
    const auto pick = std::clamp<Eigen::Index>(rank, 1, cnt) - 1;
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < cnt; ++j) col[j] = abs_d(j, i);
        std::nth_element(col.begin(), col.begin() + pick, col.end());
        t.delta[i] = col[pick];
    }
    return t;
}

std::uint64_t operator_hash(const SensingOperatorPair& op) {
    std::uint64_t h = 1469598103934665603ull;
    std::uint32_t dims[3] = {static_cast<std::uint32_t>(op.rank),
                             static_cast<std::uint32_t>(op.block_side),
                             static_cast<std::uint32_t>(op.phi.cols())};
    append_hash(h, dims, sizeof dims);
    append_hash_matrix(h, op.phi);
    append_hash_matrix(h, op.phi_dual);
    return h;
}

Measurements sense(const Eigen::VectorXd& image, const SensingOperatorPair& op,
                   const BlockLayout& layout) {
    if (layout.block_side != op.block_side)
        throw std::invalid_argument("sense: layout and operator block sides differ");
    Measurements meas{{}, layout, operator_hash(op)};
    auto blocks = partition_blocks(image, layout);
    meas.per_block.reserve(blocks.size());
    for (const auto& blk : blocks) meas.per_block.emplace_back(op.phi * blk);
    return meas;
}

Eigen::VectorXd estimate_integral(const Measurements& meas, const SensingOperatorPair& op,
                                  const BlockLayout& layout, EstimateCost* cost) {
    if (!(layout == meas.layout))
        throw std::invalid_argument("estimate_integral: layout mismatch");
    if (meas.operator_id != operator_hash(op))
        throw std::invalid_argument("estimate_integral: measurements were made with a different operator");
    const int f = op.block_side;
    const int n_block = f * f;
    std::vector<Eigen::VectorXd> proxies;
    proxies.reserve(meas.per_block.size());
    for (const auto& y : meas.per_block) {
        if (y.size() != op.rank)
            throw std::invalid_argument("estimate_integral: measurement length mismatch");
        proxies.emplace_back(op.phi_dual.transpose() * y);
        if (cost)
            cost->multiply_accumulate +=
                static_cast<std::uint64_t>(n_block) * static_cast<std::uint64_t>(op.rank);
    }
    Eigen::VectorXd proxy_image = reassemble_blocks(proxies, layout);
    IntegralOperator full(layout.cropped_rows, layout.cropped_cols);
    if (cost) cost->scan_adds += 2ull * static_cast<std::uint64_t>(full.size());
    return integral_transform(proxy_image, full);
}

Eigen::VectorXd estimate_box_filtered(const Measurements& meas, const SensingOperatorPair& op,
                                      const BlockLayout& layout, int k) {
    Eigen::VectorXd integral = estimate_integral(meas, op, layout);
    IntegralOperator full(layout.cropped_rows, layout.cropped_cols);
    return box_filter_from_integral(integral, k, full);
}

Eigen::VectorXd distortion_vector(const Eigen::VectorXd& image_block,
                                  const SensingOperatorPair& op) {
    const int f = op.block_side;
    if (image_block.size() != static_cast<Eigen::Index>(f) * f)
        throw std::invalid_argument("distortion_vector: block size must be f^2");
    Eigen::VectorXd qx = op.phi_dual.transpose() * (op.phi * image_block);
    return integral_transform(qx - image_block, IntegralOperator(f, f));
}

} // namespace intsense
