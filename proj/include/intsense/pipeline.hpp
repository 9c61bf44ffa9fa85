#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "intsense/blocks.hpp"
#include "intsense/design.hpp"

namespace intsense {

// Per-location distortion limits learned from a training corpus: sense the
// blocks with a small PCA operator, measure the integral-image distortions,
// take an empirical quantile per location.
struct DeltaTargets {
    Eigen::VectorXd delta;
    std::string corpus_id;
    int n_components;
    double quantile;
};

struct Measurements {
    std::vector<Eigen::VectorXd> per_block;  // block raster order, length M each
    BlockLayout layout;
    std::uint64_t operator_id;
};

// top principal directions of mean-centered blocks (rows = unit components)
struct PcaBasis {
    Eigen::MatrixXd components;  // r x n, r <= n_components (available rank)
    Eigen::VectorXd mean;
};

// operation counts of the estimation path, filled when a counter is passed
struct EstimateCost {
    std::uint64_t multiply_accumulate = 0;  // proxy GEMV terms
    std::uint64_t scan_adds = 0;            // cumulative-sum adds
};

PcaBasis pca_components(const std::vector<Eigen::VectorXd>& blocks, int n_components);

DeltaTargets compute_delta_targets(const std::vector<Eigen::VectorXd>& blocks, int f,
                                   int n_components = 10, double quantile = 0.95,
                                   const std::string& corpus_id = "");

std::uint64_t operator_hash(const SensingOperatorPair& op);

Measurements sense(const Eigen::VectorXd& image, const SensingOperatorPair& op,
                   const BlockLayout& layout);

// one M x f^2 proxy multiply per block, block-to-raster reassembly, then one
// O(n) cumulative-sum pass over the reassembled image
Eigen::VectorXd estimate_integral(const Measurements& meas, const SensingOperatorPair& op,
                                  const BlockLayout& layout, EstimateCost* cost = nullptr);

Eigen::VectorXd estimate_box_filtered(const Measurements& meas, const SensingOperatorPair& op,
                                      const BlockLayout& layout, int k);

// d = H (Q_M x - x) for a single block; Q_M = phi_dual' phi
Eigen::VectorXd distortion_vector(const Eigen::VectorXd& image_block,
                                  const SensingOperatorPair& op);

} // namespace intsense
