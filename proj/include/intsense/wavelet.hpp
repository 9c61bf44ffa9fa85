#pragma once

#include <Eigen/Dense>
#include <string>

namespace intsense {

// Dense analysis matrix of a 2D separable periodized orthogonal wavelet
// transform on an f x f block (raster order, n = f^2). Row 0 is the constant
// vector 1/sqrt(n): at full depth that is the coarse scaling row itself, at
// partial depth the coarse rows are rotated once (Householder) so that the
// first row is exactly the DC vector.
struct WaveletBasis {
    Eigen::MatrixXd matrix_t;  // n x n, rows are the analysis vectors
    std::string family;
    int levels;
    int block_side;
};

// family: "haar" (= "db1"), "db2", "db3", "db4", "db5".
// levels: 1 .. log2(block_side); 0 picks the maximum depth.
WaveletBasis build_wavelet_basis(int block_side, int levels, const std::string& family);

int max_wavelet_levels(int block_side);

} // namespace intsense
