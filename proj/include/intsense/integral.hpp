#pragma once

#include <Eigen/Dense>

namespace intsense {

// Cumulative-sum (summed-area) operator on a rows x cols raster image.
// The dense matrix form is never materialized; all paths are O(n) scans.
struct IntegralOperator {
    int rows;
    int cols;
    IntegralOperator(int r, int c);
    int size() const { return rows * cols; }
};

// out(r, c) = sum of image(r', c') over r' <= r, c' <= c
Eigen::VectorXd integral_transform(const Eigen::VectorXd& image, const IntegralOperator& op);

// adjoint scan: out(r, c) = sum over r' >= r, c' >= c
Eigen::VectorXd reverse_integral_transform(const Eigen::VectorXd& image, const IntegralOperator& op);

// 0/1 indicator of the upper-left rectangle ending at location i (0-based
// raster index); dot(h_i, x) = integral_transform(x)[i]
Eigen::VectorXd integral_row(const IntegralOperator& op, int i);

// k x k windowed sums via the four-corner lookup; windows are cropped at the
// borders (partial sums, no padding). k must be odd and <= min(rows, cols).
Eigen::VectorXd box_filter_from_integral(const Eigen::VectorXd& integral, int k,
                                         const IntegralOperator& op);

// 20 log10(|estimate| / |estimate - exact|) in dB, capped to +-300
double rsnr(const Eigen::VectorXd& estimate, const Eigen::VectorXd& exact);

} // namespace intsense
