#include "intsense/integral.hpp"

#include <cmath>
#include <stdexcept>

namespace intsense {

IntegralOperator::IntegralOperator(int r, int c) : rows(r), cols(c) {
    if (r < 1 || c < 1)
        throw std::invalid_argument("IntegralOperator: dimensions must be positive");
}

Eigen::VectorXd integral_transform(const Eigen::VectorXd& image, const IntegralOperator& op) {
    if (image.size() != op.size())
        throw std::invalid_argument("integral_transform: size mismatch");
    Eigen::VectorXd out(image.size());
    for (int r = 0; r < op.rows; ++r) {
        double run = 0.0;
        for (int c = 0; c < op.cols; ++c) {
            run += image[r * op.cols + c];
            out[r * op.cols + c] = run + (r > 0 ? out[(r - 1) * op.cols + c] : 0.0);
        }
    }
    return out;
}

Eigen::VectorXd reverse_integral_transform(const Eigen::VectorXd& image, const IntegralOperator& op) {
    if (image.size() != op.size())
        throw std::invalid_argument("reverse_integral_transform: size mismatch");
    Eigen::VectorXd out(image.size());
    for (int r = op.rows - 1; r >= 0; --r) {
        double run = 0.0;
        for (int c = op.cols - 1; c >= 0; --c) {
            run += image[r * op.cols + c];
            out[r * op.cols + c] = run + (r + 1 < op.rows ? out[(r + 1) * op.cols + c] : 0.0);
        }
    }
    return out;
}

Eigen::VectorXd integral_row(const IntegralOperator& op, int i) {
    if (i < 0 || i >= op.size())
        throw std::invalid_argument("integral_row: index out of range");
    const int ri = i / op.cols;
    const int ci = i % op.cols;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(op.size());
    for (int r = 0; r <= ri; ++r)
        for (int c = 0; c <= ci; ++c) h[r * op.cols + c] = 1.0;
    return h;
}

Eigen::VectorXd box_filter_from_integral(const Eigen::VectorXd& integral, int k,
                                         const IntegralOperator& op) {
    if (k < 1 || k % 2 == 0)
        throw std::invalid_argument("box_filter_from_integral: k must be odd and positive");
    if (k > op.rows || k > op.cols)
        throw std::invalid_argument("box_filter_from_integral: k exceeds image size");
    if (integral.size() != op.size())
        throw std::invalid_argument("box_filter_from_integral: size mismatch");
    const int h = k / 2;
    auto at = [&](int r, int c) -> double {
        if (r < 0 || c < 0) return 0.0;
        return integral[r * op.cols + c];
    };
    Eigen::VectorXd out(op.size());
    for (int r = 0; r < op.rows; ++r) {
        int r1 = r - h - 1;                              // exclusive top
        int r2 = r + h < op.rows ? r + h : op.rows - 1;  // inclusive bottom
        for (int c = 0; c < op.cols; ++c) {
            int c1 = c - h - 1;
            int c2 = c + h < op.cols ? c + h : op.cols - 1;
            out[r * op.cols + c] = at(r2, c2) - at(r1, c2) - at(r2, c1) + at(r1, c1);
        }
    }
    return out;
}

double rsnr(const Eigen::VectorXd& estimate, const Eigen::VectorXd& exact) {
    if (estimate.size() != exact.size())
        throw std::invalid_argument("rsnr: size mismatch");
    double en = exact.norm();
    if (en == 0.0) throw std::invalid_argument("rsnr: exact signal is identically zero");
    double sn = estimate.norm();
    double dn = (estimate - exact).norm();
    if (dn <= 1e-12 * sn) return 300.0;
    if (sn == 0.0) return -300.0;
    double v = 20.0 * std::log10(sn / dn);
    if (v > 300.0) return 300.0;
    if (v < -300.0) return -300.0;
    return v;
}

} // namespace intsense
