#include "intsense/wavelet.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace intsense {
namespace {

// Orthonormal Daubechies lowpass filters (minimum phase), generated by
// spectral factorization and checked against sum h = sqrt(2), sum h^2 = 1,
// sum h_k h_{k+2m} = 0 to below 1e-15.
const std::vector<double>& lowpass_filter(const std::string& family) {
    static const std::vector<double> db1 = {
        7.07106781186547573e-01, 7.07106781186547573e-01};
    static const std::vector<double> db2 = {
        -1.29409522551260453e-01, 2.24143868042013333e-01,
        8.36516303737808053e-01, 4.82962913144534267e-01};
    static const std::vector<double> db3 = {
        3.52262918857095680e-02, -8.54412738820266443e-02,
        -1.35011020010254668e-01, 4.59877502118491599e-01,
        8.06891509311092658e-01, 3.32670552950082687e-01};
    static const std::vector<double> db4 = {
        -1.05974017850690178e-02, 3.28830116668851688e-02,
        3.08413818355606287e-02, -1.87034811719093086e-01,
        -2.79837694168595906e-02, 6.30880767929859032e-01,
        7.14846570552915561e-01, 2.30377813308896451e-01};
    static const std::vector<double> db5 = {
        3.33572528547377081e-03, -1.25807519990819936e-02,
        -6.24149021279827090e-03, 7.75714938400457049e-02,
        -3.22448695846384720e-02, -2.42294887066381998e-01,
        1.38428145901320881e-01, 7.24308528437773047e-01,
        6.03829269797189649e-01, 1.60102397974192928e-01};
    if (family == "haar" || family == "db1") return db1;
    if (family == "db2") return db2;
    if (family == "db3") return db3;
    if (family == "db4") return db4;
    if (family == "db5") return db5;
    throw std::invalid_argument("build_wavelet_basis: unsupported family '" + family +
                                "' (expected haar or db1..db5)");
}

// one analysis stage of size m: m/2 lowpass rows then m/2 highpass rows,
// circulant with stride 2, coefficients accumulated modulo m
Eigen::MatrixXd one_level_1d(int m, const std::vector<double>& h) {
    const int len = static_cast<int>(h.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int r = 0; r < m / 2; ++r) {
        for (int k = 0; k < len; ++k) {
            double g = (k % 2 == 0 ? 1.0 : -1.0) * h[len - 1 - k];  // quadrature mirror
            a(r, (2 * r + k) % m) += h[k];
            a(m / 2 + r, (2 * r + k) % m) += g;
        }
    }
    return a;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace

int max_wavelet_levels(int block_side) {
    int lv = 0;
    while (block_side > 1) {
        block_side /= 2;
        ++lv;
    }
    return lv;
}

WaveletBasis build_wavelet_basis(int block_side, int levels, const std::string& family) {
    const int f = block_side;
    if (f < 2 || (f & (f - 1)) != 0)
        throw std::invalid_argument("build_wavelet_basis: block_side must be a power of two >= 2");
    const int max_levels = max_wavelet_levels(f);
    if (levels == 0) levels = max_levels;
    if (levels < 1 || levels > max_levels)
        throw std::invalid_argument("build_wavelet_basis: levels must lie in 1.." +
                                    std::to_string(max_levels) + " for block_side " +
                                    std::to_string(f));
    const auto& h = lowpass_filter(family);
    const int n = f * f;

    // cascade: each level transforms the current coarse (top-left) subimage
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
    for (int lv = 0; lv < levels; ++lv) {
        int m = f >> lv;
        Eigen::MatrixXd k2 = kron(one_level_1d(m, h), one_level_1d(m, h));
        // raster positions of the m x m coarse subimage
        Eigen::MatrixXd sub(m * m, n);
        for (int r = 0; r < m; ++r)
            sub.middleRows(r * m, m) = t.middleRows(r * f, m);
        sub = (k2 * sub).eval();
        for (int r = 0; r < m; ++r)
            t.middleRows(r * f, m) = sub.middleRows(r * m, m);
    }

    // rotate the coarse rows so row 0 is exactly the DC vector
    const int mc = f >> levels;
    if (mc > 1) {
        Eigen::MatrixXd g(mc * mc, n);
        for (int r = 0; r < mc; ++r)
            g.middleRows(r * mc, mc) = t.middleRows(r * f, mc);
        Eigen::VectorXd v = g * Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
        Eigen::VectorXd w = -v;
        w[0] += 1.0;  // e1 - v
        double wn = w.norm();
        if (wn > 1e-12) {
            w /= wn;
            g -= 2.0 * w * (w.transpose() * g);  // Householder: first row becomes v' g
        }
        for (int r = 0; r < mc; ++r)
            t.middleRows(r * f, mc) = g.middleRows(r * mc, mc);
    }

    // cheap self-check: orthogonality probe and the first-row constraint
    const double dc = 1.0 / std::sqrt(double(n));
    if ((t.row(0).array() - dc).abs().maxCoeff() > 1e-12)
        throw std::runtime_error("build_wavelet_basis: DC row constraint violated");
    Eigen::VectorXd probe = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
    if ((t.transpose() * (t * probe) - probe).norm() > 1e-9 * probe.norm())
        throw std::runtime_error("build_wavelet_basis: orthogonality check failed");

    return WaveletBasis{std::move(t), family == "haar" ? "db1" : family, levels, f};
}

} // namespace intsense
