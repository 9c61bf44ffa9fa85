#include "intsense/ggd.hpp"

#include <cmath>
#include <stdexcept>

#include "intsense/gamma.hpp"
#include "intsense/rng.hpp"

namespace intsense {

GgdShape::GgdShape(double b) : beta(b) {
    if (!(b > 0.0) || b > 1.0)
        throw std::invalid_argument("GgdShape: beta must lie in (0, 1]");
}

MggdModel::MggdModel(GgdShape b, Eigen::MatrixXd s)
    : beta(b), scatter(std::move(s)), dim(static_cast<int>(scatter.rows())) {
    if (dim < 1 || scatter.cols() != scatter.rows())
        throw std::invalid_argument("MggdModel: scatter must be square, dim >= 1");
    double scale = scatter.cwiseAbs().maxCoeff();
    double asym = (scatter - scatter.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * (scale > 0.0 ? scale : 1.0))
        throw std::invalid_argument("MggdModel: scatter is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scatter, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() < -1e-10 * (lmax > 0.0 ? lmax : 1.0))
        throw std::invalid_argument("MggdModel: scatter has a negative eigenvalue");
}

double ggd_interval_probability(double delta, double scatter, GgdShape beta) {
    if (!(delta >= 0.0))
        throw std::invalid_argument("ggd_interval_probability: delta must be nonnegative");
    if (!(scatter > 0.0))
        throw std::invalid_argument("ggd_interval_probability: scatter must be positive");
    if (delta == 0.0) return 0.0;
    double a = 1.0 / (2.0 * beta.beta);
    return reg_lower_incomplete_gamma(a, std::pow(delta * delta / scatter, beta.beta));
}

double delta_bound_from_probability(double delta_i, double eps, GgdShape beta) {
    if (!(delta_i >= 0.0))
        throw std::invalid_argument("delta_bound_from_probability: delta_i must be nonnegative");
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("delta_bound_from_probability: eps must lie in (0, 1)");
    if (delta_i == 0.0) return 0.0;
    double a = 1.0 / (2.0 * beta.beta);
    double x = inv_reg_lower_incomplete_gamma(a, 1.0 - eps);
    return delta_i / std::pow(x, a);
}

double scatter_factor(int dim, GgdShape beta) {
    if (dim < 1) throw std::invalid_argument("scatter_factor: dim must be >= 1");
    double tb = 2.0 * beta.beta;
    return dim * std::exp(std::lgamma(dim / tb) - std::lgamma((dim + 2.0) / tb));
}

Eigen::MatrixXd scatter_from_covariance(const Eigen::MatrixXd& cov, GgdShape beta) {
    if (cov.rows() != cov.cols())
        throw std::invalid_argument("scatter_from_covariance: matrix must be square");
    double scale = cov.cwiseAbs().maxCoeff();
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (scale > 0.0 ? scale : 1.0))
        throw std::invalid_argument("scatter_from_covariance: matrix is not symmetric");
    return scatter_factor(static_cast<int>(cov.rows()), beta) * cov;
}

Eigen::MatrixXd covariance_from_scatter(const Eigen::MatrixXd& scatter, GgdShape beta) {
    if (scatter.rows() != scatter.cols())
        throw std::invalid_argument("covariance_from_scatter: matrix must be square");
    return scatter / scatter_factor(static_cast<int>(scatter.rows()), beta);
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symmetric_sqrt: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd sample_mggd(const MggdModel& model, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_mggd: count must be >= 1");
    const int d = model.dim;
    Eigen::MatrixXd root = symmetric_sqrt(model.scatter);
    Rng rng(seed);
    Eigen::MatrixXd out(count, d);
    Eigen::VectorXd u(d);
    double a = d / (2.0 * model.beta.beta);
    for (int s = 0; s < count; ++s) {
        double nrm2 = 0.0;
        do {
            for (int j = 0; j < d; ++j) u[j] = rng.normal();
            nrm2 = u.squaredNorm();
        } while (nrm2 == 0.0);
        u /= std::sqrt(nrm2);
        double g = rng.gamma(a);
        double r = std::pow(g, 1.0 / (2.0 * model.beta.beta));
        out.row(s) = (r * (root * u)).transpose();
    }
    return out;
}

BetaFitReport fit_beta(const std::vector<Eigen::VectorXd>& samples_per_coordinate,
                       const std::vector<double>& beta_grid, int bin_count) {
    if (samples_per_coordinate.empty())
        throw std::invalid_argument("fit_beta: no samples");
    if (beta_grid.empty())
        throw std::invalid_argument("fit_beta: empty beta grid");
    if (bin_count < 1)
        throw std::invalid_argument("fit_beta: bin_count must be positive");
    for (const auto& col : samples_per_coordinate)
        if (col.size() < 100)
            throw std::invalid_argument("fit_beta: each coordinate needs at least 100 samples");

    // precompute per-coordinate histograms
    struct Hist {
        double mean, var, lo, width;
        std::vector<double> counts;
        std::int64_t total;
    };
    std::vector<Hist> hists;
    for (const auto& col : samples_per_coordinate) {
        const auto nsamp = col.size();
        double mean = col.mean();
        double var = (col.array() - mean).square().sum() / (nsamp - 1);
        if (!(var > 0.0)) continue;  // zero-variance coordinate: skip
        Hist h;
        h.mean = mean;
        h.var = var;
        double sd = std::sqrt(var);
        h.lo = mean - 6.0 * sd;
        h.width = 12.0 * sd / bin_count;
        h.counts.assign(bin_count, 0.0);
        h.total = nsamp;
        for (Eigen::Index i = 0; i < nsamp; ++i) {
            int b = static_cast<int>((col[i] - h.lo) / h.width);
            if (b < 0 || b >= bin_count) continue;  // outside +-6 sd: ignored
            h.counts[b] += 1.0;
        }
        hists.push_back(std::move(h));
    }

    BetaFitReport report{beta_grid, {}, GgdShape(beta_grid.front())};
    double best_dist = 0.0;
    bool first = true;
    for (double beta : beta_grid) {
        GgdShape shape(beta);
        double a = 1.0 / (2.0 * beta);
        // cdf of the centered GGD at z, variance matched
        auto cdf = [&](double z, double s) {
            if (z == 0.0) return 0.5;
            double p = reg_lower_incomplete_gamma(a, std::pow(z * z / s, beta));
            return z > 0.0 ? 0.5 * (1.0 + p) : 0.5 * (1.0 - p);
        };
        double dist = 0.0;
        for (const auto& h : hists) {
            double s = h.var * scatter_factor(1, shape);  // scatter with matched variance
            double prev = cdf(h.lo - h.mean, s);
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                double edge = h.lo + (b + 1) * h.width - h.mean;
                double cur = cdf(edge, s);
                double t = h.total * (cur - prev);
                prev = cur;
                double hc = h.counts[b];
                if (hc + t <= 0.0) continue;
                dist += (hc - t) * (hc - t) / (hc + t);
            }
        }
        report.distances.push_back(dist);
        if (first || dist < best_dist || (dist == best_dist && beta > report.best.beta)) {
            best_dist = dist;
            report.best = shape;
            first = false;
        }
    }
    return report;
}

} // namespace intsense
