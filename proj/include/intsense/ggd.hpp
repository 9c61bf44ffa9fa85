#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace intsense {

// Shape parameter of the generalized Gaussian family; beta = 1 is Gaussian.
struct GgdShape {
    double beta;
    explicit GgdShape(double b);
};

// Zero-mean multivariate generalized Gaussian prior, density proportional to
// exp(-(w' inv(scatter) w)^beta). scatter is symmetric PSD, dim x dim.
struct MggdModel {
    GgdShape beta;
    Eigen::MatrixXd scatter;
    int dim;
    MggdModel(GgdShape b, Eigen::MatrixXd s);
};

struct BetaFitReport {
    std::vector<double> beta_grid;
    std::vector<double> distances;
    GgdShape best;
};

// P(|v| <= delta) for a univariate GGD with variance-like scatter s:
// reg_lower_incomplete_gamma(1/(2 beta), (delta^2 / s)^beta). This is the
// exact interval law of the radial sampler below and reduces to
// erf(delta / sqrt(s)) at beta = 1.
double ggd_interval_probability(double delta, double scatter, GgdShape beta);

// Largest scatter-norm level D (linear units, D^2 is the scatter) such that
// ggd_interval_probability(delta_i, D^2, beta) >= 1 - eps. Homogeneous of
// degree one in delta_i.
double delta_bound_from_probability(double delta_i, double eps, GgdShape beta);

// scatter = c(dim, beta) * covariance with
// c = dim * Gamma(dim/(2 beta)) / Gamma((dim+2)/(2 beta)); c = 2 at beta = 1.
double scatter_factor(int dim, GgdShape beta);
Eigen::MatrixXd scatter_from_covariance(const Eigen::MatrixXd& cov, GgdShape beta);
Eigen::MatrixXd covariance_from_scatter(const Eigen::MatrixXd& scatter, GgdShape beta);

// symmetric eigendecomposition square root, negative eigenvalues clipped at 0
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m);

// count x dim samples via the stochastic representation w = r * S^(1/2) u,
// u uniform on the unit sphere, r = G^(1/(2 beta)), G ~ Gamma(dim/(2 beta), 1).
// Deterministic given seed.
Eigen::MatrixXd sample_mggd(const MggdModel& model, int count, std::uint64_t seed);

// Grid search over candidate shapes by summed chi-square histogram distance,
// one histogram per coordinate, bins spanning +-6 empirical standard
// deviations, theoretical masses variance-matched per coordinate.
// Zero-variance coordinates are skipped; ties break toward larger beta.
BetaFitReport fit_beta(const std::vector<Eigen::VectorXd>& samples_per_coordinate,
                       const std::vector<double>& beta_grid, int bin_count);

} // namespace intsense
