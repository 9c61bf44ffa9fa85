#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "intsense/ggd.hpp"
#include "intsense/integral.hpp"
#include "intsense/wavelet.hpp"

namespace intsense {

// Data of the conic design program
//   min tau |P|_* + 1/2 |P|_F^2   s.t.  |A_i(P) - b_i| <= Delta_i, i = 1..n
// with A_i(P) = sigma_u P' h_i and b_i = sigma_u h_i. The rectangle rows h_i
// live implicitly in op; sigma_u = scatter^(1/2) * (detail rows of U').
struct DesignProblem {
    Eigen::MatrixXd sigma_u;       // (n-1) x n
    IntegralOperator op;           // f x f
    Eigen::MatrixXd b;             // (n-1) x n, column i = b_i
    Eigen::VectorXd delta_bounds;  // n, Delta_i
    Eigen::VectorXd delta;         // n, distortion limits delta_i
    double eps;
    GgdShape beta;

    int n() const { return static_cast<int>(sigma_u.cols()); }
    int f() const { return op.rows; }
};

struct SvtState {
    Eigen::MatrixXd p;       // n x n primal
    Eigen::MatrixXd dual_y;  // (n-1) x n, column i = y_i
    Eigen::VectorXd dual_s;  // n
    double tau;
    double eta;
    int iteration;
};

struct SvtIterRecord {
    double violation;     // max_i |A_i(P) - b_i| - Delta_i
    double nuclear_norm;  // of the current primal
    double rel_change;    // |P_k - P_{k-1}|_F / max(|P_{k-1}|_F, 1)
};

struct SvtResult {
    Eigen::MatrixXd p;
    SvtState state;
    std::vector<SvtIterRecord> history;
    bool converged;
    double max_violation;
    double spectral_norm;  // the estimate the step size was derived from
    double objective;      // tau |P|_* + 1/2 |P|_F^2 at the final iterate
};

struct SvtOptions {
    double tau = 0.0;        // <= 0: tau_factor * spectral norm of adjoint(b)
    double tau_factor = 0.1;
    int max_iterations = 5000;
    double feas_tol = 0.0;        // <= 0: feas_tol_factor * max_i |b_i|
    double feas_tol_factor = 1e-6;
    double rel_tol = 1e-7;
    double eta_factor = 1.9; // eta = eta_factor / (1.05 * |A|_2)^2
    int norm_iterations = 100;
    std::uint64_t seed = 20240701;
};

// Converged design: Q = P + (1/n) ones, its SVD, and rank bookkeeping.
struct SensingDesign {
    Eigen::MatrixXd q;
    Eigen::VectorXd singular_values;    // nonincreasing
    Eigen::MatrixXd left_vectors;       // W, n x n
    Eigen::MatrixXd right_vectors;      // V, n x n
    Eigen::VectorXd feasibility_report; // per-constraint margin; empty if unknown
    int rank_q;                         // numerical rank at 1e-8 * lambda_1
    int rank_p;
    int block_side;
    double ones_row_residual;  // |P 1| / (sqrt(n) |P|_F); logged, not enforced
};

// Rank-M truncation: phi = S_M^(1/2) V_M', phi_dual' = W_M S_M^(1/2), so that
// phi_dual' * phi is the best rank-M approximation of Q.
struct SensingOperatorPair {
    Eigen::MatrixXd phi;       // M x n
    Eigen::MatrixXd phi_dual;  // M x n
    int rank;
    int block_side;
    Eigen::VectorXd singular_values;  // the M retained values
};

DesignProblem build_design_problem(const WaveletBasis& basis, const MggdModel& model,
                                   const Eigen::VectorXd& delta, double eps);

// all A_i(P) stacked as columns, computed through the cumulative-sum
// structure of the rectangle rows (no dense H)
Eigen::MatrixXd apply_forward(const Eigen::MatrixXd& p, const DesignProblem& problem);

// adjoint of the stacked map: sum_i h_i y_i' sigma_u
Eigen::MatrixXd apply_adjoint(const Eigen::MatrixXd& y, const DesignProblem& problem);

Eigen::MatrixXd shrink_singular_values(const Eigen::MatrixXd& x, double tau);

// Euclidean projection onto the cone {(x, t): |x| <= t}
std::pair<Eigen::VectorXd, double> project_soc(const Eigen::VectorXd& x, double t);

using MatrixFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

// power iteration on adjoint(forward(.)); `rows` x `cols` is the primal shape
double estimate_spectral_norm(const MatrixFn& forward, const MatrixFn& adjoint,
                              int rows, int cols, int iterations, std::uint64_t seed);
double estimate_spectral_norm(const DesignProblem& problem, int iterations,
                              std::uint64_t seed);

SvtResult svt_solve(const DesignProblem& problem, const SvtOptions& options = {});
SvtResult svt_solve(const DesignProblem& problem, double tau, int max_iterations,
                    double feas_tol, double rel_tol);

SensingDesign assemble_q(const Eigen::MatrixXd& p_star);
SensingDesign assemble_q(const Eigen::MatrixXd& p_star, const DesignProblem& problem);

SensingOperatorPair make_sensing_operator(const SensingDesign& design, int m_rank);

// M = f^2 bypass pair (phi = phi_dual = identity); estimation through it is
// exact, used for sanity rows and tests
SensingOperatorPair make_identity_operator(int block_side);

} // namespace intsense
