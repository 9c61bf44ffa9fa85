#include "intsense/design.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "intsense/rng.hpp"

namespace intsense {
namespace {

// columns of m, viewed as f x f images, each replaced by its integral image
Eigen::MatrixXd integral_columns(const Eigen::MatrixXd& m, const IntegralOperator& op) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        out.col(j) = integral_transform(m.col(j), op);
    return out;
}

// rows of m replaced by their reverse (adjoint) integral images
Eigen::MatrixXd reverse_integral_rows(const Eigen::MatrixXd& m, const IntegralOperator& op) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        out.row(i) = reverse_integral_transform(m.row(i).transpose(), op).transpose();
    return out;
}

Eigen::MatrixXd shrink_with_values(const Eigen::MatrixXd& x, double tau,
                                   double* nuclear_norm) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = (svd.singularValues().array() - tau).max(0.0);
    if (nuclear_norm) *nuclear_norm = s.sum();
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

int numerical_rank(const Eigen::VectorXd& singular_values) {
    if (singular_values.size() == 0) return 0;
    double thresh = 1e-8 * singular_values[0];
    if (thresh <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < singular_values.size(); ++i)
        if (singular_values[i] > thresh) ++rank;
    return rank;
}

} // namespace

DesignProblem build_design_problem(const WaveletBasis& basis, const MggdModel& model,
                                   const Eigen::VectorXd& delta, double eps) {
    const int n = basis.block_side * basis.block_side;
    if (basis.matrix_t.rows() != n)
        throw std::invalid_argument("build_design_problem: basis size mismatch");
    if (model.dim != n - 1)
        throw std::invalid_argument("build_design_problem: model dim must be n - 1");
    if (delta.size() != n)
        throw std::invalid_argument("build_design_problem: delta must have n entries");
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("build_design_problem: eps must lie in (0, 1)");
    if ((delta.array() < 0.0).any())
        throw std::invalid_argument("build_design_problem: delta entries must be nonnegative");

    DesignProblem prob{Eigen::MatrixXd(), IntegralOperator(basis.block_side, basis.block_side),
                       Eigen::MatrixXd(), Eigen::VectorXd(n), delta, eps, model.beta};
    prob.sigma_u = symmetric_sqrt(model.scatter) * basis.matrix_t.bottomRows(n - 1);
    // b_i = sigma_u h_i for all i at once: stack (H sigma_u')' column-wise
    prob.b = integral_columns(prob.sigma_u.transpose(), prob.op).transpose();
    for (int i = 0; i < n; ++i)
        prob.delta_bounds[i] = delta_bound_from_probability(delta[i], eps, model.beta);
    return prob;
}

Eigen::MatrixXd apply_forward(const Eigen::MatrixXd& p, const DesignProblem& problem) {
    const int n = problem.n();
    if (p.rows() != n || p.cols() != n)
        throw std::invalid_argument("apply_forward: primal must be n x n");
    // column i of the result is sigma_u P' h_i, i.e. sigma_u (H P)'
    return problem.sigma_u * integral_columns(p, problem.op).transpose();
}

Eigen::MatrixXd apply_adjoint(const Eigen::MatrixXd& y, const DesignProblem& problem) {
    const int n = problem.n();
    if (y.rows() != n - 1 || y.cols() != n)
        throw std::invalid_argument("apply_adjoint: duals must be (n-1) x n");
    // sum_i h_i y_i' sigma_u = H'Y' sigma_u = (Y H)' sigma_u; row r of Y H is
    // the reverse integral image of row r of Y
    return reverse_integral_rows(y, problem.op).transpose() * problem.sigma_u;
}

Eigen::MatrixXd shrink_singular_values(const Eigen::MatrixXd& x, double tau) {
    if (!(tau >= 0.0))
        throw std::invalid_argument("shrink_singular_values: tau must be nonnegative");
    return shrink_with_values(x, tau, nullptr);
}

std::pair<Eigen::VectorXd, double> project_soc(const Eigen::VectorXd& x, double t) {
    double nx = x.norm();
    if (nx <= t) return {x, t};
    if (t <= -nx) return {Eigen::VectorXd::Zero(x.size()), 0.0};
    double scale = (nx + t) / (2.0 * nx);  // nx > |t| here, so nx > 0
    return {scale * x, scale * nx};
}

double estimate_spectral_norm(const MatrixFn& forward, const MatrixFn& adjoint,
                              int rows, int cols, int iterations, std::uint64_t seed) {
    if (iterations < 50)
        throw std::invalid_argument("estimate_spectral_norm: need at least 50 iterations");
    Rng rng(seed);
    Eigen::MatrixXd p(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) p(r, c) = rng.normal();
    p /= p.norm();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::MatrixXd fp = forward(p);
        est = fp.norm();  // Rayleigh quotient root; nondecreasing over iterations
        p = adjoint(fp);
        double nrm = p.norm();
        if (nrm == 0.0) return 0.0;
        p /= nrm;
    }
    return est;
}

double estimate_spectral_norm(const DesignProblem& problem, int iterations,
                              std::uint64_t seed) {
    return estimate_spectral_norm(
        [&](const Eigen::MatrixXd& p) { return apply_forward(p, problem); },
        [&](const Eigen::MatrixXd& y) { return apply_adjoint(y, problem); },
        problem.n(), problem.n(), iterations, seed);
}

SvtResult svt_solve(const DesignProblem& problem, const SvtOptions& options) {
    const int n = problem.n();
    const double bmax = problem.b.colwise().norm().maxCoeff();

    double tau = options.tau;
    if (tau <= 0.0) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(apply_adjoint(problem.b, problem));
        tau = options.tau_factor * svd.singularValues()[0];
    }
    double feas_tol = options.feas_tol > 0.0 ? options.feas_tol
                                             : options.feas_tol_factor * bmax;

    double norm_est = estimate_spectral_norm(problem, options.norm_iterations, options.seed);
    double inflated = 1.05 * norm_est;
    double eta = options.eta_factor / (inflated * inflated);

    SvtResult res;
    res.spectral_norm = inflated;
    res.history.reserve(options.max_iterations);

    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n - 1, n);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    double nuclear = 0.0;
    bool converged = false;
    int it = 0;
    for (it = 1; it <= options.max_iterations; ++it) {
        Eigen::MatrixXd p_new = shrink_with_values(apply_adjoint(y, problem), tau, &nuclear);
        if (!p_new.allFinite())
            throw std::runtime_error("svt_solve: non-finite primal at iteration " +
                                     std::to_string(it));
        Eigen::MatrixXd fwd = apply_forward(p_new, problem);

        double violation = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd resid = problem.b.col(i) - fwd.col(i);
            violation = std::max(violation, resid.norm() - problem.delta_bounds[i]);
            auto [py, ps] = project_soc(y.col(i) + eta * resid,
                                        s[i] - eta * problem.delta_bounds[i]);
            y.col(i) = py;
            s[i] = ps;
        }
        if (!y.allFinite())
            throw std::runtime_error("svt_solve: non-finite duals at iteration " +
                                     std::to_string(it));

        double rel_change = (p_new - p).norm() / std::max(p.norm(), 1.0);
        res.history.push_back({violation, nuclear, rel_change});
        p = std::move(p_new);
        if (violation <= feas_tol && rel_change <= options.rel_tol) {
            converged = true;
            break;
        }
    }

    res.p = p;
    res.converged = converged;
    res.max_violation = res.history.empty() ? 0.0 : res.history.back().violation;
    res.objective = tau * nuclear + 0.5 * p.squaredNorm();
    res.state = SvtState{res.p, std::move(y), std::move(s), tau, eta,
                         converged ? it : options.max_iterations};
    return res;
}

SvtResult svt_solve(const DesignProblem& problem, double tau, int max_iterations,
                    double feas_tol, double rel_tol) {
    SvtOptions opt;
    opt.tau = tau;
    opt.max_iterations = max_iterations;
    opt.feas_tol = feas_tol;
    opt.rel_tol = rel_tol;
    return svt_solve(problem, opt);
}

SensingDesign assemble_q(const Eigen::MatrixXd& p_star) {
    const int n = static_cast<int>(p_star.rows());
    if (p_star.cols() != n)
        throw std::invalid_argument("assemble_q: primal must be square");
    int f = static_cast<int>(std::lround(std::sqrt(double(n))));
    if (f * f != n)
        throw std::invalid_argument("assemble_q: size must be a square block");

    SensingDesign d;
    d.block_side = f;
    d.q = p_star + Eigen::MatrixXd::Constant(n, n, 1.0 / n);

    Eigen::BDCSVD<Eigen::MatrixXd> svd_q(d.q, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd_q.info() != Eigen::Success)
        throw std::runtime_error("assemble_q: SVD failed");
    d.singular_values = svd_q.singularValues();
    d.left_vectors = svd_q.matrixU();
    d.right_vectors = svd_q.matrixV();
    d.rank_q = numerical_rank(d.singular_values);

    Eigen::BDCSVD<Eigen::MatrixXd> svd_p(p_star);
    d.rank_p = numerical_rank(svd_p.singularValues());

    double pf = p_star.norm();
    d.ones_row_residual =
        pf > 0.0 ? (p_star * Eigen::VectorXd::Ones(n)).norm() / (std::sqrt(double(n)) * pf)
                 : 0.0;
    return d;
}

SensingDesign assemble_q(const Eigen::MatrixXd& p_star, const DesignProblem& problem) {
    SensingDesign d = assemble_q(p_star);
    Eigen::MatrixXd fwd = apply_forward(p_star, problem);
    d.feasibility_report.resize(problem.n());
    for (int i = 0; i < problem.n(); ++i)
        d.feasibility_report[i] =
            (fwd.col(i) - problem.b.col(i)).norm() - problem.delta_bounds[i];
    return d;
}

SensingOperatorPair make_sensing_operator(const SensingDesign& design, int m_rank) {
    if (m_rank < 1 || m_rank > design.rank_q)
        throw std::invalid_argument("make_sensing_operator: rank must lie in 1.." +
                                    std::to_string(design.rank_q) +
                                    " (numerical rank of the design)");
    Eigen::VectorXd lam = design.singular_values.head(m_rank);
    Eigen::VectorXd root = lam.cwiseSqrt();
    SensingOperatorPair pair;
    pair.phi = root.asDiagonal() * design.right_vectors.leftCols(m_rank).transpose();
    pair.phi_dual = root.asDiagonal() * design.left_vectors.leftCols(m_rank).transpose();
    pair.rank = m_rank;
    pair.block_side = design.block_side;
    pair.singular_values = lam;
    return pair;
}

SensingOperatorPair make_identity_operator(int block_side) {
    const int n = block_side * block_side;
    SensingOperatorPair pair;
    pair.phi = Eigen::MatrixXd::Identity(n, n);
    pair.phi_dual = Eigen::MatrixXd::Identity(n, n);
    pair.rank = n;
    pair.block_side = block_side;
    pair.singular_values = Eigen::VectorXd::Ones(n);
    return pair;
}

} // namespace intsense
