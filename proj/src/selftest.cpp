#include <cmath>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <vector>

#include "intsense/corpus.hpp"
#include "intsense/eval.hpp"
#include "intsense/gamma.hpp"
#include "intsense/io.hpp"
#include "intsense/pipeline.hpp"
#include "intsense/rng.hpp"

// compact rerun of the core properties at f = 4; exits nonzero on any failure

namespace intsense {
namespace {

struct Check {
    std::string name;
    std::function<std::string()> run;  // empty string = ok, else failure detail
};

std::string expect(bool ok, const std::string& detail) { return ok ? "" : detail; }

Eigen::VectorXd random_vector(Rng& rng, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

Eigen::MatrixXd random_matrix(Rng& rng, int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

// brute-force double-loop integral image
Eigen::VectorXd integral_oracle(const Eigen::VectorXd& x, int rows, int cols) {
    Eigen::VectorXd out(rows * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int rr = 0; rr <= r; ++rr)
                for (int cc = 0; cc <= c; ++cc) acc += x[rr * cols + cc];
            out[r * cols + c] = acc;
        }
    return out;
}

} // namespace

int cmd_selftest(const Config& cfg) {
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    std::vector<Check> checks;

    checks.push_back({"incomplete gamma closed forms", [&] {
        for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
            if (std::fabs(reg_lower_incomplete_gamma(1.0, x) - (1.0 - std::exp(-x))) > 1e-12)
                return std::string("a=1 closed form mismatch");
            double p = reg_lower_incomplete_gamma(0.735, x);
            if (std::fabs(inv_reg_lower_incomplete_gamma(0.735, p) - x) > 1e-8 * (1.0 + x))
                return std::string("roundtrip mismatch");
        }
        return std::string();
    }});

    checks.push_back({"wavelet orthogonality and DC row", [&] {
        for (const char* fam : {"haar", "db2", "db3"}) {
            WaveletBasis b = build_wavelet_basis(4, 0, fam);
            double ortho = (b.matrix_t * b.matrix_t.transpose() -
                            Eigen::MatrixXd::Identity(16, 16)).norm();
            if (ortho > 1e-10) return std::string(fam) + ": orthogonality " + format_double(ortho);
            if ((b.matrix_t.row(0).array() - 0.25).abs().maxCoeff() > 1e-12)
                return std::string(fam) + ": DC row off";
        }
        return std::string();
    }});

    checks.push_back({"integral transform against double loop", [&] {
        Rng rng(seed);
        IntegralOperator op(5, 5);
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd x(25);
            for (int i = 0; i < 25; ++i) x[i] = std::floor(rng.uniform() * 17.0) - 8.0;
            if (integral_transform(x, op) != integral_oracle(x, 5, 5))
                return std::string("mismatch on trial ") + std::to_string(t);
            int i = static_cast<int>(rng.uniform() * 25.0);
            if (std::fabs(integral_row(op, i).dot(x) - integral_transform(x, op)[i]) > 1e-12)
                return std::string("rectangle row inconsistent");
        }
        return std::string();
    }});

    checks.push_back({"box filter from integral", [&] {
        Rng rng(seed + 1);
        IntegralOperator op(7, 7);
        Eigen::VectorXd x(49);
        for (int i = 0; i < 49; ++i) x[i] = std::floor(rng.uniform() * 9.0);
        Eigen::VectorXd integral = integral_transform(x, op);
        for (int k : {1, 3, 5, 7}) {
            Eigen::VectorXd box = box_filter_from_integral(integral, k, op);
            for (int r = 0; r < 7; ++r)
                for (int c = 0; c < 7; ++c) {
                    double acc = 0.0;
                    for (int rr = std::max(0, r - k / 2); rr <= std::min(6, r + k / 2); ++rr)
                        for (int cc = std::max(0, c - k / 2); cc <= std::min(6, c + k / 2); ++cc)
                            acc += x[rr * 7 + cc];
                    if (box[r * 7 + c] != acc) return std::string("k=") + std::to_string(k);
                }
        }
        return std::string();
    }});

    checks.push_back({"cone projection", [&] {
        Rng rng(seed + 2);
        for (int t = 0; t < 100; ++t) {
            Eigen::VectorXd x = random_vector(rng, 5);
            double tt = 3.0 * rng.normal();
            auto [px, pt] = project_soc(x, tt);
            if (px.norm() > pt + 1e-12) return std::string("output escapes the cone");
            auto [qx, qt] = project_soc(px, pt);
            if ((qx - px).norm() + std::fabs(qt - pt) > 1e-10)
                return std::string("not idempotent");
        }
        auto [mx, mt] = project_soc(Eigen::Vector2d(3.0, 4.0), 0.0);
        if ((mx - Eigen::Vector2d(1.5, 2.0)).norm() > 1e-14 || std::fabs(mt - 2.5) > 1e-14)
            return std::string("middle branch values off");
        return std::string();
    }});

    checks.push_back({"singular value shrinkage", [&] {
        Eigen::MatrixXd x = Eigen::Vector2d(3.0, 1.0).asDiagonal();
        Eigen::MatrixXd y = shrink_singular_values(x, 2.0);
        Eigen::MatrixXd want = Eigen::Vector2d(1.0, 0.0).asDiagonal();
        return expect((y - want).norm() < 1e-12, "diag(3,1), tau=2 case failed");
    }});

    // shared tiny design at f = 4
    Corpus corpus = make_synthetic_corpus(50, 16, 16, seed + 3, "train");
    std::vector<Eigen::VectorXd> blocks;
    for (std::size_t i = 0; i < corpus.images.size(); ++i)
        blocks.push_back(downsample_area(corpus.images[i], 16, 16, 4));
    WaveletBasis basis = build_wavelet_basis(4, 0, "db2");
    Eigen::MatrixXd details(blocks.size(), 15);
    for (std::size_t i = 0; i < blocks.size(); ++i)
        details.row(i) = (basis.matrix_t * blocks[i]).tail(15).transpose();
    Eigen::MatrixXd centered = details.rowwise() - details.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / double(blocks.size() - 1);
    MggdModel model(GgdShape(1.0), scatter_from_covariance(cov, GgdShape(1.0)));
    DeltaTargets targets = compute_delta_targets(blocks, 4, 10, 0.95, "selftest");
    DesignProblem problem = build_design_problem(basis, model, targets.delta, 0.05);

    checks.push_back({"adjoint identity at f=4", [&] {
        Rng rng(seed + 4);
        for (int t = 0; t < 5; ++t) {
            Eigen::MatrixXd p = random_matrix(rng, 16, 16);
            Eigen::MatrixXd y = random_matrix(rng, 15, 16);
            Eigen::MatrixXd fp = apply_forward(p, problem);
            double lhs = (fp.array() * y.array()).sum();
            double rhs = (p.array() * apply_adjoint(y, problem).array()).sum();
            if (std::fabs(lhs - rhs) > 1e-10 * fp.norm() * y.norm())
                return std::string("trial ") + std::to_string(t);
        }
        return std::string();
    }});

    checks.push_back({"spectral norm against dense operator", [&] {
        Eigen::MatrixXd dense(16 * 15, 16 * 16);
        for (int col = 0; col < 16 * 16; ++col) {
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(16, 16);
            e(col / 16, col % 16) = 1.0;
            Eigen::MatrixXd fe = apply_forward(e, problem);
            dense.col(col) = Eigen::Map<Eigen::VectorXd>(fe.data(), fe.size());
        }
        double truth = dense.bdcSvd().singularValues()[0];
        double est = estimate_spectral_norm(problem, 200, seed + 5);
        return expect(std::fabs(est - truth) <= 0.01 * truth,
                      "estimate " + format_double(est) + " vs " + format_double(truth));
    }});

    auto solved = std::make_shared<std::optional<SensingDesign>>();

    checks.push_back({"design solve at f=4", [&, solved] {
        SvtResult result = svt_solve(problem);
        double bmax = problem.b.colwise().norm().maxCoeff();
        if (!result.converged) return std::string("did not converge");
        if (result.max_violation > 1e-6 * bmax)
            return "violation " + format_double(result.max_violation);
        *solved = assemble_q(result.p, problem);
        return std::string();
    }});

    checks.push_back({"rank identity on the converged design", [solved] {
        if (!solved->has_value()) return std::string("no design (solve failed)");
        const SensingDesign& design = **solved;
        return expect(design.rank_q == design.rank_p + 1,
                      "rank_q=" + std::to_string(design.rank_q) +
                          " rank_p=" + std::to_string(design.rank_p));
    }});

    checks.push_back({"truncation error matches the singular tail", [solved] {
        if (!solved->has_value()) return std::string("no design (solve failed)");
        const SensingDesign& design = **solved;
        for (int m : {design.rank_q / 2 > 0 ? design.rank_q / 2 : 1, design.rank_q}) {
            SensingOperatorPair pair = make_sensing_operator(design, m);
            double err = (pair.phi_dual.transpose() * pair.phi - design.q).norm();
            double tail = std::sqrt(design.singular_values.tail(16 - m).squaredNorm());
            if (std::fabs(err - tail) > 1e-8 * (1.0 + tail))
                return std::string("M=") + std::to_string(m);
        }
        return std::string();
    }});

    checks.push_back({"identity bypass estimates are exact", [&] {
        Rng rng(seed + 6);
        Eigen::VectorXd image = random_vector(rng, 16 * 16);
        BlockLayout layout(16, 16, 4);
        SensingOperatorPair identity = make_identity_operator(4);
        Measurements meas = sense(image, identity, layout);
        Eigen::VectorXd est = estimate_integral(meas, identity, layout);
        Eigen::VectorXd exact = integral_transform(image, IntegralOperator(16, 16));
        return expect((est - exact).cwiseAbs().maxCoeff() <= 1e-10, "estimate differs");
    }});

    checks.push_back({"sampler determinism", [&] {
        MggdModel m1(GgdShape(0.68), Eigen::MatrixXd::Identity(6, 6));
        Eigen::MatrixXd a = sample_mggd(m1, 100, seed + 7);
        Eigen::MatrixXd b = sample_mggd(m1, 100, seed + 7);
        return expect(a == b, "same seed gave different samples");
    }});

    int failures = 0;
    for (const auto& check : checks) {
        std::string detail;
        try {
            detail = check.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (detail.empty()) {
            std::cout << "ok   " << check.name << "\n";
        } else {
            std::cout << "FAIL " << check.name << ": " << detail << "\n";
            ++failures;
        }
    }
    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 1;
}

} // namespace intsense
