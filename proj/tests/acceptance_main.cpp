// Acceptance gate for the full pipeline: eleven independent criteria, one
// PASS/FAIL line each, exit code = number of failures. Slow end-to-end checks
// (corpus-driven designs, CLI round trips, a generic conic reference solve)
// live here rather than in the unit suite.
//
// Usage: acceptance --cli <intsense binary> --oracle <conic reference script>
//                   --workdir <scratch dir> [--voc <pgm corpus dir>]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "intsense/blocks.hpp"
#include "intsense/corpus.hpp"
#include "intsense/design.hpp"
#include "intsense/ggd.hpp"
#include "intsense/integral.hpp"
#include "intsense/io.hpp"
#include "intsense/pipeline.hpp"
#include "intsense/wavelet.hpp"

namespace fs = std::filesystem;
using namespace intsense;
using Clock = std::chrono::steady_clock;

namespace {

// Correlation floor for the box-filter heat-map comparison at half the design
// rank; frozen from a pilot run of this suite (pilot measured 0.9477).
constexpr double kHeatmapCorrMin = 0.9;

// Table-shaped reference means (dB) for a 4952-image PASCAL VOC 2007 run at
// f = 32, M in {20, 40, 60}; only checked when --voc is supplied.
const std::vector<std::pair<int, double>> kVocReference = {
    {20, 38.95}, {40, 38.96}, {60, 38.96}};

struct Args {
    std::string cli;
    std::string oracle;
    fs::path workdir;
    std::string voc;
};

struct CheckResult {
    bool pass = false;
    std::string title;
    std::string detail;
    double seconds = 0.0;
};

struct DesignRecord {
    std::string name;
    SensingDesign design;
    bool converged = false;
};

struct Context {
    Args args;
    std::vector<DesignRecord> registry;
    std::optional<SensingDesign> c4_design;
    std::optional<SensingDesign> f8_design;
    std::optional<MggdModel> f8_model;
    Eigen::VectorXd f8_delta;
    fs::path f8_dir;
};

using Outcome = std::pair<bool, std::string>;

// ---------------------------------------------------------------------------
// small utilities

std::string fmt(double v, int digits = 3) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string drop_last_field(const std::string& line) {
    auto pos = line.rfind(',');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

int run_command(const std::string& command) {
    int rc = std::system(command.c_str());
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -2;
}

int run_cli(const Context& ctx, const std::string& subcommand, const fs::path& config,
            const std::string& log_name) {
    fs::path log = ctx.args.workdir / log_name;
    std::string cmd = "\"" + ctx.args.cli + "\" " + subcommand + " --config \"" +
                      config.string() + "\" > \"" + log.string() + "\" 2>&1";
    return run_command(cmd);
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd ca = a.array() - a.mean();
    Eigen::VectorXd cb = b.array() - b.mean();
    double denom = ca.norm() * cb.norm();
    if (denom == 0.0) throw std::runtime_error("pearson: constant input");
    return ca.dot(cb) / denom;
}

// value = min + pixel * (max - min) / 255, undoing the min-max quantization
Eigen::VectorXd reinterpret_heatmap(const fs::path& pgm_path, const fs::path& txt_path) {
    PgmImage img = read_pgm(pgm_path.string());
    std::istringstream meta(slurp(txt_path));
    std::string key;
    double lo = 0.0, hi = 0.0;
    meta >> key >> lo >> key >> hi;
    Eigen::VectorXd out(static_cast<Eigen::Index>(img.pixels.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out[i] = lo + img.pixels[static_cast<std::size_t>(i)] * (hi - lo) / 255.0;
    return out;
}

double json_number(const std::string& text, const std::string& key) {
    auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) throw std::runtime_error("missing JSON key " + key);
    pos = text.find(':', pos);
    if (pos == std::string::npos) throw std::runtime_error("malformed JSON near " + key);
    return std::strtod(text.c_str() + pos + 1, nullptr);
}

std::string json_string(const std::string& text, const std::string& key) {
    auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) throw std::runtime_error("missing JSON key " + key);
    pos = text.find(':', pos);
    auto open = text.find('"', pos);
    auto close = text.find('"', open + 1);
    if (open == std::string::npos || close == std::string::npos)
        throw std::runtime_error("malformed JSON near " + key);
    return text.substr(open + 1, close - open - 1);
}

void json_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    os << "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        os << "[";
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            os << format_double(m(r, c)) << (c + 1 < m.cols() ? "," : "");
        os << "]" << (r + 1 < m.rows() ? "," : "");
    }
    os << "]";
}

void json_vector(std::ostream& os, const Eigen::VectorXd& v) {
    os << "[";
    for (Eigen::Index i = 0; i < v.size(); ++i)
        os << format_double(v[i]) << (i + 1 < v.size() ? "," : "");
    os << "]";
}

bool files_byte_equal(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

bool files_equal_excluding_last_field(const fs::path& a, const fs::path& b) {
    auto la = split_lines(slurp(a));
    auto lb = split_lines(slurp(b));
    if (la.size() != lb.size()) return false;
    for (std::size_t i = 0; i < la.size(); ++i)
        if (drop_last_field(la[i]) != drop_last_field(lb[i])) return false;
    return true;
}

Eigen::VectorXd parse_delta_csv(const fs::path& path) {
    auto lines = split_lines(slurp(path));
    if (lines.empty() || lines[0] != "index,delta")
        throw std::runtime_error("unexpected delta CSV header in " + path.string());
    Eigen::VectorXd delta(static_cast<Eigen::Index>(lines.size()) - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_fields(lines[i]);
        if (fields.size() != 2) throw std::runtime_error("bad delta CSV row: " + lines[i]);
        delta[static_cast<Eigen::Index>(i) - 1] = std::strtod(fields[1].c_str(), nullptr);
    }
    return delta;
}

// ---------------------------------------------------------------------------
// brute-force oracles for criterion 1

Eigen::VectorXd integral_oracle(const Eigen::VectorXd& x, int rows, int cols) {
    Eigen::VectorXd out(rows * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double sum = 0.0;
            for (int rr = 0; rr <= r; ++rr)
                for (int cc = 0; cc <= c; ++cc) sum += x[rr * cols + cc];
            out[r * cols + c] = sum;
        }
    return out;
}

Eigen::VectorXd reverse_oracle(const Eigen::VectorXd& x, int rows, int cols) {
    Eigen::VectorXd out(rows * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double sum = 0.0;
            for (int rr = r; rr < rows; ++rr)
                for (int cc = c; cc < cols; ++cc) sum += x[rr * cols + cc];
            out[r * cols + c] = sum;
        }
    return out;
}

Eigen::VectorXd box_oracle(const Eigen::VectorXd& x, int rows, int cols, int k) {
    Eigen::VectorXd out(rows * cols);
    const int h = k / 2;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double sum = 0.0;
            for (int rr = std::max(0, r - h); rr <= std::min(rows - 1, r + h); ++rr)
                for (int cc = std::max(0, c - h); cc <= std::min(cols - 1, c + h); ++cc)
                    sum += x[rr * cols + cc];
            out[r * cols + c] = sum;
        }
    return out;
}

// ---------------------------------------------------------------------------
// shared fixtures

const std::vector<double> kBetaGrid = {0.3, 0.4, 0.5, 0.6, 0.68, 0.7, 0.8, 0.9, 1.0};

// mirrors the fit command: area-downsampled blocks -> detail coefficients ->
// histogram shape fit + empirical covariance
MggdModel fit_model_from_corpus(const Corpus& corpus, const WaveletBasis& basis) {
    const int f = basis.block_side;
    const int n = f * f;
    const auto count = static_cast<Eigen::Index>(corpus.images.size());
    Eigen::MatrixXd details(count, n - 1);
    for (Eigen::Index i = 0; i < count; ++i) {
        Eigen::VectorXd block = downsample_area(corpus.images[i], corpus.dims[i].first,
                                                corpus.dims[i].second, f);
        details.row(i) = (basis.matrix_t * block).tail(n - 1).transpose();
    }
    Eigen::RowVectorXd mean = details.colwise().mean();
    Eigen::MatrixXd centered = details.rowwise() - mean;
    Eigen::MatrixXd cov = centered.transpose() * centered / double(count - 1);
    std::vector<Eigen::VectorXd> per_coordinate;
    per_coordinate.reserve(n - 1);
    for (int j = 0; j < n - 1; ++j) per_coordinate.push_back(details.col(j));
    BetaFitReport report = fit_beta(per_coordinate, kBetaGrid, 101);
    return {report.best, scatter_from_covariance(cov, report.best)};
}

DesignProblem synthetic_problem(int f, std::uint64_t seed) {
    const int n = f * f;
    WaveletBasis basis = build_wavelet_basis(f, 0, "db2");
    Eigen::VectorXd diag(n - 1);
    for (int j = 0; j < n - 1; ++j) diag[j] = std::exp(-j / 6.0) + 0.05;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.9, 1.1);
    for (int j = 0; j < n - 1; ++j) diag[j] *= jitter(rng);
    MggdModel model(GgdShape(0.68), diag.asDiagonal());
    return build_design_problem(basis, model, Eigen::VectorXd::Constant(n, 0.1), 0.05);
}

// ---------------------------------------------------------------------------
// criteria

Outcome check_scan_oracles() {
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> dim(1, 16);
    std::uniform_int_distribution<int> gray(0, 255);
    const auto t0 = Clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = dim(rng), cols = dim(rng);
        IntegralOperator op(rows, cols);
        Eigen::VectorXd x(rows * cols);
        for (int i = 0; i < rows * cols; ++i) x[i] = gray(rng);

        Eigen::VectorXd fwd = integral_transform(x, op);
        if (!(fwd.array() == integral_oracle(x, rows, cols).array()).all())
            return {false, "integral scan disagrees with the double loop at trial " +
                               std::to_string(trial)};
        if (!(reverse_integral_transform(x, op).array() ==
              reverse_oracle(x, rows, cols).array()).all())
            return {false, "reverse scan disagrees at trial " + std::to_string(trial)};

        for (int pick = 0; pick < 3; ++pick) {
            int i = std::uniform_int_distribution<int>(0, rows * cols - 1)(rng);
            Eigen::VectorXd h = integral_row(op, i);
            int ri = i / cols, ci = i % cols;
            for (int j = 0; j < rows * cols; ++j) {
                double want = (j / cols <= ri && j % cols <= ci) ? 1.0 : 0.0;
                if (h[j] != want)
                    return {false, "rectangle row mismatch at trial " + std::to_string(trial)};
            }
            if (h.dot(x) != fwd[i])
                return {false, "rectangle row dot product disagrees with the scan"};
        }

        std::vector<int> odd;
        for (int k = 1; k <= std::min(rows, cols); k += 2) odd.push_back(k);
        int k = odd[std::uniform_int_distribution<std::size_t>(0, odd.size() - 1)(rng)];
        if (!(box_filter_from_integral(fwd, k, op).array() ==
              box_oracle(x, rows, cols, k).array()).all())
            return {false, "box filter disagrees at trial " + std::to_string(trial) +
                               " (k=" + std::to_string(k) + ")"};
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs >= 5.0) return {false, "200 cases took " + fmt(secs) + " s (budget 5 s)"};
    return {true, "200 random integer cases up to 16x16 match exactly"};
}

Outcome check_adjoint_identity() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::mt19937_64 rng(2002);
    std::normal_distribution<double> gauss;
    for (int f : {4, 8}) {
        DesignProblem problem = synthetic_problem(f, 0xadull + f);
        const int n = f * f;
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::MatrixXd p(n, n), y(n - 1, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) p(r, c) = gauss(rng);
            for (int r = 0; r < n - 1; ++r)
                for (int c = 0; c < n; ++c) y(r, c) = gauss(rng);
            Eigen::MatrixXd fwd = apply_forward(p, problem);
            Eigen::MatrixXd adj = apply_adjoint(y, problem);
            double lhs = (fwd.array() * y.array()).sum();
            double rhs = (p.array() * adj.array()).sum();
            double rel = std::abs(lhs - rhs) / std::max(fwd.norm() * y.norm(), 1e-300);
            worst = std::max(worst, rel);
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs >= 30.0) return {false, "40 trials took " + fmt(secs) + " s (budget 30 s)"};
    if (worst >= 1e-10) return {false, "worst relative defect " + format_double(worst)};
    return {true, "worst relative defect " + format_double(worst) + " over 40 trials"};
}

Outcome check_cone_and_prox() {
    std::mt19937_64 rng(3003);
    std::normal_distribution<double> gauss;
    auto random_pair = [&]() {
        Eigen::VectorXd x(8);
        for (int i = 0; i < 8; ++i) x[i] = gauss(rng);
        return std::make_pair(x, 2.0 * gauss(rng));
    };
    for (int trial = 0; trial < 100; ++trial) {
        auto [x, t] = random_pair();
        auto [px, pt] = project_soc(x, t);
        if (px.norm() > pt + 1e-10)
            return {false, "projection left the cone at trial " + std::to_string(trial)};
        auto [qx, qt] = project_soc(px, pt);
        if ((qx - px).norm() + std::abs(qt - pt) > 1e-10)
            return {false, "projection is not idempotent at trial " + std::to_string(trial)};
        auto [x2, t2] = random_pair();
        auto [px2, pt2] = project_soc(x2, t2);
        double moved = std::sqrt((px - px2).squaredNorm() + (pt - pt2) * (pt - pt2));
        double apart = std::sqrt((x - x2).squaredNorm() + (t - t2) * (t - t2));
        if (moved > apart + 1e-10)
            return {false, "projection expanded a pair at trial " + std::to_string(trial)};
    }

    for (double tau : {0.3, 1.0}) {
        Eigen::MatrixXd x(8, 8);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c) x(r, c) = gauss(rng);
        Eigen::MatrixXd d = shrink_singular_values(x, tau);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(x - d);
        if (svd.singularValues().maxCoeff() > tau + 1e-10)
            return {false, "residual spectral norm exceeds tau=" + fmt(tau, 1)};
    }

    Eigen::MatrixXd diag31 = Eigen::Vector2d(3.0, 1.0).asDiagonal();
    Eigen::MatrixXd want = Eigen::Vector2d(1.0, 0.0).asDiagonal();
    double dev = (shrink_singular_values(diag31, 2.0) - want).cwiseAbs().maxCoeff();
    if (dev > 1e-12)
        return {false, "diag(3,1) at tau=2 misses diag(1,0) by " + format_double(dev)};
    return {true, "100 cone pairs, shrinkage residual bound, and the closed-form case hold"};
}

Outcome check_solver_against_conic_reference(Context& ctx) {
    const auto t0 = Clock::now();
    const int f = 4, n = 16;
    Corpus corpus = make_synthetic_corpus(150, 32, 32, 0x41ull, "train");
    WaveletBasis basis = build_wavelet_basis(f, 0, "db2");

    std::vector<Eigen::VectorXd> blocks;
    for (std::size_t i = 0; i < corpus.images.size(); ++i)
        blocks.push_back(downsample_area(corpus.images[i], corpus.dims[i].first,
                                         corpus.dims[i].second, f));
    DeltaTargets targets = compute_delta_targets(blocks, f);
    MggdModel model = fit_model_from_corpus(corpus, basis);
    DesignProblem problem = build_design_problem(basis, model, targets.delta, 0.05);

    SvtResult result = svt_solve(problem);
    double b_max = problem.b.colwise().norm().maxCoeff();
    double tol = 1e-6 * b_max;
    if (!result.converged || result.state.iteration > 5000)
        return {false, "solver did not converge within 5000 iterations (violation " +
                           format_double(result.max_violation) + ")"};
    if (result.max_violation > tol * (1.0 + 1e-12))
        return {false, "violation " + format_double(result.max_violation) + " exceeds " +
                           format_double(tol)};

    SensingDesign design = assemble_q(result.p, problem);
    ctx.c4_design = design;
    ctx.registry.push_back({"desk-scale f=4", design, result.converged});

    fs::path in_path = ctx.args.workdir / "conic_problem.json";
    fs::path out_path = ctx.args.workdir / "conic_result.json";
    std::ostringstream js;
    js << "{\"n\":" << n << ",\"f\":" << f
       << ",\"tau\":" << format_double(result.state.tau)
       << ",\"eps\":" << format_double(problem.eps)
       << ",\"beta\":" << format_double(problem.beta.beta) << ",\"delta\":";
    json_vector(js, problem.delta);
    js << ",\"delta_bounds\":";
    json_vector(js, problem.delta_bounds);
    js << ",\"sigma_u\":";
    json_matrix(js, problem.sigma_u);
    js << ",\"b\":";
    json_matrix(js, problem.b);
    js << "}";
    write_text_file(in_path.string(), js.str());

    fs::path log = ctx.args.workdir / "conic_oracle.log";
    std::string cmd = "python3 \"" + ctx.args.oracle + "\" \"" + in_path.string() + "\" \"" +
                      out_path.string() + "\" > \"" + log.string() + "\" 2>&1";
    if (int rc = run_command(cmd); rc != 0)
        return {false, "reference solver exited with code " + std::to_string(rc) + ", see " +
                           log.string()};

    std::string reply = slurp(out_path);
    double reference = json_number(reply, "objective");
    double delta_check = json_number(reply, "max_delta_check");
    std::string solver = json_string(reply, "solver");
    double rel = std::abs(result.objective - reference) / std::max(std::abs(reference), 1e-300);
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs >= 300.0) return {false, "criterion took " + fmt(secs) + " s (budget 300 s)"};
    if (rel >= 0.01)
        return {false, "objective " + format_double(result.objective) + " vs reference " +
                           format_double(reference) + " (" + solver + "), rel diff " +
                           format_double(rel)};
    return {true, "converged in " + std::to_string(result.state.iteration) +
                      " iterations; objective matches " + solver + " within " +
                      format_double(rel) + " (bound re-derivation agrees to " +
                      format_double(delta_check) + ")"};
}

Outcome check_rank_identity(const Context& ctx) {
    int checked = 0;
    std::ostringstream detail;
    for (const auto& rec : ctx.registry) {
        if (!rec.converged) continue;
        ++checked;
        if (checked > 1) detail << "; ";
        detail << rec.name << " rank_q=" << rec.design.rank_q
               << " rank_p=" << rec.design.rank_p;
        if (rec.design.rank_q != rec.design.rank_p + 1)
            return {false, rec.name + " breaks the identity: rank_q=" +
                               std::to_string(rec.design.rank_q) + " rank_p=" +
                               std::to_string(rec.design.rank_p)};
    }
    if (checked == 0) return {false, "no converged designs were produced to check"};
    return {true, std::to_string(checked) + " converged designs: " + detail.str()};
}

Outcome check_coverage_guarantee(Context& ctx) {
    const auto t0 = Clock::now();
    ctx.f8_dir = ctx.args.workdir / "f8";
    fs::create_directories(ctx.f8_dir);
    fs::path cfg = ctx.args.workdir / "f8.ini";
    std::ostringstream ini;
    ini << "out = " << ctx.f8_dir.string() << "\n"
        << "block_side = 8\n"
        << "seed = 101\n"
        << "guarantee = 0.95\n"
        << "max_iterations = 80000\n"
        << "feas_tol_factor = 1e-3\n"
        << "rel_tol = 1e-6\n"
        << "filters = 3,5,7\n"
        << "test_synth_count = 100\n";
    write_text_file(cfg.string(), ini.str());

    if (int rc = run_cli(ctx, "fit", cfg, "f8_fit.log"); rc != 0)
        return {false, "fit exited with code " + std::to_string(rc)};
    if (int rc = run_cli(ctx, "design", cfg, "f8_design.log"); rc != 0)
        return {false, "design exited with code " + std::to_string(rc)};

    bool converged = false;
    SensingDesign design = read_design((ctx.f8_dir / "design.bin").string(), &converged);
    MggdModel model = read_model((ctx.f8_dir / "model.bin").string());
    Eigen::VectorXd delta = parse_delta_csv(ctx.f8_dir / "delta_targets.csv");
    ctx.f8_design = design;
    ctx.f8_model = model;
    ctx.f8_delta = delta;
    ctx.registry.push_back({"corpus-driven f=8", design, converged});
    if (!converged) return {false, "the f=8 design carries the non-convergence flag"};

    const int n = 64;
    WaveletBasis basis = build_wavelet_basis(8, 0, "db2");
    Eigen::MatrixXd u_detail = basis.matrix_t.bottomRows(n - 1);
    const int samples = 10000;
    Eigen::MatrixXd w = sample_mggd(model, samples, 0x5eedull);
    Eigen::MatrixXd spread =
        (design.q - Eigen::MatrixXd::Identity(n, n)) * u_detail.transpose();
    Eigen::MatrixXd dist = spread * w.transpose();  // n x samples

    IntegralOperator op(8, 8);
    Eigen::VectorXi hits = Eigen::VectorXi::Zero(n);
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd d = integral_transform(dist.col(s), op);
        for (int i = 0; i < n; ++i)
            if (std::abs(d[i]) <= delta[i]) ++hits[i];
    }
    double min_cov = hits.cast<double>().minCoeff() / samples;
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs >= 120.0) return {false, "criterion took " + fmt(secs) + " s (budget 120 s)"};
    if (min_cov < 0.93)
        return {false, "worst per-location coverage " + fmt(min_cov, 4) + " < 0.93"};
    return {true, "worst per-location coverage " + fmt(min_cov, 4) + " over 10000 samples (target 0.95, floor 0.93)"};
}

Outcome check_truncation_error(const Context& ctx) {
    double worst = 0.0;
    int checked = 0;
    for (const auto* design : {&*ctx.c4_design, &*ctx.f8_design}) {
        double q_norm = design->q.norm();
        const Eigen::VectorXd& sv = design->singular_values;
        for (int m : {1, std::max(1, design->rank_q / 2), design->rank_q}) {
            SensingOperatorPair pair = make_sensing_operator(*design, m);
            double err = (pair.phi_dual.transpose() * pair.phi - design->q).norm();
            double tail = std::sqrt(sv.tail(sv.size() - m).squaredNorm());
            double dev = std::abs(err - tail) / std::max(tail, q_norm);
            worst = std::max(worst, dev);
            ++checked;
            if (dev >= 1e-8)
                return {false, "M=" + std::to_string(m) + " deviates by " + format_double(dev) +
                                   " (factorization error " + format_double(err) +
                                   ", spectral tail " + format_double(tail) + ")"};
        }
    }
    return {true, std::to_string(checked) +
                      " truncations match the spectral tail; worst relative deviation " +
                      format_double(worst)};
}

Outcome check_end_to_end_identity(const Context& ctx) {
    std::mt19937_64 rng(8008);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> side(8, 40);
    const int f = 8;

    SensingOperatorPair bypass = make_identity_operator(f);
    for (int trial = 0; trial < 20; ++trial) {
        int rows = side(rng), cols = side(rng);
        Eigen::VectorXd image(rows * cols);
        for (int i = 0; i < rows * cols; ++i) image[i] = unit(rng);
        BlockLayout layout(rows, cols, f);
        Eigen::VectorXd cropped = reassemble_blocks(partition_blocks(image, layout), layout);
        IntegralOperator full(layout.cropped_rows, layout.cropped_cols);
        Eigen::VectorXd exact = integral_transform(cropped, full);
        Eigen::VectorXd est = estimate_integral(sense(image, bypass, layout), bypass, layout);
        double diff = (est - exact).cwiseAbs().maxCoeff();
        if (diff > 1e-10)
            return {false, "bypass estimate differs from the exact integral by " +
                               format_double(diff)};
    }

    const SensingDesign& design = *ctx.f8_design;
    SensingOperatorPair full_rank = make_sensing_operator(design, design.rank_q);
    Eigen::MatrixXd q_m = full_rank.phi_dual.transpose() * full_rank.phi;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        int rows = side(rng), cols = side(rng);
        Eigen::VectorXd image(rows * cols);
        for (int i = 0; i < rows * cols; ++i) image[i] = unit(rng);
        BlockLayout layout(rows, cols, f);
        auto blocks = partition_blocks(image, layout);
        for (auto& block : blocks) block = q_m * block;
        IntegralOperator full(layout.cropped_rows, layout.cropped_cols);
        Eigen::VectorXd reference = integral_transform(reassemble_blocks(blocks, layout), full);
        Eigen::VectorXd est =
            estimate_integral(sense(image, full_rank, layout), full_rank, layout);
        double rel = (est - reference).norm() / std::max(reference.norm(), 1e-300);
        worst = std::max(worst, rel);
        if (rel >= 1e-8)
            return {false, "full-rank estimate misses the dense reference by " +
                               format_double(rel) + " relative"};
    }
    return {true, "bypass exact on 20 images; full-rank path matches the dense reference "
                  "(worst relative gap " +
                      format_double(worst) + ")"};
}

Outcome check_monotonicity_sweep(Context& ctx) {
    // sweep every usable rank up to the achieved one (the design decides how
    // many there are); small designs get the full 1..rank_q ladder
    const int rank_q = ctx.f8_design->rank_q;
    std::vector<int> sweep;
    if (rank_q <= 6)
        for (int m = 1; m <= rank_q; ++m) sweep.push_back(m);
    else {
        for (int frac = 1; frac <= 4; ++frac) {
            int m = std::max(1, rank_q * frac / 4);
            if (sweep.empty() || sweep.back() != m) sweep.push_back(m);
        }
        if (sweep.front() != 1) sweep.insert(sweep.begin(), 1);
    }
    fs::path eval_cfg = ctx.args.workdir / "f8_eval.ini";
    {
        std::ostringstream ini;
        ini << slurp(ctx.args.workdir / "f8.ini") << "ranks = ";
        for (std::size_t i = 0; i < sweep.size(); ++i) ini << (i ? "," : "") << sweep[i];
        ini << "\n";
        write_text_file(eval_cfg.string(), ini.str());
    }
    if (int rc = run_cli(ctx, "evaluate", eval_cfg, "f8_evaluate.log"); rc != 0)
        return {false, "evaluate exited with code " + std::to_string(rc)};

    auto lines = split_lines(slurp(ctx.f8_dir / "evaluate_summary.csv"));
    if (lines.empty()) return {false, "evaluate summary is empty"};
    auto header = split_fields(lines[0]);
    auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("summary is missing column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    std::size_t c_op = col("operator"), c_m = col("M"), c_int = col("mean_rsnr_integral");
    std::size_t c_b3 = col("mean_rsnr_box3"), c_b5 = col("mean_rsnr_box5"),
                c_b7 = col("mean_rsnr_box7");

    struct Row {
        int m;
        double integral, box3, box5, box7;
    };
    std::vector<Row> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_fields(lines[i]);
        if (fields.size() < header.size() || fields[c_op] != "design") continue;
        rows.push_back({std::atoi(fields[c_m].c_str()), std::atof(fields[c_int].c_str()),
                        std::atof(fields[c_b3].c_str()), std::atof(fields[c_b5].c_str()),
                        std::atof(fields[c_b7].c_str())});
    }
    if (rows.size() < 3)
        return {false, "expected a rank sweep, found " + std::to_string(rows.size()) +
                           " design rows"};
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.m < b.m; });

    std::ostringstream series;
    for (const auto& r : rows) series << " M=" << r.m << ":" << fmt(r.integral, 2);
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].integral < rows[i - 1].integral - 0.5)
            return {false, "mean integral RSNR drops by more than 0.5 dB:" + series.str()};
    for (const auto& r : rows) {
        if (r.box5 < r.box3 - 1.0 || r.box7 < r.box5 - 1.0)
            return {false, "box RSNR not nondecreasing in k at M=" + std::to_string(r.m) +
                               " (" + fmt(r.box3, 2) + ", " + fmt(r.box5, 2) + ", " +
                               fmt(r.box7, 2) + " dB)"};
    }

    // heat-map agreement at half the design rank, largest filter
    fs::path hm_dir = ctx.args.workdir / "f8_heatmap";
    fs::path hm_cfg = ctx.args.workdir / "f8_heatmap.ini";
    std::ostringstream ini;
    ini << "out = " << hm_dir.string() << "\n"
        << "design_file = " << (ctx.f8_dir / "design.bin").string() << "\n"
        << "block_side = 8\n"
        << "seed = 101\n"
        << "test_synth_count = 100\n"
        << "heatmap_rank = " << std::max(1, ctx.f8_design->rank_q / 2) << "\n"
        << "heatmap_k = 7\n"
        << "heatmap_index = 0\n";
    write_text_file(hm_cfg.string(), ini.str());
    if (int rc = run_cli(ctx, "heatmap", hm_cfg, "f8_heatmap.log"); rc != 0)
        return {false, "heatmap exited with code " + std::to_string(rc)};
    Eigen::VectorXd exact =
        reinterpret_heatmap(hm_dir / "exact_box.pgm", hm_dir / "exact_box.txt");
    Eigen::VectorXd estimate =
        reinterpret_heatmap(hm_dir / "estimate_box.pgm", hm_dir / "estimate_box.txt");
    double corr = pearson(exact, estimate);
    if (corr < kHeatmapCorrMin)
        return {false, "heat-map correlation " + fmt(corr, 4) + " below " +
                           fmt(kHeatmapCorrMin, 2)};

    std::string voc_note;
    if (ctx.args.voc.empty()) {
        voc_note = "; absolute-scale comparison skipped (no reference corpus supplied)";
    } else {
        fs::path voc_dir = ctx.args.workdir / "voc_eval";
        fs::path voc_cfg = ctx.args.workdir / "voc.ini";
        std::ostringstream vini;
        vini << "out = " << voc_dir.string() << "\n"
             << "block_side = 32\n"
             << "seed = 101\n"
             << "corpus_dir = " << ctx.args.voc << "\n"
             << "test_corpus_dir = " << ctx.args.voc << "\n"
             << "guarantee = 0.95\n"
             << "max_iterations = 60000\n"
             << "feas_tol_factor = 1e-3\n"
             << "rel_tol = 1e-6\n"
             << "ranks = 20,40,60\n"
             << "filters = 3,5,7\n";
        write_text_file(voc_cfg.string(), vini.str());
        for (const char* step : {"fit", "design", "evaluate"})
            if (int rc = run_cli(ctx, step, voc_cfg, std::string("voc_") + step + ".log");
                rc != 0)
                return {false, std::string("reference-corpus ") + step + " exited with code " +
                                   std::to_string(rc)};
        auto vlines = split_lines(slurp(voc_dir / "evaluate_summary.csv"));
        auto vheader = split_fields(vlines[0]);
        for (auto [m_ref, db_ref] : kVocReference) {
            bool found = false;
            for (std::size_t i = 1; i < vlines.size(); ++i) {
                auto fields = split_fields(vlines[i]);
                if (fields[c_op] == "design" && std::atoi(fields[c_m].c_str()) == m_ref) {
                    double got = std::atof(fields[c_int].c_str());
                    if (std::abs(got - db_ref) > 3.0)
                        return {false, "reference-corpus mean RSNR at M=" +
                                           std::to_string(m_ref) + " is " + fmt(got, 2) +
                                           " dB, expected " + fmt(db_ref, 2) + " +- 3 dB"};
                    found = true;
                }
            }
            if (!found)
                return {false, "reference-corpus sweep is missing M=" + std::to_string(m_ref)};
        }
        voc_note = "; absolute scale matches the reference corpus within 3 dB";
    }
    return {true, "integral RSNR nondecreasing over" + series.str() +
                      "; box RSNR nondecreasing in k; heat-map correlation " + fmt(corr, 4) +
                      voc_note};
}

Outcome check_estimation_speed() {
    const int f = 32, n = f * f;
    std::mt19937_64 rng(1010);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd p(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) p(r, c) = 0.05 * gauss(rng);
    SensingDesign design = assemble_q(p);
    SensingOperatorPair pair = make_sensing_operator(design, 40);

    auto median_ms = [](std::vector<double>& samples) {
        std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
        return samples[samples.size() / 2] * 1000.0;
    };
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Eigen::VectorXd block_image(n);
    for (int i = 0; i < n; ++i) block_image[i] = unit(rng);
    BlockLayout single(f, f, f);
    Measurements block_meas = sense(block_image, pair, single);
    volatile double sink = 0.0;
    for (int i = 0; i < 10; ++i)
        sink = sink + estimate_integral(block_meas, pair, single).sum();
    std::vector<double> block_times;
    for (int rep = 0; rep < 200; ++rep) {
        auto t0 = Clock::now();
        sink = sink + estimate_integral(block_meas, pair, single).sum();
        block_times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    }
    double block_ms = median_ms(block_times);

    Eigen::VectorXd image(256 * 256);
    for (int i = 0; i < 256 * 256; ++i) image[i] = unit(rng);
    BlockLayout layout(256, 256, f);
    Measurements meas = sense(image, pair, layout);
    for (int i = 0; i < 3; ++i) sink = sink + estimate_integral(meas, pair, layout).sum();
    std::vector<double> image_times;
    for (int rep = 0; rep < 30; ++rep) {
        auto t0 = Clock::now();
        sink = sink + estimate_integral(meas, pair, layout).sum();
        image_times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    }
    double image_ms = median_ms(image_times);
    (void)sink;

    if (block_ms >= 1.0)
        return {false, "single 32x32 block estimate took " + fmt(block_ms) + " ms (budget 1 ms)"};
    if (image_ms >= 10.0)
        return {false, "256x256 estimate took " + fmt(image_ms) + " ms (budget 10 ms)"};
    return {true, "M=40 at f=32: " + fmt(block_ms) + " ms per block, " + fmt(image_ms) +
                      " ms per 256x256 image (median)"};
}

Outcome check_determinism(Context& ctx) {
    std::vector<fs::path> dirs = {ctx.args.workdir / "det_a", ctx.args.workdir / "det_b"};
    for (const fs::path& dir : dirs) {
        fs::create_directories(dir);
        fs::path cfg = dir / "config.ini";
        std::ostringstream ini;
        ini << "out = " << dir.string() << "\n"
            << "block_side = 4\n"
            << "seed = 7\n";
        write_text_file(cfg.string(), ini.str());
        for (const char* step : {"fit", "design", "evaluate"}) {
            std::string log = dir.filename().string() + "_" + step + ".log";
            if (int rc = run_cli(ctx, step, cfg, log); rc != 0)
                return {false, std::string(step) + " exited with code " + std::to_string(rc) +
                                   " in " + dir.string()};
        }
    }

    for (const char* name : {"model.bin", "beta_fit.csv", "design.bin", "delta_targets.csv",
                             "convergence.csv", "design_summary.csv"}) {
        if (!files_byte_equal(dirs[0] / name, dirs[1] / name))
            return {false, std::string(name) + " differs between identically seeded runs"};
    }
    for (const char* name : {"evaluate_records.csv", "evaluate_summary.csv"}) {
        if (!files_equal_excluding_last_field(dirs[0] / name, dirs[1] / name))
            return {false, std::string(name) +
                               " differs between identically seeded runs (timing excluded)"};
    }

    bool converged = false;
    SensingDesign design = read_design((dirs[0] / "design.bin").string(), &converged);
    ctx.registry.push_back({"determinism run f=4", design, converged});
    return {true, "fit/design/evaluate reruns are byte-identical (timing columns excluded)"};
}

} // namespace

int main(int argc, char** argv) {
    Args args;
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string key = argv[i];
        if (key == "--cli") args.cli = argv[i + 1];
        else if (key == "--oracle") args.oracle = argv[i + 1];
        else if (key == "--workdir") args.workdir = argv[i + 1];
        else if (key == "--voc") args.voc = argv[i + 1];
        else {
            std::cerr << "unknown argument " << key << "\n";
            return 64;
        }
    }
    if (args.cli.empty() || args.oracle.empty() || args.workdir.empty()) {
        std::cerr << "usage: acceptance --cli <binary> --oracle <script> --workdir <dir>"
                     " [--voc <dir>]\n";
        return 64;
    }
    std::error_code ec;
    fs::remove_all(args.workdir, ec);
    fs::create_directories(args.workdir);

    Context ctx;
    ctx.args = args;
    std::map<int, CheckResult> results;
    auto run = [&](int index, const std::string& title, auto&& fn) {
        auto t0 = Clock::now();
        CheckResult r;
        r.title = title;
        try {
            auto [pass, detail] = fn();
            r.pass = pass;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        results[index] = std::move(r);
    };

    run(1, "scan oracles", [] { return check_scan_oracles(); });
    run(2, "adjoint identity", [] { return check_adjoint_identity(); });
    run(3, "cone and shrinkage prox", [] { return check_cone_and_prox(); });
    run(4, "solver vs conic reference", [&] { return check_solver_against_conic_reference(ctx); });
    run(6, "coverage guarantee", [&] { return check_coverage_guarantee(ctx); });
    run(7, "truncation error", [&]() -> Outcome {
        if (!ctx.c4_design || !ctx.f8_design)
            return {false, "prerequisite designs are missing"};
        return check_truncation_error(ctx);
    });
    run(8, "end-to-end identity", [&]() -> Outcome {
        if (!ctx.f8_design) return {false, "prerequisite design is missing"};
        return check_end_to_end_identity(ctx);
    });
    run(9, "monotonicity sweep", [&]() -> Outcome {
        if (!ctx.f8_design) return {false, "prerequisite design is missing"};
        return check_monotonicity_sweep(ctx);
    });
    run(10, "estimation speed", [] { return check_estimation_speed(); });
    run(11, "determinism", [&] { return check_determinism(ctx); });
    run(5, "rank identity", [&] { return check_rank_identity(ctx); });

    int failures = 0;
    for (const auto& [index, r] : results) {
        if (!r.pass) ++failures;
        std::cout << (r.pass ? "[PASS]" : "[FAIL]") << " criterion " << index << ": " << r.title
                  << " — " << r.detail << " [" << fmt(r.seconds, 1) << " s]\n";
    }
    std::cout << "acceptance: " << (results.size() - failures) << "/" << results.size()
              << " criteria passed\n";
    return failures;
}
