#include "intsense/eval.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "intsense/corpus.hpp"
#include "intsense/gamma.hpp"
#include "intsense/io.hpp"
#include "intsense/pipeline.hpp"
#include "intsense/rng.hpp"

namespace intsense {
namespace {

namespace fs = std::filesystem;

const std::vector<double> kDefaultBetaGrid = {0.3, 0.4, 0.5, 0.6, 0.68, 0.7, 0.8, 0.9, 1.0};

std::string out_dir(const Config& cfg) {
    std::string out = cfg.require("out");
    fs::create_directories(out);
    return out;
}

std::string default_path(const Config& cfg, const std::string& key, const std::string& name) {
    return cfg.get_string(key, (fs::path(cfg.require("out")) / name).string());
}

Corpus load_split(const Config& cfg, const std::string& dir_key,
                  const std::string& prefix, const std::string& split,
                  std::uint64_t seed_salt) {
    if (cfg.has(dir_key)) return load_corpus_dir(cfg.require(dir_key), split);
    int f = cfg.get_int("block_side", 8);
    int count = cfg.get_int(prefix + "_count", split == "train" ? 100 : 20);
    int rows = cfg.get_int(prefix + "_rows", std::max(8 * f, 32));
    int cols = cfg.get_int(prefix + "_cols", std::max(8 * f, 32));
    std::uint64_t seed = cfg.get_u64("seed", 1) ^ seed_salt;
    return make_synthetic_corpus(count, rows, cols, seed, split);
}

Corpus load_train(const Config& cfg) {
    return load_split(cfg, "corpus_dir", "synth", "train", 0x747261696eull);
}

Corpus load_test(const Config& cfg) {
    return load_split(cfg, "test_corpus_dir", "test_synth", "test", 0x7465737474ull);
}

WaveletBasis basis_from_config(const Config& cfg, int f) {
    return build_wavelet_basis(f, cfg.get_int("wavelet_levels", 0),
                               cfg.get_string("wavelet_family", "db2"));
}

std::vector<Eigen::VectorXd> downsampled_blocks(const Corpus& corpus, int f) {
    std::vector<Eigen::VectorXd> blocks;
    blocks.reserve(corpus.images.size());
    for (std::size_t i = 0; i < corpus.images.size(); ++i)
        blocks.push_back(downsample_area(corpus.images[i], corpus.dims[i].first,
                                         corpus.dims[i].second, f));
    return blocks;
}

SvtOptions svt_options_from_config(const Config& cfg) {
    SvtOptions opt;
    opt.tau = cfg.get_double("tau", 0.0);
    opt.tau_factor = cfg.get_double("tau_factor", 0.1);
    opt.max_iterations = cfg.get_int("max_iterations", 5000);
    opt.feas_tol = cfg.get_double("feas_tol", 0.0);
    opt.feas_tol_factor = cfg.get_double("feas_tol_factor", 1e-6);
    opt.rel_tol = cfg.get_double("rel_tol", 1e-7);
    opt.eta_factor = cfg.get_double("eta_factor", 1.9);
    opt.norm_iterations = cfg.get_int("norm_iterations", 100);
    opt.seed = cfg.get_u64("seed", 1);
    return opt;
}

} // namespace

int cmd_fit(const Config& cfg) {
    const std::string out = out_dir(cfg);
    const int f = cfg.get_int("block_side", 8);
    const int n = f * f;
    Corpus corpus = load_train(cfg);
    const int floor = cfg.get_int("n_components", 10) + 1;
    if (static_cast<int>(corpus.images.size()) < floor)
        throw std::runtime_error("fit: corpus has " + std::to_string(corpus.images.size()) +
                                 " images, need at least " + std::to_string(floor));
    if (static_cast<int>(corpus.images.size()) < n)
        std::cerr << "warning: corpus smaller than block dimension (" << corpus.images.size()
                  << " < " << n << "); covariance will be rank-deficient\n";

    WaveletBasis basis = basis_from_config(cfg, f);
    auto blocks = downsampled_blocks(corpus, f);
    const auto count = static_cast<Eigen::Index>(blocks.size());
    Eigen::MatrixXd details(count, n - 1);
    for (Eigen::Index i = 0; i < count; ++i)
        details.row(i) = (basis.matrix_t * blocks[i]).tail(n - 1).transpose();

    Eigen::RowVectorXd mean = details.colwise().mean();
    Eigen::MatrixXd centered = details.rowwise() - mean;
    Eigen::VectorXd variances = centered.array().square().colwise().sum() / double(count - 1);
    if (variances.maxCoeff() <= 0.0) throw std::runtime_error("fit: zero-variance corpus");

    std::vector<Eigen::VectorXd> per_coordinate;
    per_coordinate.reserve(n - 1);
    for (int j = 0; j < n - 1; ++j) per_coordinate.push_back(details.col(j));
    BetaFitReport report = fit_beta(per_coordinate, cfg.get_double_list("beta_grid", kDefaultBetaGrid),
                                    cfg.get_int("bin_count", 101));

    Eigen::MatrixXd cov = centered.transpose() * centered / double(count - 1);
    MggdModel model(report.best, scatter_from_covariance(cov, report.best));
    write_model(default_path(cfg, "model", "model.bin"), model);

    std::ostringstream csv;
    csv << "beta,distance\n";
    for (std::size_t i = 0; i < report.beta_grid.size(); ++i)
        csv << format_double(report.beta_grid[i]) << "," << format_double(report.distances[i])
            << "\n";
    write_text_file((fs::path(out) / "beta_fit.csv").string(), csv.str());

    std::cout << "fit: images=" << corpus.images.size() << " f=" << f
              << " beta=" << format_double(report.best.beta) << "\n";
    return 0;
}

int cmd_design(const Config& cfg) {
    const std::string out = out_dir(cfg);
    MggdModel model = read_model(default_path(cfg, "model", "model.bin"));
    const int f = cfg.get_int("block_side", 8);
    const int n = f * f;
    if (model.dim != n - 1)
        throw std::runtime_error("design: model dimension " + std::to_string(model.dim) +
                                 " does not match block_side " + std::to_string(f));

    Corpus corpus = load_train(cfg);
    auto blocks = downsampled_blocks(corpus, f);
    DeltaTargets targets =
        cfg.has("delta_constant")
            ? DeltaTargets{Eigen::VectorXd::Constant(n, cfg.get_double("delta_constant", 0.0)),
                           "constant", 0, 0.0}
            : compute_delta_targets(blocks, f, cfg.get_int("n_components", 10),
                                    cfg.get_double("quantile", 0.95),
                                    cfg.get_string("corpus_dir", "synthetic"));

    std::ostringstream delta_csv;
    delta_csv << "index,delta\n";
    for (int i = 0; i < n; ++i)
        delta_csv << i << "," << format_double(targets.delta[i]) << "\n";
    write_text_file((fs::path(out) / "delta_targets.csv").string(), delta_csv.str());

    WaveletBasis basis = basis_from_config(cfg, f);
    double guarantee = cfg.get_double("guarantee", 0.95);
    if (!(guarantee > 0.0) || !(guarantee < 1.0))
        throw std::runtime_error("design: guarantee must lie in (0, 1)");
    DesignProblem problem = build_design_problem(basis, model, targets.delta, 1.0 - guarantee);

    SvtResult result = svt_solve(problem, svt_options_from_config(cfg));

    std::ostringstream conv_csv;
    conv_csv << "iteration,violation,nuclear_norm,rel_change\n";
    for (std::size_t i = 0; i < result.history.size(); ++i)
        conv_csv << (i + 1) << "," << format_double(result.history[i].violation) << ","
                 << format_double(result.history[i].nuclear_norm) << ","
                 << format_double(result.history[i].rel_change) << "\n";
    write_text_file((fs::path(out) / "convergence.csv").string(), conv_csv.str());

    SensingDesign design = assemble_q(result.p, problem);
    write_design(default_path(cfg, "design_file", "design.bin"), design, result.converged);

    std::ostringstream sum_csv;
    sum_csv << "index,singular_value,feasibility_margin\n";
    for (int i = 0; i < n; ++i)
        sum_csv << i << "," << format_double(design.singular_values[i]) << ","
                << format_double(design.feasibility_report[i]) << "\n";
    write_text_file((fs::path(out) / "design_summary.csv").string(), sum_csv.str());

    bool rank_ok = design.rank_q == design.rank_p + 1;
    std::cout << "design: f=" << f << " iterations=" << result.state.iteration
              << " converged=" << (result.converged ? "yes" : "no")
              << " max_violation=" << format_double(result.max_violation)
              << " objective=" << format_double(result.objective)
              << " rank_q=" << design.rank_q << " rank_p=" << design.rank_p
              << " rank_identity=" << (rank_ok ? "yes" : "NO")
              << " ones_row_residual=" << format_double(design.ones_row_residual) << "\n";

    if (!result.converged) {
        std::cerr << "design: solver did not reach tolerance within "
                  << result.state.iteration << " iterations (violation "
                  << format_double(result.max_violation)
                  << "); design written with warning flag\n";
        return 2;
    }
    if (!rank_ok) {
        std::cerr << "design: rank identity violated (rank_q=" << design.rank_q
                  << ", rank_p=" << design.rank_p << ")\n";
        return 3;
    }
    return 0;
}

namespace {

struct OperatorUnderTest {
    std::string tag;
    int m_rank;
    SensingOperatorPair pair;
};

void write_eval_csvs(const std::string& out, const std::vector<EvalRecord>& records,
                     const std::vector<int>& filters) {
    std::ostringstream rec_csv;
    rec_csv << "operator,image_id,M,rsnr_integral";
    for (int k : filters) rec_csv << ",rsnr_box" << k;
    rec_csv << ",estimate_time_s\n";
    for (const auto& r : records) {
        rec_csv << r.op_tag << "," << r.image_id << "," << r.m_rank << ","
                << format_double(r.rsnr_integral);
        for (const auto& [k, db] : r.rsnr_box) rec_csv << "," << format_double(db);
        rec_csv << "," << format_double(r.estimate_time_s) << "\n";
    }
    write_text_file((fs::path(out) / "evaluate_records.csv").string(), rec_csv.str());

    // mean over images per (operator, M)
    std::ostringstream sum_csv;
    sum_csv << "operator,M,mean_rsnr_integral";
    for (int k : filters) sum_csv << ",mean_rsnr_box" << k;
    sum_csv << ",mean_estimate_time_s\n";
    std::vector<std::pair<std::string, int>> seen;
    for (const auto& r : records) {
        std::pair<std::string, int> key{r.op_tag, r.m_rank};
        bool found = false;
        for (const auto& s : seen) found = found || s == key;
        if (found) continue;
        seen.push_back(key);
        double si = 0.0, st = 0.0;
        std::vector<double> sb(filters.size(), 0.0);
        int cnt = 0;
        for (const auto& r2 : records) {
            if (r2.op_tag != key.first || r2.m_rank != key.second) continue;
            si += r2.rsnr_integral;
            st += r2.estimate_time_s;
            for (std::size_t i = 0; i < filters.size(); ++i) sb[i] += r2.rsnr_box[i].second;
            ++cnt;
        }
        sum_csv << key.first << "," << key.second << "," << format_double(si / cnt);
        for (double v : sb) sum_csv << "," << format_double(v / cnt);
        sum_csv << "," << format_double(st / cnt) << "\n";
    }
    write_text_file((fs::path(out) / "evaluate_summary.csv").string(), sum_csv.str());
}

} // namespace

int cmd_evaluate(const Config& cfg) {
    const std::string out = out_dir(cfg);
    bool converged = false;
    SensingDesign design = read_design(default_path(cfg, "design_file", "design.bin"), &converged);
    if (!converged)
        std::cerr << "warning: evaluating a design carrying the non-convergence flag\n";
    const int f = design.block_side;

    Corpus corpus = load_test(cfg);
    std::vector<int> filters = cfg.get_int_list("filters", {3, 5, 7});
    std::vector<int> ranks;
    for (int m : cfg.get_int_list("ranks", {})) {
        if (m >= 1 && m <= design.rank_q) ranks.push_back(m);
        else std::cerr << "warning: rank " << m << " outside 1.." << design.rank_q << ", skipped\n";
    }
    if (ranks.empty())
        for (int m = 2; m < design.rank_q; m *= 2) ranks.push_back(m);
    if (ranks.empty() || ranks.back() != design.rank_q) ranks.push_back(design.rank_q);

    std::vector<OperatorUnderTest> ops;
    for (int m : ranks) ops.push_back({"design", m, make_sensing_operator(design, m)});
    if (cfg.get_bool("include_pca_baseline", true)) {
        Corpus train = load_train(cfg);
        PcaBasis pca = pca_components(downsampled_blocks(train, f), cfg.get_int("n_components", 10));
        if (pca.components.rows() > 0) {
            SensingOperatorPair pair{pca.components, pca.components,
                                     static_cast<int>(pca.components.rows()), f,
                                     Eigen::VectorXd::Ones(pca.components.rows())};
            ops.push_back({"pca", pair.rank, std::move(pair)});
        }
    }
    if (cfg.get_bool("include_identity", true))
        ops.push_back({"identity", f * f, make_identity_operator(f)});

    std::vector<EvalRecord> records;
    for (const auto& [tag, m_rank, pair] : ops) {
        for (std::size_t i = 0; i < corpus.images.size(); ++i) {
            auto [rows, cols] = corpus.dims[i];
            if (rows < f || cols < f) {
                std::cerr << "warning: image " << corpus.ids[i] << " smaller than a block, skipped\n";
                continue;
            }
            BlockLayout layout(rows, cols, f);
            Eigen::VectorXd cropped = reassemble_blocks(partition_blocks(corpus.images[i], layout), layout);
            IntegralOperator full(layout.cropped_rows, layout.cropped_cols);
            Eigen::VectorXd exact_integral = integral_transform(cropped, full);

            Measurements meas = sense(corpus.images[i], pair, layout);
            auto t0 = std::chrono::steady_clock::now();
            Eigen::VectorXd est_integral = estimate_integral(meas, pair, layout);
            auto t1 = std::chrono::steady_clock::now();

            EvalRecord rec;
            rec.op_tag = tag;
            rec.image_id = corpus.ids[i];
            rec.m_rank = m_rank;
            rec.rsnr_integral = rsnr(est_integral, exact_integral);
            for (int k : filters) {
                Eigen::VectorXd est_box = box_filter_from_integral(est_integral, k, full);
                Eigen::VectorXd exact_box = box_filter_from_integral(exact_integral, k, full);
                rec.rsnr_box.emplace_back(k, rsnr(est_box, exact_box));
            }
            rec.estimate_time_s = std::chrono::duration<double>(t1 - t0).count();
            records.push_back(std::move(rec));
        }
    }

    write_eval_csvs(out, records, filters);
    std::cout << "evaluate: images=" << corpus.images.size() << " operators=" << ops.size()
              << " records=" << records.size() << "\n";
    return 0;
}

int cmd_heatmap(const Config& cfg) {
    const std::string out = out_dir(cfg);
    const int k = cfg.get_int("heatmap_k", 7);

    SensingOperatorPair pair;
    int f;
    if (cfg.get_bool("heatmap_identity", false)) {
        f = cfg.get_int("block_side", 8);
        pair = make_identity_operator(f);
    } else {
        SensingDesign design = read_design(default_path(cfg, "design_file", "design.bin"));
        f = design.block_side;
        int m = cfg.get_int("heatmap_rank", 0);
        if (m <= 0) {
            auto ranks = cfg.get_int_list("ranks", {});
            m = ranks.empty() ? design.rank_q : ranks.front();
        }
        pair = make_sensing_operator(design, m);
    }

    Eigen::VectorXd image;
    int rows, cols;
    if (cfg.has("heatmap_image")) {
        PgmImage img = read_pgm(cfg.require("heatmap_image"));
        image = pgm_to_real(img);
        rows = img.rows;
        cols = img.cols;
    } else {
        Corpus corpus = load_test(cfg);
        int idx = cfg.get_int("heatmap_index", 0);
        if (idx < 0 || idx >= static_cast<int>(corpus.images.size()))
            throw std::runtime_error("heatmap: image index out of range");
        image = corpus.images[idx];
        rows = corpus.dims[idx].first;
        cols = corpus.dims[idx].second;
    }

    BlockLayout layout(rows, cols, f);
    Eigen::VectorXd cropped = reassemble_blocks(partition_blocks(image, layout), layout);
    IntegralOperator full(layout.cropped_rows, layout.cropped_cols);
    Eigen::VectorXd exact_box = box_filter_from_integral(integral_transform(cropped, full), k, full);
    Measurements meas = sense(image, pair, layout);
    Eigen::VectorXd est_box = estimate_box_filtered(meas, pair, layout, k);

    for (const auto& [name, values] : {std::pair<std::string, const Eigen::VectorXd*>{"exact_box", &exact_box},
                                       {"estimate_box", &est_box}}) {
        double lo, hi;
        PgmImage img = real_to_pgm_minmax(*values, layout.cropped_rows, layout.cropped_cols, &lo, &hi);
        write_pgm((fs::path(out) / (name + ".pgm")).string(), img);
        write_text_file((fs::path(out) / (name + ".txt")).string(),
                        "min " + format_double(lo) + "\nmax " + format_double(hi) + "\n");
    }
    std::cout << "heatmap: f=" << f << " M=" << pair.rank << " k=" << k << "\n";
    return 0;
}

} // namespace intsense
