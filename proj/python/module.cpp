#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <utility>

#include "intsense/blocks.hpp"
#include "intsense/design.hpp"
#include "intsense/gamma.hpp"
#include "intsense/ggd.hpp"
#include "intsense/integral.hpp"
#include "intsense/pipeline.hpp"
#include "intsense/wavelet.hpp"

namespace py = pybind11;
using namespace intsense;

namespace {

// The Python surface passes the GGD shape as a plain float.
GgdShape shape(double beta) { return GgdShape(beta); }

} // namespace

PYBIND11_MODULE(intsense, m) {
    m.doc() = "Integral-image estimation from low-rank block-compressive measurements";

    // --- special functions -------------------------------------------------
    m.def("reg_lower_incomplete_gamma", &reg_lower_incomplete_gamma, py::arg("a"),
          py::arg("x"), "Regularized lower incomplete gamma P(a, x).");
    m.def("inv_reg_lower_incomplete_gamma", &inv_reg_lower_incomplete_gamma, py::arg("a"),
          py::arg("p"), "Inverse of P(a, .) in x.");

    // --- generalized Gaussian model ----------------------------------------
    m.def(
        "interval_probability",
        [](double delta, double scatter, double beta) {
            return ggd_interval_probability(delta, scatter, shape(beta));
        },
        py::arg("delta"), py::arg("scatter"), py::arg("beta"),
        "P(|v| <= delta) for a univariate GGD with the given scatter.");
    m.def(
        "delta_bound",
        [](double delta_i, double eps, double beta) {
            return delta_bound_from_probability(delta_i, eps, shape(beta));
        },
        py::arg("delta_i"), py::arg("eps"), py::arg("beta"),
        "Largest per-constraint level Delta_i with coverage at least 1 - eps.");
    m.def(
        "scatter_factor", [](int dim, double beta) { return scatter_factor(dim, shape(beta)); },
        py::arg("dim"), py::arg("beta"));
    m.def(
        "scatter_from_covariance",
        [](const Eigen::MatrixXd& cov, double beta) {
            return scatter_from_covariance(cov, shape(beta));
        },
        py::arg("covariance"), py::arg("beta"));
    m.def(
        "covariance_from_scatter",
        [](const Eigen::MatrixXd& scatter, double beta) {
            return covariance_from_scatter(scatter, shape(beta));
        },
        py::arg("scatter"), py::arg("beta"));
    m.def(
        "sample_mggd",
        [](const Eigen::MatrixXd& scatter, double beta, int count, std::uint64_t seed) {
            return sample_mggd(MggdModel(shape(beta), scatter), count, seed);
        },
        py::arg("scatter"), py::arg("beta"), py::arg("count"), py::arg("seed"),
        "count x dim matrix of MGGD draws, deterministic given the seed.");
    m.def(
        "fit_beta",
        [](const std::vector<Eigen::VectorXd>& samples_per_coordinate,
           const std::vector<double>& beta_grid, int bin_count) {
            BetaFitReport report = fit_beta(samples_per_coordinate, beta_grid, bin_count);
            return py::make_tuple(report.best.beta, report.beta_grid, report.distances);
        },
        py::arg("samples_per_coordinate"), py::arg("beta_grid"), py::arg("bin_count") = 101,
        "Histogram-distance grid search; returns (best_beta, grid, distances).");

    // --- wavelet basis ------------------------------------------------------
    py::class_<WaveletBasis>(m, "WaveletBasis")
        .def_readonly("matrix_t", &WaveletBasis::matrix_t)
        .def_readonly("family", &WaveletBasis::family)
        .def_readonly("levels", &WaveletBasis::levels)
        .def_readonly("block_side", &WaveletBasis::block_side);
    m.def("build_wavelet_basis", &build_wavelet_basis, py::arg("block_side"),
          py::arg("levels") = 0, py::arg("family") = "db2",
          "Dense analysis matrix of the periodized 2D wavelet transform; "
          "levels = 0 picks the maximum depth.");
    m.def("max_wavelet_levels", &max_wavelet_levels, py::arg("block_side"));

    // --- integral transforms -----------------------------------------------
    m.def(
        "integral_transform",
        [](const Eigen::VectorXd& image, int rows, int cols) {
            return integral_transform(image, IntegralOperator(rows, cols));
        },
        py::arg("image"), py::arg("rows"), py::arg("cols"),
        "Summed-area transform of a raster image given as a flat vector.");
    m.def(
        "reverse_integral_transform",
        [](const Eigen::VectorXd& image, int rows, int cols) {
            return reverse_integral_transform(image, IntegralOperator(rows, cols));
        },
        py::arg("image"), py::arg("rows"), py::arg("cols"));
    m.def(
        "integral_row",
        [](int rows, int cols, int i) { return integral_row(IntegralOperator(rows, cols), i); },
        py::arg("rows"), py::arg("cols"), py::arg("i"),
        "0/1 indicator of the upper-left rectangle ending at raster index i.");
    m.def(
        "box_filter_from_integral",
        [](const Eigen::VectorXd& integral, int k, int rows, int cols) {
            return box_filter_from_integral(integral, k, IntegralOperator(rows, cols));
        },
        py::arg("integral"), py::arg("k"), py::arg("rows"), py::arg("cols"),
        "k x k windowed sums via four-corner lookups, cropped at the borders.");
    m.def("rsnr", &rsnr, py::arg("estimate"), py::arg("exact"),
          "20 log10(|estimate| / |estimate - exact|) in dB, capped to +-300.");

    // --- block bookkeeping ---------------------------------------------------
    py::class_<BlockLayout>(m, "BlockLayout")
        .def(py::init<int, int, int>(), py::arg("rows"), py::arg("cols"), py::arg("block_side"))
        .def_readonly("image_rows", &BlockLayout::image_rows)
        .def_readonly("image_cols", &BlockLayout::image_cols)
        .def_readonly("block_side", &BlockLayout::block_side)
        .def_readonly("cropped_rows", &BlockLayout::cropped_rows)
        .def_readonly("cropped_cols", &BlockLayout::cropped_cols)
        .def_readonly("row_offset", &BlockLayout::row_offset)
        .def_readonly("col_offset", &BlockLayout::col_offset)
        .def_readonly("grid_rows", &BlockLayout::grid_rows)
        .def_readonly("grid_cols", &BlockLayout::grid_cols)
        .def("block_count", &BlockLayout::block_count)
        .def(
            "__eq__", [](const BlockLayout& a, const BlockLayout& b) { return a == b; },
            py::is_operator());
    m.def("partition_blocks", &partition_blocks, py::arg("image"), py::arg("layout"));
    m.def("reassemble_blocks", &reassemble_blocks, py::arg("blocks"), py::arg("layout"));

    // --- measurement design --------------------------------------------------
    py::class_<DesignProblem>(m, "DesignProblem")
        .def_readonly("sigma_u", &DesignProblem::sigma_u)
        .def_readonly("b", &DesignProblem::b)
        .def_readonly("delta_bounds", &DesignProblem::delta_bounds)
        .def_readonly("delta", &DesignProblem::delta)
        .def_readonly("eps", &DesignProblem::eps)
        .def_property_readonly("beta",
                               [](const DesignProblem& p) { return p.beta.beta; })
        .def("n", &DesignProblem::n)
        .def("f", &DesignProblem::f);
    m.def(
        "build_design_problem",
        [](const WaveletBasis& basis, const Eigen::MatrixXd& scatter, double beta,
           const Eigen::VectorXd& delta, double eps) {
            return build_design_problem(basis, MggdModel(shape(beta), scatter), delta, eps);
        },
        py::arg("basis"), py::arg("scatter"), py::arg("beta"), py::arg("delta"),
        py::arg("eps"));
    m.def("apply_forward", &apply_forward, py::arg("p"), py::arg("problem"));
    m.def("apply_adjoint", &apply_adjoint, py::arg("y"), py::arg("problem"));
    m.def("shrink_singular_values", &shrink_singular_values, py::arg("x"), py::arg("tau"));
    m.def(
        "project_soc",
        [](const Eigen::VectorXd& x, double t) {
            auto [px, pt] = project_soc(x, t);
            return py::make_tuple(px, pt);
        },
        py::arg("x"), py::arg("t"), "Euclidean projection onto {(x, t): |x| <= t}.");

    py::class_<SvtOptions>(m, "SvtOptions")
        .def(py::init<>())
        .def_readwrite("tau", &SvtOptions::tau)
        .def_readwrite("tau_factor", &SvtOptions::tau_factor)
        .def_readwrite("max_iterations", &SvtOptions::max_iterations)
        .def_readwrite("feas_tol", &SvtOptions::feas_tol)
        .def_readwrite("feas_tol_factor", &SvtOptions::feas_tol_factor)
        .def_readwrite("rel_tol", &SvtOptions::rel_tol)
        .def_readwrite("eta_factor", &SvtOptions::eta_factor)
        .def_readwrite("norm_iterations", &SvtOptions::norm_iterations)
        .def_readwrite("seed", &SvtOptions::seed);

    py::class_<SvtResult>(m, "SvtResult")
        .def_readonly("p", &SvtResult::p)
        .def_readonly("converged", &SvtResult::converged)
        .def_readonly("max_violation", &SvtResult::max_violation)
        .def_readonly("spectral_norm", &SvtResult::spectral_norm)
        .def_readonly("objective", &SvtResult::objective)
        .def_property_readonly("iterations",
                               [](const SvtResult& r) { return r.state.iteration; })
        .def_property_readonly("tau", [](const SvtResult& r) { return r.state.tau; })
        .def_property_readonly("history", [](const SvtResult& r) {
            py::list rows;
            for (const SvtIterRecord& rec : r.history)
                rows.append(py::make_tuple(rec.violation, rec.nuclear_norm, rec.rel_change));
            return rows;
        });
    m.def(
        "svt_solve",
        [](const DesignProblem& problem, const SvtOptions& options) {
            return svt_solve(problem, options);
        },
        py::arg("problem"), py::arg("options") = SvtOptions{});

    py::class_<SensingDesign>(m, "SensingDesign")
        .def_readonly("q", &SensingDesign::q)
        .def_readonly("singular_values", &SensingDesign::singular_values)
        .def_readonly("left_vectors", &SensingDesign::left_vectors)
        .def_readonly("right_vectors", &SensingDesign::right_vectors)
        .def_readonly("feasibility_report", &SensingDesign::feasibility_report)
        .def_readonly("rank_q", &SensingDesign::rank_q)
        .def_readonly("rank_p", &SensingDesign::rank_p)
        .def_readonly("block_side", &SensingDesign::block_side)
        .def_readonly("ones_row_residual", &SensingDesign::ones_row_residual);
    m.def("assemble_q",
          py::overload_cast<const Eigen::MatrixXd&>(&assemble_q), py::arg("p_star"));
    m.def("assemble_q",
          py::overload_cast<const Eigen::MatrixXd&, const DesignProblem&>(&assemble_q),
          py::arg("p_star"), py::arg("problem"));

    py::class_<SensingOperatorPair>(m, "SensingOperatorPair")
        .def_readonly("phi", &SensingOperatorPair::phi)
        .def_readonly("phi_dual", &SensingOperatorPair::phi_dual)
        .def_readonly("rank", &SensingOperatorPair::rank)
        .def_readonly("block_side", &SensingOperatorPair::block_side)
        .def_readonly("singular_values", &SensingOperatorPair::singular_values);
    m.def("make_sensing_operator", &make_sensing_operator, py::arg("design"),
          py::arg("rank"));
    m.def("make_identity_operator", &make_identity_operator, py::arg("block_side"));

    // --- sensing and estimation ----------------------------------------------
    py::class_<PcaBasis>(m, "PcaBasis")
        .def_readonly("components", &PcaBasis::components)
        .def_readonly("mean", &PcaBasis::mean);
    m.def("pca_components", &pca_components, py::arg("blocks"), py::arg("n_components"));

    py::class_<DeltaTargets>(m, "DeltaTargets")
        .def_readonly("delta", &DeltaTargets::delta)
        .def_readonly("corpus_id", &DeltaTargets::corpus_id)
        .def_readonly("n_components", &DeltaTargets::n_components)
        .def_readonly("quantile", &DeltaTargets::quantile);
    m.def("compute_delta_targets", &compute_delta_targets, py::arg("blocks"), py::arg("f"),
          py::arg("n_components") = 10, py::arg("quantile") = 0.95,
          py::arg("corpus_id") = "");

    py::class_<Measurements>(m, "Measurements")
        .def_readonly("per_block", &Measurements::per_block)
        .def_readonly("layout", &Measurements::layout)
        .def_readonly("operator_id", &Measurements::operator_id);
    m.def("operator_hash", &operator_hash, py::arg("op"));
    m.def("sense", &sense, py::arg("image"), py::arg("op"), py::arg("layout"));
    m.def(
        "estimate_integral",
        [](const Measurements& meas, const SensingOperatorPair& op, const BlockLayout& layout) {
            return estimate_integral(meas, op, layout);
        },
        py::arg("measurements"), py::arg("op"), py::arg("layout"));
    m.def(
        "estimate_integral_with_cost",
        [](const Measurements& meas, const SensingOperatorPair& op, const BlockLayout& layout) {
            EstimateCost cost;
            Eigen::VectorXd est = estimate_integral(meas, op, layout, &cost);
            return py::make_tuple(est, cost.multiply_accumulate, cost.scan_adds);
        },
        py::arg("measurements"), py::arg("op"), py::arg("layout"),
        "Returns (estimate, multiply_accumulate, scan_adds).");
    m.def("estimate_box_filtered", &estimate_box_filtered, py::arg("measurements"),
          py::arg("op"), py::arg("layout"), py::arg("k"));
    m.def("distortion_vector", &distortion_vector, py::arg("image_block"), py::arg("op"));
}
