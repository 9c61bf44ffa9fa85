#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "intsense/config.hpp"
#include "intsense/eval.hpp"

namespace {

// joins CLI list values into the comma-separated form the config parser expects
std::string join_ints(const std::vector<int>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ",";
        out << values[i];
    }
    return out.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"block-compressive integral image estimation"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int block_side = 0;
    std::vector<int> ranks;
    std::vector<int> filters;
    std::string out_dir;

    app.add_option("--config", config_path, "config file (key = value lines)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed override");
    auto* side_opt = app.add_option("--block-side", block_side, "block side f override");
    auto* rank_opt = app.add_option("--rank", ranks, "measurement rank(s) M override");
    auto* filt_opt = app.add_option("--filters", filters, "box filter size(s) k override");
    auto* out_opt = app.add_option("--out", out_dir, "output directory override");

    auto* fit = app.add_subcommand("fit", "fit the block model from a training corpus");
    auto* design = app.add_subcommand("design", "solve for the sensing design");
    auto* evaluate = app.add_subcommand("evaluate", "sweep ranks/filters over a test corpus");
    auto* heatmap = app.add_subcommand("heatmap", "emit exact vs estimated box-filter maps");
    auto* selftest = app.add_subcommand("selftest", "run the built-in property suite");
    for (auto* sub : {fit, design, evaluate, heatmap, selftest}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        intsense::Config cfg =
            config_path.empty() ? intsense::Config() : intsense::Config::load(config_path);
        if (seed_opt->count()) cfg.set("seed", std::to_string(seed));
        if (side_opt->count()) cfg.set("block_side", std::to_string(block_side));
        if (rank_opt->count()) cfg.set("ranks", join_ints(ranks));
        if (filt_opt->count()) cfg.set("filters", join_ints(filters));
        if (out_opt->count()) cfg.set("out", out_dir);

        if (fit->parsed()) return intsense::cmd_fit(cfg);
        if (design->parsed()) return intsense::cmd_design(cfg);
        if (evaluate->parsed()) return intsense::cmd_evaluate(cfg);
        if (heatmap->parsed()) return intsense::cmd_heatmap(cfg);
        if (selftest->parsed()) return intsense::cmd_selftest(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
