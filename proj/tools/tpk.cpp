#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tpk/cli.hpp"

namespace {

void add_common(CLI::App* cmd, tpk::cli::RunConfig& cfg) {
    cmd->add_option("--input", cfg.input, "Input file (histograms, one per line)");
    cmd->add_option("--weights", cfg.weights, "Cost or weight matrix file");
    cmd->add_option("--weights-mode", cfg.weights_mode, "Interpret --weights as M (cost) or K (weight)")
        ->check(CLI::IsMember({"cost", "weight"}));
    cmd->add_option("--budget", cfg.budget, "Maximum number of enumerated tables");
    cmd->add_option("--out", cfg.out, "Output directory");
}

void add_pair(CLI::App* cmd, tpk::cli::RunConfig& cfg) {
    cmd->add_option("--r", cfg.r, "Row histogram, e.g. 2,5,3");
    cmd->add_option("--c", cfg.c, "Column histogram, e.g. 5,1,4");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernels between integral histograms built from contingency tables"};
    app.require_subcommand(1);
    tpk::cli::RunConfig cfg;
    std::string manifest;

    auto* gram = app.add_subcommand("gram", "Gram matrix of a histogram dataset, with a PSD certificate");
    add_common(gram, cfg);
    gram->add_option("--kernel", cfg.kernel, "Kernel")->check(CLI::IsMember({"volume", "nw", "pseudo"}));
    gram->add_option("--seed", cfg.seed, "Seed for the permutation subset");
    gram->add_option("--r-size", cfg.r_size, "Number of permutations |R| (nw kernel)");
    gram->add_option("--tolerance", cfg.tolerance, "Relative eigenvalue tolerance");
    gram->add_flag("--normalize", cfg.normalize, "Divide the nw kernel by |R|^2");
    gram->add_option("--manifest", manifest, "Replay the configuration recorded in a manifest");

    auto* enumerate = app.add_subcommand("enumerate", "List every contingency table with marginals r, c");
    add_common(enumerate, cfg);
    add_pair(enumerate, cfg);

    auto* nw = app.add_subcommand("nw", "Northwestern corner table, optionally row/column permuted");
    add_common(nw, cfg);
    add_pair(nw, cfg);
    nw->add_option("--sigma", cfg.sigma, "Row permutation, 1-based, e.g. 3,1,2");
    nw->add_option("--sigma-p", cfg.sigma_p, "Column permutation, 1-based");

    auto* psd = app.add_subcommand("psd-check", "Certify a weight matrix or a Gram CSV");
    add_common(psd, cfg);
    psd->add_option("--tolerance", cfg.tolerance, "Relative eigenvalue tolerance");

    auto* ot = app.add_subcommand("ot", "Optimal transport cost and plan");
    add_common(ot, cfg);
    add_pair(ot, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : tpk::cli::exit_input_error;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (!manifest.empty()) {
        try {
            const std::string out = cfg.out;
            cfg = tpk::cli::load_manifest(manifest);
            cfg.out = out;
        } catch (const tpk::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return tpk::cli::exit_input_error;
        }
    }
    return tpk::cli::dispatch(cfg, std::cout, std::cerr);
}
