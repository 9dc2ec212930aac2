#pragma once

// Batch commands behind the `tpk` executable. Each command takes a RunConfig
// and returns the process exit status:
//   0 ok, 1 input error, 2 PSD certificate failure, 3 budget exceeded.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tpk/error.hpp"
#include "tpk/histogram.hpp"
#include "tpk/io.hpp"
#include "tpk/northwest.hpp"
#include "tpk/ot.hpp"
#include "tpk/polytope.hpp"
#include "tpk/psd.hpp"

namespace tpk::cli {

enum ExitCode : int { exit_ok = 0, exit_input_error = 1, exit_psd_fail = 2, exit_budget = 3 };

struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string weights;
    std::string weights_mode;  // "", "cost" or "weight"
    std::string kernel = "volume";
    std::uint64_t seed = 0;
    std::size_t r_size = 8;
    std::uint64_t budget = EnumerationBudget::default_max_tables;
    double tolerance = 1e-8;
    bool normalize = false;
    std::string r;        // "2,5,3"
    std::string c;
    std::string sigma;    // 1-based, "3,1,2"
    std::string sigma_p;
    std::string out;      // output directory; not part of the replayable config
};

inline nlohmann::ordered_json to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["subcommand"] = cfg.subcommand;
    j["input"] = cfg.input;
    j["weights"] = cfg.weights;
    j["weights_mode"] = cfg.weights_mode;
    j["kernel"] = cfg.kernel;
    j["seed"] = cfg.seed;
    j["r_size"] = cfg.r_size;
    j["budget"] = cfg.budget;
    j["tolerance"] = cfg.tolerance;
    j["normalize"] = cfg.normalize;
    j["r"] = cfg.r;
    j["c"] = cfg.c;
    j["sigma"] = cfg.sigma;
    j["sigma_p"] = cfg.sigma_p;
    return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.subcommand = j.value("subcommand", std::string{});
    cfg.input = j.value("input", std::string{});
    cfg.weights = j.value("weights", std::string{});
    cfg.weights_mode = j.value("weights_mode", std::string{});
    cfg.kernel = j.value("kernel", cfg.kernel);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.r_size = j.value("r_size", cfg.r_size);
    cfg.budget = j.value("budget", cfg.budget);
    cfg.tolerance = j.value("tolerance", cfg.tolerance);
    cfg.normalize = j.value("normalize", cfg.normalize);
    cfg.r = j.value("r", std::string{});
    cfg.c = j.value("c", std::string{});
    cfg.sigma = j.value("sigma", std::string{});
    cfg.sigma_p = j.value("sigma_p", std::string{});
    return cfg;
}

// Reads the "config" object of a gram manifest.
inline RunConfig load_manifest(const std::string& path) {
    auto f = io::open_input(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, path + ": " + e.what());
    }
    if (!j.contains("config")) throw Error(Errc::parse_error, path + ": manifest has no config");
    return config_from_json(j["config"]);
}

inline nlohmann::ordered_json to_json(const PsdCertificate& cert) {
    nlohmann::ordered_json j;
    j["min_eigenvalue"] = cert.min_eigenvalue;
    j["max_eigenvalue"] = cert.max_eigenvalue;
    j["tolerance"] = cert.tolerance;
    j["verdict"] = cert.pass ? "pass" : "fail";
    j["eigenvalues"] = cert.eigenvalues;
    return j;
}

namespace detail {

inline std::optional<WeightOrigin> mode_flag(const RunConfig& cfg) {
    if (cfg.weights_mode.empty()) return std::nullopt;
    auto m = io::parse_weight_mode(cfg.weights_mode);
    if (!m) throw Error(Errc::invalid_argument, "--weights-mode must be 'cost' or 'weight'");
    return m;
}

inline WeightSpec load_weights(const RunConfig& cfg) {
    if (cfg.weights.empty()) throw Error(Errc::invalid_argument, "--weights is required");
    return io::read_weights(cfg.weights, mode_flag(cfg));
}

inline PermutationD parse_permutation(const std::string& text, std::size_t d) {
    if (text.empty()) return PermutationD::identity(d);
    std::vector<std::size_t> one_based;
    const Histogram entries = io::parse_histogram(text, "<permutation>");
    for (count_t v : entries.counts()) one_based.push_back(static_cast<std::size_t>(v));
    auto p = PermutationD::from_one_based(one_based);
    if (p.size() != d)
        throw Error(Errc::dimension_mismatch, "permutation '" + text + "' does not act on d = " + std::to_string(d));
    return p;
}

// (r, c) from --r/--c, else the first two histograms of --input.
inline std::pair<Histogram, Histogram> load_pair(const RunConfig& cfg) {
    if (!cfg.r.empty() || !cfg.c.empty()) {
        if (cfg.r.empty() || cfg.c.empty()) throw Error(Errc::invalid_argument, "--r and --c must be given together");
        return {io::parse_histogram(cfg.r, "--r"), io::parse_histogram(cfg.c, "--c")};
    }
    if (cfg.input.empty()) throw Error(Errc::invalid_argument, "give --r/--c or an --input file with two histograms");
    auto hs = io::read_histograms(cfg.input);
    if (hs.size() < 2) throw Error(Errc::parse_error, cfg.input + ": need two histograms");
    return {hs[0].histogram, hs[1].histogram};
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::invalid_argument, "cannot write '" + path.string() + "'");
    f << content;
}

// |R| is capped at d! so small-d datasets work with the default size.
inline std::size_t effective_r_size(std::size_t requested, std::size_t d) {
    std::size_t fact = 1;
    for (std::size_t k = 2; k <= d && fact < requested; ++k) fact *= k;
    return std::min(requested, fact);
}

inline int exit_for(const Error& e) {
    return e.code() == Errc::budget_exceeded ? exit_budget : exit_input_error;
}

}  // namespace detail

struct GramArtifacts {
    std::string gram_csv;
    std::string manifest_json;
    std::string certificate_json;
    PsdCertificate certificate;
};

// Everything cmd_gram writes, computed in memory.
inline GramArtifacts run_gram(const RunConfig& cfg) {
    if (cfg.input.empty()) throw Error(Errc::invalid_argument, "--input is required");
    const auto numbered = io::read_histograms(cfg.input);
    std::vector<Histogram> hs;
    for (const auto& nh : numbered) hs.push_back(nh.histogram);
    if (hs.empty()) throw Error(Errc::parse_error, cfg.input + ": no histograms");
    for (std::size_t p = 1; p < hs.size(); ++p) {
        if (hs[p].dim() != hs[0].dim() || hs[p].mass() != hs[0].mass())
            throw Error(hs[p].dim() != hs[0].dim() ? Errc::dimension_mismatch : Errc::mass_mismatch,
                        cfg.input + ":" + std::to_string(numbered[p].line) + ": histogram " + hs[p].to_string() +
                            " has d = " + std::to_string(hs[p].dim()) + ", N = " + std::to_string(hs[p].mass()) +
                            "; all histograms must share the same dimension d and total mass N (here d = " +
                            std::to_string(hs[0].dim()) + ", N = " + std::to_string(hs[0].mass()) + ")");
    }
    const std::size_t d = hs[0].dim();

    KernelSpec spec;
    spec.kind = parse_kernel_kind(cfg.kernel);
    if (spec.kind == KernelKind::oracle) throw Error(Errc::invalid_argument, "kernel must be volume, nw or pseudo");
    spec.weights = detail::load_weights(cfg);
    spec.weights.require_dim(d);
    spec.budget.max_tables = cfg.budget;
    spec.nw.normalize = cfg.normalize;
    if (spec.kind != KernelKind::pseudo) spec.weights.require_symmetric();
    if (spec.kind == KernelKind::nw) spec.perms = sample_permutations(d, detail::effective_r_size(cfg.r_size, d), cfg.seed);

    const GramMatrix g = build_gram(hs, spec);
    GramArtifacts out;
    out.certificate = certify_psd(g, cfg.tolerance);

    std::ostringstream csv;
    io::write_matrix_csv(csv, g.values());
    out.gram_csv = csv.str();

    nlohmann::ordered_json params;
    params["d"] = d;
    params["N"] = hs[0].mass();
    params["m"] = hs.size();
    params["weights_mode"] = io::weight_mode_name(spec.weights.origin());
    if (spec.kind == KernelKind::nw) {
        params["r_size"] = spec.perms->size();
        params["normalize"] = cfg.normalize;
    } else {
        params["budget"] = cfg.budget;
    }
    nlohmann::ordered_json manifest;
    manifest["kernel_id"] = g.kernel_id();
    manifest["parameters"] = params;
    manifest["seed"] = cfg.seed;
    manifest["dataset_hash"] = g.dataset_hash();
    manifest["certificate"] = to_json(out.certificate);
    manifest["config"] = to_json(cfg);
    out.manifest_json = manifest.dump(2) + "\n";
    out.certificate_json = to_json(out.certificate).dump(2) + "\n";
    return out;
}

inline int cmd_gram(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const GramArtifacts a = run_gram(cfg);
        if (cfg.out.empty()) {
            out << a.gram_csv;
        } else {
            const std::filesystem::path dir(cfg.out);
            std::filesystem::create_directories(dir);
            detail::write_file(dir / "gram.csv", a.gram_csv);
            detail::write_file(dir / "manifest.json", a.manifest_json);
            detail::write_file(dir / "certificate.json", a.certificate_json);
        }
        err << "psd certificate: " << (a.certificate.pass ? "pass" : "fail")
            << " (min eigenvalue " << io::format_real(a.certificate.min_eigenvalue) << ", max "
            << io::format_real(a.certificate.max_eigenvalue) << ")\n";
        return a.certificate.pass ? exit_ok : exit_psd_fail;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return detail::exit_for(e);
    }
}

// First line: |U(r,c)|; then one row-major flattened table per line.
inline int cmd_enumerate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::uint64_t written = 0;
    try {
        const auto [r, c] = detail::load_pair(cfg);
        const BigCount total = count_tables(r, c);
        std::ofstream file;
        std::ostream* sink = &out;
        if (!cfg.out.empty()) {
            std::filesystem::create_directories(cfg.out);
            file.open(std::filesystem::path(cfg.out) / "tables.csv", std::ios::binary);
            if (!file) throw Error(Errc::invalid_argument, "cannot write into '" + cfg.out + "'");
            sink = &file;
        }
        *sink << total << '\n';
        for_each_table(r, c, EnumerationBudget{cfg.budget}, [&](const ContingencyTable& x) {
            *sink << x.to_csv_row() << '\n';
            ++written;
        });
        return exit_ok;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.code() == Errc::budget_exceeded) err << "tables written before stopping: " << written << '\n';
        return detail::exit_for(e);
    }
}

// Prints NW(r,c), or the permuted table when --sigma/--sigma-p are given.
inline int cmd_nw(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const auto [r, c] = detail::load_pair(cfg);
        require_same_mass(r, c);
        if (cfg.sigma.empty() && cfg.sigma_p.empty()) {
            io::write_table(out, nw_table(r, c));
        } else {
            const auto s = detail::parse_permutation(cfg.sigma, r.dim());
            const auto sp = detail::parse_permutation(cfg.sigma_p, r.dim());
            io::write_table(out, nw_permuted(r, c, s, sp));
        }
        return exit_ok;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return detail::exit_for(e);
    }
}

// Optimal cost on the first line, then the plan.
inline int cmd_ot(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const auto [r, c] = detail::load_pair(cfg);
        const WeightSpec w = detail::load_weights(cfg);
        const TransportSolution sol = ot_cost(r, c, w, EnumerationBudget{cfg.budget});
        out << io::format_real(sol.cost) << '\n';
        io::write_table(out, sol.plan);
        return exit_ok;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return detail::exit_for(e);
    }
}

// Certifies --weights (the matrix K) or a Gram CSV given as --input.
inline int cmd_psd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        PsdCertificate cert;
        if (!cfg.weights.empty()) {
            cert = psd_weight_check(detail::load_weights(cfg), cfg.tolerance);
        } else if (!cfg.input.empty()) {
            auto f = io::open_input(cfg.input);
            cert = certify_psd(GramMatrix(io::read_matrix_csv(f, cfg.input), "external", ""), cfg.tolerance);
        } else {
            throw Error(Errc::invalid_argument, "give --weights or --input");
        }
        const std::string text = to_json(cert).dump(2) + "\n";
        out << text;
        if (!cfg.out.empty()) {
            std::filesystem::create_directories(cfg.out);
            detail::write_file(std::filesystem::path(cfg.out) / "certificate.json", text);
        }
        return cert.pass ? exit_ok : exit_psd_fail;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return detail::exit_for(e);
    }
}

inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.subcommand == "gram") return cmd_gram(cfg, out, err);
    if (cfg.subcommand == "enumerate") return cmd_enumerate(cfg, out, err);
    if (cfg.subcommand == "nw") return cmd_nw(cfg, out, err);
    if (cfg.subcommand == "ot") return cmd_ot(cfg, out, err);
    if (cfg.subcommand == "psd-check") return cmd_psd_check(cfg, out, err);
    err << "error: unknown subcommand '" << cfg.subcommand << "'\n";
    return exit_input_error;
}

}  // namespace tpk::cli
