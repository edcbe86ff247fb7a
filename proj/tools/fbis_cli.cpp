#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fbis/io.hpp"
#include "fbis/parallel.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct CommonOpts {
    std::string kernel = "gaussian";
    std::size_t threads = 0;
    bool verbose = false;
    std::string output;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--kernel", o.kernel, "Kernel family: gaussian|epanechnikov")
        ->check(CLI::IsMember({"gaussian", "epanechnikov"}));
    cmd->add_option("--threads", o.threads, "Worker thread cap (0 = all cores)");
    cmd->add_flag("--verbose", o.verbose, "Write a sibling .log next to the output");
    cmd->add_option("-o,--output", o.output, "Output path")->required();
}

std::optional<double> parse_quantile(const std::string& q) {
    if (q == "max") return std::nullopt;
    try {
        return std::stod(q);
    } catch (...) {
        throw fbis::Error(fbis::ErrorCode::InvalidArgument, "--q expects a number or 'max'");
    }
}

std::vector<double> parse_xi_grid(const std::string& s) {
    // lo:hi:count, log-spaced like the default grid
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw fbis::Error(fbis::ErrorCode::InvalidArgument, "--xi-grid expects lo:hi:count");
    const double lo = std::stod(s.substr(0, c1));
    const double hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    const std::size_t count = std::stoul(s.substr(c2 + 1));
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw fbis::Error(fbis::ErrorCode::InvalidArgument, "--xi-grid needs 0 < lo < hi, count >= 2");
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) *
                                              static_cast<double>(i) /
                                              static_cast<double>(count - 1));
    return grid;
}

std::vector<fbis::SimSpec> parse_grid(const std::string& s, std::size_t n, std::size_t p) {
    std::vector<fbis::SimSpec> grid;
    if (s.empty()) {
        for (int ex : {1, 2, 3})
            for (double rho : {0.0, 0.5})
                for (double sig2 : {1.0, 2.0})
                    grid.push_back({ex, n, p, rho, sig2, 0});
        return grid;
    }
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto c1 = cell.find(':');
        const auto c2 = cell.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw fbis::Error(fbis::ErrorCode::InvalidArgument,
                              "--grid cells look like example:rho:sigma2");
        fbis::SimSpec spec;
        spec.example = std::stoi(cell.substr(0, c1));
        spec.rho = std::stod(cell.substr(c1 + 1, c2 - c1 - 1));
        spec.sigma2 = std::stod(cell.substr(c2 + 1));
        spec.n = n;
        spec.p = p;
        grid.push_back(spec);
    }
    return grid;
}

void write_output(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw fbis::Error(fbis::ErrorCode::MissingFile, "cannot write '" + path + "'");
    out << body;
}

void maybe_log(const CommonOpts& o, const json& config, double seconds) {
    if (!o.verbose) return;
    std::ofstream log(o.output + ".log");
    log << "config: " << config.dump() << "\n";
    log << "seconds: " << fbis::format_double(seconds) << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"Favored-bandwidth independence screening for nonparametric regression"};
    app.require_subcommand(1);

    // --- screen ---
    auto* screen = app.add_subcommand("screen", "Marginal screening report");
    std::string screen_data, screen_response, screen_q = "max", screen_rate = "p";
    CommonOpts screen_common;
    std::size_t screen_perms = 1, screen_topk = 0;
    std::uint64_t screen_seed = 0;
    double screen_tau = 1.0;
    bool screen_hard = false, screen_rawscale = false;
    screen->add_option("data", screen_data, "Input CSV")->required();
    screen->add_option("--response", screen_response, "Response column (name or 0-based index)")
        ->required();
    screen->add_option("--q", screen_q, "Permutation threshold quantile in [0,1) or 'max'");
    screen->add_option("--permutations", screen_perms, "Number of permutation replicates");
    screen->add_option("--seed", screen_seed, "RNG seed");
    screen->add_option("--top-k", screen_topk, "Also report the top-k ranked variables");
    screen->add_option("--tau", screen_tau, "IC penalty factor for the hard rule");
    screen->add_flag("--hard", screen_hard, "Also report the hard-threshold set");
    screen->add_option("--rate", screen_rate, "Penalty rate dimension: p|logn")
        ->check(CLI::IsMember({"p", "logn"}));
    screen->add_flag("--raw-scale", screen_rawscale, "Skip min-max predictor rescaling");
    add_common(screen, screen_common);

    // --- ifbis ---
    auto* ifb = app.add_subcommand("ifbis", "Iterative screening and selection");
    std::string ifb_data, ifb_response, ifb_q = "max", ifb_rate = "p", ifb_xigrid;
    CommonOpts ifb_common;
    std::size_t ifb_s0 = 0, ifb_kmax = 10, ifb_perms = 1;
    std::uint64_t ifb_seed = 0;
    bool ifb_rawscale = false;
    ifb->add_option("data", ifb_data, "Input CSV")->required();
    ifb->add_option("--response", ifb_response, "Response column (name or 0-based index)")
        ->required();
    ifb->add_option("--s0", ifb_s0, "Max model size (0 = floor(n/log n))");
    ifb->add_option("--k-max", ifb_kmax, "Max additions per iteration");
    ifb->add_option("--xi-grid", ifb_xigrid, "Budget grid lo:hi:count (log-spaced)");
    ifb->add_option("--seed", ifb_seed, "RNG seed");
    ifb->add_option("--q", ifb_q, "Permutation threshold quantile or 'max'");
    ifb->add_option("--permutations", ifb_perms, "Permutation replicates");
    ifb->add_option("--rate", ifb_rate, "Penalty rate dimension: p|logn")
        ->check(CLI::IsMember({"p", "logn"}));
    ifb->add_flag("--raw-scale", ifb_rawscale, "Skip min-max predictor rescaling");
    add_common(ifb, ifb_common);

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "Generate a simulation dataset CSV");
    CommonOpts sim_common;
    fbis::SimSpec sim_spec;
    sim->add_option("--example", sim_spec.example, "Design: 1|2|3")->required();
    sim->add_option("--n", sim_spec.n, "Sample size")->required();
    sim->add_option("--p", sim_spec.p, "Predictor count")->required();
    sim->add_option("--rho", sim_spec.rho, "Latent AR correlation in [0,1)");
    sim->add_option("--sigma2", sim_spec.sigma2, "Noise variance");
    sim->add_option("--seed", sim_spec.seed, "RNG seed");
    add_common(sim, sim_common);

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "Selection/prediction benchmark tables");
    CommonOpts bench_common;
    std::string bench_mode, bench_grid;
    std::size_t bench_reps = 20, bench_topk = 20, bench_testn = 10000, bench_n = 400,
                bench_p = 1000;
    std::uint64_t bench_seed = 0;
    bench->add_option("mode", bench_mode, "table1|table2")
        ->required()
        ->check(CLI::IsMember({"table1", "table2"}));
    bench->add_option("--reps", bench_reps, "Replicates per cell");
    bench->add_option("--seed", bench_seed, "Base seed (replicate r uses seed+r)");
    bench->add_option("--grid", bench_grid,
                      "Cells 'example:rho:sigma2[,...]' (default: full 12-cell grid)");
    bench->add_option("--top-k", bench_topk, "Top-k cut for table1");
    bench->add_option("--test-n", bench_testn, "Test sample size for table2");
    bench->add_option("--n", bench_n, "Training sample size");
    bench->add_option("--p", bench_p, "Predictor count");
    add_common(bench, bench_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto t0 = Clock::now();
    const auto seconds = [&t0] {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    };

    if (screen->parsed()) {
        if (screen_common.threads) fbis::set_max_threads(screen_common.threads);
        fbis::ScreeningConfig cfg;
        cfg.tau = screen_tau;
        cfg.q = parse_quantile(screen_q);
        cfg.n_permutations = screen_perms;
        cfg.seed = screen_seed;
        cfg.rate = screen_rate == "p" ? fbis::RateDimension::UseP : fbis::RateDimension::UseLogN;
        cfg.kernel.family = fbis::kernel_family_from_string(screen_common.kernel);
        cfg.rescale = !screen_rawscale;

        const fbis::Dataset data = fbis::read_dataset(screen_data, screen_response);
        const fbis::ScreeningReport report = fbis::fbis_screen(data, cfg);
        json result = report;
        if (screen_topk > 0) {
            json topk = json::array();
            for (std::size_t j : report.top_k(screen_topk)) topk.push_back(j + 1);
            result["top_k"] = std::move(topk);
        }
        if (screen_hard) {
            json hard = json::array();
            for (std::size_t j : fbis::fbis_hard_select(data, cfg)) hard.push_back(j + 1);
            result["hard_selected"] = std::move(hard);
        }
        const json cfg_json = cfg;
        write_output(screen_common.output,
                     fbis::report_envelope(cfg_json, std::move(result), seconds()).dump(2) + "\n");
        maybe_log(screen_common, cfg_json, seconds());
        return 0;
    }

    if (ifb->parsed()) {
        if (ifb_common.threads) fbis::set_max_threads(ifb_common.threads);
        fbis::IfbisConfig cfg;
        cfg.screening.q = parse_quantile(ifb_q);
        cfg.screening.n_permutations = ifb_perms;
        cfg.screening.seed = ifb_seed;
        cfg.screening.rate =
            ifb_rate == "p" ? fbis::RateDimension::UseP : fbis::RateDimension::UseLogN;
        cfg.screening.kernel.family = fbis::kernel_family_from_string(ifb_common.kernel);
        cfg.screening.rescale = !ifb_rawscale;
        if (!ifb_xigrid.empty()) cfg.mekro.xi_grid = parse_xi_grid(ifb_xigrid);
        cfg.s0 = ifb_s0;
        cfg.k_max = ifb_kmax;

        const fbis::Dataset data = fbis::read_dataset(ifb_data, ifb_response);
        const fbis::IfbisTrace trace = fbis::ifbis_run(data, cfg);
        const json cfg_json = cfg;
        write_output(ifb_common.output,
                     fbis::report_envelope(cfg_json, json(trace), seconds()).dump(2) + "\n");
        maybe_log(ifb_common, cfg_json, seconds());
        return 0;
    }

    if (sim->parsed()) {
        if (sim_common.threads) fbis::set_max_threads(sim_common.threads);
        const fbis::Dataset data = fbis::gen_example(sim_spec);
        fbis::write_dataset_csv(sim_common.output, data);
        maybe_log(sim_common, json(sim_spec), seconds());
        return 0;
    }

    if (bench->parsed()) {
        if (bench_common.threads) fbis::set_max_threads(bench_common.threads);
        auto grid = parse_grid(bench_grid, bench_n, bench_p);
        fbis::BenchResult result;
        json cfg_json;
        if (bench_mode == "table1") {
            fbis::ScreeningConfig scfg;
            scfg.kernel.family = fbis::kernel_family_from_string(bench_common.kernel);
            result = fbis::run_table1({fbis::BenchMethod::FBIS, fbis::BenchMethod::SIS}, grid,
                                      bench_reps, bench_topk, bench_seed, scfg);
            cfg_json = json{{"mode", "table1"},   {"grid", grid},
                            {"reps", bench_reps}, {"top_k", bench_topk},
                            {"seed", bench_seed}, {"screening", scfg}};
        } else {
            fbis::IfbisConfig icfg;
            icfg.screening.kernel.family = fbis::kernel_family_from_string(bench_common.kernel);
            result = fbis::run_table2(grid, bench_reps, bench_testn, bench_seed, icfg);
            cfg_json = json{{"mode", "table2"},     {"grid", grid},
                            {"reps", bench_reps},   {"test_n", bench_testn},
                            {"seed", bench_seed},   {"ifbis", icfg}};
        }
        if (bench_common.output.size() >= 5 &&
            bench_common.output.substr(bench_common.output.size() - 5) == ".json") {
            write_output(bench_common.output,
                         fbis::report_envelope(cfg_json, json(result), seconds()).dump(2) + "\n");
        } else {
            fbis::write_bench_csv(bench_common.output, result);
        }
        maybe_log(bench_common, cfg_json, seconds());
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fbis::Error& e) {
        std::cerr << "error:" << fbis::error_code_name(e.code()) << ": " << e.what() << "\n";
        return fbis::is_data_error(e.code()) ? 3 : 4;
    } catch (const std::exception& e) {
        std::cerr << "error:Internal: " << e.what() << "\n";
        return 4;
    }
}
