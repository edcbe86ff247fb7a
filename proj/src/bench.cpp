#include "fbis/bench.hpp"

#include <algorithm>
#include <cmath>

#include "fbis/rng.hpp"

namespace fbis {

namespace {

std::pair<double, double> mean_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, sd / std::sqrt(n)};
}

void push_cell(BenchResult& out, const SimSpec& spec, const std::string& method,
               const std::string& metric, std::vector<double> values) {
    BenchCell cell;
    cell.example = spec.example;
    cell.rho = spec.rho;
    cell.sigma2 = spec.sigma2;
    cell.method = method;
    cell.metric = metric;
    auto [m, se] = mean_se(values);
    cell.mean = m;
    cell.se = se;
    cell.se_degenerate = values.size() == 1;
    cell.values = std::move(values);
    out.cells.push_back(std::move(cell));
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string grid_signature(const std::vector<SimSpec>& grid) {
    std::string s;
    for (const auto& g : grid) {
        s += std::to_string(g.example) + ":" + std::to_string(g.n) + ":" + std::to_string(g.p) +
             ":" + std::to_string(g.rho) + ":" + std::to_string(g.sigma2) + ";";
    }
    return s;
}

} // namespace

std::string to_string(BenchMethod method) { return method == BenchMethod::FBIS ? "FBIS" : "SIS"; }

SelectionCounts evaluate_selection(const std::vector<std::size_t>& selected,
                                   const std::vector<std::size_t>& truth, std::size_t p) {
    for (std::size_t j : selected)
        if (j >= p) throw Error(ErrorCode::IndexOutOfRange, "selected index out of 1..p");
    for (std::size_t j : truth)
        if (j >= p) throw Error(ErrorCode::IndexOutOfRange, "truth index out of 1..p");

    std::vector<std::size_t> sel(selected), tru(truth);
    std::sort(sel.begin(), sel.end());
    std::sort(tru.begin(), tru.end());

    SelectionCounts out;
    for (std::size_t j : sel)
        if (std::binary_search(tru.begin(), tru.end(), j)) ++out.captured;
    out.fp = sel.size() - out.captured;
    out.fn = tru.size() - out.captured;
    return out;
}

double mspe(const std::function<std::vector<double>(const Matrix&)>& predict,
            const Dataset& test) {
    if (test.n() == 0) throw Error(ErrorCode::EmptyData, "empty test set");
    const auto pred = predict(test.X);
    if (pred.size() != test.n())
        throw Error(ErrorCode::InvalidDimension, "prediction length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < test.n(); ++i) {
        const double r = test.y[i] - pred[i];
        s += r * r;
    }
    return s / static_cast<double>(test.n());
}

BenchResult run_table1(const std::set<BenchMethod>& methods, const std::vector<SimSpec>& grid,
                       std::size_t reps, std::size_t top_k, std::uint64_t seed_base,
                       const ScreeningConfig& screening) {
    BenchResult out;
    out.replicates = reps;
    out.fingerprint = hex64(fnv1a("table1|" + grid_signature(grid) + "|reps=" +
                                  std::to_string(reps) + "|topk=" + std::to_string(top_k) +
                                  "|seed=" + std::to_string(seed_base)));
    if (grid.empty() || reps == 0) return out;

    for (const auto& spec : grid) {
        std::vector<double> fbis_caps, sis_caps;
        for (std::size_t r = 0; r < reps; ++r) {
            SimSpec cell = spec;
            cell.seed = seed_base + r;
            const Dataset data = gen_example(cell);
            if (methods.count(BenchMethod::FBIS)) {
                const auto ranked = fbis_rank(data, screening);
                std::vector<std::size_t> top(ranked.begin(),
                                              ranked.begin() + std::min(top_k, ranked.size()));
                fbis_caps.push_back(static_cast<double>(
                    evaluate_selection(top, data.truth, data.p()).captured));
            }
            if (methods.count(BenchMethod::SIS)) {
                const auto ranked = sis_rank(data);
                std::vector<std::size_t> top(ranked.begin(),
                                              ranked.begin() + std::min(top_k, ranked.size()));
                sis_caps.push_back(static_cast<double>(
                    evaluate_selection(top, data.truth, data.p()).captured));
            }
        }
        if (!fbis_caps.empty()) push_cell(out, spec, "FBIS", "captured", std::move(fbis_caps));
        if (!sis_caps.empty()) push_cell(out, spec, "SIS", "captured", std::move(sis_caps));
    }
    return out;
}

BenchResult run_table2(const std::vector<SimSpec>& grid, std::size_t reps, std::size_t test_n,
                       std::uint64_t seed_base, const IfbisConfig& cfg) {
    BenchResult out;
    out.replicates = reps;
    out.fingerprint = hex64(fnv1a("table2|" + grid_signature(grid) + "|reps=" +
                                  std::to_string(reps) + "|testn=" + std::to_string(test_n) +
                                  "|seed=" + std::to_string(seed_base)));
    if (grid.empty() || reps == 0) return out;

    for (const auto& spec : grid) {
        std::vector<double> fps, fns, mspes;
        for (std::size_t r = 0; r < reps; ++r) {
            SimSpec train_spec = spec;
            train_spec.seed = seed_base + r;
            const Dataset train = gen_example(train_spec);

            IfbisConfig run_cfg = cfg;
            run_cfg.screening.seed = train_spec.seed;
            const IfbisTrace trace = ifbis_run(train, run_cfg);

            const auto counts = evaluate_selection(trace.final_set, train.truth, train.p());
            fps.push_back(static_cast<double>(counts.fp));
            fns.push_back(static_cast<double>(counts.fn));

            SimSpec test_spec = spec;
            test_spec.n = test_n;
            test_spec.seed = sub_seed(train_spec.seed, seed_tag::test_draw, 0);
            const Dataset test = gen_example(test_spec);
            const KernelSpec kernel = run_cfg.screening.kernel;
            mspes.push_back(mspe(
                [&](const Matrix& Xnew) { return ifbis_predict(trace, train, Xnew, kernel); },
                test));
        }
        push_cell(out, spec, "IFBIS", "FP", std::move(fps));
        push_cell(out, spec, "IFBIS", "FN", std::move(fns));
        push_cell(out, spec, "IFBIS", "MSPE", std::move(mspes));
    }
    return out;
}

} // namespace fbis
