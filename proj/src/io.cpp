#include "fbis/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fbis {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::size_t> to_one_based(const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out(v);
    for (auto& x : out) ++x;
    return out;
}

std::vector<std::size_t> from_one_based(const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out(v);
    for (auto& x : out) {
        if (x == 0) throw Error(ErrorCode::ParseError, "serialized index must be >= 1");
        --x;
    }
    return out;
}

std::string rate_name(RateDimension r) { return r == RateDimension::UseP ? "p" : "logn"; }
RateDimension rate_from(const std::string& s) {
    if (s == "p") return RateDimension::UseP;
    if (s == "logn") return RateDimension::UseLogN;
    throw Error(ErrorCode::ParseError, "unknown rate '" + s + "'");
}

std::string stop_name(StopReason r) { return to_string(r); }
StopReason stop_from(const std::string& s) {
    if (s == "converged") return StopReason::Converged;
    if (s == "size_cap") return StopReason::SizeCap;
    if (s == "iteration_cap") return StopReason::IterationCap;
    if (s == "empty_addition") return StopReason::EmptyAddition;
    throw Error(ErrorCode::ParseError, "unknown stop reason '" + s + "'");
}

} // namespace

std::string format_double(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

Dataset read_dataset(const std::string& path, const std::string& response_selector) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::TooFewRows, "'" + path + "' is empty");
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);
    const std::size_t ncols = header.size();
    if (ncols < 2)
        throw Error(ErrorCode::ParseError, "need at least a response and one predictor column");

    // response: try column name, then 0-based index
    std::size_t response_col = ncols;
    for (std::size_t c = 0; c < ncols; ++c)
        if (header[c] == response_selector) {
            response_col = c;
            break;
        }
    if (response_col == ncols) {
        std::size_t idx = 0;
        const std::string sel = trim(response_selector);
        auto res = std::from_chars(sel.data(), sel.data() + sel.size(), idx);
        if (res.ec == std::errc{} && res.ptr == sel.data() + sel.size() && idx < ncols)
            response_col = idx;
    }
    if (response_col == ncols)
        throw Error(ErrorCode::MissingColumn,
                    "response column '" + response_selector + "' not found");

    std::vector<std::vector<double>> columns(ncols);
    std::size_t row = 1; // header is row 1
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() && in.eof()) break;
        const auto cells = split_csv_line(line);
        if (cells.size() != ncols)
            throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + " has " +
                                                   std::to_string(cells.size()) +
                                                   " cells, expected " + std::to_string(ncols));
        for (std::size_t c = 0; c < ncols; ++c) {
            const std::string cell = trim(cells[c]);
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
                throw Error(ErrorCode::ParseError, "cannot parse cell (" + std::to_string(row) +
                                                       "," + std::to_string(c + 1) + "): '" +
                                                       cell + "'");
            if (!std::isfinite(v))
                throw Error(ErrorCode::NonNumericCell, "non-finite value at (" +
                                                           std::to_string(row) + "," +
                                                           std::to_string(c + 1) + ")");
            columns[c].push_back(v);
        }
    }
    const std::size_t n = columns[0].size();
    if (n < 2) throw Error(ErrorCode::TooFewRows, "need at least 2 data rows");

    std::vector<double> y = std::move(columns[response_col]);
    std::vector<std::string> names;
    std::vector<std::vector<double>> xcols;
    for (std::size_t c = 0; c < ncols; ++c) {
        if (c == response_col) continue;
        names.push_back(header[c]);
        xcols.push_back(std::move(columns[c]));
    }
    return Dataset(std::move(y), Matrix::from_columns(n, xcols), std::move(names));
}

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& response_name) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::MissingFile, "cannot write '" + path + "'");
    out << response_name;
    for (std::size_t j = 0; j < data.p(); ++j) {
        out << ',';
        if (!data.names.empty())
            out << data.names[j];
        else
            out << 'x' << (j + 1);
    }
    out << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        out << format_double(data.y[i]);
        for (std::size_t j = 0; j < data.p(); ++j) out << ',' << format_double(data.X(i, j));
        out << '\n';
    }
}

void write_bench_csv(const std::string& path, const BenchResult& result) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::MissingFile, "cannot write '" + path + "'");
    out << "example,rho,sigma2,method,metric,mean,se,reps\n";
    for (const auto& c : result.cells) {
        out << c.example << ',' << format_double(c.rho) << ',' << format_double(c.sigma2) << ','
            << c.method << ',' << c.metric << ',' << format_double(c.mean) << ','
            << format_double(c.se) << ',' << c.values.size() << '\n';
    }
}

void to_json(json& j, const KernelSpec& v) { j = json{{"family", to_string(v.family)}}; }
void from_json(const json& j, KernelSpec& v) {
    v.family = kernel_family_from_string(j.at("family").get<std::string>());
}

void to_json(json& j, const ScreeningConfig& v) {
    j = json{{"tau", v.tau},
             {"q", v.q ? json(*v.q) : json()},
             {"n_permutations", v.n_permutations},
             {"seed", v.seed},
             {"rate", rate_name(v.rate)},
             {"kernel", v.kernel},
             {"rescale", v.rescale}};
}
void from_json(const json& j, ScreeningConfig& v) {
    v.tau = j.at("tau").get<double>();
    v.q = j.at("q").is_null() ? std::optional<double>{} : std::optional<double>{j.at("q").get<double>()};
    v.n_permutations = j.at("n_permutations").get<std::size_t>();
    v.seed = j.at("seed").get<std::uint64_t>();
    v.rate = rate_from(j.at("rate").get<std::string>());
    v.kernel = j.at("kernel").get<KernelSpec>();
    v.rescale = j.at("rescale").get<bool>();
}

void to_json(json& j, const MekroConfig& v) {
    j = json{{"xi_grid", v.xi_grid},
             {"max_iterations", v.max_iterations},
             {"rel_tolerance", v.rel_tolerance},
             {"ls_initial_step", v.ls_initial_step},
             {"ls_shrink", v.ls_shrink},
             {"ls_sufficient_decrease", v.ls_sufficient_decrease},
             {"restarts", v.restarts},
             {"lambda_min", v.lambda_min},
             {"seed", v.seed}};
}
void from_json(const json& j, MekroConfig& v) {
    v.xi_grid = j.at("xi_grid").get<std::vector<double>>();
    v.max_iterations = j.at("max_iterations").get<std::size_t>();
    v.rel_tolerance = j.at("rel_tolerance").get<double>();
    v.ls_initial_step = j.at("ls_initial_step").get<double>();
    v.ls_shrink = j.at("ls_shrink").get<double>();
    v.ls_sufficient_decrease = j.at("ls_sufficient_decrease").get<double>();
    v.restarts = j.at("restarts").get<std::size_t>();
    v.lambda_min = j.at("lambda_min").get<double>();
    v.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const IfbisConfig& v) {
    j = json{{"screening", v.screening},
             {"mekro", v.mekro},
             {"s0", v.s0},
             {"k_max", v.k_max},
             {"max_iterations", v.max_iterations},
             {"rule", v.rule == ConditionalRule::PermutationMax ? "permutation_max" : "top_k"},
             {"top_k", v.top_k},
             {"surrogate_scale", v.surrogate_scale == SurrogateScale::Raw ? "raw" : "minmax"}};
}
void from_json(const json& j, IfbisConfig& v) {
    v.screening = j.at("screening").get<ScreeningConfig>();
    v.mekro = j.at("mekro").get<MekroConfig>();
    v.s0 = j.at("s0").get<std::size_t>();
    v.k_max = j.at("k_max").get<std::size_t>();
    v.max_iterations = j.at("max_iterations").get<std::size_t>();
    const std::string rule = j.at("rule").get<std::string>();
    v.rule = rule == "permutation_max" ? ConditionalRule::PermutationMax : ConditionalRule::TopK;
    v.top_k = j.at("top_k").get<std::size_t>();
    v.surrogate_scale = j.at("surrogate_scale").get<std::string>() == "raw"
                            ? SurrogateScale::Raw
                            : SurrogateScale::MinMax;
}

void to_json(json& j, const SimSpec& v) {
    j = json{{"example", v.example}, {"n", v.n},         {"p", v.p},
             {"rho", v.rho},         {"sigma2", v.sigma2}, {"seed", v.seed}};
}
void from_json(const json& j, SimSpec& v) {
    v.example = j.at("example").get<int>();
    v.n = j.at("n").get<std::size_t>();
    v.p = j.at("p").get<std::size_t>();
    v.rho = j.at("rho").get<double>();
    v.sigma2 = j.at("sigma2").get<double>();
    v.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const VariableScore& v) {
    j = json{{"ic_hstar", v.ic_hstar},
             {"im", v.im},
             {"favored", v.favored_hstar ? "hstar" : "infinite"},
             {"constant", v.constant}};
}
void from_json(const json& j, VariableScore& v) {
    v.ic_hstar = j.at("ic_hstar").get<double>();
    v.im = j.at("im").get<double>();
    v.favored_hstar = j.at("favored").get<std::string>() == "hstar";
    v.constant = j.at("constant").get<bool>();
}

void to_json(json& j, const ScreeningReport& v) {
    j = json{{"h_star", v.h_star},
             {"ic_inf", v.ic_inf},
             {"variables", v.variables},
             {"omega_q", v.omega_q},
             {"selected", to_one_based(v.selected)},
             {"permutation_ims", v.permutation_ims},
             {"ranking", to_one_based(v.ranking)}};
}
void from_json(const json& j, ScreeningReport& v) {
    v.h_star = j.at("h_star").get<double>();
    v.ic_inf = j.at("ic_inf").get<double>();
    v.variables = j.at("variables").get<std::vector<VariableScore>>();
    v.omega_q = j.at("omega_q").get<double>();
    v.selected = from_one_based(j.at("selected").get<std::vector<std::size_t>>());
    v.permutation_ims = j.at("permutation_ims").get<std::vector<double>>();
    v.ranking = from_one_based(j.at("ranking").get<std::vector<std::size_t>>());
}

void to_json(json& j, const MekroModel& v) {
    j = json{{"lambda", v.lambda},     {"xi", v.xi},
             {"objective", v.objective}, {"fitted", v.fitted},
             {"trace", v.trace},       {"bic", v.bic},
             {"selected", to_one_based(v.selected)}, {"converged", v.converged}};
}
void from_json(const json& j, MekroModel& v) {
    v.lambda = j.at("lambda").get<std::vector<double>>();
    v.xi = j.at("xi").get<double>();
    v.objective = j.at("objective").get<double>();
    v.fitted = j.at("fitted").get<std::vector<double>>();
    v.trace = j.at("trace").get<double>();
    v.bic = j.at("bic").get<double>();
    v.selected = from_one_based(j.at("selected").get<std::vector<std::size_t>>());
    v.converged = j.at("converged").get<bool>();
}

void to_json(json& j, const RescaleInfo& v) {
    j = json{{"mins", v.mins}, {"ranges", v.ranges}};
}
void from_json(const json& j, RescaleInfo& v) {
    v.mins = j.at("mins").get<std::vector<double>>();
    v.ranges = j.at("ranges").get<std::vector<double>>();
}

void to_json(json& j, const IfbisIteration& v) {
    json cims = json::array();
    for (const auto& [var, score] : v.conditional_ims)
        cims.push_back(json{{"variable", var + 1}, {"im", score}});
    j = json{{"candidate_set", to_one_based(v.candidate_set)},
             {"mekro_candidates", to_one_based(v.mekro_candidates)},
             {"model", v.model},
             {"selected_set", to_one_based(v.selected_set)},
             {"conditional_ims", std::move(cims)},
             {"surrogate_fallback", v.surrogate_fallback}};
}
void from_json(const json& j, IfbisIteration& v) {
    v.candidate_set = from_one_based(j.at("candidate_set").get<std::vector<std::size_t>>());
    v.mekro_candidates = from_one_based(j.at("mekro_candidates").get<std::vector<std::size_t>>());
    v.model = j.at("model").get<MekroModel>();
    v.selected_set = from_one_based(j.at("selected_set").get<std::vector<std::size_t>>());
    v.conditional_ims.clear();
    for (const auto& e : j.at("conditional_ims")) {
        const std::size_t var = e.at("variable").get<std::size_t>();
        if (var == 0) throw Error(ErrorCode::ParseError, "variable index must be >= 1");
        v.conditional_ims.emplace_back(var - 1, e.at("im").get<double>());
    }
    v.surrogate_fallback = j.at("surrogate_fallback").get<bool>();
}

void to_json(json& j, const IfbisTrace& v) {
    j = json{{"iterations", v.iterations},
             {"final_set", to_one_based(v.final_set)},
             {"stop_reason", stop_name(v.stop_reason)},
             {"h_star", v.h_star},
             {"rescale", v.rescale},
             {"screening", v.screening}};
}
void from_json(const json& j, IfbisTrace& v) {
    v.iterations = j.at("iterations").get<std::vector<IfbisIteration>>();
    v.final_set = from_one_based(j.at("final_set").get<std::vector<std::size_t>>());
    v.stop_reason = stop_from(j.at("stop_reason").get<std::string>());
    v.h_star = j.at("h_star").get<double>();
    v.rescale = j.at("rescale").get<RescaleInfo>();
    v.screening = j.at("screening").get<ScreeningReport>();
}

void to_json(json& j, const BenchCell& v) {
    j = json{{"example", v.example}, {"rho", v.rho},       {"sigma2", v.sigma2},
             {"method", v.method},   {"metric", v.metric}, {"mean", v.mean},
             {"se", v.se},           {"se_degenerate", v.se_degenerate},
             {"values", v.values}};
}
void from_json(const json& j, BenchCell& v) {
    v.example = j.at("example").get<int>();
    v.rho = j.at("rho").get<double>();
    v.sigma2 = j.at("sigma2").get<double>();
    v.method = j.at("method").get<std::string>();
    v.metric = j.at("metric").get<std::string>();
    v.mean = j.at("mean").get<double>();
    v.se = j.at("se").get<double>();
    v.se_degenerate = j.at("se_degenerate").get<bool>();
    v.values = j.at("values").get<std::vector<double>>();
}

void to_json(json& j, const BenchResult& v) {
    j = json{{"cells", v.cells},
             {"replicates", v.replicates},
             {"fingerprint", v.fingerprint}};
}
void from_json(const json& j, BenchResult& v) {
    v.cells = j.at("cells").get<std::vector<BenchCell>>();
    v.replicates = j.at("replicates").get<std::size_t>();
    v.fingerprint = j.at("fingerprint").get<std::string>();
}

nlohmann::json report_envelope(nlohmann::json config, nlohmann::json result, double seconds) {
    return json{{"version", kReportVersion},
                {"config", std::move(config)},
                {"result", std::move(result)},
                {"timings", json{{"seconds", seconds}}}};
}

} // namespace fbis
