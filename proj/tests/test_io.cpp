#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "fbis/io.hpp"
#include "fbis/rng.hpp"

using namespace fbis;
using nlohmann::json;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = std::string("/tmp/fbis_test_") + std::to_string(::getpid()) + "_" + name;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FBIS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("format_double uses 17 significant digits and a dot") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5) == "-2.5");
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const double v = (rng.uniform01() - 0.5) * std::pow(10.0, double(rng.below(12)) - 6.0);
        CHECK(std::stod(format_double(v)) == v); // exact round trip
    }
}

TEST_CASE("read_dataset") {
    SUBCASE("header and selection by name") {
        TempFile f("basic.csv");
        write_text(f.path, "y,a,b\n1,2,3\n4,5,6\n7,8,9\n");
        const auto data = read_dataset(f.path, "y");
        CHECK(data.n() == 3);
        CHECK(data.p() == 2);
        CHECK(data.names == std::vector<std::string>{"a", "b"});
        CHECK(data.y == std::vector<double>{1, 4, 7});
        CHECK(data.X(1, 0) == 5);
        CHECK(data.X(2, 1) == 9);
    }

    SUBCASE("selection by 0-based index") {
        TempFile f("byindex.csv");
        write_text(f.path, "c0,c1,c2\n1,2,3\n2,4,6\n3,4,5\n");
        const auto data = read_dataset(f.path, "1");
        CHECK(data.y == std::vector<double>{2, 4, 4});
        CHECK(data.names == std::vector<std::string>{"c0", "c2"});
    }

    SUBCASE("missing response column") {
        TempFile f("missing.csv");
        write_text(f.path, "y,a\n1,2\n3,4\n");
        try {
            (void)read_dataset(f.path, "zz");
            FAIL("expected MissingColumn");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MissingColumn);
        }
    }

    SUBCASE("unparseable cell cites row and column") {
        TempFile f("bad.csv");
        write_text(f.path, "y,a,b\n1,2,abc\n4,5,6\n");
        try {
            (void)read_dataset(f.path, "y");
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(std::string(e.what()).find("(2,3)") != std::string::npos);
        }
    }

    SUBCASE("too few rows") {
        TempFile f("short.csv");
        write_text(f.path, "y,a\n1,2\n");
        try {
            (void)read_dataset(f.path, "y");
            FAIL("expected TooFewRows");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::TooFewRows);
        }
    }

    SUBCASE("non-finite cells are rejected") {
        TempFile f("naninf.csv");
        write_text(f.path, "y,a\n1,nan\n2,3\n");
        try {
            (void)read_dataset(f.path, "y");
            FAIL("expected NonNumericCell");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonNumericCell);
        }
    }

    SUBCASE("dataset CSV round trip is bit exact") {
        SimSpec spec{2, 25, 6, 0.4, 1.0, 3};
        const auto data = gen_example(spec);
        TempFile f("roundtrip.csv");
        write_dataset_csv(f.path, data);
        const auto back = read_dataset(f.path, "y");
        CHECK(back.y == data.y);
        CHECK(back.X == data.X);
    }
}

TEST_CASE("JSON round trips") {
    SUBCASE("screening report") {
        SimSpec spec{1, 60, 8, 0.0, 1.0, 5};
        const auto data = gen_example(spec);
        ScreeningConfig cfg;
        const auto report = fbis_screen(data, cfg);
        const json j = report;
        CHECK(j.at("selected").is_array());
        const auto back = j.get<ScreeningReport>();
        CHECK(back == report);

        // serialized indices are 1-based
        const json jr = j.at("ranking");
        for (const auto& v : jr) CHECK(v.get<std::size_t>() >= 1);
    }

    SUBCASE("ifbis trace") {
        SimSpec spec{1, 80, 8, 0.0, 1.0, 6};
        const auto data = gen_example(spec);
        IfbisConfig cfg;
        const auto trace = ifbis_run(data, cfg);
        const json j = trace;
        const auto back = j.get<IfbisTrace>();
        CHECK(back == trace);
    }

    SUBCASE("configs") {
        IfbisConfig cfg;
        cfg.screening.q = 0.9;
        cfg.screening.n_permutations = 2;
        cfg.mekro.xi_grid = {0.5, 1.0, 2.0};
        cfg.s0 = 7;
        const json j = cfg;
        CHECK(j.get<IfbisConfig>() == cfg);

        ScreeningConfig qmax;
        const json j2 = qmax;
        CHECK(j2.at("q").is_null());
        CHECK(j2.get<ScreeningConfig>() == qmax);
    }

    SUBCASE("bench result") {
        std::vector<SimSpec> grid{{1, 60, 8, 0.0, 1.0, 0}};
        const auto out = run_table1({BenchMethod::FBIS}, grid, 2, 3, 1);
        const json j = out;
        CHECK(j.get<BenchResult>() == out);
    }

    SUBCASE("envelope shape") {
        const json env = report_envelope(json{{"a", 1}}, json{{"b", 2}}, 0.25);
        CHECK(env.at("version") == kReportVersion);
        CHECK(env.at("config").at("a") == 1);
        CHECK(env.at("result").at("b") == 2);
        CHECK(env.at("timings").at("seconds") == 0.25);
    }
}

TEST_CASE("bench CSV format") {
    std::vector<SimSpec> grid{{1, 60, 8, 0.0, 1.0, 0}};
    const auto out = run_table1({BenchMethod::FBIS}, grid, 2, 3, 1);
    TempFile f("bench.csv");
    write_bench_csv(f.path, out);
    const auto text = read_text(f.path);
    CHECK(text.find("example,rho,sigma2,method,metric,mean,se,reps") == 0);
    CHECK(text.find("FBIS,captured,") != std::string::npos);
    CHECK(text.find(',') != std::string::npos);
    CHECK(text.find(';') == std::string::npos); // no locale surprises
}

TEST_CASE("command line interface") {
    TempFile data("cli_data.csv");
    TempFile out1("cli_out1.csv");
    TempFile out2("cli_out2.csv");
    TempFile report("cli_report.json");

    SUBCASE("simulate is byte-identical under one seed") {
        CHECK(run_cli("simulate --example 2 --n 10 --p 6 --rho 0 --sigma2 1 --seed 7 -o " +
                      out1.path) == 0);
        CHECK(run_cli("simulate --example 2 --n 10 --p 6 --rho 0 --sigma2 1 --seed 7 -o " +
                      out2.path) == 0);
        CHECK(read_text(out1.path) == read_text(out2.path));
        CHECK(read_text(out1.path).substr(0, 14) == "y,x1,x2,x3,x4,");
    }

    SUBCASE("screen produces a versioned envelope and respects --top-k") {
        CHECK(run_cli("simulate --example 1 --n 120 --p 10 --rho 0 --sigma2 1 --seed 3 -o " +
                      data.path) == 0);
        CHECK(run_cli("screen " + data.path + " --response y --seed 1 --top-k 4 --hard -o " +
                      report.path) == 0);
        const json env = json::parse(read_text(report.path));
        CHECK(env.at("version") == kReportVersion);
        CHECK(env.at("result").at("top_k").size() == 4);
        CHECK(env.at("result").contains("hard_selected"));
        CHECK(env.at("config").at("kernel").at("family") == "gaussian");
    }

    SUBCASE("ifbis end to end on a small file") {
        CHECK(run_cli("simulate --example 1 --n 100 --p 8 --rho 0 --sigma2 1 --seed 5 -o " +
                      data.path) == 0);
        CHECK(run_cli("ifbis " + data.path + " --response y --seed 2 -o " + report.path) == 0);
        const json env = json::parse(read_text(report.path));
        CHECK(env.at("result").contains("final_set"));
        CHECK(env.at("result").contains("stop_reason"));
    }

    SUBCASE("exit codes: usage 2, data 3") {
        CHECK(run_cli("screen --nonsense") == 2);
        CHECK(run_cli("screen /nonexistent.csv --response y -o " + report.path) == 3);

        write_text(data.path, "y,a,b\n1,2,3\n1,4,5\n1,6,7\n");
        CHECK(run_cli("screen " + data.path + " --response y -o " + report.path) == 3);
    }

    SUBCASE("bench table1 writes the long CSV") {
        CHECK(run_cli("bench table1 --reps 2 --seed 1 --grid 1:0:1 --n 60 --p 8 --top-k 3 -o " +
                      out1.path) == 0);
        const auto text = read_text(out1.path);
        CHECK(text.find("example,rho,sigma2,method,metric,mean,se,reps") == 0);
        CHECK(text.find("FBIS") != std::string::npos);
        CHECK(text.find("SIS") != std::string::npos);
    }
}
