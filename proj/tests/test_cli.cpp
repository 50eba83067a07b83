// End-to-end tests that drive the command-line binary as a subprocess.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

#include "json.hpp"

#include "sprocket/analysis.hpp"
#include "sprocket/io.hpp"
#include "sprocket/prototypes.hpp"
#include "sprocket/transform.hpp"

#include "helpers.hpp"

using nlohmann::json;
using namespace sprocket;

namespace {

// Runs the binary with the given arguments, captures stdout into a file, and
// returns the exit status.
int run_cli(const std::string& args, const std::string& stdout_path) {
    const std::string command =
        std::string(SPROCKET_CLI_PATH) + " " + args + " > " + stdout_path + " 2>/dev/null";
    const int raw = std::system(command.c_str());
    REQUIRE(raw != -1);
    REQUIRE(WIFEXITED(raw));
    return WEXITSTATUS(raw);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json run_cli_json(const std::string& args, const std::string& stdout_path, int expected_exit = 0) {
    REQUIRE(run_cli(args, stdout_path) == expected_exit);
    return json::parse(read_text(stdout_path));
}

// Serializes a univariate dataset in the @directive text format the parser
// understands.
void write_ts(const std::string& path, const TimeSeriesDataset& dataset) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << "@problemName " << dataset.name << "\n@timeStamps false\n@univariate true\n";
    out << "@classLabel true";
    for (const auto& name : dataset.label_names) out << ' ' << name;
    out << "\n@data\n";
    out.precision(17);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto channel = dataset.series[i].channel(0);
        for (std::size_t t = 0; t < channel.size(); ++t) out << (t ? "," : "") << channel[t];
        out << ':' << dataset.label_names[dataset.labels[i]] << '\n';
    }
}

struct CliFixture {
    testutil::TempDir dir;
    std::string train_path;
    std::string test_path;
    std::size_t train_size = 12;
    std::size_t test_size = 8;

    CliFixture() {
        auto train = testutil::random_dataset(train_size, 10, 2, 101, 2.5);
        auto test = testutil::random_dataset(test_size, 10, 2, 202, 2.5);
        train.name = "tiny";
        test.name = "tiny";
        train_path = dir.file("train.ts");
        test_path = dir.file("test.ts");
        write_ts(train_path, train);
        write_ts(test_path, test);
    }

    std::string evaluate_args(const std::string& extra) const {
        return "evaluate --train " + train_path + " --test " + test_path +
               " --threads 1 " + extra;
    }
};

}  // namespace

TEST_CASE("cli evaluate produces a full record with exact distance-call accounting") {
    CliFixture fx;
    const std::string out = fx.dir.file("results.json");
    auto echo = run_cli_json(
        fx.evaluate_args("--kernels 8 --distance euclidean --seed 3 --output " + out),
        fx.dir.file("stdout.json"));

    CHECK(echo.at("command") == "evaluate");
    CHECK(echo.at("config").at("kernels") == 8);
    CHECK(echo.at("config").at("distance_spec") == "euclidean:8");
    CHECK(echo.at("config").at("selection") == "random");
    CHECK(echo.at("config").at("window_rule") == "sqrt");
    CHECK(echo.at("config").at("seed") == 3);
    CHECK(echo.at("config").at("threads") == 1);

    const auto& record = echo.at("record");
    const std::size_t m = prototype_count(fx.train_size, 4.0);
    const std::uint64_t expected_calls = 8 * (fx.train_size + fx.test_size) * m;
    CHECK(record.at("dataset") == "tiny");
    CHECK(record.at("algorithm") == "sprocket-euclidean");
    CHECK(record.at("seed") == 3);
    CHECK(record.at("accuracy").get<double>() >= 0.0);
    CHECK(record.at("accuracy").get<double>() <= 1.0);
    CHECK(record.at("distance_calls") == expected_calls);
    CHECK(record.at("feature_count") == 8 * m);

    auto records = read_results(out);
    REQUIRE(records.size() == 1);
    CHECK(records[0].dataset == "tiny");
    CHECK(records[0].algorithm == "sprocket-euclidean");
    CHECK(records[0].seed == 3);
    CHECK(records[0].accuracy == record.at("accuracy").get<double>());
    CHECK(records[0].distance_calls == expected_calls);
    CHECK(records[0].feature_count == 8 * m);
}

TEST_CASE("cli rejects a zero kernel count at flag validation") {
    CliFixture fx;
    CHECK(run_cli(fx.evaluate_args("--kernels 0"), fx.dir.file("zero.txt")) != 0);
}

TEST_CASE("cli evaluate is deterministic for a fixed seed") {
    CliFixture fx;
    auto first = run_cli_json(fx.evaluate_args("--kernels 8 --distance dtw --seed 11"),
                              fx.dir.file("a.json"));
    auto second = run_cli_json(fx.evaluate_args("--kernels 8 --distance dtw --seed 11"),
                               fx.dir.file("b.json"));
    CHECK(first.at("record").at("accuracy") == second.at("record").at("accuracy"));
    CHECK(first.at("record").at("distance_calls") == second.at("record").at("distance_calls"));
    CHECK(first.at("record").at("feature_count") == second.at("record").at("feature_count"));

    auto other = run_cli_json(fx.evaluate_args("--kernels 8 --distance dtw --seed 12"),
                              fx.dir.file("c.json"));
    CHECK(other.at("record").at("distance_calls") ==
          first.at("record").at("distance_calls"));  // counts depend on shapes, not draws
}

TEST_CASE("cli evaluate averages repeats and emits per-seed correctness rows") {
    CliFixture fx;
    const std::string sidecar = fx.dir.file("correctness.csv");
    auto echo = run_cli_json(
        fx.evaluate_args("--kernels 8 --distance euclidean --seed 5 --repeats 2"
                         " --emit-correctness " +
                         sidecar),
        fx.dir.file("stdout.json"));

    CHECK(echo.at("record").at("seed") == 5);  // base seed identifies the averaged record
    const std::size_t m = prototype_count(fx.train_size, 4.0);
    CHECK(echo.at("record").at("distance_calls") ==
          8 * (fx.train_size + fx.test_size) * m);  // identical per repeat, so the mean too

    auto rows = read_correctness(sidecar);
    REQUIRE(rows.size() == 2 * fx.test_size);
    std::size_t seed5 = 0, seed6 = 0;
    for (const auto& row : rows) {
        CHECK(row.dataset == "tiny");
        CHECK(row.algorithm == "sprocket-euclidean");
        if (row.seed == 5) ++seed5;
        if (row.seed == 6) ++seed6;
    }
    CHECK(seed5 == fx.test_size);
    CHECK(seed6 == fx.test_size);
}

TEST_CASE("cli evaluate runs ensembles and rocket baseline") {
    CliFixture fx;
    auto echo = run_cli_json(
        fx.evaluate_args("--kernels 8 --distance msm --seed 2 --algorithm rocket+sprocket"),
        fx.dir.file("stdout.json"));
    const std::size_t m = prototype_count(fx.train_size, 4.0);
    CHECK(echo.at("record").at("algorithm") == "rocket+sprocket-msm");
    // pooled part contributes 2 columns per kernel, prototype part m per kernel
    CHECK(echo.at("record").at("feature_count") == 8 * 2 + 8 * m);
    CHECK(echo.at("record").at("distance_calls") ==
          8 * (fx.train_size + fx.test_size) * m);  // pooled features make no distance calls

    auto rocket_only = run_cli_json(
        fx.evaluate_args("--kernels 8 --seed 2 --algorithm rocket"), fx.dir.file("r.json"));
    CHECK(rocket_only.at("record").at("algorithm") == "rocket");
    CHECK(rocket_only.at("record").at("distance_calls") == 0);
    CHECK(rocket_only.at("record").at("feature_count") == 16);

    CHECK(run_cli(fx.evaluate_args("--algorithm banana"), fx.dir.file("bad.txt")) != 0);
}

TEST_CASE("cli fit writes a model that transform and evaluate can round-trip") {
    CliFixture fx;
    const std::string model_path = fx.dir.file("model.json");
    auto echo = run_cli_json("fit --train " + fx.train_path +
                                 " --kernels 6 --distance twe --threads 1 --seed 4 --model " +
                                 model_path,
                             fx.dir.file("fit.json"));
    const std::size_t m = prototype_count(fx.train_size, 4.0);
    CHECK(echo.at("command") == "fit");
    CHECK(echo.at("feature_count") == 6 * m);
    CHECK(std::filesystem::exists(model_path));

    auto model = load_model(model_path);
    CHECK(model.kernel_set.kernels.size() == 6);
    CHECK(model.prototypes_per_kernel == m);
}

TEST_CASE("cli transform emits a feature matrix in both formats") {
    CliFixture fx;
    const std::string csv_path = fx.dir.file("features.csv");
    auto echo = run_cli_json("transform --train " + fx.train_path + " --data " + fx.test_path +
                                 " --kernels 5 --distance euclidean --threads 1 --seed 9"
                                 " --format csv --output " +
                                 csv_path,
                             fx.dir.file("t.json"));
    const std::size_t m = prototype_count(fx.train_size, 4.0);
    CHECK(echo.at("rows") == fx.test_size);
    CHECK(echo.at("cols") == 5 * m);

    const auto text = read_text(csv_path);
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == fx.test_size + 1);  // header + one row per instance

    const std::string json_path = fx.dir.file("features.json");
    auto echo2 = run_cli_json("transform --train " + fx.train_path +
                                  " --kernels 5 --distance euclidean --threads 1 --seed 9"
                                  " --format json --output " +
                                  json_path,
                              fx.dir.file("t2.json"));
    CHECK(echo2.at("rows") == fx.train_size);
    auto doc = json::parse(read_text(json_path));
    CHECK(doc.at("rows") == fx.train_size);
    CHECK(doc.at("values").size() == fx.train_size);
    CHECK(doc.at("values").at(0).size() == 5 * m);
}

namespace {

struct BenchmarkFixture {
    testutil::TempDir dir;
    std::string manifest_path;

    BenchmarkFixture(bool break_length = false, bool drop_files = false) {
        json entries = json::array();
        const char* names[2] = {"alpha", "beta"};
        for (int d = 0; d < 2; ++d) {
            auto train = testutil::random_dataset(8, 12, 2, 50 + d, 2.0);
            auto test = testutil::random_dataset(6, 12, 2, 70 + d, 2.0);
            train.name = names[d];
            test.name = names[d];
            const std::string train_path = dir.file(std::string(names[d]) + "_train.ts");
            const std::string test_path = dir.file(std::string(names[d]) + "_test.ts");
            if (!(drop_files && d == 1)) {
                write_ts(train_path, train);
                write_ts(test_path, test);
            }
            entries.push_back(json{{"name", names[d]},
                                   {"train", train_path},
                                   {"test", test_path},
                                   {"instances", 8},
                                   {"length", (break_length && d == 1) ? 99 : 12},
                                   {"channels", 1},
                                   {"classes", 2}});
        }
        manifest_path = dir.file("manifest.json");
        std::ofstream out(manifest_path);
        out << json{{"entries", entries}}.dump(2);
    }
};

}  // namespace

TEST_CASE("cli benchmark emits one record per dataset, algorithm, and seed") {
    BenchmarkFixture fx;
    const std::string out = fx.dir.file("results.csv");
    auto echo = run_cli_json("benchmark --manifest " + fx.manifest_path +
                                 " --algorithms rocket,sprocket-euclidean --kernels 8"
                                 " --threads 1 --seed 1 --format csv --output " +
                                 out,
                             fx.dir.file("stdout.json"));
    CHECK(echo.at("records") == 4);
    CHECK(echo.at("errors").empty());

    auto records = read_results(out);
    REQUIRE(records.size() == 4);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : records) {
        seen.insert({r.dataset, r.algorithm});
        CHECK(r.seed == 1);
    }
    CHECK(seen.size() == 4);
    CHECK(seen.count({"alpha", "rocket"}) == 1);
    CHECK(seen.count({"beta", "sprocket-euclidean"}) == 1);
}

TEST_CASE("cli benchmark records metadata mismatches but keeps running") {
    BenchmarkFixture fx(/*break_length=*/true);
    const std::string out = fx.dir.file("results.json");
    const std::string stdout_path = fx.dir.file("stdout.json");
    const int exit_code = run_cli("benchmark --manifest " + fx.manifest_path +
                                      " --algorithms sprocket-euclidean --kernels 8"
                                      " --threads 1 --output " +
                                      out,
                                  stdout_path);
    CHECK(exit_code == 1);
    auto echo = json::parse(read_text(stdout_path));
    CHECK(echo.at("records") == 1);  // the valid entry still ran
    REQUIRE(echo.at("errors").size() == 1);
    const auto message = echo.at("errors").at(0).get<std::string>();
    CHECK(message.find("beta") != std::string::npos);
    CHECK(message.find("length") != std::string::npos);

    auto records = read_results(out);
    REQUIRE(records.size() == 1);
    CHECK(records[0].dataset == "alpha");
}

TEST_CASE("cli benchmark --skip-missing downgrades absent files to warnings") {
    BenchmarkFixture fx(/*break_length=*/false, /*drop_files=*/true);
    auto echo = run_cli_json("benchmark --manifest " + fx.manifest_path +
                                 " --algorithms sprocket-euclidean --kernels 8 --threads 1"
                                 " --skip-missing",
                             fx.dir.file("stdout.json"));
    CHECK(echo.at("records") == 1);
    CHECK(echo.at("errors").empty());
    REQUIRE(echo.at("warnings").size() == 1);
    CHECK(echo.at("warnings").at(0).get<std::string>().find("beta") != std::string::npos);

    // without the flag the same manifest is an error
    CHECK(run_cli("benchmark --manifest " + fx.manifest_path +
                      " --algorithms sprocket-euclidean --kernels 8 --threads 1",
                  fx.dir.file("s2.json")) == 1);
}

TEST_CASE("cli analyze writes rank, sign-test, and diversity reports") {
    BenchmarkFixture fx;
    const std::string results = fx.dir.file("results.json");
    const std::string sidecar = fx.dir.file("correctness.csv");
    run_cli_json("benchmark --manifest " + fx.manifest_path +
                     " --algorithms rocket,sprocket-euclidean --kernels 8 --threads 1"
                     " --seed 1 --output " +
                     results + " --emit-correctness " + sidecar,
                 fx.dir.file("b.json"));

    const std::string report_dir = fx.dir.file("report");
    auto echo = run_cli_json("analyze --results " + results + " --correctness " + sidecar +
                                 " --out-dir " + report_dir,
                             fx.dir.file("a.json"));

    const auto ranks_text = read_text(report_dir + "/ranks.csv");
    CHECK(ranks_text.find("algorithm,mean_rank,best_finishes") == 0);
    CHECK(ranks_text.find("rocket,") != std::string::npos);
    CHECK(ranks_text.find("sprocket-euclidean,") != std::string::npos);

    const auto sign_text = read_text(report_dir + "/sign_tests.csv");
    CHECK(sign_text.find("algorithm_a,algorithm_b,wins,losses,ties,p_value") == 0);
    CHECK(sign_text.find("rocket,sprocket-euclidean,") != std::string::npos);

    for (const char* name :
         {"grid_q_concat.csv", "grid_disagreement_concat.csv", "grid_double_fault_concat.csv",
          "grid_correlation_concat.csv", "grid_q_dataset_mean.csv",
          "grid_disagreement_dataset_mean.csv", "grid_double_fault_dataset_mean.csv",
          "grid_correlation_dataset_mean.csv"}) {
        CHECK(std::filesystem::exists(report_dir + "/" + name));
    }
    CHECK(echo.at("outputs").size() == 10);
}

TEST_CASE("cli analyze diversity grid matches the library pairwise statistics") {
    testutil::TempDir dir;
    // two algorithms, one dataset, hand-built correctness with known counts:
    // n11=4, n00=2, n01=3, n10=1
    CorrectnessVector a = {1, 1, 1, 1, 0, 0, 0, 0, 0, 1};
    CorrectnessVector b = {1, 1, 1, 1, 0, 0, 1, 1, 1, 0};
    std::vector<CorrectnessRecord> rows;
    std::vector<ResultRecord> results;
    for (const char* algo : {"first", "second"}) {
        ResultRecord r;
        r.dataset = "toy";
        r.algorithm = algo;
        r.seed = 0;
        r.accuracy = 0.5;
        results.push_back(r);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        rows.push_back({"toy", "first", 0, i, a[i]});
        rows.push_back({"toy", "second", 0, i, b[i]});
    }
    const std::string results_path = dir.file("results.json");
    const std::string sidecar = dir.file("correctness.csv");
    write_results(results, results_path, ResultFormat::Json);
    write_correctness(rows, sidecar);

    const std::string report_dir = dir.file("report");
    run_cli_json("analyze --results " + results_path + " --correctness " + sidecar +
                     " --out-dir " + report_dir,
                 dir.file("stdout.json"));

    const auto expected = pairwise_stats(a, b);
    auto grid_cell = [&](const std::string& file) {
        const auto text = read_text(report_dir + "/" + file);
        // row "first,<diag>,<cell>": take the third field of the second line
        std::istringstream in(text);
        std::string header, line;
        std::getline(in, header);
        std::getline(in, line);
        const auto first_comma = line.find(',');
        const auto second_comma = line.find(',', first_comma + 1);
        return std::stod(line.substr(second_comma + 1));
    };
    REQUIRE(expected.q_statistic.has_value());
    REQUIRE(expected.correlation.has_value());
    CHECK(grid_cell("grid_q_concat.csv") == doctest::Approx(*expected.q_statistic).epsilon(1e-12));
    CHECK(grid_cell("grid_disagreement_concat.csv") ==
          doctest::Approx(expected.disagreement).epsilon(1e-12));
    CHECK(grid_cell("grid_double_fault_concat.csv") ==
          doctest::Approx(expected.double_fault).epsilon(1e-12));
    CHECK(grid_cell("grid_correlation_concat.csv") ==
          doctest::Approx(*expected.correlation).epsilon(1e-12));
    // single dataset: the per-dataset mean equals the concatenated value
    CHECK(grid_cell("grid_q_dataset_mean.csv") ==
          doctest::Approx(*expected.q_statistic).epsilon(1e-12));
}

TEST_CASE("cli analyze with one algorithm emits trivial ranks and skips grids") {
    CliFixture fx;
    const std::string results = fx.dir.file("results.json");
    const std::string sidecar = fx.dir.file("correctness.csv");
    run_cli_json(fx.evaluate_args("--kernels 8 --distance euclidean --output " + results +
                                  " --emit-correctness " + sidecar),
                 fx.dir.file("e.json"));

    const std::string report_dir = fx.dir.file("report");
    auto echo = run_cli_json("analyze --results " + results + " --correctness " + sidecar +
                                 " --out-dir " + report_dir,
                             fx.dir.file("a.json"));

    const auto ranks_text = read_text(report_dir + "/ranks.csv");
    CHECK(ranks_text.find("sprocket-euclidean,1,") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(report_dir + "/grid_q_concat.csv"));
    bool noticed = false;
    for (const auto& notice : echo.at("notices"))
        if (notice.get<std::string>().find("skipped") != std::string::npos) noticed = true;
    CHECK(noticed);
}

TEST_CASE("cli analyze --sign-test passes the pair through the exact tail probability") {
    testutil::TempDir dir;
    const std::string results_path = dir.file("empty.json");
    write_results({}, results_path, ResultFormat::Json);
    auto echo = run_cli_json("analyze --results " + results_path + " --sign-test 108,92",
                             dir.file("stdout.json"));
    const double p = echo.at("sign_test").at("p_value").get<double>();
    CHECK(p == sign_test(108, 92));
    CHECK(p >= 0.138);
    CHECK(p <= 0.150);
}
