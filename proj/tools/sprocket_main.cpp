// Command-line front end: transform/fit/evaluate single datasets, benchmark
// manifest suites, and turn result files into rank/diversity reports.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sprocket/analysis.hpp"
#include "sprocket/config.hpp"
#include "sprocket/distances.hpp"
#include "sprocket/features.hpp"
#include "sprocket/io.hpp"
#include "sprocket/kernels.hpp"
#include "sprocket/ridge.hpp"
#include "sprocket/transform.hpp"

namespace {

using nlohmann::json;
using namespace sprocket;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Shared flag surface
// ---------------------------------------------------------------------------

struct SharedOptions {
    std::size_t kernels = 512;
    std::string distance = "msm";
    std::string distance_spec;  // "msm:300,euclidean:300"; empty = single --distance block
    double proto_base = 4.0;
    std::string selection = "random";
    std::string window_rule = "sqrt";
    std::uint64_t seed = 0;
    unsigned repeats = 1;
    unsigned threads = 0;  // 0 = hardware concurrency
    bool normalize_input = false;
    bool normalize_activations = false;
};

void register_shared(CLI::App* cmd, SharedOptions& opts) {
    cmd->add_option("--kernels", opts.kernels, "Number of convolutional kernels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--distance", opts.distance, "Distance measure for every kernel")
        ->check(CLI::IsMember({"euclidean", "dtw", "wdtw", "adtw", "erp", "twe", "msm"}))
        ->capture_default_str();
    cmd->add_option("--distance-spec", opts.distance_spec,
                    "Kernel shares per measure, e.g. \"msm:300,euclidean:212\"");
    cmd->add_option("--proto-base", opts.proto_base, "Log base for the prototype count")
        ->capture_default_str();
    cmd->add_option("--selection", opts.selection, "Prototype selection strategy")
        ->check(CLI::IsMember({"random", "uniform", "stratified", "kmeanspp"}))
        ->capture_default_str();
    cmd->add_option("--window-rule", opts.window_rule, "Band rule: sqrt, none, or fixed:N")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Master random seed")->capture_default_str();
    cmd->add_option("--repeats", opts.repeats, "Number of seeds, starting at --seed")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--threads", opts.threads, "Worker threads (0 = hardware count)")
        ->capture_default_str();
    cmd->add_flag("--normalize-input", opts.normalize_input, "Z-normalize series per channel");
    cmd->add_flag("--normalize-activations", opts.normalize_activations,
                  "Z-normalize kernel activations");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<DistanceShare> parse_distance_spec(const std::string& text) {
    std::vector<DistanceShare> spec;
    for (const auto& token : split(text, ',')) {
        const auto colon = token.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 >= token.size())
            fail(ErrorCode::ParseError,
                 "distance spec entries look like measure:count, got '" + token + "'");
        DistanceShare share;
        share.measure.kind = distance_kind_from_name(token.substr(0, colon));
        try {
            share.share = std::stoull(token.substr(colon + 1));
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError, "bad kernel share in '" + token + "'");
        }
        spec.push_back(share);
    }
    return spec;
}

RunConfig build_config(const SharedOptions& opts, std::uint64_t seed) {
    RunConfig cfg;
    cfg.kernel_count = opts.kernels;
    cfg.prototype_log_base = opts.proto_base;
    cfg.window_rule = parse_window_rule(opts.window_rule);
    cfg.selection = selection_kind_from_name(opts.selection);
    cfg.seed = seed;
    cfg.thread_count = opts.threads == 0 ? hardware_threads() : opts.threads;
    cfg.normalize_input = opts.normalize_input;
    cfg.normalize_activations = opts.normalize_activations;
    if (!opts.distance_spec.empty()) {
        cfg.distance_spec = parse_distance_spec(opts.distance_spec);
    } else {
        DistanceShare share;
        share.measure.kind = distance_kind_from_name(opts.distance);
        share.share = opts.kernels;
        cfg.distance_spec = {share};
    }
    cfg.validate();
    return cfg;
}

std::string spec_text(const std::vector<DistanceShare>& spec) {
    std::string out;
    for (const auto& share : spec) {
        if (!out.empty()) out += ',';
        out += distance_kind_name(share.measure.kind);
        out += ':';
        out += std::to_string(share.share);
    }
    return out;
}

json config_echo(const SharedOptions& opts) {
    RunConfig cfg = build_config(opts, opts.seed);
    return json{{"kernels", cfg.kernel_count},
                {"distance_spec", spec_text(cfg.resolved_spec())},
                {"proto_base", cfg.prototype_log_base},
                {"selection", selection_kind_name(cfg.selection)},
                {"window_rule", window_rule_text(cfg.window_rule)},
                {"seed", cfg.seed},
                {"repeats", opts.repeats},
                {"threads", cfg.thread_count},
                {"normalize_input", cfg.normalize_input},
                {"normalize_activations", cfg.normalize_activations}};
}

// ---------------------------------------------------------------------------
// Dataset plumbing
// ---------------------------------------------------------------------------

TimeSeriesDataset load_dataset(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return parse_csv(path, CsvLabelColumn::Last);
    return parse_ts(path);
}

ResultFormat parse_format(const std::string& text) {
    return text == "csv" ? ResultFormat::Csv : ResultFormat::Json;
}

json record_json(const ResultRecord& r) {
    return json{{"dataset", r.dataset},
                {"algorithm", r.algorithm},
                {"seed", r.seed},
                {"accuracy", r.accuracy},
                {"transform_s", r.transform_s},
                {"fit_s", r.fit_s},
                {"predict_s", r.predict_s},
                {"distance_calls", r.distance_calls},
                {"feature_count", r.feature_count}};
}

// ---------------------------------------------------------------------------
// Algorithm tokens: "rocket", "sprocket", "sprocket-<measure>", and '+'
// joined ensembles of those parts (features concatenated, one classifier).
// ---------------------------------------------------------------------------

struct AlgorithmPart {
    bool pooled = false;  // true: pooled-kernel baseline; false: prototype transform
    std::optional<DistanceKind> forced_measure;
};

struct AlgorithmSpec {
    std::string name;
    std::vector<AlgorithmPart> parts;
};

AlgorithmSpec parse_algorithm(const std::string& token, const RunConfig& base) {
    AlgorithmSpec spec;
    std::vector<std::string> names;
    for (const auto& raw : split(token, '+')) {
        AlgorithmPart part;
        if (raw == "rocket") {
            part.pooled = true;
            names.emplace_back("rocket");
        } else if (raw == "sprocket") {
            const auto resolved = base.resolved_spec();
            if (resolved.size() == 1)
                names.emplace_back(std::string("sprocket-") +
                                   distance_kind_name(resolved[0].measure.kind));
            else
                names.emplace_back("sprocket[" + spec_text(resolved) + "]");
        } else if (raw.rfind("sprocket-", 0) == 0) {
            part.forced_measure = distance_kind_from_name(raw.substr(9));
            names.push_back(raw);
        } else {
            fail(ErrorCode::ParseError, "unknown algorithm '" + raw + "'");
        }
        spec.parts.push_back(part);
    }
    if (spec.parts.empty()) fail(ErrorCode::ParseError, "empty algorithm token");
    for (const auto& n : names) {
        if (!spec.name.empty()) spec.name += '+';
        spec.name += n;
    }
    return spec;
}

struct EvaluationOutcome {
    ResultRecord record;
    std::vector<int> correctness;
};

EvaluationOutcome evaluate_once(const AlgorithmSpec& algo, const RunConfig& base,
                                const TimeSeriesDataset& train, const TimeSeriesDataset& test) {
    std::vector<FeatureMatrix> train_parts(algo.parts.size());
    std::vector<FeatureMatrix> test_parts(algo.parts.size());
    ResultRecord record;
    record.dataset = train.name;
    record.seed = base.seed;

    for (std::size_t p = 0; p < algo.parts.size(); ++p) {
        const auto& part = algo.parts[p];
        const auto started = std::chrono::steady_clock::now();
        if (part.pooled) {
            RandomStream stream(base.seed);
            auto kernel_set = generate_kernels(base.kernel_count, train.length(),
                                               train.channels(), stream);
            train_parts[p] = rocket_transform(train, kernel_set, base.thread_count);
            test_parts[p] = rocket_transform(test, kernel_set, base.thread_count);
        } else {
            RunConfig cfg = base;
            if (part.forced_measure) {
                DistanceShare share;
                share.measure.kind = *part.forced_measure;
                share.share = cfg.kernel_count;
                cfg.distance_spec = {share};
            }
            DistanceCallCounter counter;
            auto fitted = fit_sprocket(train, cfg, &counter);
            train_parts[p] = std::move(fitted.features);
            test_parts[p] = apply_sprocket(fitted.model, test, &counter);
            record.distance_calls += counter.value();
        }
        record.transform_s += seconds_since(started);
    }

    std::vector<const FeatureMatrix*> train_view, test_view;
    for (auto& m : train_parts) train_view.push_back(&m);
    for (auto& m : test_parts) test_view.push_back(&m);
    FeatureMatrix train_features =
        train_view.size() == 1 ? std::move(train_parts[0]) : concat_features(train_view);
    FeatureMatrix test_features =
        test_view.size() == 1 ? std::move(test_parts[0]) : concat_features(test_view);

    record.algorithm = algo.name;
    record.feature_count = train_features.cols();

    auto fit_started = std::chrono::steady_clock::now();
    auto model = fit_ridge_cv(train_features, train.labels);
    record.fit_s = seconds_since(fit_started);

    auto predict_started = std::chrono::steady_clock::now();
    auto predicted = predict(model, test_features);
    record.predict_s = seconds_since(predict_started);
    record.accuracy = accuracy(predicted, test.labels);

    EvaluationOutcome outcome;
    outcome.correctness.resize(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i)
        outcome.correctness[i] = predicted[i] == test.labels[i] ? 1 : 0;
    outcome.record = std::move(record);
    return outcome;
}

void append_correctness(std::vector<CorrectnessRecord>& sink, const EvaluationOutcome& outcome) {
    for (std::size_t i = 0; i < outcome.correctness.size(); ++i) {
        CorrectnessRecord c;
        c.dataset = outcome.record.dataset;
        c.algorithm = outcome.record.algorithm;
        c.seed = outcome.record.seed;
        c.instance = i;
        c.correct = outcome.correctness[i];
        sink.push_back(c);
    }
}

// ---------------------------------------------------------------------------
// transform / fit
// ---------------------------------------------------------------------------

int cmd_transform(const SharedOptions& opts, const std::string& train_path,
                  const std::string& data_path, const std::string& output,
                  const std::string& format) {
    auto train = load_dataset(train_path);
    auto cfg = build_config(opts, opts.seed);
    DistanceCallCounter counter;
    auto fitted = fit_sprocket(train, cfg, &counter);

    FeatureMatrix features;
    if (data_path.empty() || data_path == train_path) {
        features = std::move(fitted.features);
    } else {
        auto data = align_labels(train, load_dataset(data_path));
        features = apply_sprocket(fitted.model, data, &counter);
    }

    if (!output.empty()) {
        std::ofstream out(output);
        if (!out) fail(ErrorCode::IoError, "cannot write '" + output + "'");
        if (parse_format(format) == ResultFormat::Json) {
            json doc;
            doc["rows"] = features.rows();
            doc["cols"] = features.cols();
            auto rows = json::array();
            for (std::size_t r = 0; r < features.rows(); ++r) {
                auto row = json::array();
                for (double v : features.row(r)) row.push_back(v);
                rows.push_back(std::move(row));
            }
            doc["values"] = std::move(rows);
            out << doc.dump(2) << '\n';
        } else {
            for (std::size_t c = 0; c < features.cols(); ++c) {
                const auto& col = features.columns()[c];
                out << (c ? "," : "") << col.source << '_' << col.kernel << '_'
                    << (col.prototype >= 0 ? std::to_string(col.prototype) : col.pooling);
            }
            out << '\n';
            out.precision(17);
            for (std::size_t r = 0; r < features.rows(); ++r) {
                auto row = features.row(r);
                for (std::size_t c = 0; c < row.size(); ++c)
                    out << (c ? "," : "") << row[c];
                out << '\n';
            }
        }
    }

    json echo{{"command", "transform"},
              {"config", config_echo(opts)},
              {"dataset", train.name},
              {"rows", features.rows()},
              {"cols", features.cols()},
              {"distance_calls", counter.value()}};
    if (!output.empty()) echo["output"] = output;
    std::cout << echo.dump(2) << std::endl;
    return 0;
}

int cmd_fit(const SharedOptions& opts, const std::string& train_path,
            const std::string& model_path) {
    auto train = load_dataset(train_path);
    auto cfg = build_config(opts, opts.seed);
    DistanceCallCounter counter;
    auto fitted = fit_sprocket(train, cfg, &counter);
    save_model(fitted.model, model_path);

    json echo{{"command", "fit"},
              {"config", config_echo(opts)},
              {"dataset", train.name},
              {"model", model_path},
              {"feature_count", fitted.model.feature_count()},
              {"distance_calls", counter.value()},
              {"convolution_s", fitted.stats.convolution_seconds},
              {"selection_s", fitted.stats.selection_seconds},
              {"distance_s", fitted.stats.distance_seconds}};
    std::cout << echo.dump(2) << std::endl;
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const SharedOptions& opts, const std::string& train_path,
                 const std::string& test_path, const std::string& algorithm,
                 const std::string& output, const std::string& format,
                 const std::string& correctness_path) {
    auto train = load_dataset(train_path);
    auto test = align_labels(train, load_dataset(test_path));

    std::vector<CorrectnessRecord> correctness;
    ResultRecord averaged;
    for (unsigned r = 0; r < opts.repeats; ++r) {
        auto cfg = build_config(opts, opts.seed + r);
        auto algo = parse_algorithm(algorithm, cfg);
        auto outcome = evaluate_once(algo, cfg, train, test);
        if (!correctness_path.empty()) append_correctness(correctness, outcome);
        if (r == 0) {
            averaged = outcome.record;
        } else {
            averaged.accuracy += outcome.record.accuracy;
            averaged.transform_s += outcome.record.transform_s;
            averaged.fit_s += outcome.record.fit_s;
            averaged.predict_s += outcome.record.predict_s;
            averaged.distance_calls += outcome.record.distance_calls;
        }
    }
    const double repeats = static_cast<double>(opts.repeats);
    averaged.accuracy /= repeats;
    averaged.transform_s /= repeats;
    averaged.fit_s /= repeats;
    averaged.predict_s /= repeats;
    averaged.distance_calls /= opts.repeats;
    averaged.seed = opts.seed;

    if (!output.empty()) write_results({averaged}, output, parse_format(format));
    if (!correctness_path.empty()) write_correctness(correctness, correctness_path);

    json echo{{"command", "evaluate"},
              {"config", config_echo(opts)},
              {"record", record_json(averaged)}};
    if (!output.empty()) echo["output"] = output;
    if (!correctness_path.empty()) echo["correctness"] = correctness_path;
    std::cout << echo.dump(2) << std::endl;
    return 0;
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

int cmd_benchmark(const SharedOptions& opts, const std::string& manifest_path,
                  const std::string& algorithms, const std::string& output,
                  const std::string& format, const std::string& correctness_path,
                  bool skip_missing) {
    auto manifest = parse_manifest(manifest_path);
    std::vector<ResultRecord> records;
    std::vector<CorrectnessRecord> correctness;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    const auto base_dir = std::filesystem::path(manifest_path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path.string() : (base_dir / path).string();
    };

    for (const auto& entry : manifest.entries) {
        TimeSeriesDataset train, test;
        try {
            const auto train_path = resolve(entry.train_path);
            const auto test_path = resolve(entry.test_path);
            if (skip_missing && (!std::filesystem::exists(train_path) ||
                                 !std::filesystem::exists(test_path))) {
                warnings.push_back("skipping '" + entry.name + "': dataset files missing");
                continue;
            }
            train = load_dataset(train_path);
            test = align_labels(train, load_dataset(test_path));
            train.name = entry.name;

            if (train.size() != entry.instances)
                fail(ErrorCode::ManifestError,
                     "'" + entry.name + "': expected " + std::to_string(entry.instances) +
                         " training instances, found " + std::to_string(train.size()));
            if (train.length() != entry.length)
                fail(ErrorCode::ManifestError,
                     "'" + entry.name + "': expected length " + std::to_string(entry.length) +
                         ", found " + std::to_string(train.length()));
            if (train.channels() != entry.channels)
                fail(ErrorCode::ManifestError,
                     "'" + entry.name + "': expected " + std::to_string(entry.channels) +
                         " channels, found " + std::to_string(train.channels()));
            if (train.class_count() != entry.classes)
                fail(ErrorCode::ManifestError,
                     "'" + entry.name + "': expected " + std::to_string(entry.classes) +
                         " classes, found " + std::to_string(train.class_count()));
        } catch (const Error& e) {
            errors.push_back(e.what());
            continue;
        }

        for (const auto& token : split(algorithms, ',')) {
            for (unsigned r = 0; r < opts.repeats; ++r) {
                try {
                    auto cfg = build_config(opts, opts.seed + r);
                    auto algo = parse_algorithm(token, cfg);
                    auto outcome = evaluate_once(algo, cfg, train, test);
                    if (!correctness_path.empty()) append_correctness(correctness, outcome);
                    records.push_back(std::move(outcome.record));
                } catch (const Error& e) {
                    errors.push_back(std::string("'") + entry.name + "' / '" + token +
                                     "': " + e.what());
                }
            }
        }
    }

    if (!output.empty()) write_results(records, output, parse_format(format));
    if (!correctness_path.empty()) write_correctness(correctness, correctness_path);

    json echo{{"command", "benchmark"},
              {"config", config_echo(opts)},
              {"algorithms", algorithms},
              {"records", records.size()},
              {"errors", errors},
              {"warnings", warnings}};
    if (!output.empty()) echo["output"] = output;
    if (!correctness_path.empty()) echo["correctness"] = correctness_path;
    std::cout << echo.dump(2) << std::endl;
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& e : errors) std::cerr << "error: " << e << '\n';
    return errors.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct CorrectnessKey {
    std::string dataset;
    std::uint64_t seed;
    std::uint64_t instance;

    bool operator<(const CorrectnessKey& o) const {
        if (dataset != o.dataset) return dataset < o.dataset;
        if (seed != o.seed) return seed < o.seed;
        return instance < o.instance;
    }
};

void write_grid(const std::string& path, const std::vector<std::string>& algorithms,
                const std::vector<std::vector<std::optional<double>>>& cells) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out.precision(17);
    out << "algorithm";
    for (const auto& a : algorithms) out << ',' << a;
    out << '\n';
    for (std::size_t i = 0; i < algorithms.size(); ++i) {
        out << algorithms[i];
        for (std::size_t j = 0; j < algorithms.size(); ++j) {
            out << ',';
            if (cells[i][j]) out << *cells[i][j];
        }
        out << '\n';
    }
}

int cmd_analyze(const std::string& results_path, const std::string& correctness_path,
                const std::string& out_dir, const std::vector<std::string>& pair_flags,
                const std::string& sign_test_flag) {
    json echo{{"command", "analyze"}, {"results", results_path}};
    std::vector<std::string> notices;
    std::vector<std::string> outputs;

    if (!sign_test_flag.empty()) {
        const auto parts = split(sign_test_flag, ',');
        if (parts.size() != 2)
            fail(ErrorCode::ParseError, "--sign-test wants \"wins,losses\"");
        const auto wins = std::stoull(parts[0]);
        const auto losses = std::stoull(parts[1]);
        echo["sign_test"] = json{{"wins", wins},
                                 {"losses", losses},
                                 {"p_value", sign_test(wins, losses)}};
    }

    auto records = read_results(results_path);
    if (records.empty() && sign_test_flag.empty())
        fail(ErrorCode::EmptyTable, "no records in '" + results_path + "'");

    std::filesystem::create_directories(out_dir);
    const auto path_in = [&](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };

    // accuracy table: mean over seeds per (algorithm, dataset)
    std::set<std::string> algorithm_set, dataset_set;
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> sums;
    for (const auto& r : records) {
        algorithm_set.insert(r.algorithm);
        dataset_set.insert(r.dataset);
        auto& cell = sums[{r.algorithm, r.dataset}];
        cell.first += r.accuracy;
        ++cell.second;
    }
    std::vector<std::string> algorithms(algorithm_set.begin(), algorithm_set.end());
    std::vector<std::string> datasets(dataset_set.begin(), dataset_set.end());

    if (!records.empty()) {
        std::vector<std::vector<double>> table(algorithms.size(),
                                               std::vector<double>(datasets.size()));
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            for (std::size_t d = 0; d < datasets.size(); ++d) {
                auto it = sums.find({algorithms[a], datasets[d]});
                if (it == sums.end())
                    fail(ErrorCode::MissingColumns,
                         "no result for algorithm '" + algorithms[a] + "' on dataset '" +
                             datasets[d] + "'");
                table[a][d] = it->second.first / static_cast<double>(it->second.second);
            }
        }

        std::ofstream ranks_out(path_in("ranks.csv"));
        if (!ranks_out) fail(ErrorCode::IoError, "cannot write ranks.csv");
        ranks_out.precision(17);
        ranks_out << "algorithm,mean_rank,best_finishes\n";
        if (algorithms.size() == 1) {
            ranks_out << algorithms[0] << ",1," << datasets.size() << '\n';
            notices.push_back("single algorithm: ranks are trivially 1.0");
        } else {
            auto summary = average_ranks(table);
            for (std::size_t a = 0; a < algorithms.size(); ++a)
                ranks_out << algorithms[a] << ',' << summary.mean_ranks[a] << ','
                          << summary.best_finishes[a] << '\n';
        }
        outputs.push_back(path_in("ranks.csv"));

        // pairwise sign tests over per-(dataset, seed) accuracy comparisons
        std::vector<std::pair<std::string, std::string>> pairs;
        if (!pair_flags.empty()) {
            for (const auto& flag : pair_flags) {
                auto parts = split(flag, ',');
                if (parts.size() != 2)
                    fail(ErrorCode::ParseError, "--pair wants \"algorithmA,algorithmB\"");
                pairs.emplace_back(parts[0], parts[1]);
            }
        } else {
            for (std::size_t i = 0; i < algorithms.size(); ++i)
                for (std::size_t j = i + 1; j < algorithms.size(); ++j)
                    pairs.emplace_back(algorithms[i], algorithms[j]);
        }
        if (!pairs.empty()) {
            std::map<std::pair<std::string, std::string>,
                     std::map<std::pair<std::string, std::uint64_t>, double>>
                by_algo;
            for (const auto& r : records)
                by_algo[{r.algorithm, ""}][{r.dataset, r.seed}] = r.accuracy;

            std::ofstream sign_out(path_in("sign_tests.csv"));
            if (!sign_out) fail(ErrorCode::IoError, "cannot write sign_tests.csv");
            sign_out.precision(17);
            sign_out << "algorithm_a,algorithm_b,wins,losses,ties,p_value\n";
            for (const auto& [a, b] : pairs) {
                const auto ia = by_algo.find({a, ""});
                const auto ib = by_algo.find({b, ""});
                if (ia == by_algo.end() || ib == by_algo.end())
                    fail(ErrorCode::MissingColumns,
                         "sign test pair references unknown algorithm '" +
                             (ia == by_algo.end() ? a : b) + "'");
                std::uint64_t wins = 0, losses = 0, ties = 0;
                for (const auto& [key, acc] : ia->second) {
                    auto other = ib->second.find(key);
                    if (other == ib->second.end()) continue;
                    if (acc > other->second) ++wins;
                    else if (acc < other->second) ++losses;
                    else ++ties;
                }
                sign_out << a << ',' << b << ',' << wins << ',' << losses << ',' << ties << ',';
                if (wins + losses > 0) sign_out << sign_test(wins, losses);
                sign_out << '\n';
            }
            outputs.push_back(path_in("sign_tests.csv"));
        }
    }

    // diversity grids need the per-instance sidecar and at least two algorithms
    if (correctness_path.empty()) {
        notices.push_back("no correctness sidecar: diversity grids skipped");
    } else if (algorithms.size() < 2) {
        notices.push_back("single algorithm: diversity grids skipped");
    } else {
        auto rows = read_correctness(correctness_path);
        std::map<std::string, std::map<CorrectnessKey, int>> per_algo;
        for (const auto& row : rows)
            per_algo[row.algorithm][{row.dataset, row.seed, row.instance}] = row.correct;
        for (const auto& a : algorithms)
            if (per_algo.find(a) == per_algo.end())
                fail(ErrorCode::MissingColumns,
                     "correctness sidecar lacks algorithm '" + a + "'");

        const std::size_t n = algorithms.size();
        using Grid = std::vector<std::vector<std::optional<double>>>;
        auto make_grid = [n] { return Grid(n, std::vector<std::optional<double>>(n)); };
        Grid q_concat = make_grid(), dis_concat = make_grid(), df_concat = make_grid(),
             corr_concat = make_grid();
        Grid q_mean = make_grid(), dis_mean = make_grid(), df_mean = make_grid(),
             corr_mean = make_grid();

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const auto& mi = per_algo[algorithms[i]];
                const auto& mj = per_algo[algorithms[j]];
                CorrectnessVector all_a, all_b;
                std::map<std::string, std::pair<CorrectnessVector, CorrectnessVector>> per_ds;
                for (const auto& [key, value] : mi) {
                    auto other = mj.find(key);
                    if (other == mj.end()) continue;
                    all_a.push_back(value);
                    all_b.push_back(other->second);
                    per_ds[key.dataset].first.push_back(value);
                    per_ds[key.dataset].second.push_back(other->second);
                }
                if (!all_a.empty()) {
                    auto stats = pairwise_stats(all_a, all_b);
                    q_concat[i][j] = stats.q_statistic;
                    dis_concat[i][j] = stats.disagreement;
                    df_concat[i][j] = stats.double_fault;
                    corr_concat[i][j] = stats.correlation;
                }
                double q_sum = 0, dis_sum = 0, df_sum = 0, corr_sum = 0;
                std::size_t q_n = 0, pair_n = 0, corr_n = 0;
                for (const auto& [ds, vecs] : per_ds) {
                    auto stats = pairwise_stats(vecs.first, vecs.second);
                    ++pair_n;
                    dis_sum += stats.disagreement;
                    df_sum += stats.double_fault;
                    if (stats.q_statistic) { q_sum += *stats.q_statistic; ++q_n; }
                    if (stats.correlation) { corr_sum += *stats.correlation; ++corr_n; }
                }
                if (pair_n > 0) {
                    dis_mean[i][j] = dis_sum / static_cast<double>(pair_n);
                    df_mean[i][j] = df_sum / static_cast<double>(pair_n);
                }
                if (q_n > 0) q_mean[i][j] = q_sum / static_cast<double>(q_n);
                if (corr_n > 0) corr_mean[i][j] = corr_sum / static_cast<double>(corr_n);
            }
        }

        const std::vector<std::pair<std::string, Grid*>> grids{
            {"grid_q_concat.csv", &q_concat},
            {"grid_disagreement_concat.csv", &dis_concat},
            {"grid_double_fault_concat.csv", &df_concat},
            {"grid_correlation_concat.csv", &corr_concat},
            {"grid_q_dataset_mean.csv", &q_mean},
            {"grid_disagreement_dataset_mean.csv", &dis_mean},
            {"grid_double_fault_dataset_mean.csv", &df_mean},
            {"grid_correlation_dataset_mean.csv", &corr_mean}};
        for (const auto& [name, grid] : grids) {
            write_grid(path_in(name), algorithms, *grid);
            outputs.push_back(path_in(name));
        }
    }

    echo["notices"] = notices;
    echo["outputs"] = outputs;
    std::cout << echo.dump(2) << std::endl;
    for (const auto& n : notices) std::cerr << "notice: " << n << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prototype-distance convolutional kernel transform"};
    app.require_subcommand(1);

    SharedOptions opts;
    std::string train_path, test_path, data_path, model_path;
    std::string manifest_path, results_path, correctness_in, out_dir = ".";
    std::string output, format = "json", correctness_out;
    std::string algorithm = "sprocket", algorithms = "sprocket";
    std::string sign_test_flag;
    std::vector<std::string> pair_flags;
    bool skip_missing = false;

    auto* transform = app.add_subcommand("transform", "Fit the transform and emit features");
    register_shared(transform, opts);
    transform->add_option("--train", train_path, "Training dataset (.ts or .csv)")->required();
    transform->add_option("--data", data_path, "Dataset to transform (default: training set)");
    transform->add_option("--output", output, "Feature matrix file");
    transform->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* fit = app.add_subcommand("fit", "Fit the transform and save the model");
    register_shared(fit, opts);
    fit->add_option("--train", train_path, "Training dataset (.ts or .csv)")->required();
    fit->add_option("--model", model_path, "Model output file")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Train on one split, score another");
    register_shared(evaluate, opts);
    evaluate->add_option("--train", train_path, "Training dataset")->required();
    evaluate->add_option("--test", test_path, "Test dataset")->required();
    evaluate->add_option("--algorithm", algorithm,
                         "rocket, sprocket, sprocket-<measure>, or a '+' ensemble")
        ->capture_default_str();
    evaluate->add_option("--output", output, "Result record file");
    evaluate->add_option("--format", format, "Result file format")
        ->check(CLI::IsMember({"json", "csv"}));
    evaluate->add_option("--emit-correctness", correctness_out,
                         "Write per-instance correctness rows to this file");

    auto* benchmark = app.add_subcommand("benchmark", "Run a manifest of datasets");
    register_shared(benchmark, opts);
    benchmark->add_option("--manifest", manifest_path, "Dataset manifest (json)")->required();
    benchmark->add_option("--algorithms", algorithms, "Comma list of algorithm tokens")
        ->capture_default_str();
    benchmark->add_option("--output", output, "Results file");
    benchmark->add_option("--format", format, "Results file format")
        ->check(CLI::IsMember({"json", "csv"}));
    benchmark->add_option("--emit-correctness", correctness_out,
                          "Write per-instance correctness rows to this file");
    benchmark->add_flag("--skip-missing", skip_missing,
                        "Skip manifest entries whose files are absent");

    auto* analyze = app.add_subcommand("analyze", "Summarize a results file");
    analyze->add_option("--results", results_path, "Results file (json or csv)")->required();
    analyze->add_option("--correctness", correctness_in,
                        "Per-instance correctness sidecar for diversity grids");
    analyze->add_option("--out-dir", out_dir, "Report directory")->capture_default_str();
    analyze->add_option("--pair", pair_flags, "Sign-test pair \"algoA,algoB\" (repeatable)");
    analyze->add_option("--sign-test", sign_test_flag, "Direct \"wins,losses\" tail probability");

    CLI11_PARSE(app, argc, argv);

    try {
        if (transform->parsed())
            return cmd_transform(opts, train_path, data_path, output, format);
        if (fit->parsed()) return cmd_fit(opts, train_path, model_path);
        if (evaluate->parsed())
            return cmd_evaluate(opts, train_path, test_path, algorithm, output, format,
                                correctness_out);
        if (benchmark->parsed())
            return cmd_benchmark(opts, manifest_path, algorithms, output, format,
                                 correctness_out, skip_missing);
        if (analyze->parsed())
            return cmd_analyze(results_path, correctness_in, out_dir, pair_flags,
                               sign_test_flag);
    } catch (const Error& e) {
        std::cerr << json{{"error", error_code_name(e.code())}, {"message", e.what()}}.dump()
                  << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "Unhandled"}, {"message", e.what()}}.dump() << std::endl;
        return 1;
    }
    return 0;
}
