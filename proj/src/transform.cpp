#include "sprocket/transform.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"

namespace sprocket {

std::optional<std::uint32_t> window_for(std::size_t length, const WindowRule& rule) {
    switch (rule.kind) {
        case WindowRule::Kind::None:
            return std::nullopt;
        case WindowRule::Kind::Fixed:
            return rule.fixed;
        case WindowRule::Kind::SqrtLength: {
            auto w = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(length)));
            // settle float edges exactly
            while ((w + 1) * (w + 1) <= length) ++w;
            while (w * w > length) --w;
            return static_cast<std::uint32_t>(w);
        }
    }
    return std::nullopt;
}

namespace {

using steady = std::chrono::steady_clock;

double seconds_between(steady::time_point a, steady::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

void atomic_add(std::atomic<double>& acc, double v) {
    acc.fetch_add(v, std::memory_order_relaxed);
}

// Expand the per-block distance spec into one measure per kernel, resolving
// elastic windows from the original series length.
std::vector<DistanceMeasure> kernel_measures(const RunConfig& config, std::size_t length) {
    std::vector<DistanceMeasure> measures;
    measures.reserve(config.kernel_count);
    for (const auto& block : config.resolved_spec()) {
        DistanceMeasure m = block.measure;
        if (is_elastic(m.kind))
            m.window = window_for(length, config.window_rule);
        else
            m.window.reset();
        for (std::size_t t = 0; t < block.share; ++t) measures.push_back(m);
    }
    return measures;
}

}  // namespace

void PrototypeModel::validate() const {
    config.validate();
    const std::size_t K = kernel_set.kernels.size();
    if (measures.size() != K || prototypes.size() != K)
        fail(ErrorCode::ModelMismatch, "model must carry one measure and one prototype set per kernel");
    if (input_length != kernel_set.input_length)
        fail(ErrorCode::ModelMismatch, "model input length disagrees with its kernel set");
    for (std::size_t i = 0; i < K; ++i) {
        const std::size_t l_out = activation_length(kernel_set.kernels[i], input_length);
        const PrototypeSet& set = prototypes[i];
        if (set.activations.size() != prototypes_per_kernel ||
            set.source_indices.size() != prototypes_per_kernel)
            fail(ErrorCode::ModelMismatch,
                 "kernel " + std::to_string(i) + " does not carry " +
                     std::to_string(prototypes_per_kernel) + " prototypes");
        for (const auto& act : set.activations)
            if (act.size() != l_out)
                fail(ErrorCode::ModelMismatch,
                     "prototype length does not match kernel " + std::to_string(i) +
                         " activation length");
    }
}

FitResult fit_sprocket(const TimeSeriesDataset& train, const RunConfig& config,
                       DistanceCallCounter* counter) {
    train.validate();
    config.validate();
    const std::size_t n = train.size();
    const std::size_t l = train.length();
    const std::size_t m = train.channels();
    const std::size_t K = config.kernel_count;
    const std::size_t M = prototype_count(n, config.prototype_log_base);
    if (M > n)
        fail(ErrorCode::TooFewInstances, std::to_string(n) + " instances cannot seed " +
                                             std::to_string(M) + " prototypes per kernel");

    FitResult result;
    PrototypeModel& model = result.model;
    model.config = config;
    model.measures = kernel_measures(config, l);
    model.input_length = l;
    model.channel_count = m;
    model.prototypes_per_kernel = M;

    RandomStream master(config.seed);
    model.kernel_set = generate_kernels(K, l, m, master);

    const TimeSeriesDataset* input = &train;
    TimeSeriesDataset normalized;
    if (config.normalize_input) {
        normalized = train;
        for (auto& s : normalized.series) s = znormalize(s);
        input = &normalized;
    }

    result.features = FeatureMatrix(n, K * M);
    model.prototypes.resize(K);

    std::atomic<double> conv_s{0.0}, sel_s{0.0}, dist_s{0.0};
    std::atomic<std::uint64_t> feat_calls{0}, sel_calls{0};

    parallel_for(K, config.thread_count, [&](std::size_t i) {
        const Kernel& kern = model.kernel_set.kernels[i];
        const DistanceMeasure& measure = model.measures[i];

        const auto t0 = steady::now();
        std::vector<std::vector<double>> acts(n);
        for (std::size_t j = 0; j < n; ++j) {
            apply_kernel(kern, input->series[j], acts[j]);
            if (config.normalize_activations) znormalize_inplace(acts[j]);
        }
        const auto t1 = steady::now();

        RandomStream proto_stream = master.derive("proto", i);
        DistanceCallCounter local_sel;
        std::vector<std::size_t> picks;
        switch (config.selection) {
            case SelectionKind::UniformRandom:
                picks = select_uniform(n, M, proto_stream);
                break;
            case SelectionKind::Stratified:
                picks = select_stratified(train.labels, M, proto_stream);
                break;
            case SelectionKind::KmeansppInit:
                picks = select_kmeanspp_init(acts, M, measure, proto_stream, &local_sel);
                break;
        }
        const auto t2 = steady::now();

        PrototypeSet& protos = model.prototypes[i];
        protos.source_indices = picks;
        protos.activations.resize(M);
        for (std::size_t r = 0; r < M; ++r) protos.activations[r] = acts[picks[r]];

        DistanceCallCounter local_feat;
        CostMatrixWorkspace ws;
        for (std::size_t r = 0; r < M; ++r) {
            const auto& proto = protos.activations[r];
            const std::size_t col = i * M + r;
            for (std::size_t j = 0; j < n; ++j)
                result.features.at(j, col) =
                    compute_distance(measure, proto, acts[j], &local_feat, &ws);
            result.features.columns()[col] = {"sprocket", static_cast<std::uint32_t>(i),
                                              static_cast<std::int32_t>(r), ""};
        }
        const auto t3 = steady::now();

        atomic_add(conv_s, seconds_between(t0, t1));
        atomic_add(sel_s, seconds_between(t1, t2));
        atomic_add(dist_s, seconds_between(t2, t3));
        sel_calls.fetch_add(local_sel.value(), std::memory_order_relaxed);
        feat_calls.fetch_add(local_feat.value(), std::memory_order_relaxed);
        if (counter) counter->add(local_sel.value() + local_feat.value());
    });

    result.stats.convolution_seconds = conv_s.load();
    result.stats.selection_seconds = sel_s.load();
    result.stats.distance_seconds = dist_s.load();
    result.stats.distance_calls = feat_calls.load();
    result.stats.selection_distance_calls = sel_calls.load();
    return result;
}

FeatureMatrix apply_sprocket(const PrototypeModel& model, const TimeSeriesDataset& data,
                             DistanceCallCounter* counter, TransformStats* stats) {
    data.validate();
    if (data.length() != model.input_length || data.channels() != model.channel_count)
        fail(ErrorCode::ShapeMismatch,
             "dataset shape (" + std::to_string(data.channels()) + ", " +
                 std::to_string(data.length()) + ") does not match the model (" +
                 std::to_string(model.channel_count) + ", " + std::to_string(model.input_length) +
                 ")");

    const std::size_t n = data.size();
    const std::size_t K = model.kernel_set.kernels.size();
    const std::size_t M = model.prototypes_per_kernel;
    const RunConfig& config = model.config;

    const TimeSeriesDataset* input = &data;
    TimeSeriesDataset normalized;
    if (config.normalize_input) {
        normalized = data;
        for (auto& s : normalized.series) s = znormalize(s);
        input = &normalized;
    }

    FeatureMatrix features(n, K * M);
    std::atomic<double> conv_s{0.0}, dist_s{0.0};
    std::atomic<std::uint64_t> feat_calls{0};

    parallel_for(K, config.thread_count, [&](std::size_t i) {
        const Kernel& kern = model.kernel_set.kernels[i];
        const DistanceMeasure& measure = model.measures[i];

        const auto t0 = steady::now();
        std::vector<std::vector<double>> acts(n);
        for (std::size_t j = 0; j < n; ++j) {
            apply_kernel(kern, input->series[j], acts[j]);
            if (config.normalize_activations) znormalize_inplace(acts[j]);
        }
        const auto t1 = steady::now();

        DistanceCallCounter local_feat;
        CostMatrixWorkspace ws;
        for (std::size_t r = 0; r < M; ++r) {
            const auto& proto = model.prototypes[i].activations[r];
            const std::size_t col = i * M + r;
            for (std::size_t j = 0; j < n; ++j)
                features.at(j, col) = compute_distance(measure, proto, acts[j], &local_feat, &ws);
            features.columns()[col] = {"sprocket", static_cast<std::uint32_t>(i),
                                       static_cast<std::int32_t>(r), ""};
        }
        const auto t2 = steady::now();

        atomic_add(conv_s, seconds_between(t0, t1));
        atomic_add(dist_s, seconds_between(t1, t2));
        feat_calls.fetch_add(local_feat.value(), std::memory_order_relaxed);
        if (counter) counter->add(local_feat.value());
    });

    if (stats) {
        stats->convolution_seconds = conv_s.load();
        stats->selection_seconds = 0.0;
        stats->distance_seconds = dist_s.load();
        stats->distance_calls = feat_calls.load();
        stats->selection_distance_calls = 0;
    }
    return features;
}

// ---------------------------------------------------------------------------
// Model serialization
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json measure_to_json(const DistanceMeasure& m) {
    json j;
    j["kind"] = distance_kind_name(m.kind);
    j["params"] = {{"wdtw_g", m.params.wdtw_g},       {"adtw_omega", m.params.adtw_omega},
                   {"erp_gap", m.params.erp_gap},     {"twe_nu", m.params.twe_nu},
                   {"twe_lambda", m.params.twe_lambda}, {"msm_c", m.params.msm_c}};
    if (m.window)
        j["window"] = *m.window;
    else
        j["window"] = nullptr;
    return j;
}

DistanceMeasure measure_from_json(const json& j) {
    DistanceMeasure m;
    m.kind = distance_kind_from_name(j.at("kind").get<std::string>());
    const json& p = j.at("params");
    m.params.wdtw_g = p.at("wdtw_g").get<double>();
    m.params.adtw_omega = p.at("adtw_omega").get<double>();
    m.params.erp_gap = p.at("erp_gap").get<double>();
    m.params.twe_nu = p.at("twe_nu").get<double>();
    m.params.twe_lambda = p.at("twe_lambda").get<double>();
    m.params.msm_c = p.at("msm_c").get<double>();
    if (!j.at("window").is_null()) m.window = j.at("window").get<std::uint32_t>();
    return m;
}

json config_to_json(const RunConfig& c) {
    json spec = json::array();
    for (const auto& block : c.distance_spec)
        spec.push_back({{"measure", measure_to_json(block.measure)}, {"share", block.share}});
    return json{{"kernel_count", c.kernel_count},
                {"prototype_log_base", c.prototype_log_base},
                {"window_rule", window_rule_text(c.window_rule)},
                {"distance_spec", spec},
                {"selection", selection_kind_name(c.selection)},
                {"seed", c.seed},
                {"thread_count", c.thread_count},
                {"normalize_input", c.normalize_input},
                {"normalize_activations", c.normalize_activations}};
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.kernel_count = j.at("kernel_count").get<std::size_t>();
    c.prototype_log_base = j.at("prototype_log_base").get<double>();
    c.window_rule = parse_window_rule(j.at("window_rule").get<std::string>());
    for (const json& b : j.at("distance_spec")) {
        DistanceShare share;
        share.measure = measure_from_json(b.at("measure"));
        share.share = b.at("share").get<std::size_t>();
        c.distance_spec.push_back(share);
    }
    c.selection = selection_kind_from_name(j.at("selection").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.thread_count = j.at("thread_count").get<unsigned>();
    c.normalize_input = j.at("normalize_input").get<bool>();
    c.normalize_activations = j.at("normalize_activations").get<bool>();
    return c;
}

}  // namespace

void save_model(const PrototypeModel& model, const std::string& path) {
    model.validate();
    json j;
    j["format"] = "sprocket-model";
    j["version"] = 1;
    j["config"] = config_to_json(model.config);
    j["input_length"] = model.input_length;
    j["channel_count"] = model.channel_count;
    j["prototypes_per_kernel"] = model.prototypes_per_kernel;

    json kernels = json::array();
    for (const Kernel& k : model.kernel_set.kernels)
        kernels.push_back({{"weights", k.weights},
                           {"bias", k.bias},
                           {"dilation", k.dilation},
                           {"padding", k.padding},
                           {"channel", k.channel}});
    j["kernels"] = std::move(kernels);

    json measures = json::array();
    for (const DistanceMeasure& m : model.measures) measures.push_back(measure_to_json(m));
    j["measures"] = std::move(measures);

    json protos = json::array();
    for (const PrototypeSet& set : model.prototypes)
        protos.push_back({{"sources", set.source_indices}, {"activations", set.activations}});
    j["prototypes"] = std::move(protos);

    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << j.dump();
    out.flush();
    if (!out) fail(ErrorCode::IoError, "short write to '" + path + "'");
}

PrototypeModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, "model file '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        if (j.value("format", "") != "sprocket-model")
            fail(ErrorCode::ModelMismatch, "'" + path + "' is not a model file");
        if (j.at("version").get<int>() != 1)
            fail(ErrorCode::ModelMismatch, "unsupported model version");

        PrototypeModel model;
        model.config = config_from_json(j.at("config"));
        model.input_length = j.at("input_length").get<std::size_t>();
        model.channel_count = j.at("channel_count").get<std::size_t>();
        model.prototypes_per_kernel = j.at("prototypes_per_kernel").get<std::size_t>();
        model.kernel_set.input_length = model.input_length;
        for (const json& kj : j.at("kernels")) {
            Kernel k;
            k.weights = kj.at("weights").get<std::vector<double>>();
            k.bias = kj.at("bias").get<double>();
            k.dilation = kj.at("dilation").get<std::uint32_t>();
            k.padding = kj.at("padding").get<std::uint32_t>();
            k.channel = kj.at("channel").get<std::uint32_t>();
            model.kernel_set.kernels.push_back(std::move(k));
        }
        for (const json& mj : j.at("measures")) model.measures.push_back(measure_from_json(mj));
        for (const json& pj : j.at("prototypes")) {
            PrototypeSet set;
            set.source_indices = pj.at("sources").get<std::vector<std::size_t>>();
            set.activations = pj.at("activations").get<std::vector<std::vector<double>>>();
            model.prototypes.push_back(std::move(set));
        }
        model.validate();
        return model;
    } catch (const json::exception& e) {
        fail(ErrorCode::ModelMismatch, "model file '" + path + "' is incomplete: " + e.what());
    }
}

}  // namespace sprocket
