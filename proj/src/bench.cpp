#include "simland/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "csv_util.hpp"
#include "simland/baseline.hpp"
#include "simland/dense_reg.hpp"
#include "simland/errors.hpp"
#include "simland/loss.hpp"
#include "simland/ordinal.hpp"
#include "simland/ranking.hpp"

namespace simland {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::kr: return "kr";
    case Method::regland: return "regland";
    case Method::regland_sp: return "regland-sp";
    case Method::orland: return "orland";
    case Method::rank: return "rank";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (auto m : {Method::kr, Method::regland, Method::regland_sp, Method::orland, Method::rank}) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown method: " + std::string(name));
}

std::string_view primary_metric(Task t) {
    switch (t) {
    case Task::regression: return "mse";
    case Task::ordinal: return "aae";
    case Task::ranking: return "ndcg";
    }
    return "unknown";
}

bool method_supports(Method m, Task t) {
    switch (t) {
    case Task::regression: return m == Method::kr || m == Method::regland || m == Method::regland_sp;
    // regland / regland-sp on ordinal data regress onto slab centres and threshold
    case Task::ordinal:
        return m == Method::kr || m == Method::orland || m == Method::regland || m == Method::regland_sp;
    case Task::ranking: return m == Method::kr || m == Method::rank;
    }
    return false;
}

// ---------------------------------------------------------------------------
// configuration

namespace {

const std::set<std::string> kConfigKeys = {
    "dataset", "name", "task", "kernel", "kernel_params", "precomputed", "methods", "landmarks",
    "num_splits", "test_fraction", "seed", "B", "select_B", "epsilon", "gamma", "beta", "C_W",
    "fgs_tolerance", "k", "fgs_variant", "fgs_surrogate", "iters", "feature_scaling",
    "target_scaling", "bins", "double_dip", "extra_metrics", "paper_defaults"};

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!kConfigKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    ExperimentConfig c;
    if (j.contains("dataset")) c.dataset = get_as<std::string>(j, "dataset");
    if (j.contains("name")) c.name = get_as<std::string>(j, "name");
    if (j.contains("task")) c.task = parse_task(get_as<std::string>(j, "task"));
    if (j.contains("kernel")) c.kernel = parse_similarity_kind(get_as<std::string>(j, "kernel"));
    if (j.contains("kernel_params")) {
        const auto& kp = j.at("kernel_params");
        if (kp.is_string()) {
            if (kp.get<std::string>() != "auto") throw ConfigError("kernel_params must be an object or \"auto\"");
        } else {
            c.kernel_params = get_as<std::map<std::string, double>>(j, "kernel_params");
        }
    }
    if (j.contains("precomputed")) c.precomputed = get_as<std::string>(j, "precomputed");
    if (j.contains("methods")) {
        for (const auto& m : get_as<std::vector<std::string>>(j, "methods")) c.methods.push_back(parse_method(m));
    }
    if (j.contains("landmarks")) c.landmarks = get_as<std::vector<std::size_t>>(j, "landmarks");
    if (j.contains("num_splits")) c.num_splits = get_as<std::size_t>(j, "num_splits");
    if (j.contains("test_fraction")) c.test_fraction = get_as<double>(j, "test_fraction");
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed");
    if (j.contains("B")) c.norm_bound = get_as<double>(j, "B");
    if (j.contains("select_B")) c.select_norm_bound = get_as<bool>(j, "select_B");
    if (j.contains("epsilon")) c.epsilon = get_as<double>(j, "epsilon");
    if (j.contains("gamma")) c.gamma = get_as<double>(j, "gamma");
    if (j.contains("beta")) c.beta = get_as<double>(j, "beta");
    if (j.contains("C_W")) c.c_w = get_as<double>(j, "C_W");
    if (j.contains("fgs_tolerance")) c.fgs_tolerance = get_as<double>(j, "fgs_tolerance");
    if (j.contains("k") && !j.at("k").is_null()) c.sparsity = get_as<std::size_t>(j, "k");
    if (j.contains("fgs_variant")) c.fgs_variant = parse_fgs_variant(get_as<std::string>(j, "fgs_variant"));
    if (j.contains("fgs_surrogate")) c.fgs_surrogate = parse_fgs_surrogate(get_as<std::string>(j, "fgs_surrogate"));
    if (j.contains("iters")) c.iters = get_as<std::size_t>(j, "iters");
    if (j.contains("feature_scaling")) {
        auto v = get_as<std::string>(j, "feature_scaling");
        if (v == "zscore") c.feature_scaling = FeatureScaling::zscore;
        else if (v == "none") c.feature_scaling = FeatureScaling::none;
        else throw ConfigError("feature_scaling must be zscore or none");
    }
    if (j.contains("target_scaling")) {
        auto v = get_as<std::string>(j, "target_scaling");
        if (v == "minmax01") c.target_scaling = TargetScaling::minmax01;
        else if (v == "none") c.target_scaling = TargetScaling::none;
        else throw ConfigError("target_scaling must be minmax01 or none");
    }
    if (j.contains("bins")) c.bins = get_as<int>(j, "bins");
    if (j.contains("double_dip")) c.double_dip = get_as<bool>(j, "double_dip");
    if (j.contains("extra_metrics")) c.extra_metrics = get_as<bool>(j, "extra_metrics");
    if (j.contains("paper_defaults") && get_as<bool>(j, "paper_defaults")) c.apply_paper_defaults();
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["dataset"] = dataset;
    if (!name.empty()) j["name"] = name;
    j["task"] = std::string(to_string(task));
    j["kernel"] = std::string(to_string(kernel));
    if (kernel_params.empty()) j["kernel_params"] = "auto";
    else j["kernel_params"] = kernel_params;
    if (!precomputed.empty()) j["precomputed"] = precomputed;
    std::vector<std::string> ms;
    for (auto m : methods) ms.emplace_back(to_string(m));
    j["methods"] = ms;
    j["landmarks"] = landmarks;
    j["num_splits"] = num_splits;
    j["test_fraction"] = test_fraction;
    j["seed"] = seed;
    j["B"] = norm_bound;
    j["select_B"] = select_norm_bound;
    j["epsilon"] = epsilon;
    j["gamma"] = gamma;
    j["beta"] = beta;
    j["C_W"] = c_w;
    j["fgs_tolerance"] = fgs_tolerance;
    if (sparsity) j["k"] = *sparsity;
    j["fgs_variant"] = std::string(to_string(fgs_variant));
    j["fgs_surrogate"] = std::string(to_string(fgs_surrogate));
    j["iters"] = iters;
    j["feature_scaling"] = feature_scaling == FeatureScaling::zscore ? "zscore" : "none";
    j["target_scaling"] = target_scaling == TargetScaling::minmax01 ? "minmax01" : "none";
    j["bins"] = bins;
    j["double_dip"] = double_dip;
    j["extra_metrics"] = extra_metrics;
    return j;
}

void ExperimentConfig::apply_paper_defaults() {
    kernel_params.clear();
    num_splits = 5;
    if (std::find(landmarks.begin(), landmarks.end(), std::size_t{50}) == landmarks.end()) {
        landmarks.push_back(50);
        std::sort(landmarks.begin(), landmarks.end());
    }
    fgs_variant = FgsVariant::fully_corrective;
    fgs_surrogate = FgsSurrogate::squared;
}

std::vector<Method> ExperimentConfig::effective_methods() const {
    if (!methods.empty()) return methods;
    switch (task) {
    case Task::regression: return {Method::kr, Method::regland, Method::regland_sp};
    case Task::ordinal: return {Method::kr, Method::orland};
    case Task::ranking: return {Method::kr, Method::rank};
    }
    return {};
}

std::string ExperimentConfig::display_name() const {
    if (!name.empty()) return name;
    if (dataset.empty()) return "dataset";
    return std::filesystem::path(dataset).stem().string();
}

void ExperimentConfig::validate() const {
    if (landmarks.empty()) throw ConfigError("at least one landmark count is required");
    for (auto d : landmarks) {
        if (d == 0) throw ConfigError("landmark counts must be positive");
    }
    if (num_splits == 0) throw ConfigError("num_splits must be positive");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0, 1)");
    if (!(norm_bound > 0.0)) throw ConfigError("B must be positive");
    if (iters == 0) throw ConfigError("iters must be positive");
    LossParams{epsilon, beta, gamma, 1.0}.validate();
    FgsConfig{c_w, fgs_tolerance, beta, epsilon, sparsity, fgs_variant, fgs_surrogate, 200}.validate();
    if (bins == 1 || bins < 0) throw ConfigError("bins must be 0 (off) or at least 2");
    if (bins > 0 && task != Task::ordinal) throw ConfigError("bins only applies to the ordinal task");
    if (kernel == SimilarityKind::precomputed && precomputed.empty()) {
        throw ConfigError("kernel 'precomputed' needs a 'precomputed' matrix path");
    }
    for (auto m : effective_methods()) {
        if (!method_supports(m, task)) {
            throw ConfigError("method " + std::string(to_string(m)) + " does not apply to task " +
                              std::string(to_string(task)));
        }
    }
}

// ---------------------------------------------------------------------------
// benchmark

namespace {

const std::vector<double> kNormBoundGrid = {0.1, 1.0, 10.0, 100.0};

/** First d columns of an unscaled similarity matrix, in the requested normalization. */
Matrix take_columns(const Matrix& k, std::size_t d, Normalization n) {
    Matrix out(k.rows(), d);
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < k.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            out(i, j) = n == Normalization::scaled ? k(i, j) * s : k(i, j);
        }
    }
    return out;
}

double mse(std::span<const double> pred, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += squared(pred[i], y[i]);
    return s / static_cast<double>(y.size());
}

struct SplitOutput {
    std::vector<ResultRecord> records;
    std::vector<std::string> warnings;
};

class SplitRunner {
public:
    SplitRunner(const ExperimentConfig& cfg, const Dataset& data, std::shared_ptr<const Matrix> gram,
                std::size_t split_index)
        : cfg_(cfg), data_(data), gram_(std::move(gram)), split_(split_index) {}

    SplitOutput run();

private:
    void add(Method m, std::size_t d, std::string_view metric, double value) {
        if (!std::isfinite(value)) {
            throw NumericError(std::string(to_string(m)) + " produced a non-finite " + std::string(metric));
        }
        out_.records.push_back(ResultRecord{cfg_.display_name(), std::string(to_string(cfg_.kernel)),
                                            std::string(to_string(m)), d, split_, std::string(metric), value});
    }

    void add_ordinal(Method m, std::size_t d, std::span<const int> preds, std::span<const int> labels) {
        OrdinalErrors e = ordinal_errors(preds, labels);
        add(m, d, "aae", e.aae);
        if (cfg_.extra_metrics) add(m, d, "mislabel", e.mislabel);
    }

    std::uint64_t seed(SeedPurpose p) const { return derive_seed(cfg_.seed, split_, p); }

    SimilaritySpec make_spec(const Dataset& train) const {
        if (cfg_.kernel == SimilarityKind::precomputed) return SimilaritySpec::precomputed(gram_);
        if (cfg_.kernel_params.empty()) return default_params(cfg_.kernel, train.features, seed(SeedPurpose::kernel));
        return SimilaritySpec::make(cfg_.kernel, cfg_.kernel_params);
    }

    void run_kr(const Dataset& train, const Dataset& test, const SimilaritySpec& spec,
                const std::vector<std::size_t>& sweep);
    void run_cell(std::size_t d, const Dataset& labeled, const Dataset& test, const Embedder& full,
                  const Matrix& k_labeled, const Matrix& k_test);

    const ExperimentConfig& cfg_;
    const Dataset& data_;
    std::shared_ptr<const Matrix> gram_;
    std::size_t split_;
    SplitOutput out_;
    std::vector<Method> methods_;
};

void SplitRunner::run_kr(const Dataset& train, const Dataset& test, const SimilaritySpec& spec,
                         const std::vector<std::size_t>& sweep) {
    double mse_value = 0.0;
    std::vector<int> preds;
    double ndcg = 0.0;
    switch (cfg_.task) {
    case Task::regression: {
        KrModel kr(train.features, train.targets, spec);
        mse_value = mse(kr.predict_all(test.features), test.targets);
        break;
    }
    case Task::ordinal: {
        KrModel kr(train.features, train.targets, spec, num_labels(data_));
        for (double p : kr.predict_all(test.features)) preds.push_back(static_cast<int>(p));
        break;
    }
    case Task::ranking: {
        // KR on per-document eta targets, scored by NDCG
        Matrix x;
        Vector t;
        for (const auto& inst : make_instances(train)) {
            Vector eta;
            try {
                eta = eta_targets(inst.relevance);
            } catch (const DataError&) {
                continue;
            }
            for (std::size_t i = 0; i < inst.documents.rows(); ++i) {
                x.push_row(inst.documents.row(i));
                t.push_back(eta[i]);
            }
        }
        if (x.rows() == 0) throw DataError("no training query with positive gain");
        KrModel kr(std::move(x), std::move(t), spec);
        double total = 0.0;
        std::size_t used = 0;
        for (const auto& inst : make_instances(test)) {
            Vector scores = kr.predict_all(inst.documents);
            try {
                total += ndcg_loss(scores, inst.relevance);
                ++used;
            } catch (const DataError&) {
            }
        }
        if (used == 0) throw DataError("no test query with positive gain");
        ndcg = total / static_cast<double>(used);
        break;
    }
    }
    const auto labels = cfg_.task == Task::ordinal ? labels_of(test) : std::vector<int>{};
    for (auto d : sweep) {
        switch (cfg_.task) {
        case Task::regression: add(Method::kr, d, "mse", mse_value); break;
        case Task::ordinal: add_ordinal(Method::kr, d, preds, labels); break;
        case Task::ranking: add(Method::kr, d, "ndcg", ndcg); break;
        }
    }
}

void SplitRunner::run_cell(std::size_t d, const Dataset& labeled, const Dataset& test, const Embedder& full,
                           const Matrix& k_labeled, const Matrix& k_test) {
    SolverParams sp;
    sp.max_iters = cfg_.iters;
    sp.seed = seed(SeedPurpose::solver);
    const bool ordinal = cfg_.task == Task::ordinal;
    const auto test_labels = ordinal ? labels_of(test) : std::vector<int>{};
    const int r = ordinal ? num_labels(data_) : 0;
    const Vector thresholds = ordinal ? fixed_thresholds(r) : Vector{};

    // ordinal labels regress onto slab centres y - 1/2
    Vector y = labeled.targets;
    if (ordinal) {
        for (double& v : y) v -= 0.5;
    }

    auto score = [&](Method m, const Vector& pred) {
        if (ordinal) {
            std::vector<int> labels;
            for (double f : pred) labels.push_back(label_for_score(f, thresholds));
            add_ordinal(m, d, labels, test_labels);
        } else {
            add(m, d, "mse", mse(pred, test.targets));
        }
    };

    for (Method m : methods_) {
        switch (m) {
        case Method::kr: break;
        case Method::regland: {
            Matrix xtr = take_columns(k_labeled, d, Normalization::scaled);
            LinearModel model = cfg_.select_norm_bound
                                    ? fit_dense_select(xtr, y, kNormBoundGrid, cfg_.epsilon, sp)
                                    : fit_dense(xtr, y, cfg_.norm_bound, cfg_.epsilon, sp);
            score(m, predict_all(model, take_columns(k_test, d, Normalization::scaled)));
            break;
        }
        case Method::regland_sp: {
            FgsConfig fc;
            fc.c_w = cfg_.c_w;
            fc.tolerance = cfg_.fgs_tolerance;
            fc.beta = cfg_.beta;
            fc.tube = cfg_.epsilon;
            fc.max_sparsity = cfg_.sparsity.value_or(d);
            fc.variant = cfg_.fgs_variant;
            fc.surrogate = cfg_.fgs_surrogate;
            FgsResult fit = fit_fgs(take_columns(k_labeled, d, Normalization::unscaled), y, fc);
            score(m, predict_all(fit.model, take_columns(k_test, d, Normalization::unscaled)));
            break;
        }
        case Method::orland: {
            OrdinalModel model = fit_ordinal(take_columns(k_labeled, d, Normalization::scaled), labels_of(labeled), r,
                                             cfg_.norm_bound, cfg_.gamma, sp);
            Matrix xte = take_columns(k_test, d, Normalization::scaled);
            std::vector<int> preds;
            for (std::size_t i = 0; i < xte.rows(); ++i) preds.push_back(predict_label(model, xte.row(i)));
            add_ordinal(m, d, preds, test_labels);
            break;
        }
        case Method::rank: {
            Embedder emb = full.prefix(d).with_normalization(Normalization::scaled);
            auto train_inst = make_instances(labeled);
            auto test_inst = make_instances(test);
            RankerFit fit = fit_ranker(train_inst, emb, cfg_.norm_bound, sp);
            if (fit.skipped > 0) {
                out_.warnings.push_back("split " + std::to_string(split_) + ": skipped " +
                                        std::to_string(fit.skipped) + " training queries with zero gain");
            }
            add(m, d, "ndcg", eval_ranking(fit.model, test_inst, emb));
            break;
        }
        }
    }
}

SplitOutput SplitRunner::run() {
    methods_ = cfg_.effective_methods();
    auto [train, test] = split(data_, cfg_.test_fraction, seed(SeedPurpose::split));

    const bool precomputed = cfg_.kernel == SimilarityKind::precomputed;
    FeatureScaling fs = precomputed ? FeatureScaling::none : cfg_.feature_scaling;
    TargetScaling ts = cfg_.task == Task::regression ? cfg_.target_scaling : TargetScaling::none;
    ScaleParams scale = fit_scale(train, fs, ts);
    train = apply_scale(train, scale, "train");
    test = apply_scale(test, scale, "test");

    SimilaritySpec spec = make_spec(train);

    // a labeled remainder must survive unless landmarks double as examples
    const std::size_t capacity = cfg_.double_dip ? train.size() : train.size() - 1;
    std::vector<std::size_t> sweep;
    for (auto d : cfg_.landmarks) {
        if (d > capacity) {
            out_.warnings.push_back("split " + std::to_string(split_) + ": skipped " + std::to_string(d) +
                                    " landmarks (only " + std::to_string(capacity) + " available)");
        } else {
            sweep.push_back(d);
        }
    }
    if (sweep.empty()) return std::move(out_);
    const std::size_t max_d = *std::max_element(sweep.begin(), sweep.end());

    if (std::find(methods_.begin(), methods_.end(), Method::kr) != methods_.end()) {
        run_kr(train, test, spec, sweep);
    }
    if (std::all_of(methods_.begin(), methods_.end(), [](Method m) { return m == Method::kr; })) {
        return std::move(out_);
    }

    const LandmarkMode mode = cfg_.double_dip ? LandmarkMode::double_dip : LandmarkMode::unlabeled_pool;
    Embedder full = select_landmarks(train.features, max_d, mode, seed(SeedPurpose::landmarks), spec,
                                     Normalization::unscaled);
    Dataset labeled = train;
    if (!cfg_.double_dip) {
        std::vector<bool> in_pool(train.size(), false);
        for (auto i : full.pool_indices()) in_pool[i] = true;
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (!in_pool[i]) rest.push_back(i);
        }
        labeled = train.select(rest);
    }
    Matrix k_labeled = full.embed_all(labeled.features);
    Matrix k_test = full.embed_all(test.features);
    for (auto d : sweep) run_cell(d, labeled, test, full, k_labeled, k_test);
    return std::move(out_);
}

Dataset prepare(const ExperimentConfig& cfg, const Dataset& raw) {
    Dataset data = raw;
    data.task = cfg.task;
    if (cfg.task == Task::ordinal) {
        if (cfg.bins > 0) {
            auto labels = equifreq_bin(data.targets, cfg.bins);
            for (std::size_t i = 0; i < labels.size(); ++i) data.targets[i] = labels[i];
            data.provenance.push_back("equi-frequency binned targets into " + std::to_string(cfg.bins) + " labels");
        }
        remap_labels(data);
        if (num_labels(data) < 2) throw DataError("ordinal task needs at least two distinct labels");
    }
    if (cfg.task == Task::ranking && data.groups.size() != data.size()) {
        throw DataError("ranking task needs query ids");
    }
    return data;
}

} // namespace

BenchOutput run_bench(const ExperimentConfig& cfg, const Dataset& raw, std::size_t threads) {
    cfg.validate();
    const Dataset data = prepare(cfg, raw);
    std::shared_ptr<const Matrix> gram;
    if (cfg.kernel == SimilarityKind::precomputed) gram = load_precomputed_csv(cfg.precomputed);

    std::vector<SplitOutput> outputs(cfg.num_splits);
    std::vector<std::exception_ptr> errors(cfg.num_splits);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t s = next++; s < cfg.num_splits; s = next++) {
            try {
                outputs[s] = SplitRunner(cfg, data, gram, s).run();
            } catch (...) {
                errors[s] = std::current_exception();
            }
        }
    };
    const std::size_t n_workers = std::clamp<std::size_t>(threads, 1, cfg.num_splits);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    BenchOutput out;
    for (auto& o : outputs) {
        out.records.insert(out.records.end(), o.records.begin(), o.records.end());
        out.warnings.insert(out.warnings.end(), o.warnings.begin(), o.warnings.end());
    }
    std::stable_sort(out.records.begin(), out.records.end(), [](const ResultRecord& a, const ResultRecord& b) {
        return std::tie(a.method, a.landmarks, a.split, a.metric) < std::tie(b.method, b.landmarks, b.split, b.metric);
    });
    return out;
}

BenchOutput run_bench(const ExperimentConfig& cfg, std::size_t threads) {
    cfg.validate();
    if (cfg.dataset.empty()) throw ConfigError("no dataset given");
    Dataset raw = cfg.task == Task::ranking ? load_ranking_dataset(cfg.dataset) : load_csv(cfg.dataset);
    return run_bench(cfg, raw, threads);
}

std::size_t threads_from_env() {
    if (const char* v = std::getenv("SIMLAND_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
        throw ConfigError("SIMLAND_THREADS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// summaries and output

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records) {
    using Key = std::tuple<std::string, std::string, std::string, std::size_t, std::string>;
    std::map<Key, std::vector<double>> groups;
    for (const auto& r : records) groups[{r.dataset, r.kernel, r.method, r.landmarks, r.metric}].push_back(r.value);
    std::vector<SummaryRow> out;
    for (const auto& [key, values] : groups) {
        SummaryRow row;
        std::tie(row.dataset, row.kernel, row.method, row.landmarks, row.metric) = key;
        row.count = values.size();
        double sum = 0.0;
        for (double v : values) sum += v;
        row.mean = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - row.mean) * (v - row.mean);
            row.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
        out.push_back(row);
    }
    return out;
}

void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
    out << "dataset,kernel,method,landmarks,split,metric,value\n";
    for (const auto& r : records) {
        out << r.dataset << ',' << r.kernel << ',' << r.method << ',' << r.landmarks << ',' << r.split << ','
            << r.metric << ',' << detail::format_double(r.value) << '\n';
    }
}

std::vector<ResultRecord> read_records_csv(std::istream& in) {
    std::vector<ResultRecord> out;
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "dataset,kernel,method,landmarks,split,metric,value") {
        throw DataError("results CSV: unexpected header");
    }
    while (std::getline(in, line)) {
        if (detail::blank(line)) continue;
        auto f = detail::split_fields(line);
        if (f.size() != 7) throw DataError("results CSV: expected 7 fields");
        auto landmarks = detail::parse_double(f[3]);
        auto split_index = detail::parse_double(f[4]);
        auto value = detail::parse_double(f[6]);
        if (!landmarks || !split_index || !value) throw DataError("results CSV: bad numeric field");
        out.push_back(ResultRecord{std::string(f[0]), std::string(f[1]), std::string(f[2]),
                                   static_cast<std::size_t>(*landmarks), static_cast<std::size_t>(*split_index),
                                   std::string(f[5]), *value});
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "dataset,kernel,method,landmarks,metric,mean,std,n\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.kernel << ',' << r.method << ',' << r.landmarks << ',' << r.metric << ','
            << detail::format_double(r.mean) << ',' << detail::format_double(r.stddev) << ',' << r.count << '\n';
    }
}

void write_plotdata(std::ostream& out, const std::vector<SummaryRow>& rows) {
    using Key = std::tuple<std::string, std::string, std::string, std::string>;
    std::map<Key, std::vector<const SummaryRow*>> curves;
    for (const auto& r : rows) curves[{r.dataset, r.kernel, r.method, r.metric}].push_back(&r);
    bool first = true;
    for (auto& [key, points] : curves) {
        if (!first) out << '\n';
        first = false;
        const auto& [dataset, kernel, method, metric] = key;
        out << "# dataset=" << dataset << " kernel=" << kernel << " method=" << method << " metric=" << metric << '\n';
        std::sort(points.begin(), points.end(), [](auto* a, auto* b) { return a->landmarks < b->landmarks; });
        for (const auto* p : points) {
            out << p->landmarks << ' ' << detail::format_double(p->mean) << ' ' << detail::format_double(p->stddev)
                << '\n';
        }
    }
}

EmitFormat parse_emit_format(std::string_view name) {
    if (name == "csv") return EmitFormat::csv;
    if (name == "plotdata") return EmitFormat::plotdata;
    throw ConfigError("unknown output format: " + std::string(name));
}

void emit(const std::vector<ResultRecord>& records, const std::string& path, EmitFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    if (format == EmitFormat::csv) {
        write_records_csv(out, records);
    } else {
        write_plotdata(out, summarize(records));
    }
    out.flush();
    if (!out) throw DataError("failed writing " + path);
}

} // namespace simland
