// simland: train, predict, evaluate and benchmark similarity-landmark learners.
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 numeric failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "simland/baseline.hpp"
#include "simland/bench.hpp"
#include "simland/data.hpp"
#include "simland/dense_reg.hpp"
#include "simland/errors.hpp"
#include "simland/ordinal.hpp"
#include "simland/ranking.hpp"
#include "simland/sparse_reg.hpp"

using namespace simland;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kData = 2, kNumeric = 3 };

struct CommonOptions {
    std::string config_path;
    std::string data;
    std::string task;
    std::string kernel;
    std::optional<std::uint64_t> seed;
    bool paper_defaults = false;
};

ExperimentConfig load_config(const CommonOptions& o) {
    json j = json::object();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw ConfigError("cannot open config " + o.config_path);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError("config " + o.config_path + ": " + e.what());
        }
    }
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    if (!o.data.empty()) cfg.dataset = o.data;
    if (!o.task.empty()) cfg.task = parse_task(o.task);
    if (!o.kernel.empty()) cfg.kernel = parse_similarity_kind(o.kernel);
    if (o.seed) cfg.seed = *o.seed;
    if (o.paper_defaults) cfg.apply_paper_defaults();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON config file (flat keys)");
    cmd->add_option("--data", o.data, "dataset CSV (overrides config)");
    cmd->add_option("--task", o.task, "regression | ordinal | ranking");
    cmd->add_option("--kernel", o.kernel, "sigmoid | manhattan | gaussian | euclidean | linear | precomputed");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_flag("--paper-defaults", o.paper_defaults,
                  "sigmoid a=1/p r=-1, gaussian sigma=mean pairwise distance, 5 splits, 50 landmarks");
}

Dataset load_for(const ExperimentConfig& cfg, const std::string& path) {
    return cfg.task == Task::ranking ? load_ranking_dataset(path) : load_csv(path);
}

// ---------------------------------------------------------------------------
// pipeline bundle: the model file plus <model>.pipeline.json holding the
// landmarks, similarity, scaling and label values needed to predict

json spec_to_json(const SimilaritySpec& spec, const std::string& gram_path) {
    json j;
    j["kind"] = std::string(to_string(spec.kind()));
    j["params"] = spec.params();
    if (!gram_path.empty()) j["precomputed"] = gram_path;
    return j;
}

struct Pipeline {
    Task task = Task::regression;
    Method method = Method::regland;
    std::shared_ptr<Embedder> embedder;
    ScaleParams scale;
    Vector label_values;
};

void write_pipeline(const std::string& model_path, const Pipeline& p, const std::string& gram_path) {
    json j;
    j["format"] = "simland-pipeline v1";
    j["task"] = std::string(to_string(p.task));
    j["method"] = std::string(to_string(p.method));
    j["similarity"] = spec_to_json(p.embedder->spec(), gram_path);
    j["normalization"] = std::string(to_string(p.embedder->normalization()));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < p.embedder->dim(); ++i) {
        auto r = p.embedder->landmarks().row(i);
        rows.emplace_back(r.begin(), r.end());
    }
    j["landmarks"] = rows;
    j["scale"] = {{"features", p.scale.feature_mode == FeatureScaling::zscore ? "zscore" : "none"},
                  {"targets", p.scale.target_mode == TargetScaling::minmax01 ? "minmax01" : "none"},
                  {"mean", p.scale.mean},
                  {"stddev", p.scale.stddev},
                  {"target_min", p.scale.target_min},
                  {"target_range", p.scale.target_range}};
    j["label_values"] = p.label_values;
    std::ofstream out(model_path + ".pipeline.json");
    if (!out) throw DataError("cannot write " + model_path + ".pipeline.json");
    out << j.dump(1) << '\n';
}

Pipeline read_pipeline(const std::string& model_path) {
    std::ifstream in(model_path + ".pipeline.json");
    if (!in) throw DataError("missing " + model_path + ".pipeline.json");
    json j;
    try {
        in >> j;
        Pipeline p;
        if (j.at("format") != "simland-pipeline v1") throw DataError("unsupported pipeline format");
        p.task = parse_task(j.at("task").get<std::string>());
        p.method = parse_method(j.at("method").get<std::string>());
        const auto& sj = j.at("similarity");
        auto kind = parse_similarity_kind(sj.at("kind").get<std::string>());
        std::shared_ptr<const Matrix> gram;
        if (kind == SimilarityKind::precomputed) gram = load_precomputed_csv(sj.at("precomputed").get<std::string>());
        auto spec = SimilaritySpec::make(kind, sj.at("params").get<std::map<std::string, double>>(), gram);
        Matrix landmarks = Matrix::from_rows(j.at("landmarks").get<std::vector<Vector>>());
        p.embedder = std::make_shared<Embedder>(spec, std::move(landmarks),
                                                parse_normalization(j.at("normalization").get<std::string>()));
        const auto& s = j.at("scale");
        p.scale.feature_mode = s.at("features") == "zscore" ? FeatureScaling::zscore : FeatureScaling::none;
        p.scale.target_mode = s.at("targets") == "minmax01" ? TargetScaling::minmax01 : TargetScaling::none;
        p.scale.mean = s.at("mean").get<Vector>();
        p.scale.stddev = s.at("stddev").get<Vector>();
        p.scale.target_min = s.at("target_min").get<double>();
        p.scale.target_range = s.at("target_range").get<double>();
        p.label_values = j.at("label_values").get<Vector>();
        return p;
    } catch (const json::exception& e) {
        throw DataError(model_path + ".pipeline.json: " + e.what());
    }
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
    CommonOptions common;
    std::string method = "regland";
    std::size_t landmarks = 50;
    std::string out;
    std::string trace;
};

int run_train(const TrainOptions& o) {
    ExperimentConfig cfg = load_config(o.common);
    Method method = parse_method(o.method);
    cfg.methods = {method};
    cfg.validate();
    if (method == Method::kr) throw ConfigError("kr keeps the training set; use bench or eval instead of train");
    if (cfg.dataset.empty()) throw ConfigError("no dataset given");
    if (o.out.empty()) throw ConfigError("--out is required");

    Dataset data = load_for(cfg, cfg.dataset);
    data.task = cfg.task;
    if (cfg.task == Task::ordinal) {
        if (cfg.bins > 0) {
            auto labels = equifreq_bin(data.targets, cfg.bins);
            for (std::size_t i = 0; i < labels.size(); ++i) data.targets[i] = labels[i];
        }
        remap_labels(data);
    }
    const bool precomputed = cfg.kernel == SimilarityKind::precomputed;
    Pipeline p;
    p.task = cfg.task;
    p.method = method;
    p.scale = fit_scale(data, precomputed ? FeatureScaling::none : cfg.feature_scaling,
                        cfg.task == Task::regression ? cfg.target_scaling : TargetScaling::none);
    data = apply_scale(data, p.scale, "train");
    p.label_values = data.label_values;

    std::shared_ptr<const Matrix> gram;
    if (precomputed) gram = load_precomputed_csv(cfg.precomputed);
    SimilaritySpec spec = precomputed ? SimilaritySpec::precomputed(gram)
                          : cfg.kernel_params.empty()
                              ? default_params(cfg.kernel, data.features, derive_seed(cfg.seed, 0, SeedPurpose::kernel))
                              : SimilaritySpec::make(cfg.kernel, cfg.kernel_params);
    const Normalization norm = method == Method::regland_sp ? Normalization::unscaled : Normalization::scaled;
    const LandmarkMode mode = cfg.double_dip ? LandmarkMode::double_dip : LandmarkMode::unlabeled_pool;
    if (o.landmarks > data.size()) throw ConfigError("more landmarks than data points");
    Embedder emb = select_landmarks(data.features, o.landmarks, mode,
                                    derive_seed(cfg.seed, 0, SeedPurpose::landmarks), spec, norm);
    p.embedder = std::make_shared<Embedder>(emb);

    // in the default mode landmark rows do not double as labeled examples
    Dataset labeled = data;
    if (!cfg.double_dip) {
        std::vector<bool> used(data.size(), false);
        for (auto i : emb.pool_indices()) used[i] = true;
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (!used[i]) rest.push_back(i);
        }
        if (rest.empty()) throw ConfigError("no labeled rows left after taking landmarks; use double_dip");
        labeled = data.select(rest);
    }

    SolverParams sp;
    sp.max_iters = cfg.iters;
    sp.seed = derive_seed(cfg.seed, 0, SeedPurpose::solver);
    std::ofstream out(o.out);
    if (!out) throw DataError("cannot write " + o.out);
    Vector y = labeled.targets;
    if (cfg.task == Task::ordinal) {
        for (double& v : y) v -= 0.5;
    }
    switch (method) {
    case Method::regland: {
        Matrix x = emb.embed_all(labeled.features);
        std::vector<double> grid{0.1, 1.0, 10.0, 100.0};
        LinearModel m = cfg.select_norm_bound ? fit_dense_select(x, y, grid, cfg.epsilon, sp)
                                              : fit_dense(x, y, cfg.norm_bound, cfg.epsilon, sp);
        write_linear(out, m);
        std::cerr << "regland: objective " << m.diagnostics.objective << " after " << m.diagnostics.iterations
                  << " iterations\n";
        break;
    }
    case Method::regland_sp: {
        FgsConfig fc;
        fc.c_w = cfg.c_w;
        fc.tolerance = cfg.fgs_tolerance;
        fc.beta = cfg.beta;
        fc.tube = cfg.epsilon;
        fc.max_sparsity = cfg.sparsity.value_or(o.landmarks);
        fc.variant = cfg.fgs_variant;
        fc.surrogate = cfg.fgs_surrogate;
        FgsResult fit = fit_fgs(emb.embed_all(labeled.features), y, fc);
        write_linear(out, fit.model);
        if (!o.trace.empty()) {
            std::ofstream t(o.trace);
            if (!t) throw DataError("cannot write " + o.trace);
            write_trace_csv(t, fit.trace);
        }
        std::cerr << "regland-sp: " << sparsity(fit.model) << " nonzero weights, final gap " << fit.trace.final_delta
                  << '\n';
        break;
    }
    case Method::orland: {
        OrdinalModel m = fit_ordinal(emb.embed_all(labeled.features), labels_of(labeled), num_labels(labeled),
                                     cfg.norm_bound, cfg.gamma, sp);
        write_ordinal(out, m);
        std::cerr << "orland: objective " << m.linear.diagnostics.objective << '\n';
        break;
    }
    case Method::rank: {
        RankerFit fit = fit_ranker(make_instances(labeled), emb, cfg.norm_bound, sp);
        write_linear(out, fit.model);
        if (fit.skipped) std::cerr << "rank: skipped " << fit.skipped << " queries with zero gain\n";
        break;
    }
    case Method::kr: break;
    }
    out.flush();
    if (!out) throw DataError("failed writing " + o.out);
    write_pipeline(o.out, p, cfg.precomputed);
    return kOk;
}

// ---------------------------------------------------------------------------
// predict / eval

struct Predictions {
    Pipeline pipeline;
    Dataset data;        // scaled
    Vector scores;       // raw model output
    std::vector<int> labels;  // ordinal predictions (1..r)
    std::optional<OrdinalModel> ordinal;
};

Predictions predict_file(const std::string& model_path, const std::string& data_path) {
    Predictions p;
    p.pipeline = read_pipeline(model_path);
    ExperimentConfig tmp;
    tmp.task = p.pipeline.task;
    p.data = load_for(tmp, data_path);
    p.data = apply_scale(p.data, p.pipeline.scale, "predict");
    std::ifstream in(model_path);
    if (!in) throw DataError("cannot open " + model_path);
    LinearModel linear;
    if (p.pipeline.method == Method::orland) {
        p.ordinal = read_ordinal(in);
        linear = p.ordinal->linear;
    } else {
        linear = read_linear(in);
    }
    if (linear.dim() != p.pipeline.embedder->dim()) throw DataError("model and landmark dimensions differ");
    Matrix x = p.pipeline.embedder->embed_all(p.data.features);
    p.scores = predict_all(linear, x);
    if (p.pipeline.task == Task::ordinal) {
        Vector b = p.ordinal ? p.ordinal->thresholds : fixed_thresholds(static_cast<int>(p.pipeline.label_values.size()));
        for (double f : p.scores) p.labels.push_back(label_for_score(f, b));
    }
    return p;
}

int run_predict(const std::string& model, const std::string& data, const std::string& out_path) {
    Predictions p = predict_file(model, data);
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cannot write " + out_path);
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    out << "prediction\n";
    for (std::size_t i = 0; i < p.scores.size(); ++i) {
        if (p.pipeline.task == Task::ordinal) {
            out << p.pipeline.label_values.at(static_cast<std::size_t>(p.labels[i] - 1)) << '\n';
        } else if (p.pipeline.task == Task::regression) {
            out << std::setprecision(17) << p.pipeline.scale.invert_target(p.scores[i]) << '\n';
        } else {
            out << std::setprecision(17) << p.scores[i] << '\n';
        }
    }
    return kOk;
}

int run_eval(const std::string& model, const std::string& data) {
    Predictions p = predict_file(model, data);
    json report;
    switch (p.pipeline.task) {
    case Task::regression: {
        double mse = 0.0;
        for (std::size_t i = 0; i < p.scores.size(); ++i) mse += (p.scores[i] - p.data.targets[i]) * (p.scores[i] - p.data.targets[i]);
        report["mse"] = mse / static_cast<double>(p.scores.size());
        break;
    }
    case Task::ordinal: {
        // map raw file labels onto the trained label index
        std::vector<int> truth;
        for (double y : p.data.targets) {
            auto it = std::find(p.pipeline.label_values.begin(), p.pipeline.label_values.end(), y);
            if (it == p.pipeline.label_values.end()) throw DataError("label not seen during training");
            truth.push_back(static_cast<int>(it - p.pipeline.label_values.begin()) + 1);
        }
        auto e = ordinal_errors(p.labels, truth);
        report["aae"] = e.aae;
        report["mislabel"] = e.mislabel;
        break;
    }
    case Task::ranking: {
        double total = 0.0;
        std::size_t used = 0;
        std::size_t start = 0;
        auto instances = make_instances(p.data);
        for (const auto& inst : instances) {
            std::span<const double> s(p.scores.data() + start, inst.relevance.size());
            start += inst.relevance.size();
            try {
                total += ndcg_loss(s, inst.relevance);
                ++used;
            } catch (const DataError&) {
            }
        }
        if (used == 0) throw DataError("no query with positive gain");
        report["ndcg"] = total / static_cast<double>(used);
        break;
    }
    }
    std::cout << report.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
    CommonOptions common;
    std::string out;
    std::string format = "csv";
    std::string summary;
};

int run_bench_cmd(const BenchOptions& o) {
    ExperimentConfig cfg = load_config(o.common);
    EmitFormat fmt = parse_emit_format(o.format);
    std::size_t threads = threads_from_env();
    BenchOutput result = run_bench(cfg, threads);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    if (o.out.empty()) {
        if (fmt == EmitFormat::csv) write_records_csv(std::cout, result.records);
        else write_plotdata(std::cout, summarize(result.records));
    } else {
        emit(result.records, o.out, fmt);
    }
    if (!o.summary.empty()) {
        std::ofstream s(o.summary);
        if (!s) throw DataError("cannot write " + o.summary);
        write_summary_csv(s, summarize(result.records));
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simland: learning with indefinite similarity functions via landmarks"};
    app.require_subcommand(1);

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "run a landmark sweep over random splits");
    add_common(bench_cmd, bench.common);
    bench_cmd->add_option("--out", bench.out, "output file (stdout when omitted)");
    bench_cmd->add_option("--format", bench.format, "csv | plotdata");
    bench_cmd->add_option("--summary", bench.summary, "also write mean/std summary CSV here");

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "fit one model on a whole dataset");
    add_common(train_cmd, train.common);
    train_cmd->add_option("--method", train.method, "regland | regland-sp | orland | rank");
    train_cmd->add_option("--landmarks", train.landmarks, "landmark count");
    train_cmd->add_option("--out", train.out, "model file")->required();
    train_cmd->add_option("--trace", train.trace, "regland-sp: write the greedy-selection trace CSV here");
    std::string format_unused;
    train_cmd->add_option("--format", format_unused, "ignored; models use the simland text format");

    std::string model, data, out;
    auto* predict_cmd = app.add_subcommand("predict", "predict with a trained model");
    predict_cmd->add_option("--model", model, "model file")->required();
    predict_cmd->add_option("--data", data, "CSV to predict on (target column required, may be dummy)")->required();
    predict_cmd->add_option("--out", out, "output CSV (stdout when omitted)");

    auto* eval_cmd = app.add_subcommand("eval", "score a trained model on a labeled CSV");
    eval_cmd->add_option("--model", model, "model file")->required();
    eval_cmd->add_option("--data", data, "labeled CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*bench_cmd) return run_bench_cmd(bench);
        if (*train_cmd) return run_train(train);
        if (*predict_cmd) return run_predict(model, data, out);
        if (*eval_cmd) return run_eval(model, data);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kOk;
}
