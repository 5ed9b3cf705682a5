#ifndef SIMLAND_BENCH_HPP
#define SIMLAND_BENCH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "simland/data.hpp"
#include "simland/embedding.hpp"
#include "simland/similarity.hpp"
#include "simland/sparse_reg.hpp"

namespace simland {

enum class Method { kr, regland, regland_sp, orland, rank };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
/** Metric reported for a task: mse, aae or ndcg. */
std::string_view primary_metric(Task t);
bool method_supports(Method m, Task t);

/**
 * Declarative benchmark description. JSON keys mirror the field names;
 * see README for the full list.
 */
struct ExperimentConfig {
    std::string dataset;            // CSV path
    std::string name;               // label in result rows; defaults to the file stem
    Task task = Task::regression;
    SimilarityKind kernel = SimilarityKind::manhattan;
    std::map<std::string, double> kernel_params;   // empty = data-driven defaults
    std::string precomputed;        // Gram matrix CSV for kernel = precomputed
    std::vector<Method> methods;    // empty = every method the task supports
    std::vector<std::size_t> landmarks{5, 10, 20, 30, 40, 50};
    std::size_t num_splits = 5;
    double test_fraction = 0.3;
    std::uint64_t seed = 0;

    double norm_bound = 10.0;       // B
    bool select_norm_bound = false; // pick B from {0.1, 1, 10, 100} on a validation carve-out
    double epsilon = 0.01;
    double gamma = 0.25;
    double beta = 100.0;
    double c_w = 10.0;
    double fgs_tolerance = 1e-4;
    std::optional<std::size_t> sparsity; // k; defaults to the landmark count
    FgsVariant fgs_variant = FgsVariant::fully_corrective;
    FgsSurrogate fgs_surrogate = FgsSurrogate::squared;
    std::size_t iters = 2000;

    FeatureScaling feature_scaling = FeatureScaling::zscore;
    TargetScaling target_scaling = TargetScaling::minmax01;
    int bins = 0;                   // > 0: bin regression targets into ordinal labels
    bool double_dip = false;
    bool extra_metrics = false;     // ordinal: also report mislabel rate

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /** Sigmoid a = 1/p, r = -1; gaussian sigma = mean pairwise distance; 5 splits; 50 landmarks in the sweep. */
    void apply_paper_defaults();
    void validate() const;
    std::vector<Method> effective_methods() const;
    std::string display_name() const;
};

struct ResultRecord {
    std::string dataset;
    std::string kernel;
    std::string method;
    std::size_t landmarks = 0;
    std::size_t split = 0;
    std::string metric;
    double value = 0.0;

    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

struct BenchOutput {
    std::vector<ResultRecord> records;
    std::vector<std::string> warnings;
};

/**
 * For every split and landmark count: sample landmarks from the training
 * split (nested prefixes across the sweep), embed, fit each method and
 * score it on the test split. Cells run on up to `threads` workers; the
 * result depends only on the config and seed. Records are sorted by
 * (method, landmarks, split).
 */
BenchOutput run_bench(const ExperimentConfig& cfg, std::size_t threads = 1);
BenchOutput run_bench(const ExperimentConfig& cfg, const Dataset& data, std::size_t threads = 1);

/** Worker count from SIMLAND_THREADS, else hardware concurrency. */
std::size_t threads_from_env();

struct SummaryRow {
    std::string dataset;
    std::string kernel;
    std::string method;
    std::size_t landmarks = 0;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;   // n-1 denominator; 0 when count == 1
    std::size_t count = 0;
};

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records);

/** dataset,kernel,method,landmarks,split,metric,value */
void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
/**
 * One block per (dataset, kernel, method, metric): a "# ..." title line,
 * then "landmarks mean std" lines; blocks separated by a blank line.
 */
void write_plotdata(std::ostream& out, const std::vector<SummaryRow>& rows);

enum class EmitFormat { csv, plotdata };
EmitFormat parse_emit_format(std::string_view name);
/** Writes records (csv) or their summary (plotdata) to a file. Throws DataError if unwritable. */
void emit(const std::vector<ResultRecord>& records, const std::string& path, EmitFormat format);

} // namespace simland

#endif
