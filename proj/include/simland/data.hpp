#ifndef SIMLAND_DATA_HPP
#define SIMLAND_DATA_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simland/matrix.hpp"

namespace simland {

enum class Task { regression, ordinal, ranking };

std::string_view to_string(Task t);
Task parse_task(std::string_view name);

struct Dataset {
    Matrix features;
    Vector targets;
    Task task = Task::regression;
    std::vector<std::string> groups;        // ranking: query id per row
    Vector label_values;                    // ordinal: original value of label i at [i-1]
    std::vector<std::size_t> row_ids;       // row index in the source file
    std::string source;
    std::vector<std::string> provenance;    // preprocessing log

    std::size_t size() const { return features.rows(); }
    Dataset select(std::span<const std::size_t> rows) const;
};

enum class HeaderMode { auto_detect, yes, no };

/**
 * Numeric CSV, last column the target. Under auto_detect the first row is
 * a header when any of its cells fails to parse as a number.
 */
Dataset load_csv(const std::string& path, HeaderMode header = HeaderMode::auto_detect);
Dataset parse_csv(std::istream& in, HeaderMode header, const std::string& source = "<stream>");
void write_csv(std::ostream& out, const Dataset& ds);

/** Ranking CSV: qid, f1..fd, rel. */
Dataset load_ranking_dataset(const std::string& path);

enum class FeatureScaling { zscore, none };
enum class TargetScaling { minmax01, none };

struct ScaleParams {
    FeatureScaling feature_mode = FeatureScaling::none;
    TargetScaling target_mode = TargetScaling::none;
    Vector mean;
    Vector stddev;
    double target_min = 0.0;
    double target_range = 0.0;
    std::vector<std::size_t> fitted_row_ids;  // rows the parameters were estimated from

    std::vector<double> apply_features(std::span<const double> x) const;
    double apply_target(double y) const;
    double invert_target(double y) const;
};

/** Fits on `train` only. Zero-variance columns map to 0; constant targets map to 0. */
ScaleParams fit_scale(const Dataset& train, FeatureScaling features, TargetScaling targets);
/** `role` is recorded in the provenance log ("train", "test", ...). */
Dataset apply_scale(const Dataset& ds, const ScaleParams& params, std::string_view role);
Vector invert_targets(std::span<const double> y, const ScaleParams& params);

/**
 * Equi-frequency binning into r ordinal labels. Edges sit at the empirical
 * k/r quantiles; empty bins (from ties) are dropped so labels stay
 * contiguous from 1.
 */
std::vector<int> equifreq_bin(std::span<const double> targets, int r);

/** Maps distinct target values to 1..r in increasing order; fills ds.label_values. */
void remap_labels(Dataset& ds);
std::vector<int> labels_of(const Dataset& ds);
int num_labels(const Dataset& ds);

/**
 * Disjoint, exhaustive random split with ceil(fraction * n) test rows.
 * Ranking datasets split by query id.
 */
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed);

/** Seeded generator; same seed, same stream. */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    /** Uniform integer in [0, n). */
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

enum class SeedPurpose : std::uint64_t { split = 1, landmarks = 2, kernel = 3, solver = 4, validation = 5 };

/** Sub-seed for one (split, purpose) cell; independent of execution order. */
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t split_index, SeedPurpose purpose);

} // namespace simland

#endif
