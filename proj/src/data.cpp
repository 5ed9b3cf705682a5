#include "simland/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "csv_util.hpp"
#include "simland/embedding.hpp"
#include "simland/errors.hpp"

namespace simland {

std::string_view to_string(Task t) {
    switch (t) {
    case Task::regression: return "regression";
    case Task::ordinal: return "ordinal";
    case Task::ranking: return "ranking";
    }
    return "unknown";
}

Task parse_task(std::string_view name) {
    if (name == "regression") return Task::regression;
    if (name == "ordinal") return Task::ordinal;
    if (name == "ranking") return Task::ranking;
    throw ConfigError("unknown task: " + std::string(name));
}

Dataset Dataset::select(std::span<const std::size_t> rows) const {
    Dataset out;
    out.features = features.select_rows(rows);
    out.task = task;
    out.label_values = label_values;
    out.source = source;
    out.provenance = provenance;
    for (auto i : rows) {
        out.targets.push_back(targets[i]);
        if (!groups.empty()) out.groups.push_back(groups[i]);
        out.row_ids.push_back(row_ids.empty() ? i : row_ids[i]);
    }
    return out;
}

namespace {

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;
};

bool all_numeric(const std::vector<std::string_view>& fields, std::size_t from) {
    for (std::size_t i = from; i < fields.size(); ++i) {
        if (!detail::parse_double(fields[i])) return false;
    }
    return true;
}

RawTable read_table(std::istream& in, HeaderMode header, std::size_t numeric_from, const std::string& source) {
    RawTable t;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        auto fields = detail::split_fields(line);
        if (first) {
            first = false;
            bool is_header = header == HeaderMode::yes ||
                             (header == HeaderMode::auto_detect && !all_numeric(fields, numeric_from));
            width = fields.size();
            if (is_header) {
                for (auto f : fields) t.header.emplace_back(f);
                continue;
            }
        }
        if (fields.size() != width) {
            throw DataError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(width) +
                            " columns, found " + std::to_string(fields.size()));
        }
        std::vector<std::string> row;
        for (auto f : fields) row.emplace_back(f);
        t.rows.push_back(std::move(row));
        t.lines.push_back(lineno);
    }
    if (t.rows.empty()) throw DataError(source + ": no data rows");
    return t;
}

double cell(const RawTable& t, std::size_t r, std::size_t c, const std::string& source) {
    auto v = detail::parse_double(t.rows[r][c]);
    if (!v) {
        throw DataError(source + ":" + std::to_string(t.lines[r]) + ": non-numeric value '" + t.rows[r][c] + "'");
    }
    if (!std::isfinite(*v)) throw DataError(source + ":" + std::to_string(t.lines[r]) + ": non-finite value");
    return *v;
}

} // namespace

Dataset parse_csv(std::istream& in, HeaderMode header, const std::string& source) {
    RawTable t = read_table(in, header, 0, source);
    const std::size_t width = t.rows.front().size();
    if (width < 2) throw DataError(source + ": need at least one feature column and a target column");
    Dataset ds;
    ds.source = source;
    ds.features = Matrix(t.rows.size(), width - 1);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c + 1 < width; ++c) ds.features(r, c) = cell(t, r, c, source);
        ds.targets.push_back(cell(t, r, width - 1, source));
        ds.row_ids.push_back(r);
    }
    ds.provenance.push_back("loaded " + std::to_string(ds.size()) + " rows x " + std::to_string(width - 1) +
                            " features from " + source + (t.header.empty() ? "" : " (header skipped)"));
    return ds;
}

Dataset load_csv(const std::string& path, HeaderMode header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return parse_csv(in, header, path);
}

void write_csv(std::ostream& out, const Dataset& ds) {
    for (std::size_t c = 0; c < ds.features.cols(); ++c) out << 'f' << c + 1 << ',';
    out << "target\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
        for (double v : ds.features.row(r)) out << detail::format_double(v) << ',';
        out << detail::format_double(ds.targets[r]) << '\n';
    }
}

Dataset load_ranking_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    RawTable t = read_table(in, HeaderMode::auto_detect, 1, path);
    const std::size_t width = t.rows.front().size();
    if (width < 3) throw DataError(path + ": ranking CSV needs qid, at least one feature and rel");
    Dataset ds;
    ds.task = Task::ranking;
    ds.source = path;
    ds.features = Matrix(t.rows.size(), width - 2);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        ds.groups.push_back(t.rows[r][0]);
        for (std::size_t c = 1; c + 1 < width; ++c) ds.features(r, c - 1) = cell(t, r, c, path);
        ds.targets.push_back(cell(t, r, width - 1, path));
        ds.row_ids.push_back(r);
    }
    double max_rel = *std::max_element(ds.targets.begin(), ds.targets.end());
    ds.provenance.push_back("loaded " + std::to_string(ds.size()) + " query-document rows from " + path);
    if (max_rel > 1.0) {
        for (double& v : ds.targets) v /= max_rel;
        ds.provenance.push_back("relevance divided by " + detail::format_double(max_rel));
    }
    return ds;
}

std::vector<double> ScaleParams::apply_features(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    if (feature_mode == FeatureScaling::zscore) {
        if (x.size() != mean.size()) throw DataError("scaling: feature count mismatch");
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] = stddev[j] > 0.0 ? (out[j] - mean[j]) / stddev[j] : 0.0;
        }
    }
    return out;
}

double ScaleParams::apply_target(double y) const {
    if (target_mode == TargetScaling::none) return y;
    return target_range > 0.0 ? (y - target_min) / target_range : 0.0;
}

double ScaleParams::invert_target(double y) const {
    if (target_mode == TargetScaling::none) return y;
    return target_range > 0.0 ? y * target_range + target_min : target_min;
}

ScaleParams fit_scale(const Dataset& train, FeatureScaling features, TargetScaling targets) {
    if (train.size() == 0) throw DataError("cannot fit scaling on an empty dataset");
    ScaleParams p;
    p.feature_mode = features;
    p.target_mode = targets;
    p.fitted_row_ids = train.row_ids;
    const std::size_t n = train.size();
    const std::size_t cols = train.features.cols();
    if (features == FeatureScaling::zscore) {
        p.mean.assign(cols, 0.0);
        p.stddev.assign(cols, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < cols; ++j) p.mean[j] += train.features(i, j);
        }
        for (double& m : p.mean) m /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                double d = train.features(i, j) - p.mean[j];
                p.stddev[j] += d * d;
            }
        }
        for (double& s : p.stddev) s = std::sqrt(s / static_cast<double>(n));
    }
    if (targets == TargetScaling::minmax01) {
        auto [lo, hi] = std::minmax_element(train.targets.begin(), train.targets.end());
        p.target_min = *lo;
        p.target_range = *hi - *lo;
    }
    return p;
}

Dataset apply_scale(const Dataset& ds, const ScaleParams& params, std::string_view role) {
    Dataset out = ds;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto row = params.apply_features(ds.features.row(i));
        std::copy(row.begin(), row.end(), out.features.row(i).begin());
        out.targets[i] = params.apply_target(ds.targets[i]);
    }
    out.provenance.push_back("scaled " + std::string(role) + " rows with parameters fitted on " +
                             std::to_string(params.fitted_row_ids.size()) + " rows");
    return out;
}

Vector invert_targets(std::span<const double> y, const ScaleParams& params) {
    Vector out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = params.invert_target(y[i]);
    return out;
}

std::vector<int> equifreq_bin(std::span<const double> targets, int r) {
    if (r < 2) throw ConfigError("equi-frequency binning needs at least two bins");
    const std::size_t n = targets.size();
    if (n < static_cast<std::size_t>(r)) throw DataError("fewer targets than bins");
    Vector sorted(targets.begin(), targets.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    if (static_cast<std::size_t>(r) > distinct) {
        throw DataError("cannot form " + std::to_string(r) + " bins from " + std::to_string(distinct) +
                        " distinct target values");
    }
    sorted.assign(targets.begin(), targets.end());
    std::sort(sorted.begin(), sorted.end());
    // edge k is the value at sorted position ceil(k n / r) - 1
    Vector edges;
    for (int k = 1; k < r; ++k) {
        std::size_t pos = (static_cast<std::size_t>(k) * n + static_cast<std::size_t>(r) - 1) / static_cast<std::size_t>(r);
        edges.push_back(sorted[pos - 1]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<int> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = 1 + static_cast<int>(std::lower_bound(edges.begin(), edges.end(), targets[i]) - edges.begin());
    }
    // drop empty bins
    std::set<int> used(raw.begin(), raw.end());
    std::map<int, int> compact;
    int next = 1;
    for (int v : used) compact[v] = next++;
    for (int& v : raw) v = compact[v];
    return raw;
}

void remap_labels(Dataset& ds) {
    Vector values = ds.targets;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (double& y : ds.targets) {
        y = static_cast<double>(std::lower_bound(values.begin(), values.end(), y) - values.begin() + 1);
    }
    ds.label_values = values;
    ds.provenance.push_back("remapped " + std::to_string(values.size()) + " distinct labels to 1.." +
                            std::to_string(values.size()));
}

std::vector<int> labels_of(const Dataset& ds) {
    std::vector<int> out;
    out.reserve(ds.size());
    for (double y : ds.targets) {
        if (y != std::floor(y) || y < 1.0) throw DataError("ordinal targets must be positive integers");
        out.push_back(static_cast<int>(y));
    }
    return out;
}

int num_labels(const Dataset& ds) {
    if (!ds.label_values.empty()) return static_cast<int>(ds.label_values.size());
    int r = 0;
    for (int y : labels_of(ds)) r = std::max(r, y);
    return r;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must lie in (0, 1)");
    auto test_count = [&](std::size_t n) {
        // guard against 0.3 * 10 = 3.0000000000000004
        return static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n) - 1e-9));
    };
    std::vector<std::size_t> train_rows, test_rows;
    if (ds.task == Task::ranking && !ds.groups.empty()) {
        std::vector<std::string> qids;
        std::map<std::string, std::size_t> seen;
        for (const auto& g : ds.groups) {
            if (seen.emplace(g, qids.size()).second) qids.push_back(g);
        }
        std::size_t n_test = test_count(qids.size());
        if (n_test == 0 || n_test >= qids.size()) throw DataError("split leaves one side without queries");
        auto chosen = sample_without_replacement(qids.size(), n_test, seed);
        std::vector<bool> is_test(qids.size(), false);
        for (auto c : chosen) is_test[c] = true;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            (is_test[seen[ds.groups[i]]] ? test_rows : train_rows).push_back(i);
        }
    } else {
        std::size_t n_test = test_count(ds.size());
        if (n_test == 0 || n_test >= ds.size()) throw DataError("split leaves one side empty");
        auto chosen = sample_without_replacement(ds.size(), n_test, seed);
        std::vector<bool> is_test(ds.size(), false);
        for (auto c : chosen) is_test[c] = true;
        for (std::size_t i = 0; i < ds.size(); ++i) (is_test[i] ? test_rows : train_rows).push_back(i);
    }
    Dataset train = ds.select(train_rows);
    Dataset test = ds.select(test_rows);
    train.provenance.push_back("train side of split seed " + std::to_string(seed));
    test.provenance.push_back("test side of split seed " + std::to_string(seed));
    return {std::move(train), std::move(test)};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t split_index, SeedPurpose purpose) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(base) ^ split_index) ^ static_cast<std::uint64_t>(purpose));
}

} // namespace simland
