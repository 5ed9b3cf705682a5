#include "simland/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simland/errors.hpp"
#include "subgradient.hpp"

namespace simland {

double gain(double rel) { return std::exp2(rel) - 1.0; }

double decay(std::size_t position) {
    if (position < 1) throw ConfigError("decay: positions start at 1");
    return std::log1p(static_cast<double>(position));
}

double d_norm(std::span<const double> v) {
    Vector sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double total = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) total += sorted[i] / decay(i + 1);
    return total;
}

namespace {

Vector gains(std::span<const double> relevance) {
    Vector g(relevance.size());
    std::transform(relevance.begin(), relevance.end(), g.begin(), gain);
    return g;
}

bool has_gain(std::span<const double> g) {
    return std::any_of(g.begin(), g.end(), [](double v) { return v != 0.0; });
}

} // namespace

Vector eta_targets(std::span<const double> relevance) {
    Vector g = gains(relevance);
    if (!has_gain(g)) throw DataError("ranking targets undefined: every gain is zero");
    double norm = d_norm(g);
    for (double& v : g) v /= norm;
    return g;
}

double ndcg_loss(std::span<const double> scores, std::span<const double> relevance) {
    if (scores.size() != relevance.size()) throw DataError("ndcg: score and relevance lengths differ");
    Vector g = gains(relevance);
    if (!has_gain(g)) throw DataError("ndcg undefined: every gain is zero");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double dcg = 0.0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) dcg += g[order[pos]] / decay(pos + 1);
    return -dcg / d_norm(g);
}

RankerFit fit_ranker(std::span<const RankingInstance> instances, const Embedder& embedder, double norm_bound,
                     const SolverParams& params) {
    if (instances.empty()) throw DataError("no ranking instances");
    if (!(norm_bound > 0.0) || !std::isfinite(norm_bound)) throw ConfigError("norm bound B must be positive");
    RankerFit fit;
    Matrix x;
    Vector t;
    for (const auto& inst : instances) {
        if (inst.documents.rows() != inst.relevance.size()) throw DataError("instance " + inst.qid + ": size mismatch");
        if (!has_gain(gains(inst.relevance))) {
            ++fit.skipped;
            continue;
        }
        Vector eta = eta_targets(inst.relevance);
        Matrix z = embedder.embed_all(inst.documents);
        for (std::size_t i = 0; i < z.rows(); ++i) {
            x.push_row(z.row(i));
            t.push_back(eta[i]);
        }
    }
    if (x.rows() == 0) throw DataError("every ranking instance has zero total gain");
    detail::require_finite(x, t);

    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    double mean_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = norm2(x.row(i));
        mean_sq += r * r;
    }
    mean_sq /= static_cast<double>(n);

    LinearModel& m = fit.model;
    m.norm_bound = norm_bound;
    m.w.assign(d, 0.0);
    auto objective = [&](const Vector& w, Vector* grad) {
        if (grad) std::fill(grad->begin(), grad->end(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto xi = x.row(i);
            double r = dot(w, xi) - t[i];
            total += r * r;
            if (grad) {
                for (std::size_t j = 0; j < d; ++j) (*grad)[j] += 2.0 * r * xi[j];
            }
        }
        if (grad) {
            for (double& v : *grad) v /= static_cast<double>(n);
        }
        return total / static_cast<double>(n);
    };

    // gradient of the mean squared loss is 2 lambda_max(X'X/n) <= 2 mean ||x||^2 Lipschitz
    if (mean_sq > 0.0) {
        const double step = 1.0 / (2.0 * mean_sq);
        Vector grad(d);
        for (std::size_t it = 0; it < params.max_iters; ++it) {
            objective(m.w, &grad);
            for (std::size_t j = 0; j < d; ++j) m.w[j] -= step * grad[j];
            detail::project_l2_ball(m.w, norm_bound);
            if (params.record_history) {
                m.diagnostics.max_iterate_norm = std::max(m.diagnostics.max_iterate_norm, norm2(m.w));
            }
        }
        m.diagnostics.iterations = params.max_iters;
    }
    m.diagnostics.objective = objective(m.w, nullptr);
    if (!std::isfinite(m.diagnostics.objective)) throw NumericError("ranking objective is not finite");
    return fit;
}

double eval_ranking(const LinearModel& model, std::span<const RankingInstance> instances, const Embedder& embedder) {
    double total = 0.0;
    std::size_t used = 0;
    for (const auto& inst : instances) {
        if (!has_gain(gains(inst.relevance))) continue;
        Vector scores = predict_all(model, embedder.embed_all(inst.documents));
        total += ndcg_loss(scores, inst.relevance);
        ++used;
    }
    if (used == 0) throw DataError("no ranking instance with positive gain to evaluate");
    return total / static_cast<double>(used);
}

std::vector<RankingInstance> make_instances(const Dataset& ds) {
    if (ds.groups.size() != ds.size()) throw DataError("ranking dataset has no query ids");
    std::vector<RankingInstance> out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (out.empty() || out.back().qid != ds.groups[i]) {
            out.push_back(RankingInstance{ds.groups[i], Matrix(), Vector()});
        }
        out.back().documents.push_row(ds.features.row(i));
        out.back().relevance.push_back(ds.targets[i]);
    }
    return out;
}

std::vector<RankingInstance> load_ranking_csv(const std::string& path) {
    return make_instances(load_ranking_dataset(path));
}

} // namespace simland
