#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <gtest/gtest.h>

#include "simland/errors.hpp"
#include "simland/ranking.hpp"
#include "test_util.hpp"

using namespace simland;
using simland::testing::random_vector;

namespace {

double brute_d_norm(const Vector& v) {
    std::vector<std::size_t> pos(v.size());
    std::iota(pos.begin(), pos.end(), 1);
    double best = -INFINITY;
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += v[i] / std::log(1.0 + static_cast<double>(pos[i]));
        best = std::max(best, s);
    } while (std::next_permutation(pos.begin(), pos.end()));
    return best;
}

/** NDCG loss written out with log base 2 and an explicit descending rank. */
double ndcg_base2(const Vector& s, const Vector& r) {
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    Vector g(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) g[i] = std::pow(2.0, r[i]) - 1.0;
    double num = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) num += g[order[k]] / std::log2(2.0 + static_cast<double>(k));
    Vector sorted = g;
    std::sort(sorted.rbegin(), sorted.rend());
    double den = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) den += sorted[k] / std::log2(2.0 + static_cast<double>(k));
    return -num / den;
}

Embedder identity_embedder() {
    return Embedder(SimilaritySpec::linear(), Matrix{{1.0}}, Normalization::unscaled);
}

} // namespace

TEST(Ranking, GainAndDecay) {
    EXPECT_EQ(gain(0), 0.0);
    EXPECT_EQ(gain(1), 1.0);
    EXPECT_NEAR(gain(0.5), std::sqrt(2.0) - 1.0, 1e-15);
    EXPECT_NEAR(decay(1), 0.69314718055994531, 1e-16);
    EXPECT_THROW(decay(0), ConfigError);
}

TEST(Ranking, DNormExamples) {
    Vector v{1, 0};
    EXPECT_NEAR(d_norm(v), 1.4426950408889634, 1e-15);
    Vector c{0.7};
    EXPECT_NEAR(d_norm(c), 0.7 / std::log(2.0), 1e-15);
}

TEST(Ranking, DNormMatchesBruteForce) {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        Vector v = random_vector(rng, 1 + rng.index(6), 0, 1);
        EXPECT_NEAR(d_norm(v), brute_d_norm(v), 1e-12);
    }
}

TEST(Ranking, EtaTargets) {
    Vector r{1, 0};
    Vector eta = eta_targets(r);
    EXPECT_NEAR(eta[0], 0.69314718055994531, 1e-15);
    EXPECT_EQ(eta[1], 0.0);
    Vector same{0.4, 0.4, 0.4};
    Vector e2 = eta_targets(same);
    EXPECT_EQ(e2[0], e2[1]);
    EXPECT_EQ(e2[1], e2[2]);
    EXPECT_THROW(eta_targets(Vector{0, 0}), DataError);
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        Vector rel = random_vector(rng, 5, 0, 1);
        Vector perm = rel;
        std::vector<std::size_t> idx{3, 0, 4, 1, 2};
        for (std::size_t i = 0; i < 5; ++i) perm[i] = rel[idx[i]];
        Vector a = eta_targets(rel), b = eta_targets(perm);
        for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(b[i], a[idx[i]], 1e-15);
    }
}

TEST(Ranking, NdcgExamples) {
    Vector r{1, 0};
    EXPECT_NEAR(ndcg_loss(r, r), -1.0, 1e-15);
    Vector s{0, 1};
    EXPECT_NEAR(ndcg_loss(s, r), -0.63092975357145743, 1e-9);
    Vector same_order{10, -3};
    EXPECT_NEAR(ndcg_loss(same_order, r), -1.0, 1e-15);
    EXPECT_THROW(ndcg_loss(Vector{1, 2}, Vector{0, 0}), DataError);
    EXPECT_THROW(ndcg_loss(Vector{1}, r), DataError);
}

TEST(Ranking, NdcgProperties) {
    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t m = 1 + rng.index(8);
        Vector r = random_vector(rng, m, 0, 1);
        Vector s = random_vector(rng, m, -2, 2);
        double loss = ndcg_loss(s, r);
        EXPECT_GE(loss, -1.0 - 1e-12);
        EXPECT_LE(loss, 0.0);
        // argsort invariance under positive affine maps
        double a = std::exp(rng.uniform(-3, 3)), c = rng.uniform(-10, 10);
        Vector t(m);
        for (std::size_t i = 0; i < m; ++i) t[i] = a * s[i] + c;
        EXPECT_NEAR(ndcg_loss(t, r), loss, 1e-12);
        // base of the logarithm cancels
        EXPECT_NEAR(ndcg_base2(s, r), loss, 1e-12);
        // self-ranking is perfect
        EXPECT_NEAR(ndcg_loss(r, r), -1.0, 1e-12);
    }
}

TEST(Ranking, EqualRelevanceAlwaysPerfect) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        Vector r(4, 0.6);
        Vector s = random_vector(rng, 4);
        EXPECT_NEAR(ndcg_loss(s, r), -1.0, 1e-12);
    }
}

TEST(Ranking, FitSingleInstance) {
    RankingInstance inst{"q1", Matrix{{1.0}, {0.0}}, Vector{1.0, 0.0}};
    std::vector<RankingInstance> data{inst};
    SolverParams p;
    p.max_iters = 5000;
    RankerFit fit = fit_ranker(data, identity_embedder(), 10.0, p);
    EXPECT_EQ(fit.skipped, 0u);
    // least squares on (1 -> eta_1, 0 -> 0) gives w = eta_1 = ln 2
    EXPECT_NEAR(fit.model.w[0], 0.69314718055994531, 1e-3);
    EXPECT_NEAR(eval_ranking(fit.model, data, identity_embedder()), -1.0, 1e-15);
}

TEST(Ranking, FitSkipsZeroGainAndRejectsEmpty) {
    RankingInstance good{"q1", Matrix{{1.0}, {0.0}}, Vector{1.0, 0.0}};
    RankingInstance dead{"q2", Matrix{{0.5}, {0.2}}, Vector{0.0, 0.0}};
    std::vector<RankingInstance> data{good, dead};
    RankerFit fit = fit_ranker(data, identity_embedder(), 10.0);
    EXPECT_EQ(fit.skipped, 1u);
    std::vector<RankingInstance> none;
    EXPECT_THROW(fit_ranker(none, identity_embedder(), 10.0), DataError);
}

TEST(Ranking, EvalMatchesLoop) {
    Rng rng(5);
    std::vector<RankingInstance> data;
    for (int q = 0; q < 6; ++q) {
        std::size_t m = 2 + rng.index(4);
        RankingInstance inst{"q" + std::to_string(q), Matrix(m, 1), random_vector(rng, m, 0.1, 1)};
        for (std::size_t i = 0; i < m; ++i) inst.documents(i, 0) = rng.uniform(-1, 1);
        data.push_back(inst);
    }
    LinearModel model;
    model.w = {-0.7};
    double loop = 0.0;
    for (const auto& inst : data) {
        Vector s;
        for (std::size_t i = 0; i < inst.documents.rows(); ++i) s.push_back(-0.7 * inst.documents(i, 0));
        loop += ndcg_loss(s, inst.relevance);
    }
    EXPECT_NEAR(eval_ranking(model, data, identity_embedder()), loop / 6.0, 1e-15);
    std::vector<RankingInstance> one{data[0]};
    Vector s0;
    for (std::size_t i = 0; i < data[0].documents.rows(); ++i) s0.push_back(-0.7 * data[0].documents(i, 0));
    EXPECT_EQ(eval_ranking(model, one, identity_embedder()), ndcg_loss(s0, data[0].relevance));
}

TEST(Ranking, LoadGroupedCsv) {
    simland::testing::TempDir dir("rank");
    std::string path = dir.file("r.csv");
    {
        std::ofstream out(path);
        out << "qid,f1,f2,rel\nA,0.1,0.2,4\nA,0.3,0.4,0\nB,1,1,2\nB,2,2,1\nB,3,3,0\n";
    }
    auto inst = load_ranking_csv(path);
    ASSERT_EQ(inst.size(), 2u);
    EXPECT_EQ(inst[0].qid, "A");
    EXPECT_EQ(inst[0].documents.rows(), 2u);
    EXPECT_EQ(inst[1].documents.rows(), 3u);
    EXPECT_EQ(inst[0].relevance, (Vector{1.0, 0.0}));
    EXPECT_EQ(inst[1].relevance, (Vector{0.5, 0.25, 0.0}));
    EXPECT_EQ(inst[1].documents(2, 1), 3.0);
}
