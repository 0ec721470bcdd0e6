// Brute-force reference implementations used to check the chart algorithms:
// exhaustive enumeration of single-rooted projective trees plus sums, argmax
// and posterior-weighted counts over the enumeration.
#pragma once

#include <functional>
#include <vector>

#include "lexdmv/chart.hpp"
#include "lexdmv/model.hpp"

namespace lexdmv {

namespace oracle_detail {

// Enumerates head assignments for span [i, j] governed by h (heads for every
// position except h). Left/right portions tile into dependent constituents.
inline void enumerate_span(int i, int j, int h, std::vector<int>& heads,
                           const std::function<void()>& done);

inline void enumerate_left(int i, int x, int h, std::vector<int>& heads,
                           const std::function<void()>& done) {
    if (x < i) {
        done();
        return;
    }
    // rightmost remaining left block spans [s, x]
    for (int s = i; s <= x; ++s) {
        for (int c = s; c <= x; ++c) {
            heads[c] = h;
            enumerate_span(s, x, c, heads, [&] { enumerate_left(i, s - 1, h, heads, done); });
        }
    }
}

inline void enumerate_right(int x, int j, int h, std::vector<int>& heads,
                            const std::function<void()>& done) {
    if (x > j) {
        done();
        return;
    }
    // leftmost remaining right block spans [x, e]
    for (int e = x; e <= j; ++e) {
        for (int c = x; c <= e; ++c) {
            heads[c] = h;
            enumerate_span(x, e, c, heads, [&] { enumerate_right(e + 1, j, h, heads, done); });
        }
    }
}

inline void enumerate_span(int i, int j, int h, std::vector<int>& heads,
                           const std::function<void()>& done) {
    enumerate_left(i, h - 1, h, heads,
                   [&] { enumerate_right(h + 1, j, h, heads, done); });
}

}  // namespace oracle_detail

// All distinct single-rooted projective trees over n positions. Refuses n > 8.
inline std::vector<ParseTree> enumerate_projective_trees(int n) {
    if (n < 1 || n > 8)
        throw std::invalid_argument("enumerate_projective_trees: n must be in [1, 8]");
    std::vector<ParseTree> trees;
    std::vector<int> heads(n, -1);
    for (int root = 0; root < n; ++root) {
        heads.assign(n, -1);
        heads[root] = -1;
        oracle_detail::enumerate_span(0, n - 1, root, heads,
                                      [&] { trees.push_back(ParseTree{heads}); });
    }
    return trees;
}

struct OracleSummary {
    double log_prob = kNegInf;     // log-sum over all trees
    double best_score = kNegInf;   // max over all trees
    ParseTree best_tree;
    CountTable counts;             // posterior-weighted rule counts

    explicit OracleSummary(int m, ValenceConfig v) : counts(m, v) {}
};

// Full enumeration pass: sentence probability, Viterbi score, and expected
// counts, all straight from tree_log_prob over the tree list.
inline OracleSummary oracle_summary(const Sentence& s, const DmvParams& params) {
    LogDmv P(params);
    OracleSummary out(params.m, params.val);
    std::vector<ParseTree> trees = enumerate_projective_trees(s.size());
    std::vector<double> scores(trees.size());
    for (size_t i = 0; i < trees.size(); ++i) {
        scores[i] = tree_log_prob(trees[i], s, P);
        log_add_to(out.log_prob, scores[i]);
        if (scores[i] > out.best_score) {
            out.best_score = scores[i];
            out.best_tree = trees[i];
        }
    }
    if (out.log_prob == kNegInf) return out;
    for (size_t i = 0; i < trees.size(); ++i) {
        double w = std::exp(scores[i] - out.log_prob);
        if (w > 0.0) add_tree_counts(out.counts, s, trees[i], w);
    }
    return out;
}

// Posterior parent distribution per dependent from the enumeration;
// posteriors[a][h], root mass at posteriors[a][n].
inline std::vector<std::vector<double>> oracle_arc_posteriors(const Sentence& s,
                                                              const DmvParams& params) {
    LogDmv P(params);
    const int n = s.size();
    std::vector<ParseTree> trees = enumerate_projective_trees(n);
    std::vector<double> scores(trees.size());
    double lz = kNegInf;
    for (size_t i = 0; i < trees.size(); ++i) {
        scores[i] = tree_log_prob(trees[i], s, P);
        log_add_to(lz, scores[i]);
    }
    std::vector<std::vector<double>> post(n, std::vector<double>(n + 1, 0.0));
    for (size_t i = 0; i < trees.size(); ++i) {
        double w = std::exp(scores[i] - lz);
        if (w <= 0.0) continue;
        for (int a = 0; a < n; ++a) {
            int h = trees[i].heads[a];
            post[a][h == -1 ? n : h] += w;
        }
    }
    return post;
}

}  // namespace lexdmv
