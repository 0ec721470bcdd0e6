// Self-check harness: randomized chart-vs-enumeration equivalence and the
// neural gradient check. Used by the verify CLI command and the test suites.
#pragma once

#include <ostream>

#include "lexdmv/neural.hpp"
#include "lexdmv/oracle.hpp"

namespace lexdmv {

struct OracleCheckReport {
    int cases = 0;
    double max_inside_err = 0.0;     // relative
    double max_viterbi_err = 0.0;    // relative, DP score vs enumeration max
    double max_tree_gap = 0.0;       // returned tree's score vs DP score
    double max_count_err = 0.0;      // absolute
    double max_posterior_err = 0.0;  // |parent posterior sum - 1|

    bool pass(double tol = 1e-9) const {
        return max_inside_err < tol && max_viterbi_err < tol && max_tree_gap < tol &&
               max_count_err < tol && max_posterior_err < tol;
    }
    void write(std::ostream& out) const {
        out << "oracle cases:            " << cases << "\n"
            << "max inside rel err:      " << max_inside_err << "\n"
            << "max viterbi rel err:     " << max_viterbi_err << "\n"
            << "max viterbi tree gap:    " << max_tree_gap << "\n"
            << "max count abs err:       " << max_count_err << "\n"
            << "max posterior sum err:   " << max_posterior_err << "\n";
    }
};

// Random (params, sentence) pairs with n <= max_len and vocab <= max_vocab,
// checked against full tree enumeration.
inline OracleCheckReport run_oracle_checks(int cases = 200, int max_len = 6, int max_vocab = 5,
                                           uint64_t seed = 20240811) {
    OracleCheckReport report;
    report.cases = cases;
    Rng rng(seed);
    std::uniform_int_distribution<int> len(1, max_len), vocab(2, max_vocab), cap(1, 3);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    for (int rep = 0; rep < cases; ++rep) {
        ValenceConfig vcfg{cap(rng), cap(rng)};
        const int m = vocab(rng);
        DmvParams params = init_random(m, vcfg, seed + 7919 * rep);
        Sentence s;
        const int n = len(rng);
        std::uniform_int_distribution<int> tok(0, m - 1);
        for (int i = 0; i < n; ++i) s.token_ids.push_back(tok(rng));
        s.tag_ids = s.token_ids;

        OracleSummary oracle = oracle_summary(s, params);
        report.max_inside_err =
            std::max(report.max_inside_err, rel(inside(s, params).log_prob, oracle.log_prob));
        auto [tree, score] = viterbi(s, params);
        report.max_viterbi_err = std::max(report.max_viterbi_err, rel(score, oracle.best_score));
        report.max_tree_gap =
            std::max(report.max_tree_gap, rel(tree_log_prob(tree, s, params), score));
        CountTable counts = expected_counts(s, params);
        for (size_t i = 0; i < counts.child.size(); ++i)
            report.max_count_err =
                std::max(report.max_count_err, std::abs(counts.child[i] - oracle.counts.child[i]));
        for (size_t i = 0; i < counts.decision.size(); ++i)
            report.max_count_err = std::max(
                report.max_count_err, std::abs(counts.decision[i] - oracle.counts.decision[i]));
        for (size_t i = 0; i < counts.root.size(); ++i)
            report.max_count_err =
                std::max(report.max_count_err, std::abs(counts.root[i] - oracle.counts.root[i]));
        auto post = arc_posteriors(s, LogDmv(params));
        for (int a = 0; a < n; ++a) {
            double sum = 0.0;
            for (double x : post[a]) sum += x;
            report.max_posterior_err = std::max(report.max_posterior_err, std::abs(sum - 1.0));
        }
    }
    return report;
}

struct GradientCheckReport {
    int samples = 0;
    double max_rel_err = 0.0;

    bool pass(double tol = 1e-4) const { return max_rel_err < tol; }
    void write(std::ostream& out) const {
        out << "gradient samples:        " << samples << "\n"
            << "max gradient rel err:    " << max_rel_err << "\n";
    }
};

// Desk-scale model + random counts, weights re-drawn until pre-activations
// clear the ReLU kinks by 10*eps. flip_sign injects a fault to prove the
// check can fail.
inline GradientCheckReport run_gradient_check(int samples = 1000, double eps = 1e-5,
                                              uint64_t seed = 7, bool flip_sign = false) {
    const int m = 8, T = 3;
    std::vector<int> tag_of(m);
    for (int i = 0; i < m; ++i) tag_of[i] = i % T;
    NeuralConfig cfg;
    cfg.word_dim = 10;
    cfg.tag_dim = 5;
    cfg.val_dim = 4;
    cfg.out_word_dim = 10;
    cfg.out_tag_dim = 5;
    cfg.hidden_dim = 15;
    cfg.seed = seed;
    NeuralModel model(m, T, tag_of, ValenceConfig{}, cfg);

    CountTable counts(m, ValenceConfig{});
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& c : counts.child)
        if (u(rng) < 0.5) c = 8.0 * u(rng);
    for (double& c : counts.decision)
        if (u(rng) < 0.5) c = 8.0 * u(rng);

    uint64_t reseed = seed;
    randomize_weights(model, 0.4, reseed);
    while (min_abs_preactivation(model, counts) < 10 * eps)
        randomize_weights(model, 0.4, ++reseed);

    GradientCheckReport report;
    report.samples = samples;
    report.max_rel_err = gradient_check(model, counts, eps, samples, seed + 1, flip_sign);
    return report;
}

}  // namespace lexdmv
