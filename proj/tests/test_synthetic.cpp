#include <catch_amalgamated.hpp>

#include "lexdmv/chart.hpp"
#include "lexdmv/synthetic.hpp"

using namespace lexdmv;

TEST_CASE("benchmark grammar puts at least 0.95 on every mode") {
    SyntheticBenchmark bench = synthetic_benchmark();
    const DmvParams& g = bench.grammar;
    auto mode_of = [](const double* row, int k) {
        double best = 0;
        for (int i = 0; i < k; ++i) best = std::max(best, row[i]);
        return best;
    };
    CHECK(mode_of(g.root.data(), g.m) >= 0.95);
    for (size_t r = 0; r < g.child.size() / g.m; ++r)
        CHECK(mode_of(g.child.data() + r * g.m, g.m) >= 0.95);
    for (size_t r = 0; r < g.decision.size() / 2; ++r)
        CHECK(mode_of(g.decision.data() + r * 2, 2) >= 0.95);
}

TEST_CASE("sampling is deterministic and honors the length cap") {
    auto a = sample_synthetic_corpus(100, 9);
    auto b = sample_synthetic_corpus(100, 9);
    auto c = sample_synthetic_corpus(100, 10);
    REQUIRE(a.size() == 100);
    bool equal = a.size() == b.size();
    for (size_t i = 0; equal && i < a.size(); ++i)
        equal = a[i].forms == b[i].forms && *a[i].gold_heads == *b[i].gold_heads;
    CHECK(equal);
    bool differs = false;
    for (size_t i = 0; i < a.size() && !differs; ++i) differs = a[i].forms != c[i].forms;
    CHECK(differs);
    for (const auto& s : a) {
        CHECK(s.size() >= 1);
        CHECK(s.size() <= 10);
        REQUIRE(s.gold_heads);
    }
}

TEST_CASE("sampled gold heads form valid projective trees") {
    auto corpus = sample_synthetic_corpus(200, 77);
    for (const auto& s : corpus) {
        ParseTree t = tree_from_gold(*s.gold_heads);
        CHECK_NOTHROW(validate_tree(t));
    }
}

TEST_CASE("sampled trees score finitely under the generating grammar") {
    SyntheticBenchmark bench = synthetic_benchmark();
    Rng rng(5);
    LogDmv lp(bench.grammar);
    for (int i = 0; i < 50; ++i) {
        auto [tags, tree] = sample_tagged_tree(bench.grammar, rng, 10);
        Sentence s;
        s.token_ids = tags;
        s.tag_ids = tags;
        double ll = tree_log_prob(tree, s, lp);
        CHECK(std::isfinite(ll));
        // the sampled tree can never beat the Viterbi tree
        CHECK(viterbi(s, lp).second >= ll - 1e-9);
    }
}

TEST_CASE("word inventories cover every tag and vary by frequency cutoff") {
    auto corpus = sample_synthetic_corpus(1500, 31);
    Lexicon coarse = build_lexicon(corpus, 100000);
    Lexicon medium = build_lexicon(corpus, 60);
    Lexicon fine = build_lexicon(corpus, 1);
    CHECK(coarse.size() == 6);
    CHECK(medium.size() > coarse.size());
    CHECK(fine.size() > medium.size());
}
