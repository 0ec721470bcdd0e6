#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "lexdmv/eval.hpp"
#include "lexdmv/synthetic.hpp"

using namespace lexdmv;
using testutil::make_sentence;

TEST_CASE("dda counts matching heads including root") {
    ParseTree pred{{1, -1, 1}};
    CHECK(dda(pred, {2, 0, 2}) == 1.0);
    CHECK(dda(pred, {2, 0, 1}) == Catch::Approx(2.0 / 3));
    std::vector<int> ten(10, 0);
    ParseTree p10{std::vector<int>(10, -1)};
    ten[3] = 2;  // one wrong
    CHECK(dda(p10, ten) == Catch::Approx(0.9));
    CHECK_THROWS_AS(dda(ParseTree{{-1, 0, 1, 2, 3}}, std::vector<int>{0, 1, 2, 3}),
                    std::invalid_argument);
}

TEST_CASE("evaluate on a single-token sentence is trivially perfect") {
    Sentence s = make_sentence({0});
    s.gold_heads = std::vector<int>{0};
    EvalReport r = evaluate(init_uniform(2, ValenceConfig{}), {s});
    CHECK(r.dda_all == 1.0);
    CHECK(r.tokens_scored == 1);
}

TEST_CASE("evaluate micro-average identity and permutation invariance") {
    Rng rng(40);
    Corpus corpus;
    std::uniform_int_distribution<int> len(1, 7);
    DmvParams params = init_random(4, ValenceConfig{}, 11);
    LogDmv lp(params);
    for (int i = 0; i < 25; ++i) {
        Sentence s = testutil::random_sentence(rng, len(rng), 4);
        // gold = viterbi of a different model, so scores vary
        auto tree = viterbi(s, init_random(4, ValenceConfig{}, 99)).first;
        std::vector<int> gold;
        for (int h : tree.heads) gold.push_back(h + 1);
        s.gold_heads = gold;
        corpus.push_back(std::move(s));
    }
    EvalReport r = evaluate(params, corpus);
    long correct = 0, tokens = 0;
    for (const auto& ps : r.per_sentence) {
        correct += ps.correct;
        tokens += ps.length;
    }
    CHECK(r.tokens_scored == tokens);
    CHECK(r.dda_all == Catch::Approx(static_cast<double>(correct) / tokens).margin(1e-12));

    Corpus shuffled = corpus;
    std::reverse(shuffled.begin(), shuffled.end());
    EvalReport r2 = evaluate(params, shuffled);
    CHECK(r2.dda_all == r.dda_all);
    CHECK(r2.tokens_scored == r.tokens_scored);

    EvalReport r4 = evaluate(params, corpus, 4);
    CHECK(r4.dda_all == r.dda_all);
}

TEST_CASE("evaluate separates the <=10-token subset") {
    Rng rng(41);
    Corpus corpus;
    DmvParams params = init_random(3, ValenceConfig{}, 2);
    for (int n : {4, 12, 9, 15}) {
        Sentence s = testutil::random_sentence(rng, n, 3);
        s.gold_heads = std::vector<int>(n, 0);
        (*s.gold_heads)[0] = 0;
        for (int i = 1; i < n; ++i) (*s.gold_heads)[i] = i;  // left chain
        corpus.push_back(std::move(s));
    }
    EvalReport r = evaluate(params, corpus);
    CHECK(r.tokens_scored == 40);
    CHECK(r.tokens_le10 == 13);
}

TEST_CASE("evaluate rejects missing gold and empty corpora") {
    CHECK_THROWS_AS(evaluate(init_uniform(2, ValenceConfig{}), {}), std::invalid_argument);
    Sentence s = make_sentence({0, 1});
    CHECK_THROWS_AS(evaluate(init_uniform(2, ValenceConfig{}), {s}), DataError);
}

TEST_CASE("gold-tree MLE parses its own near-deterministic corpus") {
    auto raw = sample_synthetic_corpus(400, 10101);
    Lexicon lex = build_lexicon(raw, 1000000);
    Corpus corpus = encode(raw, lex);
    DmvParams params = mle_from_gold(corpus, lex.size(), ValenceConfig{}, 0.1);
    CHECK(evaluate(params, corpus).dda_all >= 0.98);
}
