#include <catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "lexdmv/neural.hpp"

using namespace lexdmv;

namespace {

NeuralConfig desk_config(uint64_t seed = 1) {
    NeuralConfig cfg;
    cfg.word_dim = 8;
    cfg.tag_dim = 4;
    cfg.val_dim = 3;
    cfg.out_word_dim = 8;
    cfg.out_tag_dim = 4;
    cfg.hidden_dim = 12;  // = out_dim, no projection
    cfg.batch = 16;
    cfg.seed = seed;
    return cfg;
}

// m tokens spread over T tags round-robin
NeuralModel desk_model(int m, int T, uint64_t seed = 1, NeuralConfig cfg = desk_config()) {
    cfg.seed = seed;
    std::vector<int> tag_of(m);
    for (int i = 0; i < m; ++i) tag_of[i] = i % T;
    return NeuralModel(m, T, std::move(tag_of), ValenceConfig{}, cfg);
}

CountTable random_counts(int m, ValenceConfig vc, uint64_t seed, double density = 0.5) {
    CountTable counts(m, vc);
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& c : counts.child)
        if (u(rng) < density) c = 5.0 * u(rng);
    for (double& c : counts.decision)
        if (u(rng) < density) c = 5.0 * u(rng);
    return counts;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
    double tv = 0.0;
    for (size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
    return tv / 2;
}

}  // namespace

TEST_CASE("forward with zero weights is uniform") {
    NeuralModel model = desk_model(6, 2);
    model.w.set_zero();
    Eigen::VectorXd child = forward(model, 3, Dir::Left, 1, RuleFamily::Child);
    for (int i = 0; i < 6; ++i) CHECK(child[i] == Catch::Approx(1.0 / 6).margin(1e-12));
    Eigen::VectorXd dec = forward(model, 0, Dir::Right, 0, RuleFamily::Decision);
    CHECK(dec[0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(dec[1] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("forward output sums to one for every context") {
    NeuralModel model = desk_model(7, 3, 99);
    for (int h = 0; h < 7; ++h) {
        for (Dir d : {Dir::Left, Dir::Right}) {
            for (int v = 0; v < 2; ++v) {
                CHECK(forward(model, h, d, v, RuleFamily::Child).sum() ==
                      Catch::Approx(1.0).margin(1e-12));
                CHECK(forward(model, h, d, v, RuleFamily::Decision).sum() ==
                      Catch::Approx(1.0).margin(1e-12));
            }
        }
    }
}

TEST_CASE("forward rejects out-of-range valence") {
    NeuralModel model = desk_model(4, 2);
    CHECK_THROWS_AS(forward(model, 0, Dir::Left, 2, RuleFamily::Child), std::invalid_argument);
    CHECK_THROWS_AS(forward(model, 0, Dir::Left, -1, RuleFamily::Decision),
                    std::invalid_argument);
}

TEST_CASE("equal score shift leaves the child distribution unchanged") {
    NeuralModel model = desk_model(6, 2, 5);
    Eigen::VectorXd before = forward(model, 2, Dir::Right, 0, RuleFamily::Child);
    model.w.b_child.array() += 3.7;  // same constant added to every token's total score
    Eigen::VectorXd after = forward(model, 2, Dir::Right, 0, RuleFamily::Child);
    for (int i = 0; i < 6; ++i) CHECK(after[i] == Catch::Approx(before[i]).margin(1e-12));
}

TEST_CASE("tokens sharing a POS share output tag rows") {
    NeuralModel model = desk_model(8, 3, 17);
    Eigen::VectorXd base = child_scores(model, 1, Dir::Left, 0);
    model.w.w_out_tag.row(2).array() += 0.5;
    Eigen::VectorXd bumped = child_scores(model, 1, Dir::Left, 0);
    Eigen::VectorXd delta = bumped - base;
    double shared = delta[2];  // token 2 has tag 2
    for (int i = 0; i < 8; ++i) {
        if (model.tag_of[i] == 2)
            CHECK(delta[i] == Catch::Approx(shared).margin(1e-12));
        else
            CHECK(delta[i] == Catch::Approx(0.0).margin(1e-12));
    }
    CHECK(std::abs(shared) > 0);  // the bump must actually reach the scores
}

TEST_CASE("nn_loss basics") {
    NeuralModel model = desk_model(5, 2, 3);
    CountTable zero(5, ValenceConfig{});
    CHECK(nn_loss(model, zero) == 0.0);

    CountTable one(5, ValenceConfig{});
    one.child_at(2, Dir::Left, 0, 4) = 1.0;
    double p = forward(model, 2, Dir::Left, 0, RuleFamily::Child)[4];
    CHECK(nn_loss(model, one) == Catch::Approx(-std::log(p)).margin(1e-12));
}

TEST_CASE("nn_loss respects the entropy lower bound") {
    NeuralModel model = desk_model(6, 2, 11);
    CountTable counts = random_counts(6, ValenceConfig{}, 21);
    double bound = 0.0;
    for (const CountContext& ctx : positive_contexts(model, counts)) {
        int k = ctx.fam == RuleFamily::Child ? 6 : 2;
        for (int i = 0; i < k; ++i)
            if (ctx.counts[i] > 0) bound += ctx.counts[i] * std::log(ctx.total / ctx.counts[i]);
    }
    CHECK(nn_loss(model, counts) >= bound - 1e-9);
}

TEST_CASE("fit reduces the loss and is seed-deterministic") {
    CountTable counts = random_counts(5, ValenceConfig{}, 77, 0.8);
    NeuralModel a = desk_model(5, 2, 42);
    NeuralModel b = desk_model(5, 2, 42);
    double before = nn_loss(a, counts);
    for (int i = 0; i < 30; ++i) fit(a, counts);
    for (int i = 0; i < 30; ++i) fit(b, counts);
    CHECK(nn_loss(a, counts) < before);
    bool identical = true;
    NeuralWeights::for_each_pair(a.w, b.w, [&](auto& x, auto& y) {
        if (x.size() && !(x == y)) identical = false;
    });
    CHECK(identical);
}

TEST_CASE("fit with lr=0 leaves a fresh model unchanged") {
    NeuralConfig cfg = desk_config(9);
    cfg.lr = 0.0;
    NeuralModel model = desk_model(5, 2, 9, cfg);
    NeuralModel copy = model;
    fit(model, random_counts(5, ValenceConfig{}, 3));
    bool identical = true;
    NeuralWeights::for_each_pair(model.w, copy.w, [&](auto& x, auto& y) {
        if (x.size() && !(x == y)) identical = false;
    });
    CHECK(identical);
}

TEST_CASE("gradient check against central differences") {
    NeuralModel model = desk_model(6, 2, 101);
    CountTable counts = random_counts(6, ValenceConfig{}, 55, 0.7);
    const double eps = 1e-5;
    uint64_t seed = 101;
    randomize_weights(model, 0.4, seed);
    while (min_abs_preactivation(model, counts) < 10 * eps)
        randomize_weights(model, 0.4, ++seed);
    CHECK(gradient_check(model, counts, eps, 600, 7) < 1e-4);
    CHECK(gradient_check(model, counts, eps, 600, 7, /*flip_sign=*/true) > 0.1);
    CountTable zero(6, ValenceConfig{});
    CHECK(gradient_check(model, zero, eps, 600, 7) == 0.0);
}

TEST_CASE("export_params produces valid tables") {
    NeuralModel model = desk_model(6, 2, 31);
    std::vector<double> root_counts = {4, 0, 1, 0, 0, 3};
    DmvParams p = export_params(model, root_counts, 0.1);
    double rs = 0.0;
    for (double x : p.root) rs += x;
    CHECK(rs == Catch::Approx(1.0).margin(1e-9));
    for (size_t r = 0; r < p.child.size() / p.m; ++r) {
        double sum = 0.0;
        for (int i = 0; i < p.m; ++i) sum += p.child[r * p.m + i];
        CHECK(sum == Catch::Approx(1.0).margin(1e-9));
    }
    for (size_t r = 0; r < p.decision.size() / 2; ++r)
        CHECK(p.decision[2 * r] + p.decision[2 * r + 1] == Catch::Approx(1.0).margin(1e-9));

    NeuralModel zero = desk_model(6, 2, 31);
    zero.w.set_zero();
    DmvParams u = export_params(zero, std::vector<double>(6, 0.0), 0.0);
    CHECK(u.child_at(0, Dir::Left, 0, 0) == Catch::Approx(1.0 / 6).margin(1e-12));
    CHECK(u.decision_at(3, Dir::Right, 1, kStop) == Catch::Approx(0.5).margin(1e-12));
    CHECK(u.root[0] == Catch::Approx(1.0 / 6).margin(1e-12));
}

TEST_CASE("fit concentrates an exported child row on the counted child") {
    CountTable counts(5, ValenceConfig{});
    counts.child_at(1, Dir::Right, 0, 3) = 50.0;
    counts.child_at(1, Dir::Right, 0, 0) = 1.0;
    NeuralModel model = desk_model(5, 2, 8);
    for (int i = 0; i < 200; ++i) fit(model, counts);
    DmvParams p = export_params(model, std::vector<double>(5, 1.0), 0.1);
    auto row = p.child_row(1, Dir::Right, 0);
    CHECK(std::distance(row.begin(), std::max_element(row.begin(), row.end())) == 3);
}

TEST_CASE("network smooths child distributions across words of one POS") {
    // tokens 0,1: tags; 2,3,4,5: words of tag 0; 6: word of tag 1.
    std::vector<int> tag_of = {0, 1, 0, 0, 0, 0, 1};
    const int m = 7;
    NeuralModel model(m, 2, tag_of, ValenceConfig{}, desk_config(13));
    // training contexts: heads 2 and 3 (both tag 0) mostly generate token 6
    CountTable counts(m, ValenceConfig{});
    counts.child_at(2, Dir::Right, 0, 6) = 20.0;
    counts.child_at(2, Dir::Right, 0, 1) = 2.0;
    counts.child_at(3, Dir::Right, 0, 6) = 18.0;
    counts.child_at(3, Dir::Right, 0, 0) = 2.0;
    for (int i = 0; i < 300; ++i) fit(model, counts);

    // average trained-context distribution as reference
    Eigen::VectorXd avg = (forward(model, 2, Dir::Right, 0, RuleFamily::Child) +
                           forward(model, 3, Dir::Right, 0, RuleFamily::Child)) /
                          2.0;
    // held-out word 4 shares tag 0; its distribution should sit nearer the
    // trained average than the uniform distribution does
    Eigen::VectorXd held = forward(model, 4, Dir::Right, 0, RuleFamily::Child);
    std::vector<double> avg_v(avg.data(), avg.data() + m), held_v(held.data(), held.data() + m),
        uniform(m, 1.0 / m);
    CHECK(total_variation(held_v, avg_v) < total_variation(uniform, avg_v));
}

TEST_CASE("load_vectors reads word2vec text and reports coverage") {
    auto tmp = std::filesystem::temp_directory_path() / "lexdmv_vec_test.txt";
    {
        std::ofstream out(tmp);
        out << "2 8\n";
        out << "dog/NN 1 2 3 4 5 6 7 8\n";
        out << "unrelated 0 0 0 0 0 0 0 0\n";
    }
    RawSentence raw;
    raw.forms = {"dog", "dog", "cat", "runs"};
    raw.pos = {"NN", "NN", "NN", "VB"};
    Lexicon lex = build_lexicon({raw}, 2);  // dog/NN lexicalized, cat/runs fall back
    NeuralModel model(lex, ValenceConfig{}, desk_config(4));
    VectorLoadStats stats = load_vectors(model, lex, tmp.string(), "");
    CHECK(stats.word_found == 1);
    CHECK(stats.word_missing == lex.size() - 1);
    CHECK(stats.unused_rows == 1);
    int dog = lex.token_of("dog", "NN");
    for (int d = 0; d < 8; ++d) CHECK(model.w.e_word(dog, d) == Catch::Approx(d + 1.0));
    std::filesystem::remove(tmp);
}

TEST_CASE("load_vectors rejects dimension mismatches and bad rows") {
    auto dir = std::filesystem::temp_directory_path();
    auto bad_dim = dir / "lexdmv_vec_baddim.txt";
    {
        std::ofstream out(bad_dim);
        out << "1 5\n";
        out << "NN 1 2 3 4 5\n";
    }
    auto bad_row = dir / "lexdmv_vec_badrow.txt";
    {
        std::ofstream out(bad_row);
        out << "1 8\n";
        out << "NN 1 2 3\n";
    }
    RawSentence raw;
    raw.forms = {"dog"};
    raw.pos = {"NN"};
    Lexicon lex = build_lexicon({raw}, 1);
    NeuralModel model(lex, ValenceConfig{}, desk_config(4));
    CHECK_THROWS_AS(load_vectors(model, lex, bad_dim.string(), ""), DataError);
    CHECK_THROWS_AS(load_vectors(model, lex, bad_row.string(), ""), ParseError);
    std::filesystem::remove(bad_dim);
    std::filesystem::remove(bad_row);
}

TEST_CASE("default hyperparameters match the experimental protocol") {
    NeuralConfig cfg;
    CHECK(cfg.lr == 0.03);
    CHECK(cfg.batch == 200);
    CHECK(cfg.momentum == 0.9);
    CHECK(cfg.word_dim == 100);
    CHECK(cfg.out_word_dim == 100);
    CHECK(cfg.tag_dim == 20);
    CHECK(cfg.out_tag_dim == 20);
    CHECK(cfg.hidden_dim == cfg.out_dim());  // no projection by default
    CHECK_FALSE(cfg.needs_projection());
}

TEST_CASE("embedding initialization is reproducible by seed") {
    NeuralModel a = desk_model(5, 2, 123);
    NeuralModel b = desk_model(5, 2, 123);
    NeuralModel c = desk_model(5, 2, 124);
    CHECK(a.w.e_word == b.w.e_word);
    CHECK(a.w.w_left == b.w.w_left);
    CHECK(a.w.e_word != c.w.e_word);
}
