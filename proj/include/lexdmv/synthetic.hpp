// Deterministic synthetic benchmark: a small near-deterministic DMV over six
// POS tags (every rule distribution puts at least 0.95 on its mode) plus a
// head-outward sampler that decorates tokens with Zipf-distributed words.
// Train/test corpora regenerate bit-identically from their seeds.
#pragma once

#include <array>
#include <functional>
#include <optional>

#include "lexdmv/corpus.hpp"
#include "lexdmv/model.hpp"

namespace lexdmv {

namespace synthetic_detail {

inline constexpr int kVB = 0, kNN = 1, kDT = 2, kJJ = 3, kIN = 4, kRB = 5, kTags = 6;

inline const std::array<const char*, kTags>& tag_names() {
    static const std::array<const char*, kTags> names = {"VB", "NN", "DT", "JJ", "IN", "RB"};
    return names;
}

inline const std::vector<std::vector<std::string>>& word_lists() {
    static const std::vector<std::vector<std::string>> words = {
        {"runs", "sees", "eats", "buys", "holds", "likes", "makes", "finds", "keeps", "takes",
         "sells", "wants", "moves", "opens"},
        {"dog", "cat", "man", "woman", "house", "bird", "car", "tree", "book", "fish", "road",
         "door", "child", "boat", "stone", "river", "table", "glass", "horse", "garden"},
        {"the", "a", "this", "some"},
        {"big", "old", "red", "small", "new", "dark", "cold", "fast"},
        {"in", "on", "near", "under", "behind", "beside"},
        {"quickly", "slowly", "often", "again", "early", "late"}};
    return words;
}

}  // namespace synthetic_detail

struct SyntheticBenchmark {
    Lexicon tags;       // pos-only lexicon over the six tags
    DmvParams grammar;  // tag-level generating model
};

// The generating grammar. Verbs head sentences and almost always take a
// subject noun (occasionally an object); nouns take a determiner;
// prepositions take a noun complement; everything else is a near-leaf. Rare
// off-mode draws supply structural variety.
inline SyntheticBenchmark synthetic_benchmark() {
    using namespace synthetic_detail;
    SyntheticBenchmark bench;

    RawSentence tag_row;
    for (const char* t : tag_names()) {
        tag_row.forms.push_back(t);
        tag_row.pos.push_back(t);
    }
    bench.tags = build_lexicon({tag_row}, 1000000);

    DmvParams g(kTags, ValenceConfig{2, 2});
    auto child_row = [&](int h, Dir d, int v, int mode, double p) {
        double rest = (1.0 - p) / (kTags - 1);
        for (int c = 0; c < kTags; ++c) g.child_at(h, d, v, c) = c == mode ? p : rest;
    };
    auto decide = [&](int h, Dir d, int v, double stop) {
        g.decision_at(h, d, v, kStop) = stop;
        g.decision_at(h, d, v, kContinue) = 1.0 - stop;
    };
    for (int t = 0; t < kTags; ++t) g.root[t] = t == kVB ? 0.96 : 0.04 / (kTags - 1);
    for (int t = 0; t < kTags; ++t) {
        for (Dir d : {Dir::Left, Dir::Right}) {
            for (int v = 0; v < 2; ++v) {
                decide(t, d, v, 0.99);
                child_row(t, d, v, t == kNN ? kIN : kNN, 0.95);
            }
        }
    }
    decide(kVB, Dir::Left, 0, 0.05);   // subjects are near-obligatory
    child_row(kVB, Dir::Left, 0, kNN, 0.96);
    decide(kVB, Dir::Right, 0, 0.95);  // objects are rare
    child_row(kVB, Dir::Right, 0, kNN, 0.96);
    decide(kNN, Dir::Left, 0, 0.05);   // determiners near-obligatory
    child_row(kNN, Dir::Left, 0, kDT, 0.95);
    decide(kIN, Dir::Right, 0, 0.05);  // prepositions take a complement
    child_row(kIN, Dir::Right, 0, kNN, 0.96);

    bench.grammar = std::move(g);
    return bench;
}

namespace synthetic_detail {

struct Node {
    int tag;
    std::vector<Node> left;   // nearest first
    std::vector<Node> right;  // nearest first
};

inline int pick(const std::vector<double>& weights, Rng& rng) {
    std::discrete_distribution<int> d(weights.begin(), weights.end());
    return d(rng);
}

inline std::optional<Node> expand(const DmvParams& g, int tag, int& budget, Rng& rng) {
    if (--budget < 0) return std::nullopt;
    Node node{tag, {}, {}};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Dir d : {Dir::Left, Dir::Right}) {
        int v = 0;
        while (true) {
            double cont = g.decision_at(tag, d, g.val.decision_valence(v), kContinue);
            if (u(rng) >= cont) break;
            auto row = g.child_row(tag, d, g.val.child_valence(v));
            std::vector<double> weights(row.begin(), row.end());
            auto child = expand(g, pick(weights, rng), budget, rng);
            if (!child) return std::nullopt;
            (d == Dir::Left ? node.left : node.right).push_back(std::move(*child));
            ++v;
        }
    }
    return node;
}

// Surface order: left children farthest-first, the head, then right children
// nearest-first. Returns nothing; tags/heads are appended in place.
inline void linearize(const Node& node, int parent, std::vector<int>& tags,
                      std::vector<int>& heads) {
    std::function<int(const Node&)> walk = [&](const Node& n) -> int {
        std::vector<int> left_slots;
        for (auto it = n.left.rbegin(); it != n.left.rend(); ++it) left_slots.push_back(walk(*it));
        int my = static_cast<int>(tags.size());
        tags.push_back(n.tag);
        heads.push_back(-2);
        for (int s : left_slots) heads[s] = my;
        for (const Node& c : n.right) heads[walk(c)] = my;
        return my;
    };
    int root_slot = walk(node);
    heads[root_slot] = parent;
}

}  // namespace synthetic_detail

// Samples one sentence (tag ids + ParseTree heads) from the grammar,
// rejecting samples longer than max_len.
inline std::pair<std::vector<int>, ParseTree> sample_tagged_tree(const DmvParams& grammar,
                                                                 Rng& rng, int max_len) {
    while (true) {
        std::vector<double> root_w(grammar.root.begin(), grammar.root.end());
        int root_tag = synthetic_detail::pick(root_w, rng);
        int budget = 4 * max_len;
        auto node = synthetic_detail::expand(grammar, root_tag, budget, rng);
        if (!node) continue;
        std::vector<int> tags;
        std::vector<int> heads;
        synthetic_detail::linearize(*node, -1, tags, heads);
        if (static_cast<int>(tags.size()) > max_len) continue;
        return {std::move(tags), ParseTree{std::move(heads)}};
    }
}

// n_sentences raw sentences with gold heads; words drawn per tag from fixed
// inventories with 1/rank weights, independent of structure.
inline std::vector<RawSentence> sample_synthetic_corpus(int n_sentences, uint64_t seed,
                                                        int max_len = 10) {
    using namespace synthetic_detail;
    SyntheticBenchmark bench = synthetic_benchmark();
    Rng rng(seed);
    std::vector<std::vector<double>> zipf(kTags);
    for (int t = 0; t < kTags; ++t)
        for (size_t r = 0; r < word_lists()[t].size(); ++r) zipf[t].push_back(1.0 / (r + 1));

    std::vector<RawSentence> out;
    out.reserve(n_sentences);
    for (int i = 0; i < n_sentences; ++i) {
        auto [tags, tree] = sample_tagged_tree(bench.grammar, rng, max_len);
        RawSentence raw;
        for (size_t t = 0; t < tags.size(); ++t) {
            raw.pos.push_back(tag_names()[tags[t]]);
            raw.forms.push_back(word_lists()[tags[t]][pick(zipf[tags[t]], rng)]);
        }
        std::vector<int> gold;
        for (int h : tree.heads) gold.push_back(h + 1);
        raw.gold_heads = std::move(gold);
        out.push_back(std::move(raw));
    }
    return out;
}

}  // namespace lexdmv
