// Extended-DMV parameter and count tables, tree count extraction, and the
// uniform / random / harmonic (KM) / treebank-MLE initializers.
//
// Generative process: draw the root token from ROOT; each head then generates
// dependents outward in both directions, nearest first.  Before the i-th
// dependent in a direction it pays DECISION(head, dir, min(i-1, Vd-1)) =
// CONTINUE and CHILD(head, dir, min(i-1, Vc-1))(dep); after its last
// dependent it pays DECISION(head, dir, min(k, Vd-1)) = STOP.
#pragma once

#include <span>
#include <vector>

#include "lexdmv/corpus.hpp"
#include "lexdmv/util.hpp"

namespace lexdmv {

enum class Dir : int { Left = 0, Right = 1 };
inline constexpr int kStop = 0;
inline constexpr int kContinue = 1;

struct ValenceConfig {
    int child_cap = 2;     // Vc
    int decision_cap = 2;  // Vd

    int chart_cap() const { return std::max(child_cap, decision_cap); }
    int child_valence(int nchildren) const { return std::min(nchildren, child_cap - 1); }
    int decision_valence(int nchildren) const { return std::min(nchildren, decision_cap - 1); }
};

// heads[i] in {-1} U [0,n), -1 = root attachment.
struct ParseTree {
    std::vector<int> heads;

    int size() const { return static_cast<int>(heads.size()); }
};

// Exactly one root, no cycles, and projectivity: every position strictly
// between a head and its dependent descends from that head.
inline void validate_tree(const ParseTree& tree) {
    const int n = tree.size();
    if (n == 0) throw DataError("tree: empty");
    int roots = 0;
    for (int i = 0; i < n; ++i) {
        int h = tree.heads[i];
        if (h == -1) {
            ++roots;
            continue;
        }
        if (h < 0 || h >= n || h == i)
            throw DataError("tree: bad head " + std::to_string(h) + " for token " +
                            std::to_string(i));
    }
    if (roots != 1)
        throw DataError("tree: " + std::to_string(roots) + " root attachments (expected 1)");
    for (int i = 0; i < n; ++i) {
        int h = tree.heads[i], steps = 0;
        while (h != -1) {
            h = tree.heads[h];
            if (++steps > n) throw DataError("tree: cycle through token " + std::to_string(i));
        }
    }
    // ancestor[i][j] follows from head chains; check arcs cover their gap
    for (int a = 0; a < n; ++a) {
        int h = tree.heads[a];
        if (h == -1) continue;
        int lo = std::min(h, a), hi = std::max(h, a);
        for (int b = lo + 1; b < hi; ++b) {
            int anc = b;
            while (anc != -1 && anc != h) anc = tree.heads[anc];
            if (anc != h)
                throw DataError("tree: arc " + std::to_string(h) + "->" + std::to_string(a) +
                                " crosses token " + std::to_string(b));
        }
    }
}

// gold_heads (0 = root, 1-based) -> ParseTree (-1 = root, 0-based).
inline ParseTree tree_from_gold(const std::vector<int>& gold_heads) {
    ParseTree t;
    t.heads.reserve(gold_heads.size());
    for (int h : gold_heads) t.heads.push_back(h - 1);
    return t;
}

// Common layout for probability and count tables: ROOT over m tokens, CHILD
// over (head, dir, valence) x m, DECISION over (head, dir, valence) x 2.
struct DmvTables {
    int m = 0;
    ValenceConfig val;
    std::vector<double> root;
    std::vector<double> child;
    std::vector<double> decision;

    DmvTables() = default;
    DmvTables(int m_, ValenceConfig v, double fill = 0.0)
        : m(m_),
          val(v),
          root(m_, fill),
          child(static_cast<size_t>(m_) * 2 * v.child_cap * m_, fill),
          decision(static_cast<size_t>(m_) * 2 * v.decision_cap * 2, fill) {}

    size_t child_row_offset(int h, Dir d, int v) const {
        return ((static_cast<size_t>(h) * 2 + static_cast<int>(d)) * val.child_cap + v) * m;
    }
    size_t decision_row_offset(int h, Dir d, int v) const {
        return ((static_cast<size_t>(h) * 2 + static_cast<int>(d)) * val.decision_cap + v) * 2;
    }

    double& child_at(int h, Dir d, int v, int c) { return child[child_row_offset(h, d, v) + c]; }
    double child_at(int h, Dir d, int v, int c) const {
        return child[child_row_offset(h, d, v) + c];
    }
    double& decision_at(int h, Dir d, int v, int choice) {
        return decision[decision_row_offset(h, d, v) + choice];
    }
    double decision_at(int h, Dir d, int v, int choice) const {
        return decision[decision_row_offset(h, d, v) + choice];
    }
    std::span<double> child_row(int h, Dir d, int v) {
        return {child.data() + child_row_offset(h, d, v), static_cast<size_t>(m)};
    }
    std::span<const double> child_row(int h, Dir d, int v) const {
        return {child.data() + child_row_offset(h, d, v), static_cast<size_t>(m)};
    }

    bool same_shape(const DmvTables& o) const {
        return m == o.m && val.child_cap == o.val.child_cap &&
               val.decision_cap == o.val.decision_cap;
    }
};

struct DmvParams : DmvTables {
    using DmvTables::DmvTables;
};

struct CountTable : DmvTables {
    using DmvTables::DmvTables;

    // Entrywise addition; merge order is fixed by the caller so parallel
    // E-steps stay deterministic.
    void merge(const CountTable& o) {
        for (size_t i = 0; i < root.size(); ++i) root[i] += o.root[i];
        for (size_t i = 0; i < child.size(); ++i) child[i] += o.child[i];
        for (size_t i = 0; i < decision.size(); ++i) decision[i] += o.decision[i];
    }
    void clear() {
        std::fill(root.begin(), root.end(), 0.0);
        std::fill(child.begin(), child.end(), 0.0);
        std::fill(decision.begin(), decision.end(), 0.0);
    }
};

namespace detail {

// p_i = (c_i + lambda) / (sum + lambda*K); an all-zero row with lambda = 0
// falls back to uniform.
inline void normalize_row(const double* counts, double* probs, int k, double lambda) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += counts[i];
    if (sum == 0.0 && lambda == 0.0) {
        for (int i = 0; i < k; ++i) probs[i] = 1.0 / k;
        return;
    }
    double denom = sum + lambda * k;
    for (int i = 0; i < k; ++i) probs[i] = (counts[i] + lambda) / denom;
}

}  // namespace detail

inline DmvParams normalize(const CountTable& counts, double lambda) {
    if (lambda < 0) throw std::invalid_argument("normalize: lambda must be >= 0");
    DmvParams p(counts.m, counts.val);
    detail::normalize_row(counts.root.data(), p.root.data(), counts.m, lambda);
    const size_t child_rows = counts.child.size() / counts.m;
    for (size_t r = 0; r < child_rows; ++r)
        detail::normalize_row(counts.child.data() + r * counts.m, p.child.data() + r * counts.m,
                              counts.m, lambda);
    for (size_t r = 0; r < counts.decision.size() / 2; ++r)
        detail::normalize_row(counts.decision.data() + r * 2, p.decision.data() + r * 2, 2,
                              lambda);
    return p;
}

inline DmvParams init_uniform(int m, ValenceConfig vcfg) {
    if (m < 1) throw std::invalid_argument("init_uniform: m must be >= 1");
    DmvParams p(m, vcfg);
    std::fill(p.root.begin(), p.root.end(), 1.0 / m);
    std::fill(p.child.begin(), p.child.end(), 1.0 / m);
    std::fill(p.decision.begin(), p.decision.end(), 0.5);
    return p;
}

inline DmvParams init_uniform(const Lexicon& lexicon, ValenceConfig vcfg) {
    return init_uniform(lexicon.size(), vcfg);
}

// Every distribution drawn as normalized uniform positive weights; the draw
// order is fixed, so a seed pins the whole table.
inline DmvParams init_random(int m, ValenceConfig vcfg, uint64_t seed) {
    if (m < 1) throw std::invalid_argument("init_random: m must be >= 1");
    DmvParams p(m, vcfg);
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto fill_row = [&](double* row, int k) {
        double sum = 0.0;
        for (int i = 0; i < k; ++i) {
            row[i] = u(rng) + 1e-6;
            sum += row[i];
        }
        for (int i = 0; i < k; ++i) row[i] /= sum;
    };
    fill_row(p.root.data(), m);
    for (size_t r = 0; r < p.child.size() / m; ++r) fill_row(p.child.data() + r * m, m);
    for (size_t r = 0; r < p.decision.size() / 2; ++r) fill_row(p.decision.data() + r * 2, 2);
    return p;
}

inline DmvParams init_random(const Lexicon& lexicon, ValenceConfig vcfg, uint64_t seed) {
    return init_random(lexicon.size(), vcfg, seed);
}

// Harmonic initializer: each dependent weights candidate parents by 1/distance
// (ROOT by 1/n), normalized per dependent. Child counts are replicated across
// valence slots; per head and direction, CONTINUE gets the attach mass and
// STOP gets 1 in every slot. Normalized with lambda = 0.
inline DmvParams init_km(const Corpus& corpus, int m, ValenceConfig vcfg) {
    if (corpus.empty()) throw std::invalid_argument("init_km: empty corpus");
    CountTable counts(m, vcfg);
    std::vector<double> attach_left, attach_right;
    for (const Sentence& s : corpus) {
        const int n = s.size();
        attach_left.assign(n, 0.0);
        attach_right.assign(n, 0.0);
        for (int a = 0; a < n; ++a) {
            double norm = 1.0 / n;  // ROOT candidate
            for (int h = 0; h < n; ++h)
                if (h != a) norm += 1.0 / std::abs(h - a);
            counts.root[s.token_ids[a]] += (1.0 / n) / norm;
            for (int h = 0; h < n; ++h) {
                if (h == a) continue;
                double w = (1.0 / std::abs(h - a)) / norm;
                Dir d = h < a ? Dir::Right : Dir::Left;
                for (int v = 0; v < vcfg.child_cap; ++v)
                    counts.child_at(s.token_ids[h], d, v, s.token_ids[a]) += w;
                (d == Dir::Right ? attach_right : attach_left)[h] += w;
            }
        }
        for (int h = 0; h < n; ++h) {
            for (int v = 0; v < vcfg.decision_cap; ++v) {
                counts.decision_at(s.token_ids[h], Dir::Left, v, kContinue) += attach_left[h];
                counts.decision_at(s.token_ids[h], Dir::Right, v, kContinue) += attach_right[h];
                counts.decision_at(s.token_ids[h], Dir::Left, v, kStop) += 1.0;
                counts.decision_at(s.token_ids[h], Dir::Right, v, kStop) += 1.0;
            }
        }
    }
    return normalize(counts, 0.0);
}

inline DmvParams init_km(const Corpus& corpus, const Lexicon& lexicon, ValenceConfig vcfg) {
    return init_km(corpus, lexicon.size(), vcfg);
}

// Adds the rule usages of one tree to a count table, reading the tree under
// the head-outward generative process.
inline void add_tree_counts(CountTable& counts, const Sentence& s, const ParseTree& tree,
                            double weight = 1.0) {
    const int n = s.size();
    std::vector<int> left_kids, right_kids;
    for (int h = 0; h < n; ++h) {
        if (tree.heads[h] == -1) counts.root[s.token_ids[h]] += weight;
        left_kids.clear();
        right_kids.clear();
        for (int a = h - 1; a >= 0; --a)
            if (tree.heads[a] == h) left_kids.push_back(a);  // nearest first
        for (int a = h + 1; a < n; ++a)
            if (tree.heads[a] == h) right_kids.push_back(a);
        const int tok = s.token_ids[h];
        for (Dir d : {Dir::Left, Dir::Right}) {
            const auto& kids = d == Dir::Left ? left_kids : right_kids;
            for (size_t i = 0; i < kids.size(); ++i) {
                int v = static_cast<int>(i);
                counts.decision_at(tok, d, counts.val.decision_valence(v), kContinue) += weight;
                counts.child_at(tok, d, counts.val.child_valence(v), s.token_ids[kids[i]]) +=
                    weight;
            }
            counts.decision_at(tok, d, counts.val.decision_valence(static_cast<int>(kids.size())),
                               kStop) += weight;
        }
    }
}

// Maximum-likelihood estimate from per-sentence trees.
inline DmvParams mle_from_trees(const Corpus& corpus, const std::vector<ParseTree>& trees, int m,
                                ValenceConfig vcfg, double lambda) {
    if (corpus.size() != trees.size())
        throw std::invalid_argument("mle_from_trees: corpus/tree count mismatch");
    if (corpus.empty()) throw std::invalid_argument("mle_from_trees: empty corpus");
    CountTable counts(m, vcfg);
    for (size_t i = 0; i < corpus.size(); ++i) {
        if (trees[i].size() != corpus[i].size())
            throw DataError("mle_from_trees: tree length mismatch for sentence " +
                            std::to_string(i));
        try {
            validate_tree(trees[i]);
        } catch (const DataError& e) {
            throw DataError("mle_from_trees: sentence " + std::to_string(i) + ": " + e.what());
        }
        add_tree_counts(counts, corpus[i], trees[i]);
    }
    return normalize(counts, lambda);
}

// Same, taking the trees from gold heads.
inline DmvParams mle_from_gold(const Corpus& corpus, int m, ValenceConfig vcfg, double lambda) {
    std::vector<ParseTree> trees;
    trees.reserve(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        if (!corpus[i].gold_heads)
            throw DataError("mle_from_gold: sentence " + std::to_string(i) + " has no gold heads");
        trees.push_back(tree_from_gold(*corpus[i].gold_heads));
    }
    return mle_from_trees(corpus, trees, m, vcfg, lambda);
}

}  // namespace lexdmv
