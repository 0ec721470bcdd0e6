// Neural rule-probability network. One shared trunk (token, tag and valence
// embeddings plus a direction-specific ReLU hidden layer) feeds two softmax
// heads: a factored CHILD head whose scores add an output word row and an
// output tag row shared by all tokens with that POS, and a 2-way DECISION
// head giving [p_stop, p_continue]. ROOT stays tabular. Trained with
// mini-batch SGD + momentum on count-weighted negative log-likelihood.
#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexdmv/corpus.hpp"
#include "lexdmv/model.hpp"

namespace lexdmv {

struct NeuralConfig {
    int word_dim = 100;       // input word-vector dimension
    int tag_dim = 20;         // input tag-vector dimension
    int val_dim = 10;         // valence-vector dimension
    int out_word_dim = 100;   // k, output word-vector dimension
    int out_tag_dim = 20;     // k', output tag-vector dimension
    int hidden_dim = 120;     // H; a linear projection is inserted when H != k + k'
    double lr = 0.03;
    double momentum = 0.9;
    int batch = 200;
    int epochs_per_mstep = 1;
    uint64_t seed = 1;

    int input_dim() const { return val_dim + word_dim + tag_dim; }
    int out_dim() const { return out_word_dim + out_tag_dim; }
    bool needs_projection() const { return hidden_dim != out_dim(); }

    void validate() const {
        if (word_dim < 1 || tag_dim < 1 || val_dim < 1 || out_word_dim < 1 || out_tag_dim < 1 ||
            hidden_dim < 1)
            throw std::invalid_argument("NeuralConfig: all dimensions must be >= 1");
        if (lr < 0) throw std::invalid_argument("NeuralConfig: lr must be >= 0");
        if (momentum < 0 || momentum >= 1)
            throw std::invalid_argument("NeuralConfig: momentum must lie in [0, 1)");
        if (batch < 1 || epochs_per_mstep < 1)
            throw std::invalid_argument("NeuralConfig: batch and epochs must be >= 1");
    }
};

enum class RuleFamily { Child, Decision };

struct NeuralWeights {
    Eigen::MatrixXd e_word;      // m x word_dim
    Eigen::MatrixXd e_tag;       // T x tag_dim
    Eigen::MatrixXd e_val;       // max(Vc, Vd) x val_dim
    Eigen::MatrixXd w_left;      // H x input_dim
    Eigen::MatrixXd w_right;     // H x input_dim
    Eigen::VectorXd b_left;      // H
    Eigen::VectorXd b_right;     // H
    Eigen::MatrixXd proj;        // out_dim x H, empty when H == out_dim
    Eigen::VectorXd b_proj;      // out_dim, empty when proj is
    Eigen::MatrixXd w_out_word;  // m x k
    Eigen::MatrixXd w_out_tag;   // T x k'
    Eigen::VectorXd b_child;     // m
    Eigen::MatrixXd w_dec;       // 2 x out_dim
    Eigen::VectorXd b_dec;       // 2

    template <class F>
    void for_each(F f) {
        f(e_word), f(e_tag), f(e_val), f(w_left), f(w_right), f(b_left), f(b_right), f(proj),
            f(b_proj), f(w_out_word), f(w_out_tag), f(b_child), f(w_dec), f(b_dec);
    }
    template <class F>
    static void for_each_pair(NeuralWeights& a, NeuralWeights& b, F f) {
        f(a.e_word, b.e_word), f(a.e_tag, b.e_tag), f(a.e_val, b.e_val), f(a.w_left, b.w_left),
            f(a.w_right, b.w_right), f(a.b_left, b.b_left), f(a.b_right, b.b_right),
            f(a.proj, b.proj), f(a.b_proj, b.b_proj), f(a.w_out_word, b.w_out_word),
            f(a.w_out_tag, b.w_out_tag), f(a.b_child, b.b_child), f(a.w_dec, b.w_dec),
            f(a.b_dec, b.b_dec);
    }
    template <class F>
    static void for_each_triple(NeuralWeights& a, NeuralWeights& b, NeuralWeights& c, F f) {
        f(a.e_word, b.e_word, c.e_word), f(a.e_tag, b.e_tag, c.e_tag),
            f(a.e_val, b.e_val, c.e_val), f(a.w_left, b.w_left, c.w_left),
            f(a.w_right, b.w_right, c.w_right), f(a.b_left, b.b_left, c.b_left),
            f(a.b_right, b.b_right, c.b_right), f(a.proj, b.proj, c.proj),
            f(a.b_proj, b.b_proj, c.b_proj), f(a.w_out_word, b.w_out_word, c.w_out_word),
            f(a.w_out_tag, b.w_out_tag, c.w_out_tag), f(a.b_child, b.b_child, c.b_child),
            f(a.w_dec, b.w_dec, c.w_dec), f(a.b_dec, b.b_dec, c.b_dec);
    }

    void set_zero() {
        for_each([](auto& w) { w.setZero(); });
    }
    NeuralWeights zero_clone() const {
        NeuralWeights z = *this;
        z.set_zero();
        return z;
    }
};

struct NeuralModel {
    NeuralConfig cfg;
    ValenceConfig val;
    int m = 0;  // token vocabulary
    int T = 0;  // tag count
    std::vector<int> tag_of;
    NeuralWeights w;
    NeuralWeights vel;  // momentum state, persists across EM iterations
    Rng rng;

    NeuralModel(int m_, int T_, std::vector<int> tag_of_, ValenceConfig vcfg,
                const NeuralConfig& ncfg)
        : cfg(ncfg), val(vcfg), m(m_), T(T_), tag_of(std::move(tag_of_)), rng(ncfg.seed) {
        cfg.validate();
        if (m < 1 || T < 1 || static_cast<int>(tag_of.size()) != m)
            throw std::invalid_argument("NeuralModel: bad vocabulary shape");
        const int in = cfg.input_dim(), out = cfg.out_dim(), H = cfg.hidden_dim;
        const int vmax = val.chart_cap();
        w.e_word.resize(m, cfg.word_dim);
        w.e_tag.resize(T, cfg.tag_dim);
        w.e_val.resize(vmax, cfg.val_dim);
        w.w_left.resize(H, in);
        w.w_right.resize(H, in);
        w.b_left.setZero(H);
        w.b_right.setZero(H);
        if (cfg.needs_projection()) {
            w.proj.resize(out, H);
            w.b_proj.setZero(out);
        } else {
            w.proj.resize(0, 0);
            w.b_proj.resize(0);
        }
        w.w_out_word.resize(m, cfg.out_word_dim);
        w.w_out_tag.resize(T, cfg.out_tag_dim);
        w.b_child.setZero(m);
        w.w_dec.resize(2, out);
        w.b_dec.setZero(2);

        auto fill = [&](Eigen::MatrixXd& mat, double scale) {
            std::uniform_real_distribution<double> u(-scale, scale);
            for (Eigen::Index i = 0; i < mat.size(); ++i) mat.data()[i] = u(rng);
        };
        fill(w.e_word, 0.01);
        fill(w.e_tag, 0.01);
        fill(w.e_val, 0.01);
        fill(w.w_left, 0.05);
        fill(w.w_right, 0.05);
        if (w.proj.size() > 0) fill(w.proj, 0.05);
        fill(w.w_out_word, 0.05);
        fill(w.w_out_tag, 0.05);
        fill(w.w_dec, 0.05);

        vel = w.zero_clone();
    }

    NeuralModel(const Lexicon& lexicon, ValenceConfig vcfg, const NeuralConfig& ncfg)
        : NeuralModel(lexicon.size(), lexicon.num_tags(), tag_vector(lexicon), vcfg, ncfg) {}

    static std::vector<int> tag_vector(const Lexicon& lexicon) {
        std::vector<int> tags(lexicon.size());
        for (int i = 0; i < lexicon.size(); ++i) tags[i] = lexicon.tag_of(i);
        return tags;
    }
};

namespace neural_detail {

struct ForwardCache {
    Eigen::VectorXd x, z, f, g, scores, probs;
};

inline void check_context(const NeuralModel& model, int head, int valence, RuleFamily fam) {
    if (head < 0 || head >= model.m)
        throw std::invalid_argument("forward: head token out of range");
    int cap = fam == RuleFamily::Child ? model.val.child_cap : model.val.decision_cap;
    if (valence < 0 || valence >= cap)
        throw std::invalid_argument("forward: valence " + std::to_string(valence) +
                                    " out of range [0, " + std::to_string(cap) + ")");
}

inline void run_forward(const NeuralModel& model, int head, Dir dir, int valence, RuleFamily fam,
                        ForwardCache& c) {
    check_context(model, head, valence, fam);
    const NeuralConfig& cfg = model.cfg;
    const NeuralWeights& w = model.w;
    c.x.resize(cfg.input_dim());
    c.x << w.e_val.row(valence).transpose(), w.e_word.row(head).transpose(),
        w.e_tag.row(model.tag_of[head]).transpose();
    const Eigen::MatrixXd& wd = dir == Dir::Left ? w.w_left : w.w_right;
    const Eigen::VectorXd& bd = dir == Dir::Left ? w.b_left : w.b_right;
    c.z = wd * c.x + bd;
    c.f = c.z.cwiseMax(0.0);
    if (w.proj.size() > 0)
        c.g = w.proj * c.f + w.b_proj;
    else
        c.g = c.f;
    if (fam == RuleFamily::Child) {
        Eigen::VectorXd word_scores = w.w_out_word * c.g.head(cfg.out_word_dim);
        Eigen::VectorXd tag_scores = w.w_out_tag * c.g.tail(cfg.out_tag_dim);
        c.scores.resize(model.m);
        for (int i = 0; i < model.m; ++i)
            c.scores[i] = word_scores[i] + tag_scores[model.tag_of[i]] + w.b_child[i];
    } else {
        c.scores = w.w_dec * c.g + w.b_dec;
    }
    double mx = c.scores.maxCoeff();
    c.probs = (c.scores.array() - mx).exp();
    c.probs /= c.probs.sum();
}

}  // namespace neural_detail

// Rule distribution for one context: CHILD over m tokens, DECISION over
// [p_stop, p_continue].
inline Eigen::VectorXd forward(const NeuralModel& model, int head, Dir dir, int valence,
                               RuleFamily fam) {
    neural_detail::ForwardCache c;
    neural_detail::run_forward(model, head, dir, valence, fam, c);
    return c.probs;
}

// Pre-softmax CHILD scores; exposed for the POS-sharing checks.
inline Eigen::VectorXd child_scores(const NeuralModel& model, int head, Dir dir, int valence) {
    neural_detail::ForwardCache c;
    neural_detail::run_forward(model, head, dir, valence, RuleFamily::Child, c);
    return c.scores;
}

// One training instance: a (head, dir, valence, family) context whose target
// is the count vector over that context's outcomes.
struct CountContext {
    int head;
    Dir dir;
    int valence;
    RuleFamily fam;
    const double* counts;  // m entries for Child, 2 for Decision
    double total;
};

inline std::vector<CountContext> positive_contexts(const NeuralModel& model,
                                                   const CountTable& counts) {
    if (counts.m != model.m)
        throw std::invalid_argument("vocabulary mismatch between counts and model");
    std::vector<CountContext> out;
    for (int h = 0; h < counts.m; ++h) {
        for (Dir d : {Dir::Left, Dir::Right}) {
            for (int v = 0; v < counts.val.child_cap; ++v) {
                auto row = counts.child_row(h, d, v);
                double total = std::accumulate(row.begin(), row.end(), 0.0);
                if (total > 0) out.push_back({h, d, v, RuleFamily::Child, row.data(), total});
            }
            for (int v = 0; v < counts.val.decision_cap; ++v) {
                const double* row = &counts.decision[counts.decision_row_offset(h, d, v)];
                double total = row[0] + row[1];
                if (total > 0) out.push_back({h, d, v, RuleFamily::Decision, row, total});
            }
        }
    }
    return out;
}

// Count-weighted negative log-likelihood over CHILD and DECISION rules
// (ROOT is tabular and excluded).
inline double nn_loss(const NeuralModel& model, const CountTable& counts) {
    double loss = 0.0;
    neural_detail::ForwardCache c;
    for (const CountContext& ctx : positive_contexts(model, counts)) {
        neural_detail::run_forward(model, ctx.head, ctx.dir, ctx.valence, ctx.fam, c);
        const int k = ctx.fam == RuleFamily::Child ? model.m : 2;
        for (int i = 0; i < k; ++i)
            if (ctx.counts[i] > 0) loss -= ctx.counts[i] * std::log(c.probs[i]);
    }
    return loss;
}

namespace neural_detail {

// Accumulates d(sum of -count*log p over ctxs)/d(weights) into grad; returns
// that loss portion.
inline double backprop(const NeuralModel& model, std::span<const CountContext> ctxs,
                       NeuralWeights& grad) {
    const NeuralConfig& cfg = model.cfg;
    const NeuralWeights& w = model.w;
    const int k = cfg.out_word_dim, kt = cfg.out_tag_dim;
    double loss = 0.0;
    ForwardCache c;
    Eigen::VectorXd ds, dst, dg, df, dz, dx;
    for (const CountContext& ctx : ctxs) {
        run_forward(model, ctx.head, ctx.dir, ctx.valence, ctx.fam, c);
        dg.setZero(cfg.out_dim());
        if (ctx.fam == RuleFamily::Child) {
            ds = ctx.total * c.probs;
            for (int i = 0; i < model.m; ++i) {
                if (ctx.counts[i] > 0) {
                    loss -= ctx.counts[i] * std::log(c.probs[i]);
                    ds[i] -= ctx.counts[i];
                }
            }
            dst.setZero(model.T);
            for (int i = 0; i < model.m; ++i) dst[model.tag_of[i]] += ds[i];
            grad.w_out_word.noalias() += ds * c.g.head(k).transpose();
            grad.w_out_tag.noalias() += dst * c.g.tail(kt).transpose();
            grad.b_child += ds;
            dg.head(k).noalias() = w.w_out_word.transpose() * ds;
            dg.tail(kt).noalias() = w.w_out_tag.transpose() * dst;
        } else {
            ds = ctx.total * c.probs;
            for (int i = 0; i < 2; ++i) {
                if (ctx.counts[i] > 0) {
                    loss -= ctx.counts[i] * std::log(c.probs[i]);
                    ds[i] -= ctx.counts[i];
                }
            }
            grad.w_dec.noalias() += ds * c.g.transpose();
            grad.b_dec += ds;
            dg.noalias() = w.w_dec.transpose() * ds;
        }
        if (w.proj.size() > 0) {
            grad.proj.noalias() += dg * c.f.transpose();
            grad.b_proj += dg;
            df.noalias() = w.proj.transpose() * dg;
        } else {
            df = dg;
        }
        dz = df;
        for (Eigen::Index i = 0; i < dz.size(); ++i)
            if (c.z[i] <= 0) dz[i] = 0.0;
        if (ctx.dir == Dir::Left) {
            grad.w_left.noalias() += dz * c.x.transpose();
            grad.b_left += dz;
            dx.noalias() = w.w_left.transpose() * dz;
        } else {
            grad.w_right.noalias() += dz * c.x.transpose();
            grad.b_right += dz;
            dx.noalias() = w.w_right.transpose() * dz;
        }
        grad.e_val.row(ctx.valence) += dx.head(cfg.val_dim).transpose();
        grad.e_word.row(ctx.head) += dx.segment(cfg.val_dim, cfg.word_dim).transpose();
        grad.e_tag.row(model.tag_of[ctx.head]) += dx.tail(cfg.tag_dim).transpose();
    }
    return loss;
}

}  // namespace neural_detail

// Mini-batched gradient descent with momentum on nn_loss. Each batch's
// gradient is scaled by its count mass so step sizes do not grow with corpus
// size. Weights and velocity carry over from whatever state the model is in.
inline void fit(NeuralModel& model, const CountTable& counts) {
    std::vector<CountContext> ctxs = positive_contexts(model, counts);
    if (ctxs.empty()) return;
    NeuralWeights grad = model.w.zero_clone();
    const double lr = model.cfg.lr, mom = model.cfg.momentum;
    for (int epoch = 0; epoch < model.cfg.epochs_per_mstep; ++epoch) {
        std::shuffle(ctxs.begin(), ctxs.end(), model.rng);
        for (size_t start = 0; start < ctxs.size(); start += model.cfg.batch) {
            size_t count = std::min<size_t>(model.cfg.batch, ctxs.size() - start);
            std::span<const CountContext> batch(ctxs.data() + start, count);
            grad.set_zero();
            double loss = neural_detail::backprop(model, batch, grad);
            if (!std::isfinite(loss))
                throw DataError("fit: non-finite loss in epoch " + std::to_string(epoch));
            double mass = 0.0;
            for (const auto& ctx : batch) mass += ctx.total;
            const double scale = lr / mass;
            NeuralWeights::for_each_triple(
                model.w, model.vel, grad, [&](auto& wm, auto& vm, auto& gm) {
                    if (wm.size() == 0) return;
                    vm = mom * vm - scale * gm;
                    wm += vm;
                });
        }
    }
}

// CHILD and DECISION tables filled by the network; ROOT from normalized
// counts.
inline DmvParams export_params(const NeuralModel& model, const std::vector<double>& root_counts,
                               double lambda) {
    if (static_cast<int>(root_counts.size()) != model.m)
        throw std::invalid_argument("export_params: root count size mismatch");
    DmvParams p(model.m, model.val);
    detail::normalize_row(root_counts.data(), p.root.data(), model.m, lambda);
    neural_detail::ForwardCache c;
    for (int h = 0; h < model.m; ++h) {
        for (Dir d : {Dir::Left, Dir::Right}) {
            for (int v = 0; v < model.val.child_cap; ++v) {
                neural_detail::run_forward(model, h, d, v, RuleFamily::Child, c);
                auto row = p.child_row(h, d, v);
                for (int i = 0; i < model.m; ++i) row[i] = c.probs[i];
            }
            for (int v = 0; v < model.val.decision_cap; ++v) {
                neural_detail::run_forward(model, h, d, v, RuleFamily::Decision, c);
                p.decision_at(h, d, v, kStop) = c.probs[0];
                p.decision_at(h, d, v, kContinue) = c.probs[1];
            }
        }
    }
    return p;
}

// Re-draws every weight (biases and embeddings included) at the given scale.
// The gradient check uses this to push pre-activations away from ReLU kinks,
// where finite differences are meaningless.
inline void randomize_weights(NeuralModel& model, double scale, uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    model.w.for_each([&](auto& w) {
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
    });
}

// Smallest |pre-activation| over the contexts the loss touches; the gradient
// check re-seeds models whose value sits within 10*eps of a ReLU kink.
inline double min_abs_preactivation(const NeuralModel& model, const CountTable& counts) {
    double best = std::numeric_limits<double>::infinity();
    neural_detail::ForwardCache c;
    for (const CountContext& ctx : positive_contexts(model, counts)) {
        neural_detail::run_forward(model, ctx.head, ctx.dir, ctx.valence, ctx.fam, c);
        best = std::min(best, c.z.cwiseAbs().minCoeff());
    }
    return best;
}

// Analytic gradient of nn_loss vs central finite differences on a sampled
// weight subset; returns the largest relative error. flip_sign is a fault
// hook used to prove the check catches broken gradients.
inline double gradient_check(const NeuralModel& model, const CountTable& counts, double eps,
                             int samples, uint64_t seed, bool flip_sign = false) {
    std::vector<CountContext> ctxs = positive_contexts(model, counts);
    if (ctxs.empty()) return 0.0;

    NeuralModel probe = model;
    NeuralWeights grad = probe.w.zero_clone();
    neural_detail::backprop(probe, ctxs, grad);
    if (flip_sign)
        grad.for_each([](auto& g) { g = -g; });

    std::vector<Eigen::MatrixXd*> grad_parts, weight_parts;
    grad.for_each([&](auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, Eigen::MatrixXd>)
            grad_parts.push_back(&g);
    });
    // vectors handled through a second pass keyed by the same layout
    std::vector<Eigen::VectorXd*> grad_vecs, weight_vecs;
    grad.for_each([&](auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, Eigen::VectorXd>)
            grad_vecs.push_back(&g);
    });
    probe.w.for_each([&](auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, Eigen::MatrixXd>)
            weight_parts.push_back(&g);
        else
            weight_vecs.push_back(&g);
    });

    std::vector<std::pair<double*, double*>> coords;  // (weight cell, analytic grad cell)
    for (size_t i = 0; i < weight_parts.size(); ++i)
        for (Eigen::Index j = 0; j < weight_parts[i]->size(); ++j)
            coords.push_back({weight_parts[i]->data() + j, grad_parts[i]->data() + j});
    for (size_t i = 0; i < weight_vecs.size(); ++i)
        for (Eigen::Index j = 0; j < weight_vecs[i]->size(); ++j)
            coords.push_back({weight_vecs[i]->data() + j, grad_vecs[i]->data() + j});

    Rng rng(seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    if (static_cast<int>(coords.size()) > samples) coords.resize(samples);

    double max_rel = 0.0;
    for (auto [wp, gp] : coords) {
        const double saved = *wp;
        *wp = saved + eps;
        double up = nn_loss(probe, counts);
        *wp = saved - eps;
        double down = nn_loss(probe, counts);
        *wp = saved;
        double numeric = (up - down) / (2 * eps);
        double rel = std::abs(*gp - numeric) / std::max({1.0, std::abs(*gp), std::abs(numeric)});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

struct VectorLoadStats {
    int word_found = 0, word_missing = 0;
    int tag_found = 0, tag_missing = 0;
    int unused_rows = 0;
};

namespace neural_detail {

inline void load_embedding_file(const std::string& path, int expect_dim,
                                const std::unordered_map<std::string, int>& index,
                                Eigen::MatrixXd& matrix, int& found, int& unused) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vector file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty vector file");
    auto header = split_ws(strip_cr(line));
    if (header.size() != 2)
        throw ParseError(path + ":1: expected header 'count dim'");
    long dim = parse_long(header[1]);
    if (dim != expect_dim)
        throw DataError(path + ": vector dimension " + std::to_string(dim) +
                        " does not match configured dimension " + std::to_string(expect_dim));
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(std::move(line));
        if (line.empty()) continue;
        auto fields = split_ws(line);
        if (static_cast<long>(fields.size()) != dim + 1)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(dim + 1) + " fields, got " +
                             std::to_string(fields.size()));
        auto it = index.find(fields[0]);
        if (it == index.end()) {
            ++unused;
            continue;
        }
        for (long d = 0; d < dim; ++d) {
            try {
                matrix(it->second, d) = parse_double(fields[d + 1]);
            } catch (const ParseError&) {
                throw ParseError(path + ":" + std::to_string(line_no) + ": bad vector value '" +
                                 fields[d + 1] + "'");
            }
        }
        ++found;
    }
}

}  // namespace neural_detail

// word2vec-text embeddings ("count dim" header, then "token v1 .. vdim"
// rows). Word rows are keyed by Lexicon::token_string ("word/TAG" or "TAG"),
// tag rows by the bare tag name. Tokens absent from a file keep their seeded
// random vectors. Either path may be empty.
inline VectorLoadStats load_vectors(NeuralModel& model, const Lexicon& lexicon,
                                    const std::string& word_path, const std::string& tag_path) {
    if (lexicon.size() != model.m || lexicon.num_tags() != model.T)
        throw std::invalid_argument("load_vectors: lexicon does not match model");
    VectorLoadStats stats;
    if (!word_path.empty()) {
        std::unordered_map<std::string, int> index;
        for (int i = 0; i < lexicon.size(); ++i) index[lexicon.token_string(i)] = i;
        neural_detail::load_embedding_file(word_path, model.cfg.word_dim, index, model.w.e_word,
                                           stats.word_found, stats.unused_rows);
    }
    stats.word_missing = model.m - stats.word_found;
    if (!tag_path.empty()) {
        std::unordered_map<std::string, int> index;
        for (int t = 0; t < lexicon.num_tags(); ++t) index[lexicon.tag_names[t]] = t;
        neural_detail::load_embedding_file(tag_path, model.cfg.tag_dim, index, model.w.e_tag,
                                           stats.tag_found, stats.unused_rows);
    }
    stats.tag_missing = model.T - stats.tag_found;
    return stats;
}

}  // namespace lexdmv
