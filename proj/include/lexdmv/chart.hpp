// Exact extended-DMV inference over projective single-rooted trees:
// inside/outside dynamic programming, posterior expected rule counts, and
// Viterbi decoding. Everything runs in the log domain.
//
// Split-head item set, all scores carrying rule log-probabilities only:
//   ropen(h, j, v)  head h, right spine over [h, j], v capped dependents so
//                   far, not yet stopped rightward (lopen mirrors over [i, h])
//   riarc(h, a, v)  arc h->a chosen, a's left half attached, covering [h, a];
//                   v is the head's capped dependent count after this arc
//   rtri(h, j)      h stopped rightward, right constituent spans [h, j]
// A full constituent of h over [i, j] is ltri(h, i) + rtri(h, j); the goal
// attaches ROOT. The two-step arc build keeps the runtime at O(n^3 * V).
#pragma once

#include <utility>
#include <vector>

#include "lexdmv/model.hpp"

namespace lexdmv {

// Log-domain copy of DmvParams; build once per E-step and share read-only.
struct LogDmv {
    int m = 0;
    ValenceConfig val;
    std::vector<double> root;
    std::vector<double> child;
    std::vector<double> decision;

    LogDmv() = default;
    explicit LogDmv(const DmvParams& p) : m(p.m), val(p.val) {
        auto to_log = [](const std::vector<double>& in) {
            std::vector<double> out(in.size());
            for (size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0 ? std::log(in[i]) : kNegInf;
            return out;
        };
        root = to_log(p.root);
        child = to_log(p.child);
        decision = to_log(p.decision);
    }

    double root_lp(int t) const { return root[t]; }
    double child_lp(int h, Dir d, int v, int c) const {
        return child[((static_cast<size_t>(h) * 2 + static_cast<int>(d)) * val.child_cap + v) * m +
                     c];
    }
    double decision_lp(int h, Dir d, int v, int choice) const {
        return decision[((static_cast<size_t>(h) * 2 + static_cast<int>(d)) * val.decision_cap +
                         v) *
                            2 +
                        choice];
    }
};

namespace chart_detail {

// Flat storage for the six item families of one sentence.
struct Cells {
    int n = 0, V = 1;
    std::vector<double> ropen, lopen, riarc, liarc, rtri, ltri;

    Cells(int n_, int V_, double fill)
        : n(n_),
          V(V_),
          ropen(static_cast<size_t>(n_) * n_ * V_, fill),
          lopen(static_cast<size_t>(n_) * n_ * V_, fill),
          riarc(static_cast<size_t>(n_) * n_ * V_, fill),
          liarc(static_cast<size_t>(n_) * n_ * V_, fill),
          rtri(static_cast<size_t>(n_) * n_, fill),
          ltri(static_cast<size_t>(n_) * n_, fill) {}

    size_t at3(int h, int o, int v) const { return (static_cast<size_t>(h) * n + o) * V + v; }
    size_t at2(int h, int o) const { return static_cast<size_t>(h) * n + o; }
};

inline int vnext(int v, int V) { return std::min(v + 1, V - 1); }

}  // namespace chart_detail

struct InsideChart {
    chart_detail::Cells cells;
    double log_prob = kNegInf;

    InsideChart(int n, int V) : cells(n, V, kNegInf) {}
};

struct OutsideChart {
    chart_detail::Cells cells;

    OutsideChart(int n, int V) : cells(n, V, kNegInf) {}
};

inline InsideChart inside(const Sentence& s, const LogDmv& P) {
    const int n = s.size();
    if (n < 1) throw std::invalid_argument("inside: empty sentence");
    const ValenceConfig& vc = P.val;
    const int V = vc.chart_cap();
    InsideChart chart(n, V);
    auto& C = chart.cells;
    const auto& tok = s.token_ids;

    for (int h = 0; h < n; ++h) {
        C.ropen[C.at3(h, h, 0)] = 0.0;
        C.lopen[C.at3(h, h, 0)] = 0.0;
        C.rtri[C.at2(h, h)] = P.decision_lp(tok[h], Dir::Right, 0, kStop);
        C.ltri[C.at2(h, h)] = P.decision_lp(tok[h], Dir::Left, 0, kStop);
    }

    for (int w = 1; w < n; ++w) {
        // rightward items: head h, far end j = h + w
        for (int h = 0; h + w < n; ++h) {
            const int j = h + w;
            const int th = tok[h];
            for (int k = h; k < j; ++k) {
                double lt = C.ltri[C.at2(j, k + 1)];
                if (lt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double ro = C.ropen[C.at3(h, k, v)];
                    if (ro == kNegInf) continue;
                    double lp = ro + lt +
                                P.decision_lp(th, Dir::Right, vc.decision_valence(v), kContinue) +
                                P.child_lp(th, Dir::Right, vc.child_valence(v), tok[j]);
                    log_add_to(C.riarc[C.at3(h, j, chart_detail::vnext(v, V))], lp);
                }
            }
            for (int a = h + 1; a <= j; ++a) {
                double rt = C.rtri[C.at2(a, j)];
                if (rt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double ia = C.riarc[C.at3(h, a, v)];
                    if (ia == kNegInf) continue;
                    log_add_to(C.ropen[C.at3(h, j, v)], ia + rt);
                }
            }
            for (int v = 0; v < V; ++v) {
                double ro = C.ropen[C.at3(h, j, v)];
                if (ro == kNegInf) continue;
                log_add_to(C.rtri[C.at2(h, j)],
                           ro + P.decision_lp(th, Dir::Right, vc.decision_valence(v), kStop));
            }
        }
        // leftward items: head h, far end i = h - w
        for (int h = w; h < n; ++h) {
            const int i = h - w;
            const int th = tok[h];
            for (int k = i + 1; k <= h; ++k) {
                double rt = C.rtri[C.at2(i, k - 1)];
                if (rt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double lo = C.lopen[C.at3(h, k, v)];
                    if (lo == kNegInf) continue;
                    double lp = lo + rt +
                                P.decision_lp(th, Dir::Left, vc.decision_valence(v), kContinue) +
                                P.child_lp(th, Dir::Left, vc.child_valence(v), tok[i]);
                    log_add_to(C.liarc[C.at3(h, i, chart_detail::vnext(v, V))], lp);
                }
            }
            for (int a = i; a < h; ++a) {
                double lt = C.ltri[C.at2(a, i)];
                if (lt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double ia = C.liarc[C.at3(h, a, v)];
                    if (ia == kNegInf) continue;
                    log_add_to(C.lopen[C.at3(h, i, v)], ia + lt);
                }
            }
            for (int v = 0; v < V; ++v) {
                double lo = C.lopen[C.at3(h, i, v)];
                if (lo == kNegInf) continue;
                log_add_to(C.ltri[C.at2(h, i)],
                           lo + P.decision_lp(th, Dir::Left, vc.decision_valence(v), kStop));
            }
        }
    }

    for (int h = 0; h < n; ++h)
        log_add_to(chart.log_prob,
                   P.root_lp(tok[h]) + C.ltri[C.at2(h, 0)] + C.rtri[C.at2(h, n - 1)]);
    return chart;
}

inline InsideChart inside(const Sentence& s, const DmvParams& params) {
    return inside(s, LogDmv(params));
}

inline double sentence_log_prob(const Sentence& s, const LogDmv& P) {
    return inside(s, P).log_prob;
}

// Outside pass: mirror of inside, pushing mass from parents to children in
// decreasing width; within a width triangles go first, then opens, then arcs.
inline OutsideChart outside(const Sentence& s, const LogDmv& P, const InsideChart& in) {
    const int n = s.size();
    const ValenceConfig& vc = P.val;
    const int V = vc.chart_cap();
    OutsideChart out(n, V);
    auto& O = out.cells;
    const auto& I = in.cells;
    const auto& tok = s.token_ids;

    for (int h = 0; h < n; ++h) {
        double rlp = P.root_lp(tok[h]);
        log_add_to(O.ltri[O.at2(h, 0)], rlp + I.rtri[I.at2(h, n - 1)]);
        log_add_to(O.rtri[O.at2(h, n - 1)], rlp + I.ltri[I.at2(h, 0)]);
    }

    for (int w = n - 1; w >= 1; --w) {
        for (int h = 0; h + w < n; ++h) {
            const int j = h + w;
            const int th = tok[h];
            double ort = O.rtri[O.at2(h, j)];
            if (ort != kNegInf) {
                for (int v = 0; v < V; ++v)
                    log_add_to(O.ropen[O.at3(h, j, v)],
                               ort + P.decision_lp(th, Dir::Right, vc.decision_valence(v), kStop));
            }
            for (int v = 0; v < V; ++v) {
                double oro = O.ropen[O.at3(h, j, v)];
                if (oro == kNegInf) continue;
                for (int a = h + 1; a <= j; ++a) {
                    log_add_to(O.riarc[O.at3(h, a, v)], oro + I.rtri[I.at2(a, j)]);
                    log_add_to(O.rtri[O.at2(a, j)], oro + I.riarc[I.at3(h, a, v)]);
                }
            }
            for (int k = h; k < j; ++k) {
                for (int v = 0; v < V; ++v) {
                    double oia = O.riarc[O.at3(h, j, chart_detail::vnext(v, V))];
                    if (oia == kNegInf) continue;
                    double rules =
                        P.decision_lp(th, Dir::Right, vc.decision_valence(v), kContinue) +
                        P.child_lp(th, Dir::Right, vc.child_valence(v), tok[j]);
                    log_add_to(O.ropen[O.at3(h, k, v)],
                               oia + I.ltri[I.at2(j, k + 1)] + rules);
                    log_add_to(O.ltri[O.at2(j, k + 1)],
                               oia + I.ropen[I.at3(h, k, v)] + rules);
                }
            }
        }
        for (int h = w; h < n; ++h) {
            const int i = h - w;
            const int th = tok[h];
            double olt = O.ltri[O.at2(h, i)];
            if (olt != kNegInf) {
                for (int v = 0; v < V; ++v)
                    log_add_to(O.lopen[O.at3(h, i, v)],
                               olt + P.decision_lp(th, Dir::Left, vc.decision_valence(v), kStop));
            }
            for (int v = 0; v < V; ++v) {
                double olo = O.lopen[O.at3(h, i, v)];
                if (olo == kNegInf) continue;
                for (int a = i; a < h; ++a) {
                    log_add_to(O.liarc[O.at3(h, a, v)], olo + I.ltri[I.at2(a, i)]);
                    log_add_to(O.ltri[O.at2(a, i)], olo + I.liarc[I.at3(h, a, v)]);
                }
            }
            for (int k = i + 1; k <= h; ++k) {
                for (int v = 0; v < V; ++v) {
                    double oia = O.liarc[O.at3(h, i, chart_detail::vnext(v, V))];
                    if (oia == kNegInf) continue;
                    double rules =
                        P.decision_lp(th, Dir::Left, vc.decision_valence(v), kContinue) +
                        P.child_lp(th, Dir::Left, vc.child_valence(v), tok[i]);
                    log_add_to(O.lopen[O.at3(h, k, v)],
                               oia + I.rtri[I.at2(i, k - 1)] + rules);
                    log_add_to(O.rtri[O.at2(i, k - 1)],
                               oia + I.lopen[I.at3(h, k, v)] + rules);
                }
            }
        }
    }
    // width 0: closing stops over single-token opens
    for (int h = 0; h < n; ++h) {
        double ort = O.rtri[O.at2(h, h)];
        if (ort != kNegInf)
            for (int v = 0; v < V; ++v)
                log_add_to(O.ropen[O.at3(h, h, v)],
                           ort + P.decision_lp(tok[h], Dir::Right, vc.decision_valence(v), kStop));
        double olt = O.ltri[O.at2(h, h)];
        if (olt != kNegInf)
            for (int v = 0; v < V; ++v)
                log_add_to(O.lopen[O.at3(h, h, v)],
                           olt + P.decision_lp(tok[h], Dir::Left, vc.decision_valence(v), kStop));
    }
    return out;
}

// Posterior expected usage count of every rule, accumulated into `acc`.
inline void accumulate_expected_counts(const Sentence& s, const LogDmv& P, CountTable& acc) {
    const int n = s.size();
    const ValenceConfig& vc = P.val;
    const int V = vc.chart_cap();
    InsideChart in = inside(s, P);
    if (in.log_prob == kNegInf)
        throw DataError("expected_counts: sentence has zero probability under the model");
    OutsideChart out = outside(s, P, in);
    const auto& I = in.cells;
    const auto& O = out.cells;
    const auto& tok = s.token_ids;
    const double lz = in.log_prob;

    auto post = [&](double lp) { return lp == kNegInf ? 0.0 : std::exp(lp - lz); };

    for (int h = 0; h < n; ++h) {
        acc.root[tok[h]] +=
            post(P.root_lp(tok[h]) + I.ltri[I.at2(h, 0)] + I.rtri[I.at2(h, n - 1)]);
        // STOP applications closing each open item (width 0 included)
        for (int j = h; j < n; ++j) {
            double ort = O.rtri[O.at2(h, j)];
            if (ort == kNegInf) continue;
            for (int v = 0; v < V; ++v) {
                double ro = I.ropen[I.at3(h, j, v)];
                if (ro == kNegInf) continue;
                int dv = vc.decision_valence(v);
                acc.decision_at(tok[h], Dir::Right, dv, kStop) +=
                    post(ort + ro + P.decision_lp(tok[h], Dir::Right, dv, kStop));
            }
        }
        for (int i = h; i >= 0; --i) {
            double olt = O.ltri[O.at2(h, i)];
            if (olt == kNegInf) continue;
            for (int v = 0; v < V; ++v) {
                double lo = I.lopen[I.at3(h, i, v)];
                if (lo == kNegInf) continue;
                int dv = vc.decision_valence(v);
                acc.decision_at(tok[h], Dir::Left, dv, kStop) +=
                    post(olt + lo + P.decision_lp(tok[h], Dir::Left, dv, kStop));
            }
        }
        // CONTINUE + CHILD applications at each arc build
        for (int a = h + 1; a < n; ++a) {
            for (int k = h; k < a; ++k) {
                double lt = I.ltri[I.at2(a, k + 1)];
                if (lt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double ro = I.ropen[I.at3(h, k, v)];
                    if (ro == kNegInf) continue;
                    double oia = O.riarc[O.at3(h, a, chart_detail::vnext(v, V))];
                    if (oia == kNegInf) continue;
                    int dv = vc.decision_valence(v), cv = vc.child_valence(v);
                    double p = post(oia + ro + lt +
                                    P.decision_lp(tok[h], Dir::Right, dv, kContinue) +
                                    P.child_lp(tok[h], Dir::Right, cv, tok[a]));
                    acc.decision_at(tok[h], Dir::Right, dv, kContinue) += p;
                    acc.child_at(tok[h], Dir::Right, cv, tok[a]) += p;
                }
            }
        }
        for (int a = h - 1; a >= 0; --a) {
            for (int k = a + 1; k <= h; ++k) {
                double rt = I.rtri[I.at2(a, k - 1)];
                if (rt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double lo = I.lopen[I.at3(h, k, v)];
                    if (lo == kNegInf) continue;
                    double oia = O.liarc[O.at3(h, a, chart_detail::vnext(v, V))];
                    if (oia == kNegInf) continue;
                    int dv = vc.decision_valence(v), cv = vc.child_valence(v);
                    double p = post(oia + lo + rt +
                                    P.decision_lp(tok[h], Dir::Left, dv, kContinue) +
                                    P.child_lp(tok[h], Dir::Left, cv, tok[a]));
                    acc.decision_at(tok[h], Dir::Left, dv, kContinue) += p;
                    acc.child_at(tok[h], Dir::Left, cv, tok[a]) += p;
                }
            }
        }
    }
}

inline CountTable expected_counts(const Sentence& s, const DmvParams& params) {
    CountTable acc(params.m, params.val);
    accumulate_expected_counts(s, LogDmv(params), acc);
    return acc;
}

// posteriors[a][h] = P(head of a is h); posteriors[a][n] = P(a attaches to
// ROOT). Each row sums to 1 for a sentence with nonzero probability.
inline std::vector<std::vector<double>> arc_posteriors(const Sentence& s, const LogDmv& P) {
    const int n = s.size();
    const int V = P.val.chart_cap();
    InsideChart in = inside(s, P);
    OutsideChart out = outside(s, P, in);
    const auto& I = in.cells;
    const auto& O = out.cells;
    const double lz = in.log_prob;
    std::vector<std::vector<double>> post(n, std::vector<double>(n + 1, 0.0));
    for (int a = 0; a < n; ++a) {
        post[a][n] = std::exp(P.root_lp(s.token_ids[a]) + I.ltri[I.at2(a, 0)] +
                              I.rtri[I.at2(a, n - 1)] - lz);
        for (int h = 0; h < n; ++h) {
            if (h == a) continue;
            double lp = kNegInf;
            for (int v = 0; v < V; ++v) {
                const auto& iarc = h < a ? I.riarc : I.liarc;
                const auto& oarc = h < a ? O.riarc : O.liarc;
                double iv = iarc[I.at3(h, a, v)], ov = oarc[O.at3(h, a, v)];
                if (iv != kNegInf && ov != kNegInf) log_add_to(lp, iv + ov);
            }
            if (lp != kNegInf) post[a][h] = std::exp(lp - lz);
        }
    }
    return post;
}

// Log-probability of one tree under the generative process; the definition
// the chart algorithms must agree with.
inline double tree_log_prob(const ParseTree& tree, const Sentence& s, const LogDmv& P) {
    if (tree.size() != s.size()) throw std::invalid_argument("tree_log_prob: length mismatch");
    validate_tree(tree);
    const int n = s.size();
    const ValenceConfig& vc = P.val;
    double lp = 0.0;
    for (int h = 0; h < n; ++h) {
        if (tree.heads[h] == -1) lp += P.root_lp(s.token_ids[h]);
        const int tok = s.token_ids[h];
        for (Dir d : {Dir::Left, Dir::Right}) {
            int k = 0;
            if (d == Dir::Left) {
                for (int a = h - 1; a >= 0; --a) {
                    if (tree.heads[a] != h) continue;
                    lp += P.decision_lp(tok, d, vc.decision_valence(k), kContinue) +
                          P.child_lp(tok, d, vc.child_valence(k), s.token_ids[a]);
                    ++k;
                }
            } else {
                for (int a = h + 1; a < n; ++a) {
                    if (tree.heads[a] != h) continue;
                    lp += P.decision_lp(tok, d, vc.decision_valence(k), kContinue) +
                          P.child_lp(tok, d, vc.child_valence(k), s.token_ids[a]);
                    ++k;
                }
            }
            lp += P.decision_lp(tok, d, vc.decision_valence(k), kStop);
        }
    }
    return lp;
}

inline double tree_log_prob(const ParseTree& tree, const Sentence& s, const DmvParams& params) {
    return tree_log_prob(tree, s, LogDmv(params));
}

namespace chart_detail {

struct ViterbiBack {
    // per ropen/lopen cell: chosen dependent position; per riarc/liarc cell:
    // split point and previous valence; per triangle cell: closing valence
    std::vector<int> open_dep, arc_split, arc_vprev, tri_v;
};

}  // namespace chart_detail

// Maximum-probability tree. Ties are broken deterministically: candidates are
// scanned root-head ascending and nearer dependents first, and only strict
// improvements replace the incumbent.
inline std::pair<ParseTree, double> viterbi(const Sentence& s, const LogDmv& P) {
    const int n = s.size();
    if (n < 1) throw std::invalid_argument("viterbi: empty sentence");
    const ValenceConfig& vc = P.val;
    const int V = vc.chart_cap();
    chart_detail::Cells C(n, V, kNegInf);
    chart_detail::ViterbiBack B;
    B.open_dep.assign(2 * C.ropen.size(), -1);
    B.arc_split.assign(2 * C.riarc.size(), -1);
    B.arc_vprev.assign(2 * C.riarc.size(), -1);
    B.tri_v.assign(2 * C.rtri.size(), -1);
    const auto& tok = s.token_ids;
    // right-side backpointers live at [idx], left-side at [size + idx]
    const size_t RO = 0, LO = C.ropen.size(), RA = 0, LA = C.riarc.size(), RT = 0,
                 LT = C.rtri.size();

    for (int h = 0; h < n; ++h) {
        C.ropen[C.at3(h, h, 0)] = 0.0;
        C.lopen[C.at3(h, h, 0)] = 0.0;
        C.rtri[C.at2(h, h)] = P.decision_lp(tok[h], Dir::Right, 0, kStop);
        C.ltri[C.at2(h, h)] = P.decision_lp(tok[h], Dir::Left, 0, kStop);
        B.tri_v[RT + C.at2(h, h)] = 0;
        B.tri_v[LT + C.at2(h, h)] = 0;
    }

    for (int w = 1; w < n; ++w) {
        for (int h = 0; h + w < n; ++h) {
            const int j = h + w;
            const int th = tok[h];
            for (int k = h; k < j; ++k) {
                double lt = C.ltri[C.at2(j, k + 1)];
                if (lt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double ro = C.ropen[C.at3(h, k, v)];
                    if (ro == kNegInf) continue;
                    double lp = ro + lt +
                                P.decision_lp(th, Dir::Right, vc.decision_valence(v), kContinue) +
                                P.child_lp(th, Dir::Right, vc.child_valence(v), tok[j]);
                    size_t cell = C.at3(h, j, chart_detail::vnext(v, V));
                    if (lp > C.riarc[cell]) {
                        C.riarc[cell] = lp;
                        B.arc_split[RA + cell] = k;
                        B.arc_vprev[RA + cell] = v;
                    }
                }
            }
            for (int a = h + 1; a <= j; ++a) {  // nearer dependents first
                double rt = C.rtri[C.at2(a, j)];
                if (rt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double ia = C.riarc[C.at3(h, a, v)];
                    if (ia == kNegInf) continue;
                    size_t cell = C.at3(h, j, v);
                    if (ia + rt > C.ropen[cell]) {
                        C.ropen[cell] = ia + rt;
                        B.open_dep[RO + cell] = a;
                    }
                }
            }
            for (int v = 0; v < V; ++v) {
                double ro = C.ropen[C.at3(h, j, v)];
                if (ro == kNegInf) continue;
                double lp = ro + P.decision_lp(th, Dir::Right, vc.decision_valence(v), kStop);
                size_t cell = C.at2(h, j);
                if (lp > C.rtri[cell]) {
                    C.rtri[cell] = lp;
                    B.tri_v[RT + cell] = v;
                }
            }
        }
        for (int h = w; h < n; ++h) {
            const int i = h - w;
            const int th = tok[h];
            for (int k = i + 1; k <= h; ++k) {
                double rt = C.rtri[C.at2(i, k - 1)];
                if (rt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double lo = C.lopen[C.at3(h, k, v)];
                    if (lo == kNegInf) continue;
                    double lp = lo + rt +
                                P.decision_lp(th, Dir::Left, vc.decision_valence(v), kContinue) +
                                P.child_lp(th, Dir::Left, vc.child_valence(v), tok[i]);
                    size_t cell = C.at3(h, i, chart_detail::vnext(v, V));
                    if (lp > C.liarc[cell]) {
                        C.liarc[cell] = lp;
                        B.arc_split[LA + cell] = k;
                        B.arc_vprev[LA + cell] = v;
                    }
                }
            }
            for (int a = h - 1; a >= i; --a) {  // nearer dependents first
                double lt = C.ltri[C.at2(a, i)];
                if (lt == kNegInf) continue;
                for (int v = 0; v < V; ++v) {
                    double ia = C.liarc[C.at3(h, a, v)];
                    if (ia == kNegInf) continue;
                    size_t cell = C.at3(h, i, v);
                    if (ia + lt > C.lopen[cell]) {
                        C.lopen[cell] = ia + lt;
                        B.open_dep[LO + cell] = a;
                    }
                }
            }
            for (int v = 0; v < V; ++v) {
                double lo = C.lopen[C.at3(h, i, v)];
                if (lo == kNegInf) continue;
                double lp = lo + P.decision_lp(th, Dir::Left, vc.decision_valence(v), kStop);
                size_t cell = C.at2(h, i);
                if (lp > C.ltri[cell]) {
                    C.ltri[cell] = lp;
                    B.tri_v[LT + cell] = v;
                }
            }
        }
    }

    double best = kNegInf;
    int root = -1;
    for (int h = 0; h < n; ++h) {
        double lp = P.root_lp(tok[h]) + C.ltri[C.at2(h, 0)] + C.rtri[C.at2(h, n - 1)];
        if (lp > best) {
            best = lp;
            root = h;
        }
    }
    if (root < 0) throw DataError("viterbi: sentence has zero probability under the model");

    ParseTree tree;
    tree.heads.assign(n, -1);

    // unwind backpointers; the four take_* functions recurse over items
    struct Walker {
        const chart_detail::Cells& C;
        const chart_detail::ViterbiBack& B;
        ParseTree& tree;
        size_t RO, LO, RA, LA, RT, LT;

        void take_rtri(int h, int j) {
            take_ropen(h, j, B.tri_v[RT + C.at2(h, j)]);
        }
        void take_ltri(int h, int i) {
            take_lopen(h, i, B.tri_v[LT + C.at2(h, i)]);
        }
        void take_ropen(int h, int j, int v) {
            if (j == h) return;
            int a = B.open_dep[RO + C.at3(h, j, v)];
            take_riarc(h, a, v);
            take_rtri(a, j);
        }
        void take_lopen(int h, int i, int v) {
            if (i == h) return;
            int a = B.open_dep[LO + C.at3(h, i, v)];
            take_liarc(h, a, v);
            take_ltri(a, i);
        }
        void take_riarc(int h, int a, int v) {
            tree.heads[a] = h;
            size_t cell = C.at3(h, a, v);
            take_ropen(h, B.arc_split[RA + cell], B.arc_vprev[RA + cell]);
            take_ltri(a, B.arc_split[RA + cell] + 1);
        }
        void take_liarc(int h, int a, int v) {
            tree.heads[a] = h;
            size_t cell = C.at3(h, a, v);
            take_lopen(h, B.arc_split[LA + cell], B.arc_vprev[LA + cell]);
            take_rtri(a, B.arc_split[LA + cell] - 1);
        }
    } walker{C, B, tree, RO, LO, RA, LA, RT, LT};

    walker.take_ltri(root, 0);
    walker.take_rtri(root, n - 1);
    tree.heads[root] = -1;
    return {std::move(tree), best};
}

inline std::pair<ParseTree, double> viterbi(const Sentence& s, const DmvParams& params) {
    return viterbi(s, LogDmv(params));
}

}  // namespace lexdmv
