// EM drivers: exact soft EM and Viterbi (hard) EM over the tabular model, and
// batched hard EM with a persistent neural network. E-steps parallelize over
// contiguous sentence blocks merged in fixed order, so counts are independent
// of the thread count up to float addition grouping.
#pragma once

#include <chrono>
#include <functional>
#include <iostream>
#include <numeric>
#include <ostream>
#include <thread>

#include "lexdmv/eval.hpp"
#include "lexdmv/neural.hpp"

namespace lexdmv {

enum class TrainMode { SoftTabular, HardTabular, HardNeural };

inline const char* train_mode_name(TrainMode m) {
    switch (m) {
        case TrainMode::SoftTabular: return "soft";
        case TrainMode::HardTabular: return "hard";
        case TrainMode::HardNeural: return "neural";
    }
    return "?";
}

struct TrainConfig {
    TrainMode mode = TrainMode::SoftTabular;
    int max_iters = 50;
    double ll_tol = 1e-6;  // convergence threshold on per-token LL change
    double lambda = 0.1;
    int em_batch = 500;  // sentences per hard-EM iteration (neural mode)
    uint64_t seed = 1;
    int jobs = 1;
};

struct TraceRecord {
    int iteration = 0;
    double ll_per_token = 0.0;
    double ll_total = 0.0;  // corpus (or batch) log-likelihood, kept for tests
    double val_dda = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

struct TrainTrace {
    std::vector<TraceRecord> records;

    void write_csv(std::ostream& out) const {
        out << "iteration,ll_per_token,val_dda,seconds\n";
        for (const auto& r : records)
            out << r.iteration << ',' << format_double(r.ll_per_token) << ','
                << format_double(r.val_dda) << ',' << format_double(r.seconds) << "\n";
    }
};

struct TrainHooks {
    // called after each M-step with the freshly produced params
    std::function<void(int iter, const DmvParams&, const NeuralModel*)> on_iteration;
    // called before each neural E-step with the batch's sentence indices
    std::function<void(int iter, const std::vector<size_t>&)> on_batch;
};

namespace trainer_detail {

struct EStepResult {
    CountTable counts;
    double log_likelihood = 0.0;
    long tokens = 0;
};

// One E-step over the given sentences. soft = expected counts via
// inside-outside, otherwise Viterbi counts. Blocks merge in index order.
template <class SentenceAt>
EStepResult e_step(SentenceAt at, size_t count, const LogDmv& params, bool soft, int jobs) {
    auto run_block = [&](size_t lo, size_t hi, EStepResult& out) {
        for (size_t i = lo; i < hi; ++i) {
            const Sentence& s = at(i);
            out.tokens += s.size();
            if (soft) {
                InsideChart in = inside(s, params);
                if (in.log_prob == kNegInf)
                    throw DataError("e_step: zero-probability sentence " + std::to_string(i));
                accumulate_expected_counts(s, params, out.counts);
                out.log_likelihood += in.log_prob;
            } else {
                auto [tree, score] = viterbi(s, params);
                add_tree_counts(out.counts, s, tree);
                out.log_likelihood += score;
            }
        }
    };
    size_t nblocks = jobs > 1 ? std::min<size_t>(jobs, count) : 1;
    std::vector<EStepResult> parts;
    parts.reserve(nblocks);
    for (size_t b = 0; b < nblocks; ++b)
        parts.push_back({CountTable(params.m, params.val), 0.0, 0});
    if (nblocks == 1) {
        run_block(0, count, parts[0]);
        return std::move(parts[0]);
    }
    std::vector<std::thread> workers;
    for (size_t b = 0; b < nblocks; ++b)
        workers.emplace_back(run_block, count * b / nblocks, count * (b + 1) / nblocks,
                             std::ref(parts[b]));
    for (auto& t : workers) t.join();
    for (size_t b = 1; b < nblocks; ++b) {
        parts[0].counts.merge(parts[b].counts);
        parts[0].log_likelihood += parts[b].log_likelihood;
        parts[0].tokens += parts[b].tokens;
    }
    return std::move(parts[0]);
}

inline double maybe_val_dda(const DmvParams& params, const Corpus* validation, int jobs) {
    if (!validation || validation->empty()) return std::numeric_limits<double>::quiet_NaN();
    return evaluate(params, *validation, jobs).dda_all;
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace trainer_detail

// Classical soft EM: expected counts, then a smoothed M-step. With lambda = 0
// the corpus log-likelihood is non-decreasing.
inline std::pair<DmvParams, TrainTrace> soft_em(const Corpus& corpus, DmvParams params,
                                                const TrainConfig& cfg,
                                                const Corpus* validation = nullptr,
                                                const TrainHooks* hooks = nullptr) {
    if (corpus.empty()) throw std::invalid_argument("soft_em: empty corpus");
    TrainTrace trace;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        auto t0 = trainer_detail::Clock::now();
        LogDmv lp(params);
        auto e = trainer_detail::e_step([&](size_t i) -> const Sentence& { return corpus[i]; },
                                        corpus.size(), lp, /*soft=*/true, cfg.jobs);
        params = normalize(e.counts, cfg.lambda);
        TraceRecord rec;
        rec.iteration = iter;
        rec.ll_total = e.log_likelihood;
        rec.ll_per_token = e.log_likelihood / e.tokens;
        rec.val_dda = trainer_detail::maybe_val_dda(params, validation, cfg.jobs);
        rec.seconds = trainer_detail::seconds_since(t0);
        trace.records.push_back(rec);
        if (hooks && hooks->on_iteration) hooks->on_iteration(iter, params, nullptr);
        if (iter > 1 && std::abs(rec.ll_per_token - trace.records[iter - 2].ll_per_token) <
                            cfg.ll_tol)
            break;
    }
    return {std::move(params), std::move(trace)};
}

// Hard EM: the E-step reads counts off Viterbi parses; the trace logs the
// total Viterbi log-score, non-decreasing with lambda = 0.
inline std::pair<DmvParams, TrainTrace> hard_em_tabular(const Corpus& corpus, DmvParams params,
                                                        const TrainConfig& cfg,
                                                        const Corpus* validation = nullptr,
                                                        const TrainHooks* hooks = nullptr) {
    if (corpus.empty()) throw std::invalid_argument("hard_em_tabular: empty corpus");
    TrainTrace trace;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        auto t0 = trainer_detail::Clock::now();
        LogDmv lp(params);
        auto e = trainer_detail::e_step([&](size_t i) -> const Sentence& { return corpus[i]; },
                                        corpus.size(), lp, /*soft=*/false, cfg.jobs);
        params = normalize(e.counts, cfg.lambda);
        TraceRecord rec;
        rec.iteration = iter;
        rec.ll_total = e.log_likelihood;
        rec.ll_per_token = e.log_likelihood / e.tokens;
        rec.val_dda = trainer_detail::maybe_val_dda(params, validation, cfg.jobs);
        rec.seconds = trainer_detail::seconds_since(t0);
        trace.records.push_back(rec);
        if (hooks && hooks->on_iteration) hooks->on_iteration(iter, params, nullptr);
        if (iter > 1 && std::abs(rec.ll_per_token - trace.records[iter - 2].ll_per_token) <
                            cfg.ll_tol)
            break;
    }
    return {std::move(params), std::move(trace)};
}

struct NeuralTrainResult {
    NeuralModel model;
    DmvParams params;
    TrainTrace trace;
};

// Batched hard EM for the neural model. Each iteration Viterbi-parses the
// next em_batch sentences of a seeded shuffle (reshuffled every full pass),
// fits the same network on the batch counts without resetting weights or
// velocity, and re-exports the tables. ROOT counts accumulate across
// iterations since the network never predicts them. Runs exactly max_iters
// iterations; batch scores oscillate, so there is no LL stopping rule.
inline NeuralTrainResult hard_em_neural(const Corpus& corpus, NeuralModel model,
                                        DmvParams params, const TrainConfig& cfg,
                                        const Corpus* validation = nullptr,
                                        const TrainHooks* hooks = nullptr) {
    if (corpus.empty()) throw std::invalid_argument("hard_em_neural: empty corpus");
    if (model.m != params.m)
        throw std::invalid_argument("hard_em_neural: model/params vocabulary mismatch");
    size_t batch_size = cfg.em_batch;
    if (batch_size > corpus.size()) {
        std::cerr << "warning: em_batch " << batch_size << " exceeds corpus size "
                  << corpus.size() << ", clamping\n";
        batch_size = corpus.size();
    }
    if (batch_size < 1) throw std::invalid_argument("hard_em_neural: em_batch must be >= 1");

    Rng shuffle_rng(cfg.seed);
    std::vector<size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    size_t pos = 0;

    std::vector<double> root_sums(model.m, 0.0);
    TrainTrace trace;
    std::vector<size_t> batch;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        auto t0 = trainer_detail::Clock::now();
        batch.clear();
        while (batch.size() < batch_size) {
            if (pos == order.size()) {
                std::shuffle(order.begin(), order.end(), shuffle_rng);
                pos = 0;
            }
            batch.push_back(order[pos++]);
        }
        if (hooks && hooks->on_batch) hooks->on_batch(iter, batch);

        LogDmv lp(params);
        auto e = trainer_detail::e_step(
            [&](size_t i) -> const Sentence& { return corpus[batch[i]]; }, batch.size(), lp,
            /*soft=*/false, cfg.jobs);
        for (int t = 0; t < model.m; ++t) root_sums[t] += e.counts.root[t];
        fit(model, e.counts);
        params = export_params(model, root_sums, cfg.lambda);

        TraceRecord rec;
        rec.iteration = iter;
        rec.ll_total = e.log_likelihood;
        rec.ll_per_token = e.log_likelihood / e.tokens;
        rec.val_dda = trainer_detail::maybe_val_dda(params, validation, cfg.jobs);
        rec.seconds = trainer_detail::seconds_since(t0);
        trace.records.push_back(rec);
        if (hooks && hooks->on_iteration) hooks->on_iteration(iter, params, &model);
    }
    return {std::move(model), std::move(params), std::move(trace)};
}

}  // namespace lexdmv
