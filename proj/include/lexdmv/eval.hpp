// Directed dependency accuracy and corpus evaluation reports.
#pragma once

#include <ostream>
#include <thread>
#include <vector>

#include "lexdmv/chart.hpp"

namespace lexdmv {

// Fraction of positions whose predicted head (root included) matches gold.
// Predictions use ParseTree convention (-1 root), gold uses CoNLL convention
// (0 root, 1-based heads).
inline double dda(const ParseTree& pred, const std::vector<int>& gold_heads) {
    if (pred.size() != static_cast<int>(gold_heads.size()))
        throw std::invalid_argument("dda: predicted/gold length mismatch (" +
                                    std::to_string(pred.size()) + " vs " +
                                    std::to_string(gold_heads.size()) + ")");
    int correct = 0;
    for (int i = 0; i < pred.size(); ++i)
        if (pred.heads[i] + 1 == gold_heads[i]) ++correct;
    return static_cast<double>(correct) / pred.size();
}

struct SentenceScore {
    int length = 0;
    int correct = 0;
};

struct EvalReport {
    double dda_all = 0.0;
    double dda_le10 = 0.0;
    long tokens_scored = 0;
    long tokens_le10 = 0;
    std::vector<SentenceScore> per_sentence;

    void write_text(std::ostream& out) const {
        out << "sentences:    " << per_sentence.size() << "\n";
        out << "tokens:       " << tokens_scored << "\n";
        out << "dda:          " << dda_all << "\n";
        if (tokens_le10 > 0) out << "dda (<=10):   " << dda_le10 << "\n";
    }
    void write_csv(std::ostream& out) const {
        out << "sentence,length,correct,dda\n";
        for (size_t i = 0; i < per_sentence.size(); ++i)
            out << i << ',' << per_sentence[i].length << ',' << per_sentence[i].correct << ','
                << format_double(static_cast<double>(per_sentence[i].correct) /
                                 per_sentence[i].length)
                << "\n";
    }
};

// Viterbi-parses each sentence with the given params and parallelizes over
// contiguous blocks; results land in a fixed order, so the report does not
// depend on the thread count.
inline std::vector<ParseTree> parse_corpus(const Corpus& corpus, const LogDmv& params,
                                           int jobs = 1) {
    std::vector<ParseTree> trees(corpus.size());
    auto run = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) trees[i] = viterbi(corpus[i], params).first;
    };
    if (jobs <= 1 || corpus.size() < 2) {
        run(0, corpus.size());
        return trees;
    }
    size_t nblocks = std::min<size_t>(jobs, corpus.size());
    std::vector<std::thread> workers;
    for (size_t b = 0; b < nblocks; ++b) {
        size_t lo = corpus.size() * b / nblocks, hi = corpus.size() * (b + 1) / nblocks;
        workers.emplace_back(run, lo, hi);
    }
    for (auto& t : workers) t.join();
    return trees;
}

// Micro-averaged DDA over tokens; dda_le10 covers the <=10-token subset.
inline EvalReport evaluate(const DmvParams& params, const Corpus& corpus, int jobs = 1) {
    if (corpus.empty()) throw std::invalid_argument("evaluate: empty corpus");
    for (size_t i = 0; i < corpus.size(); ++i)
        if (!corpus[i].gold_heads)
            throw DataError("evaluate: sentence " + std::to_string(i) + " has no gold heads");

    std::vector<ParseTree> trees = parse_corpus(corpus, LogDmv(params), jobs);
    EvalReport report;
    long correct_all = 0, correct_le10 = 0;
    for (size_t i = 0; i < corpus.size(); ++i) {
        const auto& gold = *corpus[i].gold_heads;
        int correct = 0;
        for (int t = 0; t < trees[i].size(); ++t)
            if (trees[i].heads[t] + 1 == gold[t]) ++correct;
        int n = corpus[i].size();
        report.per_sentence.push_back({n, correct});
        report.tokens_scored += n;
        correct_all += correct;
        if (n <= 10) {
            report.tokens_le10 += n;
            correct_le10 += correct;
        }
    }
    report.dda_all = static_cast<double>(correct_all) / report.tokens_scored;
    report.dda_le10 =
        report.tokens_le10 > 0 ? static_cast<double>(correct_le10) / report.tokens_le10 : 0.0;
    return report;
}

}  // namespace lexdmv
