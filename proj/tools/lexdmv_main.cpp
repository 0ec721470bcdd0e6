// lexdmv command-line driver: preprocess, train, parse, eval, sweep, verify
// and synth subcommands over the header library.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 verification
// failure.
#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "lexdmv/eval.hpp"
#include "lexdmv/serialize.hpp"
#include "lexdmv/synthetic.hpp"
#include "lexdmv/trainer.hpp"
#include "lexdmv/verify.hpp"

using namespace lexdmv;

namespace {

std::set<std::string> punct_set(const std::string& csv) {
    if (csv.empty()) return ptb_punct_tags();
    std::set<std::string> out;
    for (auto& tag : split(csv, ','))
        if (!tag.empty()) out.insert(tag);
    return out;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
    std::vector<int> out;
    for (auto& item : split(csv, ',')) {
        if (item.empty()) continue;
        out.push_back(static_cast<int>(parse_long(item)));
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return out;
}

struct NeuralFlags {
    NeuralConfig cfg;
    std::string word_vectors, tag_vectors;
    std::vector<CLI::Option*> options;

    void add(CLI::App* cmd) {
        options = {
            cmd->add_option("--hidden", cfg.hidden_dim, "Hidden layer dimension"),
            cmd->add_option("--lr", cfg.lr, "Learning rate"),
            cmd->add_option("--momentum", cfg.momentum, "Momentum coefficient"),
            cmd->add_option("--batch", cfg.batch, "Mini-batch size (contexts)"),
            cmd->add_option("--epochs-per-mstep", cfg.epochs_per_mstep,
                            "Optimizer passes per EM iteration"),
            cmd->add_option("--word-dim", cfg.word_dim, "Input word-vector dimension"),
            cmd->add_option("--tag-dim", cfg.tag_dim, "Input tag-vector dimension"),
            cmd->add_option("--val-dim", cfg.val_dim, "Valence-vector dimension"),
            cmd->add_option("--out-word-dim", cfg.out_word_dim, "Output word-vector dimension"),
            cmd->add_option("--out-tag-dim", cfg.out_tag_dim, "Output tag-vector dimension"),
            cmd->add_option("--word-vectors", word_vectors, "word2vec text file for tokens"),
            cmd->add_option("--tag-vectors", tag_vectors, "word2vec text file for tags"),
        };
    }
    bool any_set() const {
        for (const CLI::Option* o : options)
            if (o->count() > 0) return true;
        return false;
    }
};

TrainMode parse_mode(const std::string& mode) {
    if (mode == "soft") return TrainMode::SoftTabular;
    if (mode == "hard") return TrainMode::HardTabular;
    if (mode == "neural") return TrainMode::HardNeural;
    throw std::invalid_argument("unknown mode '" + mode + "' (soft|hard|neural)");
}

DmvParams make_init(const std::string& scheme, const Corpus& corpus, const Lexicon& lexicon,
                    ValenceConfig vcfg, double lambda, uint64_t seed,
                    const std::string& trees_path, const std::set<std::string>& punct,
                    int max_len) {
    if (scheme == "uniform") return init_uniform(lexicon, vcfg);
    if (scheme == "random") return init_random(lexicon, vcfg, seed);
    if (scheme == "km") return init_km(corpus, lexicon, vcfg);
    if (scheme == "trees") {
        if (trees_path.empty())
            throw std::invalid_argument("--init trees requires --trees <conll file>");
        auto raw = strip_and_filter(read_conll(trees_path), punct, max_len);
        if (raw.size() != corpus.size())
            throw DataError("trees file has " + std::to_string(raw.size()) +
                            " sentences after preprocessing, corpus has " +
                            std::to_string(corpus.size()));
        std::vector<ParseTree> trees;
        for (size_t i = 0; i < raw.size(); ++i) {
            if (!raw[i].gold_heads)
                throw DataError("trees file: sentence " + std::to_string(i) + " has no heads");
            if (raw[i].size() != corpus[i].size())
                throw DataError("trees file: sentence " + std::to_string(i) + " length mismatch");
            trees.push_back(tree_from_gold(*raw[i].gold_heads));
        }
        return mle_from_trees(corpus, trees, lexicon.size(), vcfg, lambda);
    }
    throw std::invalid_argument("unknown init scheme '" + scheme +
                                "' (uniform|random|km|trees)");
}

// ---------------------------------------------------------------- preprocess

int cmd_preprocess(const std::string& input, const std::string& output, int cutoff, int max_len,
                   const std::string& punct_csv) {
    auto raw = strip_and_filter(read_conll(input), punct_set(punct_csv), max_len);
    if (raw.empty()) throw DataError("no sentences survive preprocessing");
    Lexicon lexicon = build_lexicon(raw, cutoff);
    Corpus corpus = encode(raw, lexicon);
    save_corpus(output, lexicon, corpus);
    std::cout << "sentences: " << corpus.size() << "\n";
    std::cout << "vocabulary size m = " << lexicon.size() << " (tags: " << lexicon.num_tags()
              << ")\n";
    std::cout << "wrote " << output << "\n";
    return 0;
}

// --------------------------------------------------------------------- train

struct TrainArgs {
    std::string corpus, out, trace_path, val_path, init = "km", trees, mode = "soft";
    std::string punct_csv;
    TrainConfig cfg;
    NeuralFlags neural;
    ValenceConfig vcfg;
    int checkpoint_every = 0;
    int max_len = 10;
};

int cmd_train(TrainArgs& args, bool neural_flag_given) {
    args.cfg.mode = parse_mode(args.mode);
    if (args.cfg.mode != TrainMode::HardNeural && neural_flag_given)
        throw std::invalid_argument("neural network flags require --mode neural");

    CorpusFile data = load_corpus(args.corpus);
    Corpus validation;
    if (!args.val_path.empty()) {
        auto raw = strip_and_filter(read_conll(args.val_path), punct_set(args.punct_csv),
                                    args.max_len);
        validation = encode(raw, data.lexicon);
    }
    const Corpus* val = validation.empty() ? nullptr : &validation;

    DmvParams params0 = make_init(args.init, data.corpus, data.lexicon, args.vcfg,
                                  args.cfg.lambda, args.cfg.seed, args.trees,
                                  punct_set(args.punct_csv), args.max_len);

    TrainHooks hooks;
    if (args.checkpoint_every > 0 && !args.out.empty()) {
        hooks.on_iteration = [&](int iter, const DmvParams& p, const NeuralModel* nm) {
            if (iter % args.checkpoint_every == 0)
                save_model(args.out + ".iter" + std::to_string(iter), data.lexicon, p, nm);
        };
    }

    DmvParams trained;
    TrainTrace trace;
    std::optional<NeuralModel> net;
    switch (args.cfg.mode) {
        case TrainMode::SoftTabular:
            std::tie(trained, trace) = soft_em(data.corpus, std::move(params0), args.cfg, val,
                                               &hooks);
            break;
        case TrainMode::HardTabular:
            std::tie(trained, trace) = hard_em_tabular(data.corpus, std::move(params0), args.cfg,
                                                       val, &hooks);
            break;
        case TrainMode::HardNeural: {
            args.neural.cfg.seed = args.cfg.seed;
            NeuralModel model(data.lexicon, args.vcfg, args.neural.cfg);
            if (!args.neural.word_vectors.empty() || !args.neural.tag_vectors.empty()) {
                VectorLoadStats stats = load_vectors(model, data.lexicon,
                                                     args.neural.word_vectors,
                                                     args.neural.tag_vectors);
                std::cout << "embeddings: " << stats.word_found << " word vectors loaded, "
                          << stats.word_missing << " random; " << stats.tag_found
                          << " tag vectors loaded, " << stats.tag_missing << " random\n";
            }
            NeuralTrainResult result = hard_em_neural(data.corpus, std::move(model),
                                                      std::move(params0), args.cfg, val, &hooks);
            trained = std::move(result.params);
            trace = std::move(result.trace);
            net.emplace(std::move(result.model));
            break;
        }
    }

    if (!args.out.empty()) {
        save_model(args.out, data.lexicon, trained, net ? &*net : nullptr);
        std::cout << "wrote " << args.out << "\n";
    }
    if (!args.trace_path.empty()) {
        std::ofstream out(args.trace_path);
        if (!out) throw DataError("cannot write trace file: " + args.trace_path);
        trace.write_csv(out);
        std::cout << "wrote " << args.trace_path << "\n";
    }
    if (!trace.records.empty()) {
        const TraceRecord& last = trace.records.back();
        std::cout << "iterations: " << trace.records.size()
                  << "  final ll/token: " << format_double(last.ll_per_token);
        if (!std::isnan(last.val_dda))
            std::cout << "  val dda: " << format_double(last.val_dda);
        std::cout << "\n";
    }
    return 0;
}

// --------------------------------------------------------------------- parse

// Raw CoNLL rows, kept verbatim so output preserves every column.
struct ConllBlock {
    std::vector<std::vector<std::string>> rows;
};

std::vector<ConllBlock> read_conll_blocks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CoNLL file: " + path);
    std::vector<ConllBlock> blocks;
    ConllBlock cur;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(std::move(line));
        if (line.empty()) {
            if (!cur.rows.empty()) {
                blocks.push_back(std::move(cur));
                cur = ConllBlock{};
            }
            continue;
        }
        if (line[0] == '#') continue;
        auto fields = split(line, '\t');
        if (fields.size() < 2) fields = split_ws(line);
        if (fields.size() < 7)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected >= 7 columns, got " + std::to_string(fields.size()));
        cur.rows.push_back(std::move(fields));
    }
    if (!cur.rows.empty()) blocks.push_back(std::move(cur));
    return blocks;
}

int cmd_parse(const std::string& model_path, const std::string& input, const std::string& output,
              const std::string& punct_csv) {
    ModelFile model = load_model(model_path);
    auto punct = punct_set(punct_csv);
    auto blocks = read_conll_blocks(input);

    std::ofstream out(output);
    if (!out) throw DataError("cannot write output file: " + output);
    long parsed = 0;
    LogDmv lp(model.params);
    for (auto& block : blocks) {
        std::vector<std::vector<std::string>*> kept;
        RawSentence raw;
        for (auto& row : block.rows) {
            if (punct.count(row[4])) continue;
            kept.push_back(&row);
            raw.forms.push_back(row[1]);
            raw.pos.push_back(row[4]);
        }
        if (kept.empty()) continue;
        Sentence s = encode_sentence(raw, model.lexicon);
        ParseTree tree = viterbi(s, lp).first;
        ++parsed;
        for (size_t i = 0; i < kept.size(); ++i) {
            auto& row = *kept[i];
            row[0] = std::to_string(i + 1);
            row[6] = std::to_string(tree.heads[i] + 1);  // root prints as 0
            for (size_t c = 0; c < row.size(); ++c) {
                if (c) out << '\t';
                out << row[c];
            }
            out << '\n';
        }
        out << '\n';
    }
    std::cout << "parsed " << parsed << " sentences -> " << output << "\n";
    return 0;
}

// ---------------------------------------------------------------------- eval

int cmd_eval(const std::string& model_path, const std::string& input,
             const std::string& punct_csv, int max_len, const std::string& csv_path, int jobs) {
    ModelFile model = load_model(model_path);
    auto raw = strip_and_filter(read_conll(input), punct_set(punct_csv),
                                max_len > 0 ? max_len : std::numeric_limits<int>::max());
    Corpus corpus = encode(raw, model.lexicon);
    EvalReport report = evaluate(model.params, corpus, jobs);
    report.write_text(std::cout);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw DataError("cannot write csv file: " + csv_path);
        report.write_csv(out);
    }
    return 0;
}

// --------------------------------------------------------------------- sweep

struct SweepArgs {
    std::string train_path, test_path, val_path, out = "sweep.csv", trees;
    std::string cutoffs_csv, sizes_csv = "0", seeds_csv = "1,2,3";
    std::string lang = "en", mode = "soft", init = "km";
    std::string punct_csv;
    int max_len = 10;
    int jobs = 1;
    uint64_t shuffle_seed = 1;
    TrainConfig cfg;
    NeuralFlags neural;
    ValenceConfig vcfg;
};

struct SweepRow {
    int cutoff = 0, vocab = 0;
    size_t corpus_size = 0;
    std::string seed, status = "ok";
    double dda_val = std::numeric_limits<double>::quiet_NaN();
    double dda_test = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

void write_sweep_csv(std::ostream& out, const SweepArgs& args,
                     const std::vector<SweepRow>& rows) {
    out << "cutoff,vocab_size,corpus_size,seed,init,mode,dda_val,dda_test,seconds,status\n";
    for (const auto& r : rows)
        out << r.cutoff << ',' << r.vocab << ',' << r.corpus_size << ',' << r.seed << ','
            << args.init << ',' << args.mode << ',' << format_double(r.dda_val) << ','
            << format_double(r.dda_test) << ',' << format_double(r.seconds) << ',' << r.status
            << "\n";
}

int cmd_sweep(SweepArgs& args) {
    const auto punct = punct_set(args.punct_csv);
    std::vector<int> cutoffs;
    if (!args.cutoffs_csv.empty()) {
        cutoffs = parse_int_list(args.cutoffs_csv, "--cutoffs");
    } else if (args.lang == "zh") {
        cutoffs = {100000, 100, 70, 50, 40, 30, 20, 12, 10};
    } else {
        cutoffs = {100000, 500, 200, 100, 80, 70, 60, 50, 40};
    }
    std::vector<int> sizes = parse_int_list(args.sizes_csv, "--sizes");
    std::vector<int> seeds = parse_int_list(args.seeds_csv, "--seeds");
    for (int c : cutoffs)
        if (c < 1) throw std::invalid_argument("--cutoffs entries must be positive");

    auto train_raw = strip_and_filter(read_conll(args.train_path), punct, args.max_len);
    auto test_raw = strip_and_filter(read_conll(args.test_path), punct, args.max_len);
    std::vector<RawSentence> val_raw;
    if (!args.val_path.empty())
        val_raw = strip_and_filter(read_conll(args.val_path), punct, args.max_len);
    std::vector<RawSentence> trees_raw;
    if (!args.trees.empty()) {
        trees_raw = strip_and_filter(read_conll(args.trees), punct, args.max_len);
        if (trees_raw.size() != train_raw.size())
            throw DataError("trees file sentence count does not match training corpus");
    }

    // fixed shuffle so corpus-size prefixes nest
    std::vector<size_t> order(train_raw.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), Rng(args.shuffle_seed));

    struct Cell {
        int cutoff, size, seed;
    };
    std::vector<Cell> cells;
    for (int c : cutoffs)
        for (int sz : sizes)
            for (int sd : seeds) cells.push_back({c, sz, sd});
    std::vector<SweepRow> rows(cells.size());

    std::atomic<size_t> next{0};
    std::mutex io_mutex;
    auto worker = [&] {
        while (true) {
            size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            const Cell& cell = cells[idx];
            SweepRow& row = rows[idx];
            row.cutoff = cell.cutoff;
            row.seed = std::to_string(cell.seed);
            auto t0 = std::chrono::steady_clock::now();
            try {
                size_t take = cell.size == 0
                                  ? train_raw.size()
                                  : std::min<size_t>(cell.size, train_raw.size());
                row.corpus_size = take;
                std::vector<RawSentence> subset;
                subset.reserve(take);
                for (size_t i = 0; i < take; ++i) subset.push_back(train_raw[order[i]]);
                Lexicon lexicon = build_lexicon(subset, cell.cutoff);
                row.vocab = lexicon.size();
                Corpus corpus = encode(subset, lexicon);

                TrainConfig cfg = args.cfg;
                cfg.mode = parse_mode(args.mode);
                cfg.seed = cell.seed;
                DmvParams params0 = [&] {
                    if (args.init == "trees") {
                        if (trees_raw.empty())
                            throw std::invalid_argument(
                                "--init trees requires --trees <conll file>");
                        std::vector<ParseTree> trees;
                        for (size_t i = 0; i < take; ++i) {
                            const RawSentence& t = trees_raw[order[i]];
                            if (!t.gold_heads || t.size() != subset[i].size())
                                throw DataError("trees file misaligned with training corpus");
                            trees.push_back(tree_from_gold(*t.gold_heads));
                        }
                        return mle_from_trees(corpus, trees, lexicon.size(), args.vcfg,
                                              cfg.lambda);
                    }
                    return make_init(args.init, corpus, lexicon, args.vcfg, cfg.lambda,
                                     cfg.seed, "", punct, args.max_len);
                }();

                Corpus val;
                if (!val_raw.empty()) val = encode(val_raw, lexicon);

                DmvParams trained;
                switch (cfg.mode) {
                    case TrainMode::SoftTabular:
                        trained = soft_em(corpus, std::move(params0), cfg, nullptr).first;
                        break;
                    case TrainMode::HardTabular:
                        trained = hard_em_tabular(corpus, std::move(params0), cfg, nullptr).first;
                        break;
                    case TrainMode::HardNeural: {
                        NeuralConfig ncfg = args.neural.cfg;
                        ncfg.seed = cfg.seed;
                        NeuralModel model(lexicon, args.vcfg, ncfg);
                        trained = hard_em_neural(corpus, std::move(model), std::move(params0),
                                                 cfg, nullptr)
                                      .params;
                        break;
                    }
                }
                Corpus test = encode(test_raw, lexicon);
                row.dda_test = evaluate(trained, test).dda_all;
                if (!val.empty()) row.dda_val = evaluate(trained, val).dda_all;
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
            row.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::lock_guard<std::mutex> lock(io_mutex);
            std::cerr << "cell cutoff=" << cell.cutoff << " size=" << row.corpus_size
                      << " seed=" << cell.seed << " -> " << row.status << "\n";
        }
    };
    if (args.jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < args.jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // seed-averaged rows per (cutoff, size)
    std::vector<SweepRow> averaged;
    for (int c : cutoffs) {
        for (int sz : sizes) {
            SweepRow avg;
            avg.cutoff = c;
            avg.seed = "avg";
            double val_sum = 0, test_sum = 0, sec_sum = 0;
            int n = 0;
            bool have_val = false;
            for (size_t i = 0; i < cells.size(); ++i) {
                if (cells[i].cutoff != c || cells[i].size != sz) continue;
                avg.corpus_size = rows[i].corpus_size;
                avg.vocab = rows[i].vocab;
                if (rows[i].status != "ok") continue;
                test_sum += rows[i].dda_test;
                sec_sum += rows[i].seconds;
                if (!std::isnan(rows[i].dda_val)) {
                    val_sum += rows[i].dda_val;
                    have_val = true;
                }
                ++n;
            }
            avg.status = "avg(n=" + std::to_string(n) + ")";
            if (n > 0) {
                avg.dda_test = test_sum / n;
                avg.seconds = sec_sum / n;
                if (have_val) avg.dda_val = val_sum / n;
            }
            averaged.push_back(avg);
        }
    }
    std::vector<SweepRow> all_rows = rows;
    all_rows.insert(all_rows.end(), averaged.begin(), averaged.end());

    std::ofstream out(args.out);
    if (!out) throw DataError("cannot write sweep csv: " + args.out);
    write_sweep_csv(out, args, all_rows);
    std::cout << "wrote " << args.out << " (" << all_rows.size() << " rows)\n";
    return 0;
}

// -------------------------------------------------------------------- verify

int cmd_verify(int cases, int samples, double eps, uint64_t seed, bool inject_fault) {
    OracleCheckReport oracle = run_oracle_checks(cases, 6, 5, seed);
    oracle.write(std::cout);
    bool oracle_ok = oracle.pass(1e-9);
    std::cout << (oracle_ok ? "[PASS]" : "[FAIL]") << " chart matches enumeration oracle\n";

    GradientCheckReport grad = run_gradient_check(samples, eps, seed, inject_fault);
    grad.write(std::cout);
    bool grad_ok = grad.pass(1e-4);
    std::cout << (grad_ok ? "[PASS]" : "[FAIL]")
              << " analytic gradients match finite differences\n";

    return oracle_ok && grad_ok ? 0 : 3;
}

// --------------------------------------------------------------------- synth

int cmd_synth(const std::string& output, int sentences, uint64_t seed, int max_len) {
    auto raw = sample_synthetic_corpus(sentences, seed, max_len);
    write_conll(output, raw);
    std::cout << "wrote " << raw.size() << " sentences -> " << output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lexdmv: lexicalized DMV grammar induction"};
    app.require_subcommand(1);
    const char* env_config = std::getenv("LEXDMV_CONFIG");
    app.set_config("--config", env_config ? env_config : "",
                   "Config file (key=value; sections per subcommand)");

    // preprocess
    auto* pp = app.add_subcommand("preprocess", "Strip punctuation, cap length, build lexicon");
    std::string pp_in, pp_out = "corpus.lexc", pp_punct;
    int pp_cutoff = 1, pp_maxlen = 10;
    pp->add_option("--input", pp_in, "CoNLL input")->required();
    pp->add_option("--output", pp_out, "Encoded corpus output");
    pp->add_option("--cutoff", pp_cutoff, "Word-frequency cutoff");
    pp->add_option("--max-len", pp_maxlen, "Maximum sentence length after stripping");
    pp->add_option("--punct", pp_punct, "Comma-separated punctuation tags (default PTB)");

    // train
    auto* tr = app.add_subcommand("train", "Train a model on a preprocessed corpus");
    TrainArgs ta;
    tr->add_option("--corpus", ta.corpus, "Preprocessed corpus (from preprocess)")->required();
    tr->add_option("--mode", ta.mode, "soft | hard | neural");
    tr->add_option("--init", ta.init, "uniform | random | km | trees");
    tr->add_option("--trees", ta.trees, "CoNLL trees for --init trees");
    tr->add_option("--out", ta.out, "Model output path");
    tr->add_option("--trace", ta.trace_path, "Trace CSV output path");
    tr->add_option("--val", ta.val_path, "Validation CoNLL (gold heads)");
    tr->add_option("--iters", ta.cfg.max_iters, "Maximum EM iterations");
    tr->add_option("--ll-tol", ta.cfg.ll_tol, "Per-token log-likelihood tolerance");
    tr->add_option("--lambda", ta.cfg.lambda, "Additive smoothing for tabular M-steps");
    tr->add_option("--em-batch", ta.cfg.em_batch, "Sentences per neural hard-EM iteration");
    tr->add_option("--seed", ta.cfg.seed, "Random seed");
    tr->add_option("--jobs", ta.cfg.jobs, "E-step worker threads");
    tr->add_option("--vc", ta.vcfg.child_cap, "Child valence cap");
    tr->add_option("--vd", ta.vcfg.decision_cap, "Decision valence cap");
    tr->add_option("--checkpoint-every", ta.checkpoint_every,
                   "Write model checkpoints every N iterations");
    tr->add_option("--punct", ta.punct_csv, "Punctuation tags for --val/--trees preprocessing");
    tr->add_option("--max-len", ta.max_len, "Length cap for --val/--trees preprocessing");
    ta.neural.add(tr);

    // parse
    auto* pa = app.add_subcommand("parse", "Viterbi-parse CoNLL with a trained model");
    std::string pa_model, pa_in, pa_out = "parsed.conll", pa_punct;
    pa->add_option("--model", pa_model, "Model file")->required();
    pa->add_option("--input", pa_in, "CoNLL input")->required();
    pa->add_option("--output", pa_out, "CoNLL output with predicted heads");
    pa->add_option("--punct", pa_punct, "Punctuation tags (default PTB)");

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a model against gold heads");
    std::string ev_model, ev_in, ev_csv, ev_punct;
    int ev_maxlen = 0, ev_jobs = 1;
    ev->add_option("--model", ev_model, "Model file")->required();
    ev->add_option("--input", ev_in, "CoNLL input with gold heads")->required();
    ev->add_option("--max-len", ev_maxlen, "Keep only sentences up to this length (0 = all)");
    ev->add_option("--csv", ev_csv, "Per-sentence CSV output");
    ev->add_option("--punct", ev_punct, "Punctuation tags (default PTB)");
    ev->add_option("--jobs", ev_jobs, "Worker threads");

    // sweep
    auto* sw = app.add_subcommand("sweep", "Cutoff x corpus-size x seed experiment grid");
    SweepArgs sa;
    sw->add_option("--train", sa.train_path, "Training CoNLL")->required();
    sw->add_option("--test", sa.test_path, "Test CoNLL (gold heads)")->required();
    sw->add_option("--val", sa.val_path, "Validation CoNLL (gold heads)");
    sw->add_option("--out", sa.out, "Results CSV path");
    sw->add_option("--cutoffs", sa.cutoffs_csv, "Comma-separated cutoffs (default per --lang)");
    sw->add_option("--lang", sa.lang, "en | zh (selects the default cutoff list)");
    sw->add_option("--sizes", sa.sizes_csv, "Corpus-size prefixes (0 = all)");
    sw->add_option("--seeds", sa.seeds_csv, "Training seeds");
    sw->add_option("--mode", sa.mode, "soft | hard | neural");
    sw->add_option("--init", sa.init, "uniform | random | km | trees");
    sw->add_option("--trees", sa.trees, "CoNLL trees for --init trees");
    sw->add_option("--iters", sa.cfg.max_iters, "Maximum EM iterations per cell");
    sw->add_option("--ll-tol", sa.cfg.ll_tol, "Per-token log-likelihood tolerance");
    sw->add_option("--lambda", sa.cfg.lambda, "Additive smoothing");
    sw->add_option("--em-batch", sa.cfg.em_batch, "Sentences per neural hard-EM iteration");
    sw->add_option("--max-len", sa.max_len, "Length cap after punctuation stripping");
    sw->add_option("--punct", sa.punct_csv, "Punctuation tags (default PTB)");
    sw->add_option("--jobs", sa.jobs, "Parallel sweep cells");
    sw->add_option("--shuffle-seed", sa.shuffle_seed, "Seed for the corpus-size shuffle");
    sw->add_option("--vc", sa.vcfg.child_cap, "Child valence cap");
    sw->add_option("--vd", sa.vcfg.decision_cap, "Decision valence cap");
    sa.neural.add(sw);

    // verify
    auto* vf = app.add_subcommand("verify", "Run oracle-equivalence and gradient checks");
    int vf_cases = 200, vf_samples = 1000;
    double vf_eps = 1e-5;
    uint64_t vf_seed = 20240811;
    bool vf_fault = false;
    vf->add_option("--cases", vf_cases, "Randomized oracle cases");
    vf->add_option("--samples", vf_samples, "Sampled weights for the gradient check");
    vf->add_option("--eps", vf_eps, "Finite-difference step");
    vf->add_option("--seed", vf_seed, "Random seed");
    vf->add_flag("--inject-gradient-fault", vf_fault,
                 "Flip the analytic gradient sign (self-test hook)")
        ->group("");

    // synth
    auto* sy = app.add_subcommand("synth", "Generate the synthetic benchmark corpus");
    std::string sy_out = "synthetic.conll";
    int sy_n = 2000, sy_maxlen = 10;
    uint64_t sy_seed = 101;
    sy->add_option("--output", sy_out, "CoNLL output path");
    sy->add_option("--sentences", sy_n, "Number of sentences");
    sy->add_option("--seed", sy_seed, "Random seed");
    sy->add_option("--max-len", sy_maxlen, "Maximum sentence length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (pp->parsed()) return cmd_preprocess(pp_in, pp_out, pp_cutoff, pp_maxlen, pp_punct);
        if (tr->parsed()) return cmd_train(ta, ta.neural.any_set());
        if (pa->parsed()) return cmd_parse(pa_model, pa_in, pa_out, pa_punct);
        if (ev->parsed()) return cmd_eval(ev_model, ev_in, ev_punct, ev_maxlen, ev_csv, ev_jobs);
        if (sw->parsed()) return cmd_sweep(sa);
        if (vf->parsed()) return cmd_verify(vf_cases, vf_samples, vf_eps, vf_seed, vf_fault);
        if (sy->parsed()) return cmd_synth(sy_out, sy_n, sy_seed, sy_maxlen);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
