// Versioned text formats for models (lexicon + tables + optional network,
// momentum state and RNG included) and preprocessed corpora. Doubles use
// shortest-round-trip decimals, so save/load is exact and re-saving yields
// byte-identical files.
#pragma once

#include <fstream>
#include <optional>
#include <sstream>

#include "lexdmv/corpus.hpp"
#include "lexdmv/neural.hpp"

namespace lexdmv {

inline constexpr const char* kModelMagic = "lexdmv-model";
inline constexpr const char* kCorpusMagic = "lexdmv-corpus";
inline constexpr int kFormatVersion = 1;

namespace serialize_detail {

class LineReader {
  public:
    LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

    std::string next() {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError(name_ + ": truncated file at line " +
                                                       std::to_string(line_no_ + 1));
        ++line_no_;
        return strip_cr(std::move(line));
    }
    std::vector<std::string> next_fields() { return split_ws(next()); }

    // "key a b c" -> {a, b, c}, failing loudly on a different key
    std::vector<std::string> expect(const std::string& key, size_t nargs) {
        auto fields = next_fields();
        if (fields.empty() || fields[0] != key || fields.size() != nargs + 1)
            throw ParseError(name_ + ":" + std::to_string(line_no_) + ": expected '" + key +
                             "' with " + std::to_string(nargs) + " fields");
        fields.erase(fields.begin());
        return fields;
    }
    int line_no() const { return line_no_; }
    const std::string& name() const { return name_; }

  private:
    std::istream& in_;
    std::string name_;
    int line_no_ = 0;
};

inline void write_row(std::ostream& out, const double* row, size_t k) {
    for (size_t i = 0; i < k; ++i) {
        if (i) out << ' ';
        out << format_double(row[i]);
    }
    out << '\n';
}

inline void read_row(LineReader& in, double* row, size_t k) {
    auto fields = in.next_fields();
    if (fields.size() != k)
        throw ParseError(in.name() + ":" + std::to_string(in.line_no()) + ": expected " +
                         std::to_string(k) + " values, got " + std::to_string(fields.size()));
    for (size_t i = 0; i < k; ++i) row[i] = parse_double(fields[i]);
}

inline void write_lexicon(std::ostream& out, const Lexicon& lex) {
    out << "cutoff " << lex.cutoff << '\n';
    out << "tags " << lex.num_tags() << '\n';
    for (const auto& name : lex.tag_names) out << name << '\n';
    out << "tokens " << lex.size() << '\n';
    for (const auto& tok : lex.tokens) {
        if (tok.lexicalized())
            out << "w " << tok.tag << ' ' << tok.word << '\n';
        else
            out << "t " << tok.tag << '\n';
    }
}

inline Lexicon read_lexicon(LineReader& in) {
    Lexicon lex;
    lex.cutoff = static_cast<int>(parse_long(in.expect("cutoff", 1)[0]));
    int T = static_cast<int>(parse_long(in.expect("tags", 1)[0]));
    for (int t = 0; t < T; ++t) {
        std::string name = in.next();
        lex.tag_index[name] = t;
        lex.tag_names.push_back(std::move(name));
    }
    int m = static_cast<int>(parse_long(in.expect("tokens", 1)[0]));
    for (int i = 0; i < m; ++i) {
        std::string line = in.next();
        if (line.size() < 3 || (line[0] != 't' && line[0] != 'w') || line[1] != ' ')
            throw ParseError(in.name() + ":" + std::to_string(in.line_no()) +
                             ": bad token descriptor '" + line + "'");
        if (line[0] == 't') {
            int tag = static_cast<int>(parse_long(std::string_view(line).substr(2)));
            lex.tokens.push_back({"", tag});
        } else {
            size_t space = line.find(' ', 2);
            if (space == std::string::npos)
                throw ParseError(in.name() + ":" + std::to_string(in.line_no()) +
                                 ": bad token descriptor '" + line + "'");
            int tag = static_cast<int>(parse_long(line.substr(2, space - 2)));
            std::string word = line.substr(space + 1);
            lex.pair_index[Lexicon::pair_key(word, tag)] = i;
            lex.tokens.push_back({std::move(word), tag});
        }
    }
    return lex;
}

inline void write_tables(std::ostream& out, const DmvTables& t) {
    out << "valence " << t.val.child_cap << ' ' << t.val.decision_cap << '\n';
    out << "root\n";
    write_row(out, t.root.data(), t.root.size());
    out << "child\n";
    for (size_t r = 0; r < t.child.size() / t.m; ++r)
        write_row(out, t.child.data() + r * t.m, t.m);
    out << "decision\n";
    for (size_t r = 0; r < t.decision.size() / 2; ++r)
        write_row(out, t.decision.data() + r * 2, 2);
}

inline void read_tables(LineReader& in, DmvTables& t, int m) {
    auto val = in.expect("valence", 2);
    ValenceConfig vcfg{static_cast<int>(parse_long(val[0])),
                       static_cast<int>(parse_long(val[1]))};
    if (vcfg.child_cap < 1 || vcfg.decision_cap < 1)
        throw ParseError(in.name() + ": bad valence configuration");
    static_cast<DmvTables&>(t) = DmvTables(m, vcfg);
    in.expect("root", 0);
    read_row(in, t.root.data(), t.root.size());
    in.expect("child", 0);
    for (size_t r = 0; r < t.child.size() / m; ++r) read_row(in, t.child.data() + r * m, m);
    in.expect("decision", 0);
    for (size_t r = 0; r < t.decision.size() / 2; ++r) read_row(in, t.decision.data() + r * 2, 2);
}

inline void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
    out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

inline void write_vector(std::ostream& out, const char* name, const Eigen::VectorXd& v) {
    out << "vector " << name << ' ' << v.size() << '\n';
    write_row(out, v.data(), v.size());
}

inline void read_matrix(LineReader& in, const char* name, Eigen::MatrixXd& m) {
    auto head = in.expect("matrix", 3);
    if (head[0] != name)
        throw ParseError(in.name() + ": expected matrix '" + name + "', found '" + head[0] + "'");
    long rows = parse_long(head[1]), cols = parse_long(head[2]);
    m.resize(rows, cols);
    std::vector<double> row(cols);
    for (long r = 0; r < rows; ++r) {
        read_row(in, row.data(), cols);
        for (long c = 0; c < cols; ++c) m(r, c) = row[c];
    }
}

inline void read_vector(LineReader& in, const char* name, Eigen::VectorXd& v) {
    auto head = in.expect("vector", 2);
    if (head[0] != name)
        throw ParseError(in.name() + ": expected vector '" + name + "', found '" + head[0] + "'");
    v.resize(parse_long(head[1]));
    read_row(in, v.data(), v.size());
}

inline void write_weights(std::ostream& out, const NeuralWeights& w) {
    write_matrix(out, "e_word", w.e_word);
    write_matrix(out, "e_tag", w.e_tag);
    write_matrix(out, "e_val", w.e_val);
    write_matrix(out, "w_left", w.w_left);
    write_matrix(out, "w_right", w.w_right);
    write_vector(out, "b_left", w.b_left);
    write_vector(out, "b_right", w.b_right);
    write_matrix(out, "proj", w.proj);
    write_vector(out, "b_proj", w.b_proj);
    write_matrix(out, "w_out_word", w.w_out_word);
    write_matrix(out, "w_out_tag", w.w_out_tag);
    write_vector(out, "b_child", w.b_child);
    write_matrix(out, "w_dec", w.w_dec);
    write_vector(out, "b_dec", w.b_dec);
}

inline void read_weights(LineReader& in, NeuralWeights& w) {
    read_matrix(in, "e_word", w.e_word);
    read_matrix(in, "e_tag", w.e_tag);
    read_matrix(in, "e_val", w.e_val);
    read_matrix(in, "w_left", w.w_left);
    read_matrix(in, "w_right", w.w_right);
    read_vector(in, "b_left", w.b_left);
    read_vector(in, "b_right", w.b_right);
    read_matrix(in, "proj", w.proj);
    read_vector(in, "b_proj", w.b_proj);
    read_matrix(in, "w_out_word", w.w_out_word);
    read_matrix(in, "w_out_tag", w.w_out_tag);
    read_vector(in, "b_child", w.b_child);
    read_matrix(in, "w_dec", w.w_dec);
    read_vector(in, "b_dec", w.b_dec);
}

inline void check_magic(LineReader& in, const char* magic) {
    auto fields = in.next_fields();
    if (fields.size() != 2 || fields[0] != magic)
        throw ParseError(in.name() + ": not a " + std::string(magic) + " file");
    long version = parse_long(fields[1]);
    if (version != kFormatVersion)
        throw DataError(in.name() + ": format version " + std::to_string(version) +
                        " not supported (this build reads version " +
                        std::to_string(kFormatVersion) + ")");
}

}  // namespace serialize_detail

struct ModelFile {
    Lexicon lexicon;
    DmvParams params;
    std::optional<NeuralModel> neural;
};

inline void save_model_stream(std::ostream& out, const Lexicon& lexicon, const DmvParams& params,
                              const NeuralModel* neural = nullptr) {
    out << kModelMagic << ' ' << kFormatVersion << '\n';
    serialize_detail::write_lexicon(out, lexicon);
    serialize_detail::write_tables(out, params);
    out << "neural " << (neural ? 1 : 0) << '\n';
    if (neural) {
        const NeuralConfig& c = neural->cfg;
        out << "nconfig " << c.word_dim << ' ' << c.tag_dim << ' ' << c.val_dim << ' '
            << c.out_word_dim << ' ' << c.out_tag_dim << ' ' << c.hidden_dim << ' '
            << format_double(c.lr) << ' ' << format_double(c.momentum) << ' ' << c.batch << ' '
            << c.epochs_per_mstep << ' ' << c.seed << '\n';
        out << "rng " << neural->rng << '\n';
        serialize_detail::write_weights(out, neural->w);
        serialize_detail::write_weights(out, neural->vel);
    }
    out << "end\n";
}

inline void save_model(const std::string& path, const Lexicon& lexicon, const DmvParams& params,
                       const NeuralModel* neural = nullptr) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file: " + path);
    save_model_stream(out, lexicon, params, neural);
    if (!out) throw DataError("failed writing model file: " + path);
}

inline ModelFile load_model_stream(std::istream& in, const std::string& name) {
    serialize_detail::LineReader reader(in, name);
    serialize_detail::check_magic(reader, kModelMagic);
    ModelFile file;
    file.lexicon = serialize_detail::read_lexicon(reader);
    serialize_detail::read_tables(reader, file.params, file.lexicon.size());
    long has_neural = parse_long(reader.expect("neural", 1)[0]);
    if (has_neural) {
        auto nc = reader.expect("nconfig", 11);
        NeuralConfig cfg;
        cfg.word_dim = static_cast<int>(parse_long(nc[0]));
        cfg.tag_dim = static_cast<int>(parse_long(nc[1]));
        cfg.val_dim = static_cast<int>(parse_long(nc[2]));
        cfg.out_word_dim = static_cast<int>(parse_long(nc[3]));
        cfg.out_tag_dim = static_cast<int>(parse_long(nc[4]));
        cfg.hidden_dim = static_cast<int>(parse_long(nc[5]));
        cfg.lr = parse_double(nc[6]);
        cfg.momentum = parse_double(nc[7]);
        cfg.batch = static_cast<int>(parse_long(nc[8]));
        cfg.epochs_per_mstep = static_cast<int>(parse_long(nc[9]));
        cfg.seed = static_cast<uint64_t>(parse_long(nc[10]));
        file.neural.emplace(file.lexicon, file.params.val, cfg);
        std::string rng_line = reader.next();
        if (rng_line.rfind("rng ", 0) != 0) throw ParseError(name + ": expected rng state");
        std::stringstream rng_state(rng_line.substr(4));
        rng_state >> file.neural->rng;
        if (rng_state.fail()) throw ParseError(name + ": bad rng state");
        serialize_detail::read_weights(reader, file.neural->w);
        serialize_detail::read_weights(reader, file.neural->vel);
    }
    if (reader.next() != "end") throw ParseError(name + ": missing end marker");
    return file;
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    return load_model_stream(in, path);
}

inline void save_corpus_stream(std::ostream& out, const Lexicon& lexicon, const Corpus& corpus) {
    out << kCorpusMagic << ' ' << kFormatVersion << '\n';
    serialize_detail::write_lexicon(out, lexicon);
    out << "sentences " << corpus.size() << '\n';
    for (const auto& s : corpus) {
        out << "s " << s.size();
        for (int id : s.token_ids) out << ' ' << id;
        out << "\ng";
        if (s.gold_heads)
            for (int h : *s.gold_heads) out << ' ' << h;
        else
            out << " -";
        out << '\n';
    }
    out << "end\n";
}

inline void save_corpus(const std::string& path, const Lexicon& lexicon, const Corpus& corpus) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write corpus file: " + path);
    save_corpus_stream(out, lexicon, corpus);
    if (!out) throw DataError("failed writing corpus file: " + path);
}

struct CorpusFile {
    Lexicon lexicon;
    Corpus corpus;
};

inline CorpusFile load_corpus_stream(std::istream& in, const std::string& name) {
    serialize_detail::LineReader reader(in, name);
    serialize_detail::check_magic(reader, kCorpusMagic);
    CorpusFile file;
    file.lexicon = serialize_detail::read_lexicon(reader);
    long n = parse_long(reader.expect("sentences", 1)[0]);
    for (long i = 0; i < n; ++i) {
        auto fields = reader.next_fields();
        if (fields.size() < 2 || fields[0] != "s")
            throw ParseError(name + ":" + std::to_string(reader.line_no()) +
                             ": expected sentence header");
        long len = parse_long(fields[1]);
        if (static_cast<long>(fields.size()) != len + 2)
            throw ParseError(name + ":" + std::to_string(reader.line_no()) +
                             ": sentence length mismatch");
        Sentence s;
        for (long t = 0; t < len; ++t) {
            int id = static_cast<int>(parse_long(fields[t + 2]));
            if (id < 0 || id >= file.lexicon.size())
                throw DataError(name + ": token id " + std::to_string(id) + " out of range");
            s.token_ids.push_back(id);
            s.tag_ids.push_back(file.lexicon.tag_of(id));
        }
        auto gold = reader.next_fields();
        if (gold.empty() || gold[0] != "g")
            throw ParseError(name + ":" + std::to_string(reader.line_no()) +
                             ": expected gold-head line");
        if (!(gold.size() == 2 && gold[1] == "-")) {
            if (static_cast<long>(gold.size()) != len + 1)
                throw ParseError(name + ":" + std::to_string(reader.line_no()) +
                                 ": gold head count mismatch");
            std::vector<int> heads;
            for (long t = 0; t < len; ++t)
                heads.push_back(static_cast<int>(parse_long(gold[t + 1])));
            s.gold_heads = std::move(heads);
        }
        file.corpus.push_back(std::move(s));
    }
    if (reader.next() != "end") throw ParseError(name + ": missing end marker");
    return file;
}

inline CorpusFile load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);
    return load_corpus_stream(in, path);
}

}  // namespace lexdmv
