// CoNLL ingestion, punctuation stripping, cutoff-controlled lexicon and
// sentence encoding.
#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexdmv/util.hpp"

namespace lexdmv {

struct RawSentence {
    std::vector<std::string> forms;
    std::vector<std::string> pos;
    // 0 = artificial root, i = 1-based head position. Present only when every
    // row of the sentence carried a numeric HEAD.
    std::optional<std::vector<int>> gold_heads;

    int size() const { return static_cast<int>(forms.size()); }
};

// PTB punctuation tag set; the default for strip_and_filter.
inline const std::set<std::string>& ptb_punct_tags() {
    static const std::set<std::string> tags = {"``", "''",    ",",     ".", ":",
                                               "#",  "-LRB-", "-RRB-", "$"};
    return tags;
}

namespace detail {

inline void validate_gold_heads(const std::vector<int>& heads, int first_line) {
    const int n = static_cast<int>(heads.size());
    int roots = 0;
    for (int i = 0; i < n; ++i) {
        if (heads[i] < 0 || heads[i] > n)
            throw ParseError("sentence starting at line " + std::to_string(first_line) +
                             ": HEAD " + std::to_string(heads[i]) + " out of range [0, " +
                             std::to_string(n) + "]");
        if (heads[i] == 0) ++roots;
        if (heads[i] == i + 1)
            throw ParseError("sentence starting at line " + std::to_string(first_line) +
                             ": token " + std::to_string(i + 1) + " is its own head");
    }
    if (roots != 1)
        throw ParseError("sentence starting at line " + std::to_string(first_line) + ": " +
                         std::to_string(roots) + " root attachments (expected exactly 1)");
    for (int i = 0; i < n; ++i) {
        int h = heads[i], steps = 0;
        while (h != 0) {
            h = heads[h - 1];
            if (++steps > n)
                throw ParseError("sentence starting at line " + std::to_string(first_line) +
                                 ": head cycle through token " + std::to_string(i + 1));
        }
    }
}

}  // namespace detail

// CoNLL-X rows: column 2 = FORM, column 5 = POS, column 7 = HEAD. Blank lines
// separate sentences; lines starting with '#' are ignored.
inline std::vector<RawSentence> read_conll_stream(std::istream& in,
                                                  const std::string& source = "<stream>") {
    std::vector<RawSentence> out;
    RawSentence cur;
    std::vector<int> heads;
    bool heads_complete = true;
    int line_no = 0;
    int block_start = 0;

    auto flush = [&]() {
        if (cur.forms.empty()) return;
        if (heads_complete) {
            detail::validate_gold_heads(heads, block_start);
            cur.gold_heads = heads;
        }
        out.push_back(std::move(cur));
        cur = RawSentence{};
        heads.clear();
        heads_complete = true;
    };

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(std::move(line));
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') continue;
        if (cur.forms.empty()) block_start = line_no;

        std::vector<std::string> fields = split(line, '\t');
        if (fields.size() < 2) fields = split_ws(line);
        if (fields.size() < 7)
            throw ParseError(source + ":" + std::to_string(line_no) + ": expected >= 7 columns, got " +
                             std::to_string(fields.size()));
        cur.forms.push_back(fields[1]);
        cur.pos.push_back(fields[4]);
        const std::string& head = fields[6];
        if (head == "_" || head.empty()) {
            heads_complete = false;
        } else {
            long h;
            if (!try_parse_long(head, h))
                throw ParseError(source + ":" + std::to_string(line_no) +
                                 ": non-numeric HEAD '" + head + "'");
            heads.push_back(static_cast<int>(h));
        }
    }
    flush();
    return out;
}

inline std::vector<RawSentence> read_conll(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CoNLL file: " + path);
    return read_conll_stream(in, path);
}

// Writes 10-column CoNLL-X. Heads are taken from gold_heads when present,
// otherwise '_'.
inline void write_conll_stream(std::ostream& out, const std::vector<RawSentence>& sentences) {
    for (const auto& s : sentences) {
        for (int i = 0; i < s.size(); ++i) {
            out << (i + 1) << '\t' << s.forms[i] << "\t_\t" << s.pos[i] << '\t' << s.pos[i]
                << "\t_\t";
            if (s.gold_heads)
                out << (*s.gold_heads)[i];
            else
                out << '_';
            out << "\t_\t_\t_\n";
        }
        out << '\n';
    }
}

inline void write_conll(const std::string& path, const std::vector<RawSentence>& sentences) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write CoNLL file: " + path);
    write_conll_stream(out, sentences);
}

// Removes punctuation tokens, re-attaching their dependents to the nearest
// non-punctuation ancestor (root if none), then keeps sentences whose
// remaining length lies in [1, max_len].
inline std::vector<RawSentence> strip_and_filter(const std::vector<RawSentence>& raw,
                                                 const std::set<std::string>& punct_tags,
                                                 int max_len) {
    if (max_len < 1) throw std::invalid_argument("strip_and_filter: max_len must be >= 1");
    std::vector<RawSentence> out;
    for (size_t si = 0; si < raw.size(); ++si) {
        const RawSentence& s = raw[si];
        const int n = s.size();
        std::vector<bool> punct(n);
        std::vector<int> new_pos(n, 0);  // 1-based position after stripping
        int kept = 0;
        for (int i = 0; i < n; ++i) {
            punct[i] = punct_tags.count(s.pos[i]) > 0;
            if (!punct[i]) new_pos[i] = ++kept;
        }
        if (kept == 0 || kept > max_len) continue;

        RawSentence r;
        for (int i = 0; i < n; ++i) {
            if (punct[i]) continue;
            r.forms.push_back(s.forms[i]);
            r.pos.push_back(s.pos[i]);
        }
        if (s.gold_heads) {
            std::vector<int> heads;
            for (int i = 0; i < n; ++i) {
                if (punct[i]) continue;
                int h = (*s.gold_heads)[i];
                int hops = 0;
                while (h != 0 && punct[h - 1]) {
                    h = (*s.gold_heads)[h - 1];
                    if (++hops > n)
                        throw DataError("strip_and_filter: head cycle in sentence " +
                                        std::to_string(si));
                }
                heads.push_back(h == 0 ? 0 : new_pos[h - 1]);
            }
            r.gold_heads = std::move(heads);
        }
        out.push_back(std::move(r));
    }
    return out;
}

// Token inventory under a word-frequency cutoff. Ids [0, T) are the pos-only
// tokens in tag-id order; word/POS tokens follow in first-occurrence order.
struct Lexicon {
    struct Token {
        std::string word;  // empty for pos-only tokens
        int tag = 0;
        bool lexicalized() const { return !word.empty(); }
    };

    std::vector<std::string> tag_names;
    std::unordered_map<std::string, int> tag_index;
    std::vector<Token> tokens;
    std::unordered_map<std::string, int> pair_index;  // "word\x1ftag_id"
    int cutoff = 1;

    int num_tags() const { return static_cast<int>(tag_names.size()); }
    int size() const { return static_cast<int>(tokens.size()); }  // m
    int tag_of(int token_id) const { return tokens[token_id].tag; }

    static std::string pair_key(const std::string& word, int tag_id) {
        return word + '\x1f' + std::to_string(tag_id);
    }

    // Token id of (word, pos), falling back to the pos-only token. Throws on
    // a POS tag the lexicon has never seen.
    int token_of(const std::string& word, const std::string& pos) const {
        auto t = tag_index.find(pos);
        if (t == tag_index.end()) throw DataError("encode: unknown POS tag '" + pos + "'");
        auto it = pair_index.find(pair_key(word, t->second));
        return it == pair_index.end() ? t->second : it->second;
    }

    // "word/TAG" for lexicalized tokens, "TAG" otherwise. Used for embedding
    // lookup and diagnostics.
    std::string token_string(int token_id) const {
        const Token& t = tokens[token_id];
        if (!t.lexicalized()) return tag_names[t.tag];
        return t.word + "/" + tag_names[t.tag];
    }
};

// Words with corpus frequency >= cutoff become (word, POS) tokens; everything
// else maps to its pos-only token.
inline Lexicon build_lexicon(const std::vector<RawSentence>& raw, int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("build_lexicon: cutoff must be >= 1");
    if (raw.empty()) throw std::invalid_argument("build_lexicon: empty corpus");

    std::unordered_map<std::string, long> freq;
    for (const auto& s : raw)
        for (const auto& w : s.forms) ++freq[w];

    Lexicon lex;
    lex.cutoff = cutoff;
    for (const auto& s : raw) {
        for (const auto& p : s.pos) {
            if (lex.tag_index.emplace(p, lex.num_tags()).second) lex.tag_names.push_back(p);
        }
    }
    for (int t = 0; t < lex.num_tags(); ++t) lex.tokens.push_back({"", t});
    for (const auto& s : raw) {
        for (int i = 0; i < s.size(); ++i) {
            if (freq[s.forms[i]] < cutoff) continue;
            int tag = lex.tag_index.at(s.pos[i]);
            std::string key = Lexicon::pair_key(s.forms[i], tag);
            if (lex.pair_index.emplace(std::move(key), lex.size()).second)
                lex.tokens.push_back({s.forms[i], tag});
        }
    }
    return lex;
}

struct Sentence {
    std::vector<int> token_ids;
    std::vector<int> tag_ids;
    std::optional<std::vector<int>> gold_heads;  // same convention as RawSentence

    int size() const { return static_cast<int>(token_ids.size()); }
};

using Corpus = std::vector<Sentence>;

inline Sentence encode_sentence(const RawSentence& raw, const Lexicon& lexicon) {
    Sentence s;
    for (int i = 0; i < raw.size(); ++i) {
        int id = lexicon.token_of(raw.forms[i], raw.pos[i]);
        s.token_ids.push_back(id);
        s.tag_ids.push_back(lexicon.tag_of(id));
    }
    s.gold_heads = raw.gold_heads;
    return s;
}

inline Corpus encode(const std::vector<RawSentence>& raw, const Lexicon& lexicon) {
    Corpus corpus;
    corpus.reserve(raw.size());
    for (const auto& r : raw) corpus.push_back(encode_sentence(r, lexicon));
    return corpus;
}

}  // namespace lexdmv
