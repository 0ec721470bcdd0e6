// Shared fixture builders for the test suites.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "lexdmv/corpus.hpp"
#include "lexdmv/model.hpp"

namespace testutil {

inline lexdmv::Sentence make_sentence(std::vector<int> token_ids) {
    lexdmv::Sentence s;
    s.token_ids = token_ids;
    s.tag_ids = std::move(token_ids);  // tag space == token space for desk fixtures
    return s;
}

inline lexdmv::Sentence random_sentence(lexdmv::Rng& rng, int n, int m) {
    std::uniform_int_distribution<int> pick(0, m - 1);
    std::vector<int> ids(n);
    for (int& id : ids) id = pick(rng);
    return make_sentence(std::move(ids));
}

// A tiny unlexicalized lexicon with the given tag names.
inline lexdmv::Lexicon tag_lexicon(const std::vector<std::string>& tags) {
    lexdmv::RawSentence raw;
    raw.forms = tags;
    raw.pos = tags;
    return lexdmv::build_lexicon({raw}, 1000000);
}

}  // namespace testutil
