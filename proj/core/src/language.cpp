#include "qfa/language.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace qfa {

namespace {

std::optional<std::string> next_word(std::string w, const Alphabet& alphabet,
                                     std::uint64_t max_len) {
    const char first = alphabet.symbols.front();
    const char last = alphabet.symbols.back();
    int i = static_cast<int>(w.size()) - 1;
    while (i >= 0 && w[static_cast<std::size_t>(i)] == last) --i;
    if (i >= 0) {
        w[static_cast<std::size_t>(i)] =
            alphabet.symbols[static_cast<std::size_t>(alphabet.index(w[static_cast<std::size_t>(i)])) + 1];
        std::fill(w.begin() + i + 1, w.end(), first);
        return w;
    }
    if (w.size() >= max_len) return std::nullopt;
    return std::string(w.size() + 1, first);
}

}  // namespace

CutpointDecision evaluate_cutpoint(const Machine& m, const std::string& word,
                                   const CutpointQuery& q, const Tolerances& tol) {
    if (q.lambda < 0.0 || q.lambda > 1.0)
        throw std::invalid_argument("cut-point must lie in [0, 1]");
    CutpointDecision d;
    d.prob = accept_probability(m, word, tol);
    d.boundary = std::abs(d.prob - q.lambda) <= tol.prob;
    d.member = q.strictness == Strictness::Strict ? d.prob > q.lambda + tol.prob
                                                  : d.prob >= q.lambda - tol.prob;
    return d;
}

bool cutpoint_member(const Machine& m, const std::string& word, const CutpointQuery& q,
                     const Tolerances& tol) {
    return evaluate_cutpoint(m, word, q, tol).member;
}

WitnessSearchResult find_witness(const Machine& m, const CutpointQuery& q, int max_len,
                                 const Tolerances& tol) {
    if (max_len < 0) throw std::invalid_argument("find_witness: max_len must be non-negative");
    WitnessSearchResult result;
    result.max_len = max_len;
    std::optional<std::string> word = std::string{};
    while (word) {
        ++result.words_examined;
        const CutpointDecision d = evaluate_cutpoint(m, *word, q, tol);
        if (d.member) {
            result.found = true;
            result.word = *word;
            result.prob = d.prob;
            result.boundary = d.boundary;
            return result;
        }
        word = next_word(std::move(*word), alphabet_of(m), static_cast<std::uint64_t>(max_len));
    }
    return result;
}

RelationReport bounded_language_relation(const Machine& a, const Machine& b,
                                         const CutpointQuery& q, LanguageRelation relation,
                                         int max_len, const Tolerances& tol) {
    if (alphabet_of(a).symbols != alphabet_of(b).symbols)
        throw std::invalid_argument("machines are over different alphabets");
    if (max_len < 0)
        throw std::invalid_argument("bounded_language_relation: max_len must be non-negative");
    RelationReport report;
    report.max_len = max_len;
    std::optional<std::string> word = std::string{};
    while (word) {
        ++report.words_examined;
        const bool m1 = cutpoint_member(a, *word, q, tol);
        const bool m2 = cutpoint_member(b, *word, q, tol);
        const bool violates = relation == LanguageRelation::Equal ? m1 != m2 : (m1 && !m2);
        if (violates) {
            report.refuted = true;
            report.word = *word;
            report.member1 = m1;
            report.member2 = m2;
            return report;
        }
        if (relation == LanguageRelation::ProperSubset && m2 && !m1 &&
            !report.properness_witnessed) {
            report.properness_witnessed = true;
            report.properness_word = *word;
        }
        word = next_word(std::move(*word), alphabet_of(a), static_cast<std::uint64_t>(max_len));
    }
    return report;
}

}  // namespace qfa
