#pragma once

#include "qfa/automata.hpp"

#include <cstdint>
#include <string>

namespace qfa {

enum class Strictness { Strict, NonStrict };

struct CutpointQuery {
    double lambda = 0.5;
    Strictness strictness = Strictness::NonStrict;
};

struct CutpointDecision {
    double prob = 0.0;
    bool member = false;
    // Probability within tol.prob of lambda: the verdict is then a
    // tolerance call, and reports flag it.
    bool boundary = false;
};

/// Membership of `word` in the cut-point language of `m`. Strict membership
/// requires prob > lambda + tol.prob, non-strict prob >= lambda - tol.prob.
CutpointDecision evaluate_cutpoint(const Machine& m, const std::string& word,
                                   const CutpointQuery& q, const Tolerances& tol = {});
bool cutpoint_member(const Machine& m, const std::string& word, const CutpointQuery& q,
                     const Tolerances& tol = {});

struct WitnessSearchResult {
    bool found = false;
    std::string word;
    double prob = 0.0;
    bool boundary = false;
    int max_len = 0;
    std::uint64_t words_examined = 0;
};

/// Length-lexicographic scan of all words up to max_len for a member of the
/// cut-point language. Emptiness of these languages is not decidable, so an
/// exhausted scan only reports the bound it searched.
WitnessSearchResult find_witness(const Machine& m, const CutpointQuery& q, int max_len,
                                 const Tolerances& tol = {});

enum class LanguageRelation { Equal, Subset, ProperSubset };

struct RelationReport {
    bool refuted = false;
    std::string word;  // refuting word when refuted
    bool member1 = false;
    bool member2 = false;
    // For ProperSubset: whether some word in L2 \ L1 was seen (the part a
    // bounded scan can only confirm, never refute).
    bool properness_witnessed = false;
    std::string properness_word;
    int max_len = 0;
    std::uint64_t words_examined = 0;
};

/// Bounded refuter for L1 = L2, L1 being a subset of L2, or L1 a proper
/// subset of L2, at the given cut-point. A "consistent" result is explicitly
/// not a proof: it only covers words up to max_len.
RelationReport bounded_language_relation(const Machine& a, const Machine& b,
                                         const CutpointQuery& q, LanguageRelation relation,
                                         int max_len, const Tolerances& tol = {});

}  // namespace qfa
