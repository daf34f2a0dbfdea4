#pragma once

#include "qfa/automata.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace qfa {

/// Word length up to which agreement of acceptance probabilities implies
/// agreement on every word: (n1^2 + n2^2 - 1) * sigma^(k-1) + k with
/// k = max(k1, k2).
std::uint64_t equivalence_bound(int n1, int n2, int sigma_size, int k1, int k2);

/// One orthonormal basis per (k-1)-letter prefix, holding the span of the
/// suffix-product-conjugated measurement matrices of words sharing that
/// prefix. Closing the family under prepend-conjugation yields a spanning
/// set for the measurement matrices of all long words.
struct BucketFamily {
    int k = 1;
    int order = 0;  // matrix order of the machine the family was built from
    std::vector<std::string> prefixes;  // lexicographic; the single entry "" when k = 1
    std::map<std::string, SpanBasis> buckets;
    int rounds = 0;  // closure sweeps executed, including the final no-growth sweep

    int total_dim() const;
    int max_bucket_dim() const;
};

struct EquivalenceStats {
    std::uint64_t words_checked = 0;     // naive enumeration count
    int rounds = 0;                      // closure sweeps (span method)
    std::map<std::string, int> bucket_dims;
    int unverified_flags = 0;  // span signals that failed simulation re-verification
};

struct EquivalenceVerdict {
    bool equivalent = true;
    std::string method;  // "naive" | "span"
    // Populated when not equivalent; the witness always re-verifies by
    // direct simulation with |prob1 - prob2| > tol.prob.
    std::string witness;
    double prob1 = 0.0;
    double prob2 = 0.0;
    EquivalenceStats stats;
};

/// Compares acceptance probabilities on every word of length <= t, in
/// length-lexicographic order (empty word first); the first violation
/// becomes the witness.
EquivalenceVerdict naive_equivalent(const KLetterQfa& a, const KLetterQfa& b, std::uint64_t t,
                                    const Tolerances& tol = {});
EquivalenceVerdict naive_equivalent(const KLetterMmqfa& a, const KLetterMmqfa& b, std::uint64_t t,
                                    const Tolerances& tol = {});

/// Seeds each prefix bucket with the conjugated accept projectors of the
/// length-k words and closes the family under
///   B -> U(y + prefix)' B U(y + prefix)   (filed under the shifted prefix)
/// until a full sweep adds nothing.
BucketFamily qfa_bucket_closure(const KLetterQfa& m, double eps_span = 1e-9);

/// Measure-many analogue: seeds are the per-word end-window measurement
/// matrices and the conjugators carry the continue-projector,
///   B -> (Pg U(y + prefix))' B (Pg U(y + prefix)).
BucketFamily mmqfa_bucket_closure(const KLetterMmqfa& m, double eps_span = 1e-9);

/// The Hermitian matrix whose expectation in the initial state equals
/// delta_prob(m, word).
Matrix mmqfa_theta(const KLetterMmqfa& m, const std::string& word);

/// Polynomial decision procedure: builds the diagonal sum, closes the
/// bucket family, and tests the functional <rho|M|rho> - <pi|M|pi> on the
/// short words and on every closed-bucket basis element conjugated back to
/// a full word matrix. Witnesses come from basis provenance and are
/// re-verified by simulation.
EquivalenceVerdict span_equivalent(const KLetterQfa& a, const KLetterQfa& b,
                                   const Tolerances& tol = {});
EquivalenceVerdict span_equivalent(const KLetterMmqfa& a, const KLetterMmqfa& b,
                                   const Tolerances& tol = {});

}  // namespace qfa
