#pragma once

#include "qfa/automata.hpp"

#include <cstdint>

namespace qfa {

/// Seeded random machine over the first sigma letters 'a', 'b', ...
/// Every reachable gram gets an independent random unitary; the accepting
/// set is drawn per state. Deterministic for a fixed seed.
KLetterQfa random_qfa(int n, int k, int sigma, std::uint64_t seed);

/// As random_qfa; each state lands in accept / reject / neutral with equal
/// probability.
KLetterMmqfa random_mmqfa(int n, int k, int sigma, std::uint64_t seed);

/// Relabels states through a permutation (state i becomes perm[i]);
/// acceptance probabilities are unchanged.
KLetterQfa permute_states(const KLetterQfa& m, const std::vector<int>& perm);
KLetterMmqfa permute_states(const KLetterMmqfa& m, const std::vector<int>& perm);

/// Multiplies every transition by e^{i theta}; probabilities are
/// phase-invariant, so the result is equivalent to the input.
KLetterQfa scale_global_phase(const KLetterQfa& m, double theta);
KLetterMmqfa scale_global_phase(const KLetterMmqfa& m, double theta);

}  // namespace qfa
