#include "qfa/generate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qfa {

namespace {

Alphabet first_letters(int sigma) {
    if (sigma < 1 || sigma > 26)
        throw std::invalid_argument("alphabet size must be between 1 and 26");
    Alphabet a;
    for (int i = 0; i < sigma; ++i) a.symbols += static_cast<char>('a' + i);
    return a;
}

TransitionTable random_table(MachineKind kind, int n, int k, const Alphabet& alphabet,
                             GaussianRng& rng) {
    TransitionTable table;
    table.k = k;
    for (const std::string& gram : reachable_grams(kind, k, alphabet))
        table.entries.emplace(gram, random_unitary(n, rng));
    return table;
}

Matrix permutation_matrix(const std::vector<int>& perm, int n) {
    if (static_cast<int>(perm.size()) != n)
        throw std::invalid_argument("permutation size does not match state count");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    Matrix p(n, n);
    for (int i = 0; i < n; ++i) {
        const int target = perm[static_cast<std::size_t>(i)];
        if (target < 0 || target >= n || seen[static_cast<std::size_t>(target)])
            throw std::invalid_argument("not a permutation");
        seen[static_cast<std::size_t>(target)] = true;
        p(target, i) = 1.0;
    }
    return p;
}

TransitionTable conjugate_table(const TransitionTable& table, const Matrix& p) {
    TransitionTable out;
    out.k = table.k;
    const Matrix p_adj = p.adjoint();
    for (const auto& [gram, u] : table.entries) out.entries.emplace(gram, p * u * p_adj);
    return out;
}

std::vector<int> map_states(const std::vector<int>& states, const std::vector<int>& perm) {
    std::vector<int> out;
    out.reserve(states.size());
    for (int s : states) out.push_back(perm[static_cast<std::size_t>(s)]);
    std::sort(out.begin(), out.end());
    return out;
}

TransitionTable scale_table(const TransitionTable& table, double theta) {
    const Complex phase = std::polar(1.0, theta);
    TransitionTable out;
    out.k = table.k;
    for (const auto& [gram, u] : table.entries) out.entries.emplace(gram, u * phase);
    return out;
}

}  // namespace

KLetterQfa random_qfa(int n, int k, int sigma, std::uint64_t seed) {
    if (n < 1 || k < 1) throw std::invalid_argument("random_qfa: n and k must be positive");
    GaussianRng rng(seed);
    KLetterQfa m;
    m.n = n;
    m.k = k;
    m.alphabet = first_letters(sigma);
    for (int i = 0; i < n; ++i)
        if (rng.bits() % 2 == 0) m.accepting.push_back(i);
    m.initial = random_state(n, rng);
    m.transitions = random_table(MachineKind::Qfa, n, k, m.alphabet, rng);
    return m;
}

KLetterMmqfa random_mmqfa(int n, int k, int sigma, std::uint64_t seed) {
    if (n < 1 || k < 1) throw std::invalid_argument("random_mmqfa: n and k must be positive");
    GaussianRng rng(seed);
    KLetterMmqfa m;
    m.n = n;
    m.k = k;
    m.alphabet = first_letters(sigma);
    for (int i = 0; i < n; ++i) {
        switch (rng.bits() % 3) {
            case 0: m.accepting.push_back(i); break;
            case 1: m.rejecting.push_back(i); break;
            default: break;  // neutral
        }
    }
    m.initial = random_state(n, rng);
    m.transitions = random_table(MachineKind::Mmqfa, n, k, m.alphabet, rng);
    return m;
}

KLetterQfa permute_states(const KLetterQfa& m, const std::vector<int>& perm) {
    const Matrix p = permutation_matrix(perm, m.n);
    KLetterQfa out = m;
    out.accepting = map_states(m.accepting, perm);
    out.initial = mat_vec(p, m.initial);
    out.transitions = conjugate_table(m.transitions, p);
    return out;
}

KLetterMmqfa permute_states(const KLetterMmqfa& m, const std::vector<int>& perm) {
    const Matrix p = permutation_matrix(perm, m.n);
    KLetterMmqfa out = m;
    out.accepting = map_states(m.accepting, perm);
    out.rejecting = map_states(m.rejecting, perm);
    out.initial = mat_vec(p, m.initial);
    out.transitions = conjugate_table(m.transitions, p);
    return out;
}

KLetterQfa scale_global_phase(const KLetterQfa& m, double theta) {
    KLetterQfa out = m;
    out.transitions = scale_table(m.transitions, theta);
    return out;
}

KLetterMmqfa scale_global_phase(const KLetterMmqfa& m, double theta) {
    KLetterMmqfa out = m;
    out.transitions = scale_table(m.transitions, theta);
    return out;
}

}  // namespace qfa
