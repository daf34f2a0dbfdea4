#include "qfa/automata.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qfa {

namespace {

void require_word(const std::string& word, const Alphabet& alphabet) {
    for (char c : word)
        if (!alphabet.contains(c))
            throw std::invalid_argument(std::string("symbol '") + c + "' is not in the alphabet");
}

// Window ending at letter position i (1-based), blank padded on the left
// while fewer than k letters have been read.
std::string letter_gram(const std::string& word, int i, int k) {
    std::string g;
    if (i < k) {
        g.assign(static_cast<std::size_t>(k - i), kBlank);
        g += word.substr(0, static_cast<std::size_t>(i));
    } else {
        g = word.substr(static_cast<std::size_t>(i - k), static_cast<std::size_t>(k));
    }
    return g;
}

// End-marker window: the last k-1 letters then '>', blank padded on the
// left when the word is shorter than k-1.
std::string end_gram(const std::string& word, int k) {
    const int n = static_cast<int>(word.size());
    const int take = std::min(n, k - 1);
    std::string g(static_cast<std::size_t>(k - 1 - take), kBlank);
    g += word.substr(static_cast<std::size_t>(n - take));
    g += kRightMarker;
    return g;
}

std::string start_gram(int k) {
    std::string g(static_cast<std::size_t>(k - 1), kBlank);
    g += kLeftMarker;
    return g;
}

}  // namespace

std::vector<GramStep> gram_sequence(const std::string& word, MachineKind kind, int k,
                                    const Alphabet& alphabet) {
    if (k < 1) throw std::invalid_argument("gram_sequence: k must be positive");
    require_word(word, alphabet);
    const int n = static_cast<int>(word.size());
    std::vector<GramStep> steps;
    if (kind == MachineKind::Mmqfa) steps.push_back({start_gram(k), GramRole::LeftMarker});
    for (int i = 1; i <= n; ++i)
        steps.push_back({letter_gram(word, i, k), i < k ? GramRole::Padded : GramRole::Interior});
    if (kind == MachineKind::Mmqfa) steps.push_back({end_gram(word, k), GramRole::RightMarker});
    return steps;
}

std::vector<std::string> reachable_grams(MachineKind kind, int k, const Alphabet& alphabet) {
    std::set<std::string> grams;
    // Blank-padded prefixes of length < k, then every full window.
    std::vector<std::string> level{""};
    for (int len = 1; len <= k; ++len) {
        std::vector<std::string> next;
        for (const std::string& w : level)
            for (char c : alphabet.symbols) next.push_back(w + c);
        level = std::move(next);
        for (const std::string& w : level) {
            if (len < k)
                grams.insert(std::string(static_cast<std::size_t>(k - len), kBlank) + w);
            else
                grams.insert(w);
        }
    }
    if (kind == MachineKind::Mmqfa) {
        grams.insert(start_gram(k));
        // End windows for every word length: blank padding for words shorter
        // than k-1, otherwise each (k-1)-letter suffix.
        std::vector<std::string> tails{""};
        for (int len = 0; len <= k - 1; ++len) {
            if (len > 0) {
                std::vector<std::string> next;
                for (const std::string& w : tails)
                    for (char c : alphabet.symbols) next.push_back(w + c);
                tails = std::move(next);
            }
            for (const std::string& w : tails)
                grams.insert(std::string(static_cast<std::size_t>(k - 1 - len), kBlank) + w +
                             kRightMarker);
        }
    }
    return {grams.begin(), grams.end()};
}

const Matrix& TransitionTable::at(const std::string& gram) const {
    auto it = entries.find(gram);
    if (it == entries.end()) throw std::out_of_range("missing transition for gram \"" + gram + "\"");
    return it->second;
}

Matrix KLetterMmqfa::continue_projector() const { return Matrix::projector(n, neutral()); }

std::vector<int> KLetterMmqfa::neutral() const {
    std::set<int> halting(accepting.begin(), accepting.end());
    halting.insert(rejecting.begin(), rejecting.end());
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (!halting.count(i)) out.push_back(i);
    return out;
}

namespace {

void check_alphabet(const Alphabet& alphabet, std::vector<std::string>& issues) {
    if (alphabet.symbols.empty()) issues.push_back("alphabet is empty");
    std::set<char> seen;
    for (char c : alphabet.symbols) {
        if (!seen.insert(c).second) issues.push_back(std::string("duplicate symbol '") + c + "'");
        if (c == kBlank || c == kLeftMarker || c == kRightMarker)
            issues.push_back(std::string("reserved character '") + c + "' used as a symbol");
    }
}

void check_state_set(const std::vector<int>& states, int n, const std::string& name,
                     std::vector<std::string>& issues) {
    std::set<int> seen;
    for (int s : states) {
        if (s < 0 || s >= n)
            issues.push_back(name + " state " + std::to_string(s) + " out of range");
        if (!seen.insert(s).second)
            issues.push_back(name + " state " + std::to_string(s) + " repeated");
    }
}

void check_initial(const CVec& initial, int n, const Tolerances& tol,
                   std::vector<std::string>& issues) {
    if (static_cast<int>(initial.size()) != n) {
        issues.push_back("initial vector dimension " + std::to_string(initial.size()) +
                         " does not match state count " + std::to_string(n));
        return;
    }
    for (const Complex& c : initial)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            issues.push_back("initial vector has a non-finite amplitude");
            return;
        }
    if (std::abs(norm_sq(initial) - 1.0) > tol.unitary)
        issues.push_back("initial vector is not normalized");
}

void check_table(const TransitionTable& table, MachineKind kind, int k, int n,
                 const Alphabet& alphabet, const Tolerances& tol,
                 std::vector<std::string>& issues) {
    if (table.k != k) issues.push_back("transition table k does not match machine k");
    for (const std::string& gram : reachable_grams(kind, k, alphabet))
        if (!table.has(gram)) issues.push_back("missing transition for gram \"" + gram + "\"");
    for (const auto& [gram, m] : table.entries) {
        if (static_cast<int>(gram.size()) != k) {
            issues.push_back("gram \"" + gram + "\" does not have length " + std::to_string(k));
            continue;
        }
        for (char c : gram) {
            const bool reserved =
                c == kBlank || (kind == MachineKind::Mmqfa && (c == kLeftMarker || c == kRightMarker));
            if (!alphabet.contains(c) && !reserved) {
                issues.push_back("gram \"" + gram + "\" uses an unknown character");
                break;
            }
        }
        if (m.rows() != n || m.cols() != n) {
            issues.push_back("transition for gram \"" + gram + "\" is not " + std::to_string(n) +
                             "x" + std::to_string(n));
            continue;
        }
        if (!m.all_finite()) {
            issues.push_back("transition for gram \"" + gram + "\" has non-finite entries");
            continue;
        }
        if (!check_unitary(m, tol.unitary))
            issues.push_back("transition for gram \"" + gram + "\" is not unitary");
    }
}

}  // namespace

ValidationReport validate(const KLetterQfa& m, const Tolerances& tol) {
    ValidationReport report;
    auto& issues = report.issues;
    if (m.n < 1) issues.push_back("state count must be positive");
    if (m.k < 1) issues.push_back("k must be positive");
    check_alphabet(m.alphabet, issues);
    if (m.n >= 1 && m.k >= 1 && report.valid()) {
        check_state_set(m.accepting, m.n, "accepting", issues);
        check_initial(m.initial, m.n, tol, issues);
        check_table(m.transitions, MachineKind::Qfa, m.k, m.n, m.alphabet, tol, issues);
    }
    return report;
}

ValidationReport validate(const KLetterMmqfa& m, const Tolerances& tol) {
    ValidationReport report;
    auto& issues = report.issues;
    if (m.n < 1) issues.push_back("state count must be positive");
    if (m.k < 1) issues.push_back("k must be positive");
    check_alphabet(m.alphabet, issues);
    if (m.n >= 1 && m.k >= 1 && report.valid()) {
        check_state_set(m.accepting, m.n, "accepting", issues);
        check_state_set(m.rejecting, m.n, "rejecting", issues);
        std::set<int> acc(m.accepting.begin(), m.accepting.end());
        for (int s : m.rejecting)
            if (acc.count(s))
                issues.push_back("state " + std::to_string(s) + " is both accepting and rejecting");
        check_initial(m.initial, m.n, tol, issues);
        check_table(m.transitions, MachineKind::Mmqfa, m.k, m.n, m.alphabet, tol, issues);
    }
    return report;
}

Matrix word_unitary(const KLetterQfa& m, const std::string& word) {
    Matrix u = Matrix::identity(m.n);
    for (const GramStep& step : gram_sequence(word, MachineKind::Qfa, m.k, m.alphabet))
        u = m.transitions.at(step.gram) * u;
    return u;
}

namespace {

double clamp_probability(double p, double eps, const char* what) {
    if (p < -eps || p > 1.0 + eps)
        throw std::runtime_error(std::string(what) + ": probability " + std::to_string(p) +
                                 " out of range beyond tolerance");
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double accept_prob(const KLetterQfa& m, const std::string& word, const Tolerances& tol) {
    CVec state = m.initial;
    for (const GramStep& step : gram_sequence(word, MachineKind::Qfa, m.k, m.alphabet))
        state = mat_vec(m.transitions.at(step.gram), state);
    double p = 0.0;
    for (int s : m.accepting) p += std::norm(state[static_cast<std::size_t>(s)]);
    return clamp_probability(p, tol.prob, "accept_prob");
}

MmqfaOutcome accept_prob(const KLetterMmqfa& m, const std::string& word, const Tolerances& tol) {
    std::vector<char> status(static_cast<std::size_t>(m.n), 'g');
    for (int s : m.accepting) status[static_cast<std::size_t>(s)] = 'a';
    for (int s : m.rejecting) status[static_cast<std::size_t>(s)] = 'r';

    CVec state = m.initial;
    double accept = 0.0, reject = 0.0;
    for (const GramStep& step : gram_sequence(word, MachineKind::Mmqfa, m.k, m.alphabet)) {
        state = mat_vec(m.transitions.at(step.gram), state);
        // Three-outcome measurement: halting mass accumulates, the
        // continue component carries on unnormalized.
        for (std::size_t i = 0; i < state.size(); ++i) {
            if (status[i] == 'a') {
                accept += std::norm(state[i]);
                state[i] = 0.0;
            } else if (status[i] == 'r') {
                reject += std::norm(state[i]);
                state[i] = 0.0;
            }
        }
    }
    MmqfaOutcome out;
    out.accept = clamp_probability(accept, tol.prob, "accept_prob (mmqfa)");
    out.reject = clamp_probability(reject, tol.prob, "accept_prob (mmqfa)");
    out.residual = clamp_probability(norm_sq(state), tol.prob, "accept_prob (mmqfa)");
    return out;
}

double delta_prob(const KLetterMmqfa& m, const std::string& word, const Tolerances& tol) {
    const double p = accept_prob(m, word, tol).accept;
    if (word.empty()) return p;
    return p - accept_prob(m, word.substr(0, word.size() - 1), tol).accept;
}

namespace {

void require_same_alphabet(const Alphabet& a, const Alphabet& b) {
    if (a.symbols != b.symbols)
        throw std::invalid_argument("machines are over different alphabets");
}

// Combined table over the longer window: each component reads the suffix of
// the window matching its own length.
TransitionTable oplus_table(const TransitionTable& t1, int k1, const TransitionTable& t2, int k2,
                            MachineKind kind, const Alphabet& alphabet) {
    const int k = std::max(k1, k2);
    TransitionTable table;
    table.k = k;
    for (const std::string& gram : reachable_grams(kind, k, alphabet)) {
        const std::string g1 = gram.substr(static_cast<std::size_t>(k - k1));
        const std::string g2 = gram.substr(static_cast<std::size_t>(k - k2));
        table.entries.emplace(gram, diagonal_sum(t1.at(g1), t2.at(g2)));
    }
    return table;
}

std::vector<int> shifted_union(const std::vector<int>& s1, const std::vector<int>& s2, int offset) {
    std::vector<int> out = s1;
    for (int s : s2) out.push_back(s + offset);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

KLetterQfa oplus(const KLetterQfa& a, const KLetterQfa& b, const CVec& initial) {
    require_same_alphabet(a.alphabet, b.alphabet);
    if (static_cast<int>(initial.size()) != a.n + b.n)
        throw std::invalid_argument("oplus: initial vector dimension mismatch");
    KLetterQfa out;
    out.n = a.n + b.n;
    out.k = std::max(a.k, b.k);
    out.alphabet = a.alphabet;
    out.accepting = shifted_union(a.accepting, b.accepting, a.n);
    out.initial = initial;
    out.transitions =
        oplus_table(a.transitions, a.k, b.transitions, b.k, MachineKind::Qfa, a.alphabet);
    return out;
}

KLetterMmqfa oplus(const KLetterMmqfa& a, const KLetterMmqfa& b, const CVec& initial) {
    require_same_alphabet(a.alphabet, b.alphabet);
    if (static_cast<int>(initial.size()) != a.n + b.n)
        throw std::invalid_argument("oplus: initial vector dimension mismatch");
    KLetterMmqfa out;
    out.n = a.n + b.n;
    out.k = std::max(a.k, b.k);
    out.alphabet = a.alphabet;
    out.accepting = shifted_union(a.accepting, b.accepting, a.n);
    out.rejecting = shifted_union(a.rejecting, b.rejecting, a.n);
    out.initial = initial;
    out.transitions =
        oplus_table(a.transitions, a.k, b.transitions, b.k, MachineKind::Mmqfa, a.alphabet);
    return out;
}

CVec rho_vector(const CVec& initial1, int n2) {
    CVec v = initial1;
    v.resize(initial1.size() + static_cast<std::size_t>(n2), Complex{});
    return v;
}

CVec pi_vector(int n1, const CVec& initial2) {
    CVec v(static_cast<std::size_t>(n1), Complex{});
    v.insert(v.end(), initial2.begin(), initial2.end());
    return v;
}

KLetterQfa mo_to_kletter(const MeasureOnceQfa& m) {
    KLetterQfa out;
    out.n = m.n;
    out.k = 1;
    out.alphabet = m.alphabet;
    out.accepting = m.accepting;
    out.initial = m.initial;
    out.transitions.k = 1;
    for (const auto& [c, u] : m.transitions) out.transitions.entries.emplace(std::string(1, c), u);
    return out;
}

KLetterMmqfa embed_qfa_to_mmqfa(const KLetterQfa& m) {
    const int n = m.n;
    KLetterMmqfa out;
    out.n = 3 * n;
    out.k = m.k;
    out.alphabet = m.alphabet;
    // Block 1 carries the finished run: its accepting states accept, the
    // rest of it and all of block 3 reject. Block 2 (the working block) is
    // neutral so the run survives every intermediate measurement.
    out.accepting = m.accepting;
    std::set<int> acc(m.accepting.begin(), m.accepting.end());
    for (int i = 0; i < n; ++i)
        if (!acc.count(i)) out.rejecting.push_back(i);
    for (int i = 2 * n; i < 3 * n; ++i) out.rejecting.push_back(i);

    out.initial.assign(static_cast<std::size_t>(3 * n), Complex{});
    for (int i = 0; i < n; ++i) out.initial[static_cast<std::size_t>(i)] = m.initial[static_cast<std::size_t>(i)];

    Matrix swap_blocks(3 * n, 3 * n);
    for (int i = 0; i < n; ++i) {
        swap_blocks(i, n + i) = 1.0;
        swap_blocks(n + i, i) = 1.0;
        swap_blocks(2 * n + i, 2 * n + i) = 1.0;
    }

    out.transitions.k = m.k;
    for (const std::string& gram : reachable_grams(MachineKind::Mmqfa, m.k, m.alphabet)) {
        if (gram.back() == kRightMarker || gram.back() == kLeftMarker) {
            out.transitions.entries.emplace(gram, swap_blocks);
        } else {
            Matrix u(3 * n, 3 * n);
            const Matrix& inner_u = m.transitions.at(gram);
            for (int i = 0; i < n; ++i) {
                u(i, i) = 1.0;
                u(2 * n + i, 2 * n + i) = 1.0;
                for (int j = 0; j < n; ++j) u(n + i, n + j) = inner_u(i, j);
            }
            out.transitions.entries.emplace(gram, std::move(u));
        }
    }
    return out;
}

KLetterQfa empty_language_moqfa(double lambda, double c, const Alphabet& alphabet) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("empty_language_moqfa: lambda must be in (0, 1]");
    if (!(c > 0.0 && c < lambda))
        throw std::invalid_argument("empty_language_moqfa: c must satisfy 0 < c < lambda");
    KLetterQfa out;
    out.n = 2;
    out.k = 1;
    out.alphabet = alphabet;
    out.accepting = {0};
    out.initial = {Complex(std::sqrt(lambda - c), 0.0), Complex(std::sqrt(1.0 - lambda + c), 0.0)};
    out.transitions.k = 1;
    for (char s : alphabet.symbols) out.transitions.entries.emplace(std::string(1, s), Matrix::identity(2));
    return out;
}

KLetterQfa ends_in_a_qfa() {
    Matrix swap(2, 2);
    swap(0, 1) = 1.0;
    swap(1, 0) = 1.0;
    const Matrix id = Matrix::identity(2);

    KLetterQfa out;
    out.n = 2;
    out.k = 2;
    out.alphabet = {"ab"};
    out.accepting = {1};
    out.initial = {1.0, 0.0};
    out.transitions.k = 2;
    // State q1 tracks "last letter was a": windows whose last letter flips
    // that bit get the swap, the rest the identity.
    out.transitions.entries.emplace("_a", swap);
    out.transitions.entries.emplace("ba", swap);
    out.transitions.entries.emplace("ab", swap);
    out.transitions.entries.emplace("_b", id);
    out.transitions.entries.emplace("aa", id);
    out.transitions.entries.emplace("bb", id);
    return out;
}

MachineKind kind_of(const Machine& m) {
    return std::holds_alternative<KLetterQfa>(m) ? MachineKind::Qfa : MachineKind::Mmqfa;
}

const Alphabet& alphabet_of(const Machine& m) {
    return std::visit([](const auto& v) -> const Alphabet& { return v.alphabet; }, m);
}

int states_of(const Machine& m) {
    return std::visit([](const auto& v) { return v.n; }, m);
}

ValidationReport validate(const Machine& m, const Tolerances& tol) {
    return std::visit([&](const auto& v) { return validate(v, tol); }, m);
}

double accept_probability(const Machine& m, const std::string& word, const Tolerances& tol) {
    if (const auto* q = std::get_if<KLetterQfa>(&m)) return accept_prob(*q, word, tol);
    return accept_prob(std::get<KLetterMmqfa>(m), word, tol).accept;
}

}  // namespace qfa
