#pragma once

#include "qfa/complex_linalg.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace qfa {

// Reserved characters in gram strings. A gram is a fixed-length window of k
// tokens; the blank pads windows that reach past the start of the input, and
// the markers frame measure-many runs.
inline constexpr char kBlank = '_';        // padding before the first letter
inline constexpr char kLeftMarker = '<';   // start-of-input marker
inline constexpr char kRightMarker = '>';  // end-of-input marker

struct Alphabet {
    std::string symbols;  // ordered, single-character tokens

    std::size_t size() const { return symbols.size(); }
    bool contains(char c) const { return symbols.find(c) != std::string::npos; }
    int index(char c) const {
        auto pos = symbols.find(c);
        return pos == std::string::npos ? -1 : static_cast<int>(pos);
    }
};

enum class MachineKind { Qfa, Mmqfa };

enum class GramRole {
    LeftMarker,   // the start-marker step
    Padded,       // a step whose window still overlaps the blank padding
    Interior,     // a full window of input letters
    RightMarker,  // the end-marker step
};

struct GramStep {
    std::string gram;
    GramRole role;
};

/// The ordered windows a machine reads while consuming `word`.
///
/// A measure-once machine applies one unitary per input letter; the window
/// for letter i is the previous k-1 letters followed by letter i, blank
/// padded on the left while i < k. A measure-many machine additionally
/// starts with the start-marker window (blanks then '<') and ends with the
/// end-marker window (the last k-1 letters then '>', blank padded when the
/// word is shorter than k-1).
std::vector<GramStep> gram_sequence(const std::string& word, MachineKind kind, int k,
                                    const Alphabet& alphabet);

/// All windows that can occur in some run; tables must cover exactly these.
std::vector<std::string> reachable_grams(MachineKind kind, int k, const Alphabet& alphabet);

struct TransitionTable {
    int k = 1;
    std::map<std::string, Matrix> entries;

    bool has(const std::string& gram) const { return entries.count(gram) != 0; }
    /// Throws std::out_of_range naming the gram when absent.
    const Matrix& at(const std::string& gram) const;
};

/// Measure-once multi-letter machine: each step's unitary depends on the
/// last k letters received; a single projective measurement happens at the
/// end of the input.
struct KLetterQfa {
    int n = 0;  // state count
    int k = 1;
    Alphabet alphabet;
    std::vector<int> accepting;  // sorted state indices
    CVec initial;
    TransitionTable transitions;

    Matrix accept_projector() const { return Matrix::projector(n, accepting); }
};

/// Measure-many multi-letter machine: a three-outcome measurement
/// (accept / continue / reject) after every step, input framed by the
/// start and end markers.
struct KLetterMmqfa {
    int n = 0;
    int k = 1;
    Alphabet alphabet;
    std::vector<int> accepting;
    std::vector<int> rejecting;
    CVec initial;
    TransitionTable transitions;

    Matrix accept_projector() const { return Matrix::projector(n, accepting); }
    Matrix reject_projector() const { return Matrix::projector(n, rejecting); }
    Matrix continue_projector() const;
    std::vector<int> neutral() const;
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool valid() const { return issues.empty(); }
};

ValidationReport validate(const KLetterQfa& m, const Tolerances& tol = {});
ValidationReport validate(const KLetterMmqfa& m, const Tolerances& tol = {});

/// Product of the transition unitaries along gram_sequence(word); later
/// steps multiply on the left. The empty word yields the identity.
Matrix word_unitary(const KLetterQfa& m, const std::string& word);

/// ||P_acc U_word |initial>||^2, clamped to [0,1]. Deviations beyond
/// tol.prob outside [0,1] throw.
double accept_prob(const KLetterQfa& m, const std::string& word, const Tolerances& tol = {});

struct MmqfaOutcome {
    double accept = 0.0;
    double reject = 0.0;
    double residual = 0.0;  // unhalted mass left after the end marker
};

/// Runs the measure-many dynamics: apply each step's unitary, accumulate
/// the accept/reject mass, continue with the unnormalized projected state.
MmqfaOutcome accept_prob(const KLetterMmqfa& m, const std::string& word,
                         const Tolerances& tol = {});

/// Per-step acceptance increment: accept(word) - accept(word minus its last
/// letter); for the empty word, accept(empty). Summed over the prefixes of
/// a word this telescopes back to its acceptance probability.
double delta_prob(const KLetterMmqfa& m, const std::string& word, const Tolerances& tol = {});

/// Block-diagonal combination of two machines over the same alphabet.
/// The combined window length is max(k1, k2) and each component reads the
/// suffix of the window matching its own length. The caller supplies the
/// (n1+n2)-dimensional initial vector.
KLetterQfa oplus(const KLetterQfa& a, const KLetterQfa& b, const CVec& initial);
KLetterMmqfa oplus(const KLetterMmqfa& a, const KLetterMmqfa& b, const CVec& initial);

/// First-component / second-component initial vectors for a diagonal sum.
CVec rho_vector(const CVec& initial1, int n2);
CVec pi_vector(int n1, const CVec& initial2);

/// Per-letter measure-once machine (no window memory).
struct MeasureOnceQfa {
    int n = 0;
    Alphabet alphabet;
    std::vector<int> accepting;
    CVec initial;
    std::map<char, Matrix> transitions;
};

/// A per-letter machine is exactly a k=1 multi-letter machine.
KLetterQfa mo_to_kletter(const MeasureOnceQfa& m);

/// Embeds a measure-once k-letter machine into a measure-many one with 3n
/// states and identical acceptance probabilities: letters act on the middle
/// block, the markers swap the first two blocks, and the end-marker
/// measurement reproduces the one-shot measurement.
KLetterMmqfa embed_qfa_to_mmqfa(const KLetterQfa& m);

/// Two-state machine accepting every word with constant probability
/// lambda - c (all transitions identity), so its cut-point language at
/// lambda is empty. Requires 0 < c < lambda <= 1.
KLetterQfa empty_language_moqfa(double lambda, double c, const Alphabet& alphabet = {"ab"});

/// The 2-letter machine over {a,b} that accepts exactly the words ending in
/// 'a' (with probability 1, else 0).
KLetterQfa ends_in_a_qfa();

using Machine = std::variant<KLetterQfa, KLetterMmqfa>;

MachineKind kind_of(const Machine& m);
const Alphabet& alphabet_of(const Machine& m);
int states_of(const Machine& m);
ValidationReport validate(const Machine& m, const Tolerances& tol = {});

/// Acceptance probability of either machine kind (the accept component for
/// measure-many machines).
double accept_probability(const Machine& m, const std::string& word, const Tolerances& tol = {});

}  // namespace qfa
