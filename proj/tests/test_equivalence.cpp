#include <doctest.h>

#include "qfa/equivalence.hpp"
#include "qfa/generate.hpp"

#include <cmath>

using namespace qfa;

namespace {

KLetterQfa identity_qfa_n(int n, int k, std::vector<int> accepting) {
    KLetterQfa m;
    m.n = n;
    m.k = k;
    m.alphabet = {"ab"};
    m.accepting = std::move(accepting);
    m.initial.assign(static_cast<std::size_t>(n), Complex{});
    m.initial[0] = 1.0;
    m.transitions.k = k;
    for (const std::string& gram : reachable_grams(MachineKind::Qfa, k, m.alphabet))
        m.transitions.entries.emplace(gram, Matrix::identity(n));
    return m;
}

KLetterMmqfa all_neutral_identity_mmqfa(int n, int k) {
    KLetterMmqfa m;
    m.n = n;
    m.k = k;
    m.alphabet = {"ab"};
    m.initial.assign(static_cast<std::size_t>(n), Complex{});
    m.initial[0] = 1.0;
    m.transitions.k = k;
    for (const std::string& gram : reachable_grams(MachineKind::Mmqfa, k, m.alphabet))
        m.transitions.entries.emplace(gram, Matrix::identity(n));
    return m;
}

std::string random_word(const Alphabet& alphabet, int len, GaussianRng& rng) {
    std::string w;
    for (int i = 0; i < len; ++i)
        w += alphabet.symbols[static_cast<std::size_t>(rng.bits() % alphabet.size())];
    return w;
}

// Round bound for a closure run on a diagonal sum of machines with n1 and
// n2 states.
int sum_round_bound(int n1, int n2, int sigma, int k) {
    int power = 1;
    for (int i = 1; i < k; ++i) power *= sigma;
    return (n1 * n1 + n2 * n2 - 1) * power + 1;
}

}  // namespace

TEST_CASE("equivalence_bound formula") {
    CHECK(equivalence_bound(2, 2, 2, 2, 2) == 16);
    CHECK(equivalence_bound(1, 1, 1, 1, 1) == 2);
    CHECK(equivalence_bound(2, 3, 2, 1, 3) == 51);
    CHECK_THROWS_AS(equivalence_bound(0, 1, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(equivalence_bound(1, 1, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("naive equivalence") {
    SUBCASE("every machine is equivalent to itself") {
        const KLetterQfa m = random_qfa(2, 2, 2, 101);
        const EquivalenceVerdict v = naive_equivalent(m, m, 6);
        CHECK(v.equivalent);
        CHECK(v.stats.words_checked == 127);  // all words of length <= 6 over two letters
    }

    SUBCASE("complement-accepting copy differs already on the empty word") {
        const KLetterQfa m = ends_in_a_qfa();
        KLetterQfa complement = m;
        complement.accepting = {0};
        const EquivalenceVerdict v = naive_equivalent(m, complement, 16);
        REQUIRE_FALSE(v.equivalent);
        CHECK(v.witness == "");
        CHECK(v.prob1 == 0.0);
        CHECK(v.prob2 == 1.0);
        // Witness soundness under re-simulation.
        CHECK(std::abs(accept_prob(m, v.witness) - accept_prob(complement, v.witness)) > 1e-9);
    }

    SUBCASE("a global phase on every transition changes nothing") {
        const KLetterQfa m = random_qfa(2, 2, 2, 103);
        const KLetterQfa phased = scale_global_phase(m, 1.3);
        CHECK(naive_equivalent(m, phased, 8).equivalent);
    }

    SUBCASE("alphabet mismatch is rejected") {
        CHECK_THROWS_AS(naive_equivalent(random_qfa(2, 1, 2, 1), random_qfa(2, 1, 3, 2), 4),
                        std::invalid_argument);
    }
}

TEST_CASE("prefix bucket closure, measure-once") {
    SUBCASE("identity machine: one direction per bucket, closed immediately") {
        const KLetterQfa m = identity_qfa_n(2, 1, {0});
        const BucketFamily family = qfa_bucket_closure(m);
        REQUIRE(family.prefixes == std::vector<std::string>{""});
        const SpanBasis& bucket = family.buckets.at("");
        CHECK(bucket.size() == 1);
        CHECK(bucket.contains(Matrix::projector(2, {0}), 1e-9).contained);
        CHECK(family.rounds == 1);
    }

    SUBCASE("ends-in-a machine: both diagonal directions in both buckets") {
        const BucketFamily family = qfa_bucket_closure(ends_in_a_qfa());
        REQUIRE(family.prefixes == std::vector<std::string>{"a", "b"});
        for (const std::string& prefix : family.prefixes) {
            const SpanBasis& bucket = family.buckets.at(prefix);
            CHECK(bucket.size() == 2);
            CHECK(bucket.contains(Matrix::projector(2, {0}), 1e-9).contained);
            CHECK(bucket.contains(Matrix::projector(2, {1}), 1e-9).contained);
        }
    }

    SUBCASE("bucket dimension never exceeds the ambient dimension") {
        for (std::uint64_t seed : {111u, 112u, 113u}) {
            const KLetterQfa m = random_qfa(3, 2, 2, seed);
            const BucketFamily family = qfa_bucket_closure(m);
            CHECK(family.max_bucket_dim() <= 9);
            CHECK(family.rounds <= (9 - 1) * 2 + 1);
        }
    }

    SUBCASE("closed buckets absorb every prepend-conjugated element") {
        const KLetterQfa a = random_qfa(2, 2, 2, 121);
        const KLetterQfa b = random_qfa(2, 2, 2, 122);
        const KLetterQfa sum = oplus(a, b, rho_vector(a.initial, b.n));
        const BucketFamily family = qfa_bucket_closure(sum);
        for (const std::string& prefix : family.prefixes) {
            const SpanBasis& bucket = family.buckets.at(prefix);
            for (int i = 0; i < bucket.size(); ++i) {
                for (char y : sum.alphabet.symbols) {
                    const Matrix& u = sum.transitions.at(y + prefix);
                    const Matrix image = u.adjoint() * bucket.matrix(i) * u;
                    const std::string target = (y + prefix).substr(0, 1);
                    CHECK(family.buckets.at(target).contains(image, 1e-9).contained);
                }
            }
        }
    }
}

TEST_CASE("span equivalence, measure-once") {
    SUBCASE("relabeled copies are equivalent") {
        const KLetterQfa m = random_qfa(2, 2, 2, 131);
        const EquivalenceVerdict v = span_equivalent(m, permute_states(m, {1, 0}));
        CHECK(v.equivalent);
        CHECK(v.stats.unverified_flags == 0);
    }

    SUBCASE("complement-accepting copy yields a short verified witness") {
        const KLetterQfa m = ends_in_a_qfa();
        KLetterQfa complement = m;
        complement.accepting = {0};
        const EquivalenceVerdict v = span_equivalent(m, complement);
        REQUIRE_FALSE(v.equivalent);
        CHECK(v.witness.size() <= 2);
        CHECK(std::abs(accept_prob(m, v.witness) - accept_prob(complement, v.witness)) > 1e-9);
    }

    SUBCASE("agrees with naive enumeration at the decision bound") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const int k1 = seed % 3 == 0 ? 1 : 2;
            const int k2 = seed % 3 == 2 ? 1 : 2;
            const KLetterQfa a = random_qfa(2, k1, 2, 1000 + seed);
            // A few equivalent pairs in the mix; the rest independent.
            const KLetterQfa b = seed % 5 == 0
                                     ? scale_global_phase(permute_states(a, {1, 0}), 0.9)
                                     : random_qfa(2, k2, 2, 2000 + seed);
            const std::uint64_t t = equivalence_bound(a.n, b.n, 2, a.k, b.k);
            const EquivalenceVerdict naive = naive_equivalent(a, b, t);
            const EquivalenceVerdict span = span_equivalent(a, b);
            CHECK(naive.equivalent == span.equivalent);
            if (!span.equivalent)
                CHECK(std::abs(accept_prob(a, span.witness) - accept_prob(b, span.witness)) > 1e-9);
        }
    }
}

TEST_CASE("witnesses beyond the short words come from bucket provenance") {
    // Same behavior on every word shorter than the window, first divergence
    // at length two.
    const KLetterQfa m = ends_in_a_qfa();
    KLetterQfa variant = m;
    Matrix swap(2, 2);
    swap(0, 1) = 1.0;
    swap(1, 0) = 1.0;
    variant.transitions.entries["aa"] = swap;
    REQUIRE(accept_prob(m, "") == accept_prob(variant, ""));
    REQUIRE(accept_prob(m, "a") == accept_prob(variant, "a"));
    REQUIRE(accept_prob(m, "b") == accept_prob(variant, "b"));

    SUBCASE("measure-once") {
        const EquivalenceVerdict v = span_equivalent(m, variant);
        REQUIRE_FALSE(v.equivalent);
        CHECK(v.witness.size() >= 2);
        CHECK(v.stats.unverified_flags == 0);
        CHECK(std::abs(accept_prob(m, v.witness) - accept_prob(variant, v.witness)) > 1e-9);
    }

    SUBCASE("measure-many, via the embedding") {
        const KLetterMmqfa e1 = embed_qfa_to_mmqfa(m);
        const KLetterMmqfa e2 = embed_qfa_to_mmqfa(variant);
        const EquivalenceVerdict v = span_equivalent(e1, e2);
        REQUIRE_FALSE(v.equivalent);
        CHECK(v.witness.size() >= 2);
        CHECK(std::abs(accept_prob(e1, v.witness).accept - accept_prob(e2, v.witness).accept) >
              1e-9);
    }
}

TEST_CASE("deciders handle machines of different sizes") {
    // Padding a machine with a dead state changes nothing observable.
    KLetterQfa dead;
    dead.n = 1;
    dead.k = 1;
    dead.alphabet = {"ab"};
    dead.initial = {1.0};
    dead.transitions.k = 1;
    dead.transitions.entries.emplace("a", Matrix::identity(1));
    dead.transitions.entries.emplace("b", Matrix::identity(1));

    const KLetterQfa a = random_qfa(2, 1, 2, 171);
    const KLetterQfa padded = oplus(a, dead, rho_vector(a.initial, 1));
    CHECK(span_equivalent(a, padded).equivalent);
    CHECK(naive_equivalent(a, padded, equivalence_bound(2, 3, 2, 1, 1)).equivalent);

    KLetterMmqfa dead_mm;
    dead_mm.n = 1;
    dead_mm.k = 1;
    dead_mm.alphabet = {"ab"};
    dead_mm.initial = {1.0};
    dead_mm.transitions.k = 1;
    for (const std::string& gram : reachable_grams(MachineKind::Mmqfa, 1, dead_mm.alphabet))
        dead_mm.transitions.entries.emplace(gram, Matrix::identity(1));

    const KLetterMmqfa b = random_mmqfa(2, 1, 2, 172);
    const KLetterMmqfa padded_mm = oplus(b, dead_mm, rho_vector(b.initial, 1));
    CHECK(span_equivalent(b, padded_mm).equivalent);
    CHECK(naive_equivalent(b, padded_mm, equivalence_bound(2, 3, 2, 1, 1)).equivalent);

    // And an unequal-size inequivalent pair agrees with the enumeration.
    const KLetterQfa c = random_qfa(3, 1, 2, 173);
    const EquivalenceVerdict span = span_equivalent(a, c);
    const EquivalenceVerdict naive = naive_equivalent(a, c, equivalence_bound(2, 3, 2, 1, 1));
    CHECK(span.equivalent == naive.equivalent);
}

TEST_CASE("edge alphabets and deeper windows") {
    SUBCASE("single-letter alphabet") {
        const KLetterQfa a = random_qfa(2, 2, 1, 181);
        const KLetterQfa b = random_qfa(2, 2, 1, 182);
        const std::uint64_t t = equivalence_bound(2, 2, 1, 2, 2);
        CHECK(t == 9);
        const EquivalenceVerdict naive = naive_equivalent(a, b, t);
        const EquivalenceVerdict span = span_equivalent(a, b);
        CHECK(naive.equivalent == span.equivalent);
        CHECK(span_equivalent(a, scale_global_phase(a, 0.2)).equivalent);

        const KLetterMmqfa ma = random_mmqfa(2, 2, 1, 183);
        const KLetterMmqfa mb = random_mmqfa(2, 2, 1, 184);
        CHECK(naive_equivalent(ma, mb, t).equivalent == span_equivalent(ma, mb).equivalent);
        CHECK(span_equivalent(ma, permute_states(ma, {1, 0})).equivalent);
    }

    SUBCASE("three-letter windows") {
        const KLetterQfa m = random_qfa(2, 3, 2, 185);
        CHECK(span_equivalent(m, permute_states(m, {1, 0})).equivalent);
        CHECK(span_equivalent(m, scale_global_phase(m, 1.1)).equivalent);

        const KLetterQfa other = random_qfa(2, 3, 2, 186);
        const EquivalenceVerdict v = span_equivalent(m, other);
        if (!v.equivalent)
            CHECK(std::abs(accept_prob(m, v.witness) - accept_prob(other, v.witness)) > 1e-9);

        const KLetterMmqfa mm = random_mmqfa(2, 3, 2, 187);
        CHECK(span_equivalent(mm, scale_global_phase(mm, 0.6)).equivalent);
        const KLetterMmqfa mm_other = random_mmqfa(2, 3, 2, 188);
        const EquivalenceVerdict vm = span_equivalent(mm, mm_other);
        if (!vm.equivalent)
            CHECK(std::abs(accept_prob(mm, vm.witness).accept -
                           accept_prob(mm_other, vm.witness).accept) > 1e-9);
    }

    SUBCASE("mixed windows against a per-letter machine") {
        const KLetterQfa a = random_qfa(2, 1, 2, 189);
        const KLetterQfa b = random_qfa(2, 3, 2, 190);
        const EquivalenceVerdict v = span_equivalent(a, b);
        if (!v.equivalent)
            CHECK(std::abs(accept_prob(a, v.witness) - accept_prob(b, v.witness)) > 1e-9);
        // Same machine twice through the mixed-k sum machinery.
        const KLetterQfa sum = oplus(a, a, rho_vector(a.initial, a.n));
        CHECK(validate(sum).valid());
        CHECK(span_equivalent(a, a).equivalent);
    }
}

TEST_CASE("theta matrices") {
    SUBCASE("expectation in the initial state reproduces the increment") {
        GaussianRng rng(9);
        for (std::uint64_t seed : {141u, 142u}) {
            const KLetterMmqfa m = random_mmqfa(3, 2, 2, seed);
            for (int trial = 0; trial < 20; ++trial) {
                const std::string w = random_word(m.alphabet, static_cast<int>(rng.bits() % 9), rng);
                const Matrix theta = mmqfa_theta(m, w);
                const Complex expectation = sandwich(m.initial, theta, m.initial);
                CHECK(std::abs(expectation.imag()) <= 1e-9);
                CHECK(std::abs(expectation.real() - delta_prob(m, w)) <= 1e-9);
            }
        }
    }

    SUBCASE("empty-word theta matches its two-step expansion") {
        const KLetterMmqfa m = random_mmqfa(2, 2, 2, 143);
        const Matrix u_start = m.transitions.at("_<");
        const Matrix u_end = m.transitions.at("_>");
        const Matrix p_a = m.accept_projector();
        const Matrix pg_u_start = m.continue_projector() * u_start;
        const Matrix expected = u_start.adjoint() * p_a * u_start +
                                pg_u_start.adjoint() * (u_end.adjoint() * p_a * u_end) * pg_u_start;
        CHECK(mmqfa_theta(m, "").max_abs_diff(expected) <= 1e-12);
    }

    SUBCASE("fully neutral machines have vanishing theta") {
        const KLetterMmqfa m = all_neutral_identity_mmqfa(2, 2);
        for (const std::string& w : {std::string{"a"}, std::string{"ab"}, std::string{"bba"}})
            CHECK(mmqfa_theta(m, w).max_abs_diff(Matrix::zero(2, 2)) <= 1e-15);
    }
}

TEST_CASE("prefix bucket closure, measure-many") {
    SUBCASE("all-neutral machine seeds nothing") {
        const BucketFamily family = mmqfa_bucket_closure(all_neutral_identity_mmqfa(2, 2));
        CHECK(family.total_dim() == 0);
        CHECK(family.rounds == 1);
    }

    SUBCASE("bucket dimensions are capped") {
        for (std::uint64_t seed : {151u, 152u, 153u}) {
            const KLetterMmqfa m = random_mmqfa(3, 2, 2, seed);
            const BucketFamily family = mmqfa_bucket_closure(m);
            CHECK(family.max_bucket_dim() <= 9);
        }
    }

    SUBCASE("embedded machine closure stays within the sum round bound") {
        const KLetterMmqfa e = embed_qfa_to_mmqfa(ends_in_a_qfa());
        const BucketFamily family = mmqfa_bucket_closure(e);
        // 6 = 3n states; the generic cap applies since this is not a sum.
        CHECK(family.rounds <= (36 - 1) * 2 + 1);
        CHECK(family.max_bucket_dim() <= 36);
    }
}

TEST_CASE("span equivalence, measure-many") {
    SUBCASE("self-equivalence") {
        const KLetterMmqfa m = random_mmqfa(2, 2, 2, 161);
        CHECK(span_equivalent(m, m).equivalent);
    }

    SUBCASE("relabeled and phased copies are equivalent") {
        const KLetterMmqfa m = random_mmqfa(3, 1, 2, 162);
        CHECK(span_equivalent(m, permute_states(m, {2, 0, 1})).equivalent);
        CHECK(span_equivalent(m, scale_global_phase(m, 0.4)).equivalent);
    }

    SUBCASE("embedding preserves the equivalence relation") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const KLetterQfa q1 = random_qfa(2, 1 + static_cast<int>(seed % 2), 2, 3000 + seed);
            const KLetterQfa q2 = seed % 3 == 0 ? permute_states(q1, {1, 0})
                                                : random_qfa(2, 1 + static_cast<int>(seed % 2), 2,
                                                             4000 + seed);
            const bool qfa_equiv = span_equivalent(q1, q2).equivalent;
            const bool mmqfa_equiv =
                span_equivalent(embed_qfa_to_mmqfa(q1), embed_qfa_to_mmqfa(q2)).equivalent;
            CHECK(qfa_equiv == mmqfa_equiv);
        }
    }

    SUBCASE("agrees with naive enumeration at the decision bound") {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const int k1 = seed % 2 == 0 ? 1 : 2;
            const int k2 = seed % 3 == 0 ? 2 : k1;
            const KLetterMmqfa a = random_mmqfa(2, k1, 2, 5000 + seed);
            const KLetterMmqfa b = seed % 5 == 0 ? permute_states(a, {1, 0})
                                                 : random_mmqfa(2, k2, 2, 6000 + seed);
            const std::uint64_t t = equivalence_bound(a.n, b.n, 2, a.k, b.k);
            const EquivalenceVerdict naive = naive_equivalent(a, b, t);
            const EquivalenceVerdict span = span_equivalent(a, b);
            CHECK(naive.equivalent == span.equivalent);
            if (!span.equivalent)
                CHECK(std::abs(accept_prob(a, span.witness).accept -
                               accept_prob(b, span.witness).accept) > 1e-9);
        }
    }

    SUBCASE("closure rounds respect the sum bound") {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const KLetterMmqfa a = random_mmqfa(2, 2, 2, 7000 + seed);
            const KLetterMmqfa b = random_mmqfa(2, 2, 2, 8000 + seed);
            const EquivalenceVerdict v = span_equivalent(a, b);
            CHECK(v.stats.rounds <= sum_round_bound(2, 2, 2, 2));
            for (const auto& [prefix, dim] : v.stats.bucket_dims) CHECK(dim <= 8);
        }
    }
}
