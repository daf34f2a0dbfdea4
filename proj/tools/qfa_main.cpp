#include <CLI11.hpp>
#include <json.hpp>

#include "qfa/automata.hpp"
#include "qfa/equivalence.hpp"
#include "qfa/generate.hpp"
#include "qfa/language.hpp"
#include "qfa/serialization.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using nlohmann::json;

struct Options {
    qfa::Tolerances tol;
};

json tolerances_json(const qfa::Tolerances& tol) {
    return json{{"eps_unitary", tol.unitary}, {"eps_span", tol.span}, {"eps_prob", tol.prob}};
}

int emit(json report, const std::string& command, const qfa::Tolerances& tol, int code) {
    report["command"] = command;
    report["tolerances"] = tolerances_json(tol);
    report["exit_code"] = code;
    std::cout << report.dump(2) << "\n";
    return code;
}

int emit_error(const std::string& command, const qfa::Tolerances& tol, const std::string& message,
               int code = 2) {
    std::cerr << "qfa " << command << ": " << message << "\n";
    return emit(json{{"error", message}}, command, tol, code);
}

// Accepts plain decimals and p/q fractions.
double parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return std::stod(text);
    const double num = std::stod(text.substr(0, slash));
    const double den = std::stod(text.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("zero denominator");
    return num / den;
}

qfa::Machine load_valid(const std::string& path, const qfa::Tolerances& tol) {
    qfa::Machine m = qfa::load_machine_file(path);
    const qfa::ValidationReport report = qfa::validate(m, tol);
    if (!report.valid()) {
        std::string what = "machine file \"" + path + "\" violates invariants:";
        for (const std::string& issue : report.issues) what += "\n  " + issue;
        throw std::invalid_argument(what);
    }
    return m;
}

json verdict_json(const qfa::EquivalenceVerdict& v) {
    json stats{{"words_checked", v.stats.words_checked},
               {"rounds", v.stats.rounds},
               {"bucket_dims", v.stats.bucket_dims},
               {"unverified_flags", v.stats.unverified_flags}};
    json out{{"equivalent", v.equivalent}, {"method", v.method}, {"statistics", stats}};
    if (!v.equivalent) {
        out["witness"] = v.witness;
        out["prob1"] = v.prob1;
        out["prob2"] = v.prob2;
        out["difference"] = std::abs(v.prob1 - v.prob2);
    }
    return out;
}

int write_machine(const qfa::Machine& m, const std::optional<std::string>& out_path,
                  const std::string& command, const qfa::Tolerances& tol) {
    if (!out_path) {
        std::cout << qfa::machine_to_json(m);
        return 0;
    }
    qfa::save_machine_file(m, *out_path);
    return emit(json{{"output", *out_path},
                     {"kind", qfa::kind_of(m) == qfa::MachineKind::Qfa ? "qfa" : "mmqfa"},
                     {"states", qfa::states_of(m)}},
                command, tol, 0);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-letter quantum finite automata: simulation, equivalence, cut-point search"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--eps-unitary", opt.tol.unitary, "unitarity validation tolerance");
    app.add_option("--eps-span", opt.tol.span, "span membership residual tolerance");
    app.add_option("--eps-prob", opt.tol.prob, "probability comparison tolerance");

    // validate
    std::string validate_file;
    auto* cmd_validate = app.add_subcommand("validate", "check a machine file against its invariants");
    cmd_validate->add_option("file", validate_file, "machine file")->required();

    // prob
    std::string prob_file, prob_word;
    auto* cmd_prob = app.add_subcommand("prob", "acceptance probability of a word");
    cmd_prob->add_option("file", prob_file, "machine file")->required();
    cmd_prob->add_option("word", prob_word, "input word (omit for the empty word)");

    // equiv
    std::string equiv_file1, equiv_file2, equiv_method = "span";
    std::optional<std::uint64_t> equiv_t;
    auto* cmd_equiv = app.add_subcommand("equiv", "decide equivalence of two machines");
    cmd_equiv->add_option("file1", equiv_file1)->required();
    cmd_equiv->add_option("file2", equiv_file2)->required();
    cmd_equiv->add_option("--method", equiv_method, "naive or span")
        ->check(CLI::IsMember({"naive", "span"}));
    cmd_equiv->add_option("-t,--max-words-len", equiv_t,
                          "naive length bound (defaults to the decision bound)");

    // bound
    int bound_n1 = 0, bound_n2 = 0, bound_sigma = 0, bound_k1 = 0, bound_k2 = 0;
    auto* cmd_bound = app.add_subcommand("bound", "word length that decides equivalence");
    cmd_bound->add_option("n1", bound_n1)->required();
    cmd_bound->add_option("n2", bound_n2)->required();
    cmd_bound->add_option("sigma", bound_sigma)->required();
    cmd_bound->add_option("k1", bound_k1)->required();
    cmd_bound->add_option("k2", bound_k2)->required();

    // witness
    std::string witness_file, witness_lambda;
    bool witness_strict = false;
    int witness_max_len = 8;
    auto* cmd_witness = app.add_subcommand("witness", "search for a cut-point language member");
    cmd_witness->add_option("file", witness_file)->required();
    cmd_witness->add_option("lambda", witness_lambda, "cut-point (decimal or p/q)")->required();
    cmd_witness->add_flag("--strict", witness_strict, "strict comparison (default non-strict)");
    cmd_witness->add_option("--max-len", witness_max_len, "search bound (default 8)");

    // embed
    std::string embed_file;
    std::optional<std::string> embed_out;
    auto* cmd_embed = app.add_subcommand("embed", "embed a qfa into an equivalent mmqfa");
    cmd_embed->add_option("file", embed_file)->required();
    cmd_embed->add_option("-o,--output", embed_out, "write the machine here instead of stdout");

    // oplus
    std::string oplus_file1, oplus_file2, oplus_initial = "rho";
    std::optional<std::string> oplus_out;
    auto* cmd_oplus = app.add_subcommand("oplus", "diagonal sum of two machines");
    cmd_oplus->add_option("file1", oplus_file1)->required();
    cmd_oplus->add_option("file2", oplus_file2)->required();
    cmd_oplus->add_option("--initial", oplus_initial, "rho (first machine) or pi (second)")
        ->check(CLI::IsMember({"rho", "pi"}));
    cmd_oplus->add_option("-o,--output", oplus_out, "write the machine here instead of stdout");

    // random
    std::string random_kind;
    int random_n = 0, random_k = 0, random_sigma = 0;
    std::uint64_t random_seed = 0;
    std::optional<std::string> random_out;
    auto* cmd_random = app.add_subcommand("random", "seeded random machine");
    cmd_random->add_option("kind", random_kind)->required()->check(CLI::IsMember({"qfa", "mmqfa"}));
    cmd_random->add_option("n", random_n, "state count")->required();
    cmd_random->add_option("k", random_k, "window length")->required();
    cmd_random->add_option("sigma", random_sigma, "alphabet size")->required();
    cmd_random->add_option("seed", random_seed)->required();
    cmd_random->add_option("-o,--output", random_out, "write the machine here instead of stdout");

    // Tolerance flags may appear after the subcommand as well.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cout << json{{"error", e.what()}, {"exit_code", 2}}.dump(2) << "\n";
        return 2;
    }

    const qfa::Tolerances tol = opt.tol;

    try {
        if (cmd_validate->parsed()) {
            qfa::Machine m;
            try {
                m = qfa::load_machine_file(validate_file);
            } catch (const qfa::ParseError& e) {
                return emit_error("validate", tol, e.what(), 2);
            }
            const qfa::ValidationReport report = qfa::validate(m, tol);
            json j{{"file", validate_file},
                   {"valid", report.valid()},
                   {"issues", report.issues},
                   {"kind", qfa::kind_of(m) == qfa::MachineKind::Qfa ? "qfa" : "mmqfa"},
                   {"states", qfa::states_of(m)}};
            return emit(j, "validate", tol, report.valid() ? 0 : 1);
        }

        if (cmd_prob->parsed()) {
            const qfa::Machine m = load_valid(prob_file, tol);
            json j{{"file", prob_file}, {"word", prob_word}};
            if (const auto* q = std::get_if<qfa::KLetterQfa>(&m)) {
                j["accept"] = qfa::accept_prob(*q, prob_word, tol);
            } else {
                const auto outcome = qfa::accept_prob(std::get<qfa::KLetterMmqfa>(m), prob_word, tol);
                j["accept"] = outcome.accept;
                j["reject"] = outcome.reject;
                j["residual"] = outcome.residual;
            }
            return emit(j, "prob", tol, 0);
        }

        if (cmd_equiv->parsed()) {
            const qfa::Machine m1 = load_valid(equiv_file1, tol);
            const qfa::Machine m2 = load_valid(equiv_file2, tol);
            if (kind_of(m1) != kind_of(m2))
                return emit_error("equiv", tol, "machines have different kinds", 2);
            qfa::EquivalenceVerdict verdict;
            if (const auto* q1 = std::get_if<qfa::KLetterQfa>(&m1)) {
                const auto& q2 = std::get<qfa::KLetterQfa>(m2);
                if (equiv_method == "span") {
                    verdict = qfa::span_equivalent(*q1, q2, tol);
                } else {
                    const std::uint64_t t =
                        equiv_t ? *equiv_t
                                : qfa::equivalence_bound(q1->n, q2.n,
                                                         static_cast<int>(q1->alphabet.size()),
                                                         q1->k, q2.k);
                    verdict = qfa::naive_equivalent(*q1, q2, t, tol);
                }
            } else {
                const auto& a1 = std::get<qfa::KLetterMmqfa>(m1);
                const auto& a2 = std::get<qfa::KLetterMmqfa>(m2);
                if (equiv_method == "span") {
                    verdict = qfa::span_equivalent(a1, a2, tol);
                } else {
                    const std::uint64_t t =
                        equiv_t ? *equiv_t
                                : qfa::equivalence_bound(a1.n, a2.n,
                                                         static_cast<int>(a1.alphabet.size()),
                                                         a1.k, a2.k);
                    verdict = qfa::naive_equivalent(a1, a2, t, tol);
                }
            }
            json j = verdict_json(verdict);
            j["file1"] = equiv_file1;
            j["file2"] = equiv_file2;
            return emit(j, "equiv", tol, verdict.equivalent ? 0 : 1);
        }

        if (cmd_bound->parsed()) {
            const std::uint64_t bound =
                qfa::equivalence_bound(bound_n1, bound_n2, bound_sigma, bound_k1, bound_k2);
            return emit(json{{"bound", bound}}, "bound", tol, 0);
        }

        if (cmd_witness->parsed()) {
            const qfa::Machine m = load_valid(witness_file, tol);
            qfa::CutpointQuery query;
            query.lambda = parse_rational(witness_lambda);
            query.strictness = witness_strict ? qfa::Strictness::Strict : qfa::Strictness::NonStrict;
            const qfa::WitnessSearchResult result = qfa::find_witness(m, query, witness_max_len, tol);
            json j{{"file", witness_file},
                   {"lambda", query.lambda},
                   {"strict", witness_strict},
                   {"max_len", result.max_len},
                   {"words_examined", result.words_examined},
                   {"found", result.found}};
            if (result.found) {
                j["witness"] = result.word;
                j["prob"] = result.prob;
                j["boundary_ambiguous"] = result.boundary;
            }
            return emit(j, "witness", tol, 0);
        }

        if (cmd_embed->parsed()) {
            const qfa::Machine m = load_valid(embed_file, tol);
            const auto* q = std::get_if<qfa::KLetterQfa>(&m);
            if (!q) return emit_error("embed", tol, "embed expects a qfa machine file", 2);
            return write_machine(qfa::embed_qfa_to_mmqfa(*q), embed_out, "embed", tol);
        }

        if (cmd_oplus->parsed()) {
            const qfa::Machine m1 = load_valid(oplus_file1, tol);
            const qfa::Machine m2 = load_valid(oplus_file2, tol);
            if (kind_of(m1) != kind_of(m2))
                return emit_error("oplus", tol, "machines have different kinds", 2);
            qfa::Machine out;
            if (const auto* q1 = std::get_if<qfa::KLetterQfa>(&m1)) {
                const auto& q2 = std::get<qfa::KLetterQfa>(m2);
                const qfa::CVec initial = oplus_initial == "rho"
                                              ? qfa::rho_vector(q1->initial, q2.n)
                                              : qfa::pi_vector(q1->n, q2.initial);
                out = qfa::oplus(*q1, q2, initial);
            } else {
                const auto& a1 = std::get<qfa::KLetterMmqfa>(m1);
                const auto& a2 = std::get<qfa::KLetterMmqfa>(m2);
                const qfa::CVec initial = oplus_initial == "rho"
                                              ? qfa::rho_vector(a1.initial, a2.n)
                                              : qfa::pi_vector(a1.n, a2.initial);
                out = qfa::oplus(a1, a2, initial);
            }
            return write_machine(out, oplus_out, "oplus", tol);
        }

        if (cmd_random->parsed()) {
            qfa::Machine m;
            if (random_kind == "qfa")
                m = qfa::random_qfa(random_n, random_k, random_sigma, random_seed);
            else
                m = qfa::random_mmqfa(random_n, random_k, random_sigma, random_seed);
            return write_machine(m, random_out, "random", tol);
        }
    } catch (const qfa::ParseError& e) {
        return emit_error(app.get_subcommands().front()->get_name(), tol, e.what(), 2);
    } catch (const std::exception& e) {
        return emit_error(app.get_subcommands().front()->get_name(), tol, e.what(), 2);
    }
    return 2;
}
