#include "qfa/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

namespace qfa {

namespace {

using nlohmann::json;

json complex_to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

json vector_to_json(const CVec& v) {
    json out = json::array();
    for (const Complex& c : v) out.push_back(complex_to_json(c));
    return out;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("complex entries must be [re, im] number pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

CVec vector_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("vector must be an array of [re, im] pairs");
    CVec v;
    v.reserve(j.size());
    for (const json& e : j) v.push_back(complex_from_json(e));
    return v;
}

Matrix matrix_from_json(const json& j, const std::string& gram) {
    if (!j.is_array() || j.empty())
        throw ParseError("transition for gram \"" + gram + "\" must be a non-empty matrix");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j[static_cast<std::size_t>(i)].is_array() ||
            static_cast<int>(j[static_cast<std::size_t>(i)].size()) != cols)
            throw ParseError("transition for gram \"" + gram + "\" has ragged rows");
        for (int c = 0; c < cols; ++c)
            m(i, c) = complex_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
    }
    return m;
}

std::vector<int> states_from_json(const json& j, const char* field) {
    if (!j.is_array()) throw ParseError(std::string(field) + " must be an array of state indices");
    std::vector<int> out;
    for (const json& e : j) {
        if (!e.is_number_integer()) throw ParseError(std::string(field) + " must contain integers");
        out.push_back(e.get<int>());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Alphabet alphabet_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("alphabet must be an array of single-character strings");
    Alphabet a;
    for (const json& e : j) {
        if (!e.is_string() || e.get<std::string>().size() != 1)
            throw ParseError("alphabet entries must be single-character strings");
        a.symbols += e.get<std::string>()[0];
    }
    return a;
}

json alphabet_to_json(const Alphabet& a) {
    json out = json::array();
    for (char c : a.symbols) out.push_back(std::string(1, c));
    return out;
}

json transitions_to_json(const TransitionTable& t) {
    json out = json::object();
    for (const auto& [gram, m] : t.entries) out[gram] = matrix_to_json(m);
    return out;
}

TransitionTable transitions_from_json(const json& j, int k) {
    if (!j.is_object()) throw ParseError("transitions must be an object keyed by gram strings");
    TransitionTable t;
    t.k = k;
    for (const auto& [gram, m] : j.items()) t.entries.emplace(gram, matrix_from_json(m, gram));
    return t;
}

const json& require_field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(std::string("missing field \"") + name + "\"");
    return *it;
}

int int_field(const json& j, const char* name) {
    const json& f = require_field(j, name);
    if (!f.is_number_integer()) throw ParseError(std::string("field \"") + name + "\" must be an integer");
    return f.get<int>();
}

}  // namespace

std::string machine_to_json(const Machine& m, int indent) {
    json j;
    if (const auto* q = std::get_if<KLetterQfa>(&m)) {
        j["kind"] = "qfa";
        j["k"] = q->k;
        j["states"] = q->n;
        j["alphabet"] = alphabet_to_json(q->alphabet);
        j["accepting"] = q->accepting;
        j["initial"] = vector_to_json(q->initial);
        j["transitions"] = transitions_to_json(q->transitions);
    } else {
        const auto& mm = std::get<KLetterMmqfa>(m);
        j["kind"] = "mmqfa";
        j["k"] = mm.k;
        j["states"] = mm.n;
        j["alphabet"] = alphabet_to_json(mm.alphabet);
        j["accepting"] = mm.accepting;
        j["rejecting"] = mm.rejecting;
        j["initial"] = vector_to_json(mm.initial);
        j["transitions"] = transitions_to_json(mm.transitions);
    }
    return j.dump(indent) + "\n";
}

Machine machine_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ParseError(std::string("invalid JSON: ") + err.what());
    }
    if (!j.is_object()) throw ParseError("machine file must be a JSON object");

    const json& kind = require_field(j, "kind");
    if (!kind.is_string()) throw ParseError("field \"kind\" must be \"qfa\" or \"mmqfa\"");
    const std::string kind_name = kind.get<std::string>();
    const int k = int_field(j, "k");
    const int states = int_field(j, "states");

    if (kind_name == "qfa") {
        KLetterQfa m;
        m.k = k;
        m.n = states;
        m.alphabet = alphabet_from_json(require_field(j, "alphabet"));
        m.accepting = states_from_json(require_field(j, "accepting"), "accepting");
        m.initial = vector_from_json(require_field(j, "initial"));
        m.transitions = transitions_from_json(require_field(j, "transitions"), k);
        return m;
    }
    if (kind_name == "mmqfa") {
        KLetterMmqfa m;
        m.k = k;
        m.n = states;
        m.alphabet = alphabet_from_json(require_field(j, "alphabet"));
        m.accepting = states_from_json(require_field(j, "accepting"), "accepting");
        m.rejecting = states_from_json(require_field(j, "rejecting"), "rejecting");
        m.initial = vector_from_json(require_field(j, "initial"));
        m.transitions = transitions_from_json(require_field(j, "transitions"), k);
        return m;
    }
    throw ParseError("unknown machine kind \"" + kind_name + "\"");
}

Machine load_machine_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return machine_from_json(text);
}

void save_machine_file(const Machine& m, const std::string& path, int indent) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write \"" + path + "\"");
    out << machine_to_json(m, indent);
}

}  // namespace qfa
