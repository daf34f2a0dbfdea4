#pragma once

#include "qfa/automata.hpp"

#include <stdexcept>
#include <string>

namespace qfa {

/// Malformed machine file: bad JSON, unknown kind, wrong shapes, and the
/// like. Distinct from semantic invariant violations, which validate()
/// reports.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Machine file format (JSON object):
///   kind        "qfa" | "mmqfa"
///   k           window length
///   states      state count n
///   alphabet    array of single-character strings
///   accepting   array of state indices
///   rejecting   array of state indices (mmqfa only)
///   initial     array of n [re, im] pairs
///   transitions object mapping gram strings to n x n matrices given as
///               nested arrays of [re, im] pairs
/// Gram strings use '_' for the blank, '<' for the start marker and '>' for
/// the end marker.
std::string machine_to_json(const Machine& m, int indent = 2);
Machine machine_from_json(const std::string& text);

Machine load_machine_file(const std::string& path);
void save_machine_file(const Machine& m, const std::string& path, int indent = 2);

}  // namespace qfa
