#pragma once

#include <string>

#include "modpolar/generators.hpp"
#include "modpolar/module.hpp"

namespace modpolar {

// Operator documents are JSON objects:
//   {
//     "algebra": [n_1, ..., n_s],
//     "domain_rank": k,
//     "codomain_rank": m,
//     "entries": [summand][row_block][col_block][intra_row][intra_col]
//   }
// with every complex number written as an [re, im] pair. Doubles print in
// shortest round-trip form, so parse(serialize(T)) reproduces T exactly.

AdjointableOp parse_operator(const std::string& text);   // throws ParseError
std::string serialize_operator(const AdjointableOp& op);

AdjointableOp load_operator(const std::string& path);    // throws ParseError
void save_operator(const AdjointableOp& op, const std::string& path);

GeneratorSpec parse_generator_spec(const std::string& text); // throws ParseError
std::string serialize_generator_spec(const GeneratorSpec& spec);

} // namespace modpolar
