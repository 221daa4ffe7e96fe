#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "ia_arena/nn/tape.hpp"

namespace ia_arena::nn {

// Text checkpoint: one "<name> <rows> <cols>" line per block followed by a
// line of row-major values in hexadecimal floating point, so a round trip
// is bit-exact.
using BlockMap = std::map<std::string, Mat>;

void write_params(std::ostream& out, const ParamSet& params, const std::string& prefix = "");
BlockMap read_blocks(std::istream& in);
// Copies `prefix + name` for every block of `params`; names and shapes
// must all be present.
void load_params(ParamSet& params, const BlockMap& blocks, const std::string& prefix = "");

}  // namespace ia_arena::nn
