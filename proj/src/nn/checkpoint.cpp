#include "ia_arena/nn/checkpoint.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ia_arena::nn {

void write_params(std::ostream& out, const ParamSet& params, const std::string& prefix) {
  char buf[64];
  for (const auto& b : params.blocks()) {
    out << "block " << prefix << b.name << ' ' << b.value.rows() << ' ' << b.value.cols() << '\n';
    for (Eigen::Index i = 0; i < b.value.size(); ++i) {
      const double x = b.value.data()[i];
      if (!std::isfinite(x)) throw std::domain_error("refusing to checkpoint a non-finite value");
      auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::hex);
      if (i) out << ' ';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

BlockMap read_blocks(std::istream& in) {
  BlockMap blocks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream header(line);
    std::string tag, name;
    Eigen::Index rows = 0, cols = 0;
    if (!(header >> tag) || tag != "block") continue;
    if (!(header >> name >> rows >> cols) || rows < 0 || cols < 0) {
      throw std::runtime_error("malformed checkpoint header: " + line);
    }
    std::string values;
    if (!std::getline(in, values)) throw std::runtime_error("truncated checkpoint at " + name);
    Mat m(rows, cols);
    std::istringstream vs(values);
    std::string token;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (!(vs >> token)) throw std::runtime_error("too few values for block " + name);
      const char* first = token.data();
      const char* last = first + token.size();
      bool negative = token[0] == '-';
      double x = 0.0;
      auto res = std::from_chars(first + (negative ? 1 : 0), last, x, std::chars_format::hex);
      if (res.ec != std::errc() || res.ptr != last) {
        throw std::runtime_error("bad value '" + token + "' in block " + name);
      }
      m.data()[i] = negative ? -x : x;
    }
    blocks[name] = std::move(m);
  }
  return blocks;
}

void load_params(ParamSet& params, const BlockMap& blocks, const std::string& prefix) {
  for (auto& b : params.blocks()) {
    auto it = blocks.find(prefix + b.name);
    if (it == blocks.end()) throw std::runtime_error("checkpoint lacks block " + prefix + b.name);
    if (it->second.rows() != b.value.rows() || it->second.cols() != b.value.cols()) {
      throw std::runtime_error("checkpoint block " + prefix + b.name + " has the wrong shape");
    }
    b.value = it->second;
  }
}

}  // namespace ia_arena::nn
