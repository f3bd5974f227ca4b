#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mubench/corpus.hpp"
#include "mubench/sequence.hpp"

namespace testing_support {

/// Random presented sequence with values in [0, max_value].
inline mubench::PresentedSequence random_sequence(std::mt19937_64& rng, std::size_t max_prefix,
                                                  std::size_t max_tail, mubench::Nat max_value) {
  std::vector<mubench::Nat> prefix(rng() % (max_prefix + 1)), tail(1 + rng() % max_tail);
  for (auto& v : prefix) v = rng() % (max_value + 1);
  for (auto& v : tail) v = rng() % (max_value + 1);
  return {prefix, tail};
}

using mubench::extraction_corpus;
using mubench::flag_with_first_zero;

#ifdef MUBENCH_FIXTURE_DIR
/// Contents of a file under fixtures/.
inline std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(MUBENCH_FIXTURE_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}
#endif

}  // namespace testing_support
