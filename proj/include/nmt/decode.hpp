#pragma once

#include <string>
#include <vector>

#include "nmt/model.hpp"

namespace nmt {

struct Hypothesis {
  std::vector<int> tokens;  // target ids, without <s>/</s>
  double logprob = 0.0;     // includes the </s> step when finished
  bool finished = false;    // emitted </s> (not cut off at max_len)
};

// Argmax decoding, ties to the lowest token id; stops at </s> or max_len.
std::vector<int> greedy_decode(const Model& model, const std::vector<std::string>& src,
                               int max_len = 50);

// Width-k beam search over total log-probability. Finished hypotheses move
// to a completed pool that competes separately; the search stops when the
// pool holds k hypotheses whose minimum is at least the best live score, or
// at max_len. Ties break to the shorter, then lexicographically smaller,
// token sequence. norm_exp > 0 ranks the returned pool by
// logprob / length^norm_exp instead of raw logprob.
std::vector<Hypothesis> beam_search(const Model& model, const std::vector<std::string>& src,
                                    int width, int max_len = 50, double norm_exp = 0.0);

// Log-probability of a forced target sequence (for cross-checks).
double score_sequence(const Model& model, const std::vector<std::string>& src,
                      const std::vector<int>& tokens, bool with_eos);

std::vector<std::string> ids_to_tokens(const Vocabulary& vocab, const std::vector<int>& ids);

}  // namespace nmt
