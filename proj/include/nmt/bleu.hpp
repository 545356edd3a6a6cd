#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "nmt/tensor.hpp"

namespace nmt {

using TokenLines = std::vector<std::vector<std::string>>;

struct BleuReport {
  double bleu = 0.0;  // 0..100
  std::array<double, 4> precisions{};  // p1..p4 (0 where no n-grams exist)
  std::array<long, 4> matches{};
  std::array<long, 4> totals{};
  double bp = 1.0;
  long cand_len = 0;
  long ref_len = 0;
  bool smoothed = false;
  bool zero_precision = false;

  std::string to_json() const;
  std::string human() const;
};

// Corpus-wide clipped n-gram matches and candidate n-gram totals.
std::pair<long, long> modified_precision(const TokenLines& candidates,
                                         const TokenLines& references, int n);

// Corpus-level single-reference BLEU, geometric mean of p1..p4 times the
// brevity penalty, on the 0-100 scale. Orders with no candidate n-grams at
// all drop out of the mean. Optional add-one smoothing for n >= 2.
BleuReport corpus_bleu(const TokenLines& candidates, const TokenLines& references,
                       bool smooth = false);

}  // namespace nmt
