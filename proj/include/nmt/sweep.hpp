#pragma once

#include <string>
#include <vector>

#include "nmt/data.hpp"
#include "nmt/train.hpp"

namespace nmt {

struct SweepEntry {
  std::string model_name;
  double best_bleu = 0.0;
  int best_width = 0;
  int epoch = 0;  // the checkpoint's selected epoch
  std::vector<std::pair<int, double>> bleu_by_width;
};

struct SweepConfig {
  std::vector<int> widths;  // default 1..10
  int max_len = 50;
  bool smooth = false;

  SweepConfig() {
    for (int w = 1; w <= 10; ++w) widths.push_back(w);
  }
};

// Decodes the test set with each beam width and scores BLEU; best width
// wins, ties keep the smaller width.
SweepEntry sweep_checkpoint(const Checkpoint& ckpt, const ParallelCorpus& test,
                            const SweepConfig& cfg);

// Aligned table shaped like: model | best BLEU | epoch | beam search (width=k)
std::string format_sweep_table(const std::vector<SweepEntry>& entries);

}  // namespace nmt
