#include "nmt/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "nmt/bleu.hpp"
#include "nmt/decode.hpp"

namespace nmt {

SweepEntry sweep_checkpoint(const Checkpoint& ckpt, const ParallelCorpus& test,
                            const SweepConfig& cfg) {
  if (cfg.widths.empty()) fail("sweep: no beam widths given");
  const Model& model = ckpt.model;
  SweepEntry entry;
  entry.model_name = mode_display_name(model.cfg.repr.mode);
  entry.epoch = ckpt.epoch;

  TokenLines refs;
  refs.reserve(test.size());
  for (const auto& p : test.pairs) refs.push_back(p.tgt);

  for (int w : cfg.widths) {
    TokenLines cands;
    cands.reserve(test.size());
    for (const auto& p : test.pairs) {
      std::vector<Hypothesis> hyps = beam_search(model, p.src, w, cfg.max_len);
      cands.push_back(hyps.empty() ? std::vector<std::string>{}
                                   : ids_to_tokens(model.tgt_vocab, hyps[0].tokens));
    }
    double bleu = corpus_bleu(cands, refs, cfg.smooth).bleu;
    entry.bleu_by_width.emplace_back(w, bleu);
    if (entry.best_width == 0 || bleu > entry.best_bleu) {
      entry.best_bleu = bleu;
      entry.best_width = w;
    }
  }
  return entry;
}

std::string format_sweep_table(const std::vector<SweepEntry>& entries) {
  std::size_t name_w = std::string("Model").size();
  for (const auto& e : entries) name_w = std::max(name_w, e.model_name.size());

  std::ostringstream os;
  auto pad = [&](const std::string& s, std::size_t w) {
    os << s;
    for (std::size_t i = s.size(); i < w; ++i) os << ' ';
  };
  pad("Model", name_w);
  os << " | Best BLEU | Epoch | Decoding\n";
  for (const auto& e : entries) {
    char bleu[32], rest[64];
    std::snprintf(bleu, sizeof bleu, "%9.2f", e.best_bleu);
    std::snprintf(rest, sizeof rest, "%5d | beam search (width=%d)", e.epoch, e.best_width);
    pad(e.model_name, name_w);
    os << " | " << bleu << " | " << rest << "\n";
  }
  return os.str();
}

}  // namespace nmt
