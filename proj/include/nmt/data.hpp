#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "nmt/layers.hpp"
#include "nmt/rng.hpp"

namespace nmt {

// Lowercases (simple case folding) and splits: whitespace-delimited, the
// punctuation characters . , ! ? ; : " ( ) [ ] become single tokens, and
// the clitic "n't" is split off ("wasn't" -> "was", "n't"). Digits stay
// whole. Throws on invalid UTF-8.
std::vector<std::string> tokenize(const std::string& line);

struct Vocabulary {
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  std::vector<std::string> tokens;  // id -> token, reserved first
  std::unordered_map<std::string, int> ids;
  std::vector<long> freqs;  // aligned with tokens; 0 for reserved entries

  int size() const { return static_cast<int>(tokens.size()); }
  int id(const std::string& tok) const;
  const std::string& token(int id) const;

  // Ids after the reserved four go to tokens with frequency >= min_freq,
  // most frequent first, ties in lexicographic order.
  static Vocabulary build(const std::vector<std::vector<std::string>>& side,
                          int min_freq = 1);
  static Vocabulary from_tokens(std::vector<std::string> tokens, std::vector<long> freqs);
};

struct SentencePair {
  std::vector<std::string> src, tgt;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  long dropped = 0;  // pairs removed by the empty/too-long filter

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }

  static ParallelCorpus load(const std::string& src_path, const std::string& tgt_path,
                             int max_len = 50);
  static ParallelCorpus load_tsv(const std::string& path, int max_len = 50);
  static ParallelCorpus from_lines(const std::vector<std::string>& src_lines,
                                   const std::vector<std::string>& tgt_lines,
                                   int max_len = 50);
  std::vector<std::vector<std::string>> source_side() const;
  std::vector<std::vector<std::string>> target_side() const;
};

struct SideStats {
  long unique = 0;
  int min_len = 0;
  int max_len = 0;
  double mean_len = 0.0;  // rounded to 2 decimals
};

struct CorpusStats {
  SideStats source, target;
  long pairs = 0;
};

CorpusStats corpus_stats(const ParallelCorpus& corpus);
std::string format_stats_table(const CorpusStats& s);
std::string stats_json(const CorpusStats& s);

// Text embedding file: one line per token, "token v1 ... v<dim>". Vocabulary
// tokens found in the file get those vectors; everything else is filled
// uniformly from [-0.1, 0.1]. Any malformed line aborts the whole load.
EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab,
                               int dim, Rng& rng);

std::vector<std::string> read_lines(const std::string& path);

}  // namespace nmt
