#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nmt/layers.hpp"
#include "nmt/tensor.hpp"

namespace nmt {

// The six input-representation configurations.
enum class ReprMode {
  word,
  wordchar_bilstm,
  wordchar_cnn,
  combine_add,
  combine_avg,
  combine_mul,
};

const std::array<ReprMode, 6>& all_modes();
std::string mode_name(ReprMode m);  // "word", "wordchar_bilstm", ..., "wordchar_combine_mul"
std::string mode_display_name(ReprMode m);  // "word (baseline)" for the baseline
std::optional<ReprMode> mode_from_name(const std::string& name);
bool mode_uses_chars(ReprMode m);
bool mode_uses_char_lstm(ReprMode m);
bool mode_uses_char_cnn(ReprMode m);

struct CharVocab {
  static constexpr int kCpad = 0;
  static constexpr int kCunk = 1;

  std::vector<std::string> chars;  // id -> code point
  std::unordered_map<std::string, int> ids;

  int size() const { return static_cast<int>(chars.size()); }
  int id(const std::string& cp) const;
  bool empty_payload() const { return chars.size() <= 2; }

  // Character inventory of a tokenized corpus side, ids assigned in code
  // point order after the two reserved entries.
  static CharVocab build(const std::vector<std::vector<std::string>>& side);
  static CharVocab from_chars(std::vector<std::string> chars);
};

// Word -> character ids (<cunk> for unseen characters).
std::vector<int> map_chars(const CharVocab& cv, const std::string& word);

struct ReprConfig {
  ReprMode mode = ReprMode::word;
  int word_dim = 100;
  int char_dim = 100;
  int char_embed_dim = 30;
  int char_lstm_hidden = 50;

  int input_dim() const {
    return mode == ReprMode::word ? word_dim : word_dim + char_dim;
  }
  void validate() const;
};

// Character-path parameters for one model; only the encoders the mode
// needs are present. The embedding table is shared between the bi-LSTM
// and CNN paths in the combine modes.
struct CharParams {
  EmbeddingTable embed;
  std::optional<BiLSTMParams> lstm;
  std::optional<ConvFilterBank> cnn;

  static CharParams init(const ReprConfig& cfg, int char_vocab_size, Rng& rng);
  void collect(NamedParams& out);
};

// [h_fwd_last ; h_bwd_first] over the word's character embeddings.
Tensor char_repr_bilstm(Tape* tp, const std::string& word, const CharVocab& cv,
                        const EmbeddingTable& embed, const BiLSTMParams& p);

// Convolution with windows 2/3/4 and 1-max pooling; the word is padded
// with <cpad> to at least 4 characters.
Tensor char_repr_cnn(Tape* tp, const std::string& word, const CharVocab& cv,
                     const EmbeddingTable& embed, const ConvFilterBank& bank);

enum class CombineOp { add, avg, mul };

Tensor combine(const Tensor& v_lstm, const Tensor& v_cnn, CombineOp op);

// The per-word encoder input: the word embedding alone, or the word
// embedding concatenated with the mode's character vector.
Tensor word_input_vector(Tape* tp, const std::string& word, int word_id,
                         const ReprConfig& cfg, const EmbeddingTable& word_embed,
                         const CharVocab& cv, const CharParams& chars);

}  // namespace nmt
