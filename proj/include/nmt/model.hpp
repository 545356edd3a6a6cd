#pragma once

#include <string>
#include <vector>

#include "nmt/char_repr.hpp"
#include "nmt/data.hpp"
#include "nmt/layers.hpp"
#include "nmt/tensor.hpp"

namespace nmt {

struct ModelConfig {
  ReprConfig repr;
  int enc_hidden = 256;  // per direction
  int dec_hidden = 512;  // must equal 2 * enc_hidden (decoder starts from both directions)
  int att_dim = 256;
  bool freeze_embeddings = false;  // freezes the source word table

  int annotation_dim() const { return 2 * enc_hidden; }
  void validate() const;
};

struct EncoderOutput {
  std::vector<Tensor> annotations;  // one per source position, dim 2*enc_hidden
  Tensor final_forward;
  Tensor final_backward;
  std::vector<Tensor> att_proj;  // cached W_enc * annotation per position
};

struct DecoderState {
  Tensor h, c;
};

// The encoder-decoder translation model for one representation mode.
struct Model {
  ModelConfig cfg;
  Vocabulary src_vocab, tgt_vocab;
  CharVocab char_vocab;

  EmbeddingTable src_embed, tgt_embed;
  CharParams chars;
  BiLSTMParams encoder;
  LSTMParams decoder;
  AttentionParams attention;
  Tensor out_w, out_b;

  static Model init(const ModelConfig& cfg, Vocabulary src_vocab, Vocabulary tgt_vocab,
                    CharVocab char_vocab, std::uint64_t seed);

  // Every weight tensor in a stable order (checkpoint and gradient order).
  NamedParams parameters();
  // parameters() minus frozen embedding tables.
  NamedParams trainable_parameters();
  Model clone() const;

  Tensor input_vector(Tape* tp, const std::string& word) const;
  EncoderOutput encode(Tape* tp, const std::vector<std::string>& src_tokens) const;
  DecoderState decoder_init(const EncoderOutput& enc) const;
  // logits over the target vocabulary plus the advanced state.
  std::pair<Tensor, DecoderState> decode_step(Tape* tp, const DecoderState& state,
                                              int prev_token,
                                              const EncoderOutput& enc) const;
  // Teacher-forced mean cross-entropy over the target, which is wrapped
  // in <s> ... </s>.
  Tensor sentence_loss(Tape* tp, const std::vector<std::string>& src_tokens,
                       const std::vector<std::string>& tgt_tokens) const;
  Tensor sentence_loss_ids(Tape* tp, const std::vector<std::string>& src_tokens,
                           const std::vector<int>& tgt_ids) const;
};

}  // namespace nmt
