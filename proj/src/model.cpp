#include "nmt/model.hpp"

namespace nmt {

void ModelConfig::validate() const {
  repr.validate();
  if (enc_hidden < 1 || dec_hidden < 1 || att_dim < 1)
    fail("model config: hidden dims must be positive");
  if (dec_hidden != 2 * enc_hidden)
    fail("model config: dec_hidden must equal 2*enc_hidden");
}

Model Model::init(const ModelConfig& cfg, Vocabulary src_vocab, Vocabulary tgt_vocab,
                  CharVocab char_vocab, std::uint64_t seed) {
  cfg.validate();
  if (mode_uses_chars(cfg.repr.mode) && char_vocab.size() < 2)
    fail("model: character vocabulary required for mode " + mode_name(cfg.repr.mode));
  Model m;
  m.cfg = cfg;
  m.src_vocab = std::move(src_vocab);
  m.tgt_vocab = std::move(tgt_vocab);
  m.char_vocab = std::move(char_vocab);

  Rng rng(seed);
  m.src_embed = EmbeddingTable::init(m.src_vocab.size(), cfg.repr.word_dim, rng);
  m.tgt_embed = EmbeddingTable::init(m.tgt_vocab.size(), cfg.repr.word_dim, rng);
  m.chars = CharParams::init(cfg.repr, std::max(m.char_vocab.size(), 2), rng);
  m.encoder = BiLSTMParams::init(cfg.repr.input_dim(), cfg.enc_hidden, rng);
  m.decoder = LSTMParams::init(cfg.repr.word_dim + cfg.annotation_dim(), cfg.dec_hidden, rng);
  m.attention = AttentionParams::init(cfg.att_dim, cfg.dec_hidden, cfg.annotation_dim(), rng);
  m.out_w = Tensor::uniform({m.tgt_vocab.size(), cfg.dec_hidden}, rng, -0.08, 0.08);
  m.out_b = Tensor::uniform({m.tgt_vocab.size()}, rng, -0.08, 0.08);
  m.src_embed.trainable = !cfg.freeze_embeddings;
  return m;
}

NamedParams Model::parameters() {
  NamedParams out;
  out.emplace_back("src_embed", &src_embed.table);
  out.emplace_back("tgt_embed", &tgt_embed.table);
  chars.collect(out);
  encoder.collect("encoder", out);
  decoder.collect("decoder", out);
  attention.collect("attention", out);
  out.emplace_back("out_w", &out_w);
  out.emplace_back("out_b", &out_b);
  return out;
}

NamedParams Model::trainable_parameters() {
  NamedParams out = parameters();
  std::erase_if(out, [&](const auto& p) {
    return (p.second == &src_embed.table && !src_embed.trainable) ||
           (p.second == &tgt_embed.table && !tgt_embed.trainable);
  });
  return out;
}

Model Model::clone() const {
  Model m = *this;
  NamedParams mine = m.parameters();
  for (auto& [name, t] : mine) *t = t->clone();
  return m;
}

Tensor Model::input_vector(Tape* tp, const std::string& word) const {
  return word_input_vector(tp, word, src_vocab.id(word), cfg.repr, src_embed,
                           char_vocab, chars);
}

EncoderOutput Model::encode(Tape* tp, const std::vector<std::string>& src_tokens) const {
  if (src_tokens.empty()) fail("encode: empty source");
  std::vector<Tensor> inputs;
  inputs.reserve(src_tokens.size());
  for (const auto& w : src_tokens) inputs.push_back(input_vector(tp, w));
  BiLSTMOut run = bilstm_run(tp, encoder, inputs);

  EncoderOutput out;
  out.annotations = std::move(run.states);
  out.final_forward = run.final_forward;
  out.final_backward = run.final_backward;
  Tensor enc_w = tp ? tp->watch(attention.W_enc) : attention.W_enc;
  out.att_proj.reserve(out.annotations.size());
  for (const Tensor& a : out.annotations) out.att_proj.push_back(matmul(enc_w, a));
  return out;
}

DecoderState Model::decoder_init(const EncoderOutput& enc) const {
  DecoderState st;
  st.h = concat({enc.final_forward, enc.final_backward});
  st.c = Tensor::zeros({cfg.dec_hidden});
  return st;
}

std::pair<Tensor, DecoderState> Model::decode_step(Tape* tp, const DecoderState& state,
                                                   int prev_token,
                                                   const EncoderOutput& enc) const {
  if (prev_token < 0 || prev_token >= tgt_vocab.size())
    fail("decode_step: invalid token id");
  AttentionOut att = attention_context(tp, attention, state.h, enc.annotations,
                                       &enc.att_proj);
  Tensor x = concat({embed_lookup(tp, tgt_embed, prev_token), att.context});
  LSTMState next = lstm_step(tp, decoder, x, state.h, state.c);
  Tensor w = tp ? tp->watch(out_w) : out_w;
  Tensor b = tp ? tp->watch(out_b) : out_b;
  Tensor logits = add(matmul(w, next.h), b);
  return {logits, DecoderState{next.h, next.c}};
}

Tensor Model::sentence_loss_ids(Tape* tp, const std::vector<std::string>& src_tokens,
                                const std::vector<int>& tgt_ids) const {
  if (src_tokens.empty() || tgt_ids.empty()) fail("sentence_loss: empty sentence");
  EncoderOutput enc = encode(tp, src_tokens);
  DecoderState st = decoder_init(enc);

  std::vector<int> inputs, golds;
  inputs.push_back(Vocabulary::kBos);
  for (int id : tgt_ids) {
    inputs.push_back(id);
    golds.push_back(id);
  }
  golds.push_back(Vocabulary::kEos);

  Tensor total;
  for (std::size_t j = 0; j < golds.size(); ++j) {
    auto [logits, next] = decode_step(tp, st, inputs[j], enc);
    Tensor ce = cross_entropy(logits, golds[j]);
    total = j == 0 ? ce : add(total, ce);
    st = next;
  }
  return scale(total, 1.0 / static_cast<double>(golds.size()));
}

Tensor Model::sentence_loss(Tape* tp, const std::vector<std::string>& src_tokens,
                            const std::vector<std::string>& tgt_tokens) const {
  std::vector<int> ids;
  ids.reserve(tgt_tokens.size());
  for (const auto& w : tgt_tokens) ids.push_back(tgt_vocab.id(w));
  return sentence_loss_ids(tp, src_tokens, ids);
}

}  // namespace nmt
