#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nmt/tensor.hpp"

namespace nmt {

using NamedParams = std::vector<std::pair<std::string, Tensor*>>;

struct EmbeddingTable {
  Tensor table;  // vocab x dim
  bool trainable = true;

  int vocab_size() const { return table.rows(); }
  int dim() const { return table.cols(); }
  static EmbeddingTable init(int vocab, int dim, Rng& rng,
                             double lo = -0.08, double hi = 0.08);
};

// Row lookup; the table participates in the gradient only when trainable.
Tensor embed_lookup(Tape* tp, const EmbeddingTable& table, int id);

struct LSTMParams {
  int input_dim = 0;
  int hidden_dim = 0;
  // gates: i(nput), f(orget), o(utput), g = candidate
  Tensor Wi, Ui, bi, Wf, Uf, bf, Wo, Uo, bo, Wg, Ug, bg;

  static LSTMParams init(int input_dim, int hidden_dim, Rng& rng);
  void collect(const std::string& prefix, NamedParams& out);
};

struct LSTMState {
  Tensor h, c;
};

// One step of the standard LSTM cell:
//   i,f,o = sigmoid(W x + U h + b), g = tanh(...),
//   c' = f*c + i*g, h' = o*tanh(c')
LSTMState lstm_step(Tape* tp, const LSTMParams& p, const Tensor& x,
                    const Tensor& h_prev, const Tensor& c_prev);

struct BiLSTMParams {
  LSTMParams fwd, bwd;

  static BiLSTMParams init(int input_dim, int hidden_dim, Rng& rng);
  void collect(const std::string& prefix, NamedParams& out);
};

struct BiLSTMOut {
  std::vector<Tensor> states;  // per position, [h_fwd_t ; h_bwd_t]
  Tensor final_forward;        // h_fwd at the last position
  Tensor final_backward;       // h_bwd at the first position
};

BiLSTMOut bilstm_run(Tape* tp, const BiLSTMParams& p, const std::vector<Tensor>& seq);

// Character convolution bank with window sizes 2, 3, 4. out_dim is split
// across the windows (remainder to the smaller windows), e.g. 100 -> 34/33/33.
struct ConvFilterBank {
  struct Window {
    int width;
    Tensor filters;  // count x (width * embed_dim)
    Tensor bias;     // count
  };
  std::vector<Window> windows;
  int embed_dim = 0;
  int out_dim = 0;

  static ConvFilterBank init(int embed_dim, int out_dim, Rng& rng);
  void collect(const std::string& prefix, NamedParams& out);
};

// Valid convolution over the character embedding sequence; one feature map
// per window, shaped (filter count) x (positions).
std::vector<Tensor> char_conv(Tape* tp, const ConvFilterBank& bank,
                              const std::vector<Tensor>& char_embeds);

struct AttentionParams {
  Tensor W_dec;  // att_dim x decoder_hidden
  Tensor W_enc;  // att_dim x annotation_dim
  Tensor v_att;  // att_dim

  static AttentionParams init(int att_dim, int dec_hidden, int annotation_dim, Rng& rng);
  void collect(const std::string& prefix, NamedParams& out);
};

struct AttentionOut {
  Tensor context;
  Tensor weights;
};

// Additive scoring e_t = v' tanh(W_dec s + W_enc a_t), softmax over e,
// context = sum of weighted annotations. enc_proj, when given, holds the
// precomputed W_enc a_t vectors.
AttentionOut attention_context(Tape* tp, const AttentionParams& p,
                               const Tensor& dec_state,
                               const std::vector<Tensor>& annotations,
                               const std::vector<Tensor>* enc_proj = nullptr);

}  // namespace nmt
