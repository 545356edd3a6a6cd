#include "nmt/layers.hpp"

namespace nmt {

static Tensor use(Tape* tp, const Tensor& param) {
  return tp ? tp->watch(param) : param;
}

EmbeddingTable EmbeddingTable::init(int vocab, int dim, Rng& rng, double lo, double hi) {
  EmbeddingTable t;
  t.table = Tensor::uniform({vocab, dim}, rng, lo, hi);
  return t;
}

Tensor embed_lookup(Tape* tp, const EmbeddingTable& table, int id) {
  if (id < 0 || id >= table.vocab_size()) fail("embed_lookup: id out of range");
  Tensor m = table.trainable ? use(tp, table.table) : table.table;
  return take_row(m, id);
}

LSTMParams LSTMParams::init(int input_dim, int hidden_dim, Rng& rng) {
  LSTMParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  auto w = [&] { return Tensor::uniform({hidden_dim, input_dim}, rng, -0.08, 0.08); };
  auto u = [&] { return Tensor::uniform({hidden_dim, hidden_dim}, rng, -0.08, 0.08); };
  auto b = [&] { return Tensor::uniform({hidden_dim}, rng, -0.08, 0.08); };
  p.Wi = w(); p.Ui = u(); p.bi = b();
  p.Wf = w(); p.Uf = u(); p.bf = b();
  p.Wo = w(); p.Uo = u(); p.bo = b();
  p.Wg = w(); p.Ug = u(); p.bg = b();
  p.bf.fill(1.0);  // forget gate bias starts open
  return p;
}

void LSTMParams::collect(const std::string& prefix, NamedParams& out) {
  out.emplace_back(prefix + ".Wi", &Wi);
  out.emplace_back(prefix + ".Ui", &Ui);
  out.emplace_back(prefix + ".bi", &bi);
  out.emplace_back(prefix + ".Wf", &Wf);
  out.emplace_back(prefix + ".Uf", &Uf);
  out.emplace_back(prefix + ".bf", &bf);
  out.emplace_back(prefix + ".Wo", &Wo);
  out.emplace_back(prefix + ".Uo", &Uo);
  out.emplace_back(prefix + ".bo", &bo);
  out.emplace_back(prefix + ".Wg", &Wg);
  out.emplace_back(prefix + ".Ug", &Ug);
  out.emplace_back(prefix + ".bg", &bg);
}

LSTMState lstm_step(Tape* tp, const LSTMParams& p, const Tensor& x,
                    const Tensor& h_prev, const Tensor& c_prev) {
  if (x.size() != p.input_dim) fail("lstm_step: input dimension mismatch");
  if (h_prev.size() != p.hidden_dim || c_prev.size() != p.hidden_dim)
    fail("lstm_step: state dimension mismatch");
  auto gate = [&](const Tensor& W, const Tensor& U, const Tensor& b) {
    return add(add(matmul(use(tp, W), x), matmul(use(tp, U), h_prev)), use(tp, b));
  };
  Tensor i = sigmoid(gate(p.Wi, p.Ui, p.bi));
  Tensor f = sigmoid(gate(p.Wf, p.Uf, p.bf));
  Tensor o = sigmoid(gate(p.Wo, p.Uo, p.bo));
  Tensor g = tanh(gate(p.Wg, p.Ug, p.bg));
  Tensor c = add(mul(f, c_prev), mul(i, g));
  Tensor h = mul(o, tanh(c));
  return {h, c};
}

BiLSTMParams BiLSTMParams::init(int input_dim, int hidden_dim, Rng& rng) {
  BiLSTMParams p;
  p.fwd = LSTMParams::init(input_dim, hidden_dim, rng);
  p.bwd = LSTMParams::init(input_dim, hidden_dim, rng);
  return p;
}

void BiLSTMParams::collect(const std::string& prefix, NamedParams& out) {
  fwd.collect(prefix + ".fwd", out);
  bwd.collect(prefix + ".bwd", out);
}

BiLSTMOut bilstm_run(Tape* tp, const BiLSTMParams& p, const std::vector<Tensor>& seq) {
  if (seq.empty()) fail("bilstm_run: empty sequence");
  if (p.fwd.input_dim != p.bwd.input_dim || p.fwd.hidden_dim != p.bwd.hidden_dim)
    fail("bilstm_run: direction dimensions disagree");
  const int n = static_cast<int>(seq.size());
  const int h = p.fwd.hidden_dim;

  std::vector<Tensor> fwd_h(n), bwd_h(n);
  LSTMState st{Tensor::zeros({h}), Tensor::zeros({h})};
  for (int t = 0; t < n; ++t) {
    st = lstm_step(tp, p.fwd, seq[t], st.h, st.c);
    fwd_h[t] = st.h;
  }
  st = {Tensor::zeros({h}), Tensor::zeros({h})};
  for (int t = n - 1; t >= 0; --t) {
    st = lstm_step(tp, p.bwd, seq[t], st.h, st.c);
    bwd_h[t] = st.h;
  }

  BiLSTMOut out;
  out.states.reserve(n);
  for (int t = 0; t < n; ++t) out.states.push_back(concat({fwd_h[t], bwd_h[t]}));
  out.final_forward = fwd_h[n - 1];
  out.final_backward = bwd_h[0];
  return out;
}

ConvFilterBank ConvFilterBank::init(int embed_dim, int out_dim, Rng& rng) {
  ConvFilterBank bank;
  bank.embed_dim = embed_dim;
  bank.out_dim = out_dim;
  const int widths[3] = {2, 3, 4};
  int base = out_dim / 3, rem = out_dim % 3;
  for (int k = 0; k < 3; ++k) {
    int count = base + (k < rem ? 1 : 0);
    Window w;
    w.width = widths[k];
    w.filters = Tensor::uniform({count, widths[k] * embed_dim}, rng, -0.08, 0.08);
    w.bias = Tensor::uniform({count}, rng, -0.08, 0.08);
    bank.windows.push_back(std::move(w));
  }
  return bank;
}

void ConvFilterBank::collect(const std::string& prefix, NamedParams& out) {
  for (auto& w : windows) {
    std::string tag = prefix + ".w" + std::to_string(w.width);
    out.emplace_back(tag + ".filters", &w.filters);
    out.emplace_back(tag + ".bias", &w.bias);
  }
}

std::vector<Tensor> char_conv(Tape* tp, const ConvFilterBank& bank,
                              const std::vector<Tensor>& char_embeds) {
  if (char_embeds.empty()) fail("char_conv: empty input");
  const int n = static_cast<int>(char_embeds.size());
  std::vector<Tensor> maps;
  maps.reserve(bank.windows.size());
  for (const auto& w : bank.windows) {
    if (n < w.width) fail("char_conv: input shorter than window");
    Tensor filters = use(tp, w.filters);
    Tensor bias = use(tp, w.bias);
    std::vector<Tensor> cols;
    cols.reserve(n - w.width + 1);
    for (int pos = 0; pos + w.width <= n; ++pos) {
      std::vector<Tensor> window(char_embeds.begin() + pos,
                                 char_embeds.begin() + pos + w.width);
      cols.push_back(add(matmul(filters, concat(window)), bias));
    }
    maps.push_back(concat_cols(cols));
  }
  return maps;
}

AttentionParams AttentionParams::init(int att_dim, int dec_hidden, int annotation_dim,
                                      Rng& rng) {
  AttentionParams p;
  p.W_dec = Tensor::uniform({att_dim, dec_hidden}, rng, -0.08, 0.08);
  p.W_enc = Tensor::uniform({att_dim, annotation_dim}, rng, -0.08, 0.08);
  p.v_att = Tensor::uniform({att_dim}, rng, -0.08, 0.08);
  return p;
}

void AttentionParams::collect(const std::string& prefix, NamedParams& out) {
  out.emplace_back(prefix + ".W_dec", &W_dec);
  out.emplace_back(prefix + ".W_enc", &W_enc);
  out.emplace_back(prefix + ".v_att", &v_att);
}

AttentionOut attention_context(Tape* tp, const AttentionParams& p,
                               const Tensor& dec_state,
                               const std::vector<Tensor>& annotations,
                               const std::vector<Tensor>* enc_proj) {
  if (annotations.empty()) fail("attention_context: no annotations");
  if (enc_proj && enc_proj->size() != annotations.size())
    fail("attention_context: projection cache size mismatch");
  Tensor v = use(tp, p.v_att);
  Tensor q = matmul(use(tp, p.W_dec), dec_state);
  std::vector<Tensor> scores;
  scores.reserve(annotations.size());
  for (std::size_t t = 0; t < annotations.size(); ++t) {
    Tensor proj = enc_proj ? (*enc_proj)[t] : matmul(use(tp, p.W_enc), annotations[t]);
    scores.push_back(dot(v, tanh(add(q, proj))));
  }
  AttentionOut out;
  out.weights = softmax(concat(scores));
  out.context = weighted_sum(out.weights, annotations);
  return out;
}

}  // namespace nmt
