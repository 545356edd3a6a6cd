#include "nmt/char_repr.hpp"

#include <algorithm>
#include <set>

#include "nmt/utf8.hpp"

namespace nmt {

const std::array<ReprMode, 6>& all_modes() {
  static const std::array<ReprMode, 6> modes = {
      ReprMode::word,        ReprMode::wordchar_bilstm, ReprMode::wordchar_cnn,
      ReprMode::combine_add, ReprMode::combine_avg,     ReprMode::combine_mul,
  };
  return modes;
}

std::string mode_name(ReprMode m) {
  switch (m) {
    case ReprMode::word: return "word";
    case ReprMode::wordchar_bilstm: return "wordchar_bilstm";
    case ReprMode::wordchar_cnn: return "wordchar_cnn";
    case ReprMode::combine_add: return "wordchar_combine_add";
    case ReprMode::combine_avg: return "wordchar_combine_avg";
    case ReprMode::combine_mul: return "wordchar_combine_mul";
  }
  fail("mode_name: unknown mode");
}

std::string mode_display_name(ReprMode m) {
  return m == ReprMode::word ? "word (baseline)" : mode_name(m);
}

std::optional<ReprMode> mode_from_name(const std::string& name) {
  for (ReprMode m : all_modes())
    if (mode_name(m) == name) return m;
  return std::nullopt;
}

bool mode_uses_chars(ReprMode m) { return m != ReprMode::word; }

bool mode_uses_char_lstm(ReprMode m) {
  return m == ReprMode::wordchar_bilstm || m == ReprMode::combine_add ||
         m == ReprMode::combine_avg || m == ReprMode::combine_mul;
}

bool mode_uses_char_cnn(ReprMode m) {
  return m == ReprMode::wordchar_cnn || m == ReprMode::combine_add ||
         m == ReprMode::combine_avg || m == ReprMode::combine_mul;
}

int CharVocab::id(const std::string& cp) const {
  auto it = ids.find(cp);
  return it == ids.end() ? kCunk : it->second;
}

CharVocab CharVocab::from_chars(std::vector<std::string> chars) {
  CharVocab cv;
  cv.chars = std::move(chars);
  for (int i = 0; i < static_cast<int>(cv.chars.size()); ++i) cv.ids[cv.chars[i]] = i;
  if (cv.size() < 2 || cv.chars[0] != "<cpad>" || cv.chars[1] != "<cunk>")
    fail("char vocab: reserved entries missing");
  return cv;
}

CharVocab CharVocab::build(const std::vector<std::vector<std::string>>& side) {
  std::set<std::string> inventory;
  for (const auto& sent : side)
    for (const auto& tok : sent)
      for (const auto& cp : utf8::codepoints(tok)) inventory.insert(cp);
  std::vector<std::string> chars = {"<cpad>", "<cunk>"};
  chars.insert(chars.end(), inventory.begin(), inventory.end());
  return from_chars(std::move(chars));
}

std::vector<int> map_chars(const CharVocab& cv, const std::string& word) {
  std::vector<int> out;
  for (const auto& cp : utf8::codepoints(word)) out.push_back(cv.id(cp));
  return out;
}

void ReprConfig::validate() const {
  if (word_dim < 1) fail("repr config: word_dim must be positive");
  if (mode == ReprMode::word) return;
  if (char_dim < 1 || char_embed_dim < 1) fail("repr config: char dims must be positive");
  if (2 * char_lstm_hidden != char_dim)
    fail("repr config: char bi-LSTM output 2*char_lstm_hidden must equal char_dim");
}

CharParams CharParams::init(const ReprConfig& cfg, int char_vocab_size, Rng& rng) {
  cfg.validate();
  CharParams cp;
  if (!mode_uses_chars(cfg.mode)) return cp;
  cp.embed = EmbeddingTable::init(char_vocab_size, cfg.char_embed_dim, rng);
  if (mode_uses_char_lstm(cfg.mode))
    cp.lstm = BiLSTMParams::init(cfg.char_embed_dim, cfg.char_lstm_hidden, rng);
  if (mode_uses_char_cnn(cfg.mode))
    cp.cnn = ConvFilterBank::init(cfg.char_embed_dim, cfg.char_dim, rng);
  return cp;
}

void CharParams::collect(NamedParams& out) {
  if (embed.table.empty()) return;
  out.emplace_back("char_embed", &embed.table);
  if (lstm) lstm->collect("char_lstm", out);
  if (cnn) cnn->collect("char_cnn", out);
}

static std::vector<Tensor> embed_ids(Tape* tp, const EmbeddingTable& embed,
                                     const std::vector<int>& ids) {
  std::vector<Tensor> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(embed_lookup(tp, embed, id));
  return out;
}

Tensor char_repr_bilstm(Tape* tp, const std::string& word, const CharVocab& cv,
                        const EmbeddingTable& embed, const BiLSTMParams& p) {
  std::vector<int> ids = map_chars(cv, word);
  if (ids.empty()) fail("char_repr_bilstm: empty word");
  BiLSTMOut run = bilstm_run(tp, p, embed_ids(tp, embed, ids));
  return concat({run.final_forward, run.final_backward});
}

Tensor char_repr_cnn(Tape* tp, const std::string& word, const CharVocab& cv,
                     const EmbeddingTable& embed, const ConvFilterBank& bank) {
  std::vector<int> ids = map_chars(cv, word);
  if (ids.empty()) fail("char_repr_cnn: empty word");
  while (ids.size() < 4) ids.push_back(CharVocab::kCpad);
  std::vector<Tensor> maps = char_conv(tp, bank, embed_ids(tp, embed, ids));
  std::vector<Tensor> pooled;
  pooled.reserve(maps.size());
  for (const Tensor& m : maps) pooled.push_back(rowmax(m));
  return concat(pooled);
}

Tensor combine(const Tensor& v_lstm, const Tensor& v_cnn, CombineOp op) {
  if (v_lstm.shape() != v_cnn.shape()) fail("combine: length mismatch");
  switch (op) {
    case CombineOp::add: return add(v_lstm, v_cnn);
    case CombineOp::avg: return scale(add(v_lstm, v_cnn), 0.5);
    case CombineOp::mul: return mul(v_lstm, v_cnn);
  }
  fail("combine: unknown operation");
}

Tensor word_input_vector(Tape* tp, const std::string& word, int word_id,
                         const ReprConfig& cfg, const EmbeddingTable& word_embed,
                         const CharVocab& cv, const CharParams& chars) {
  Tensor wv = embed_lookup(tp, word_embed, word_id);
  if (cfg.mode == ReprMode::word) return wv;

  Tensor cvec;
  switch (cfg.mode) {
    case ReprMode::wordchar_bilstm:
      cvec = char_repr_bilstm(tp, word, cv, chars.embed, *chars.lstm);
      break;
    case ReprMode::wordchar_cnn:
      cvec = char_repr_cnn(tp, word, cv, chars.embed, *chars.cnn);
      break;
    case ReprMode::combine_add:
    case ReprMode::combine_avg:
    case ReprMode::combine_mul: {
      Tensor vl = char_repr_bilstm(tp, word, cv, chars.embed, *chars.lstm);
      Tensor vc = char_repr_cnn(tp, word, cv, chars.embed, *chars.cnn);
      CombineOp op = cfg.mode == ReprMode::combine_add   ? CombineOp::add
                     : cfg.mode == ReprMode::combine_avg ? CombineOp::avg
                                                         : CombineOp::mul;
      cvec = combine(vl, vc, op);
      break;
    }
    default:
      fail("word_input_vector: unreachable");
  }
  return concat({wv, cvec});
}

}  // namespace nmt
