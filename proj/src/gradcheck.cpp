#include "nmt/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace nmt {

ModelConfig tiny_model_config(ReprMode mode) {
  ModelConfig cfg;
  cfg.repr.mode = mode;
  cfg.repr.word_dim = 6;
  cfg.repr.char_dim = 6;
  cfg.repr.char_embed_dim = 4;
  cfg.repr.char_lstm_hidden = 3;
  cfg.enc_hidden = 4;
  cfg.dec_hidden = 8;
  cfg.att_dim = 5;
  return cfg;
}

static const std::vector<std::vector<std::string>>& tiny_sentences() {
  static const std::vector<std::vector<std::string>> sents = {
      {"aba", "cod", "li"},
      {"cod", "na", "um", "li"},
      {"gre", "aba"},
      {"um", "na"},
  };
  return sents;
}

Model tiny_model(ReprMode mode, std::uint64_t seed) {
  const auto& sents = tiny_sentences();
  Vocabulary src_vocab = Vocabulary::build(sents);
  Vocabulary tgt_vocab = Vocabulary::build(sents);
  CharVocab char_vocab = mode_uses_chars(mode) ? CharVocab::build(sents) : CharVocab{};
  return Model::init(tiny_model_config(mode), std::move(src_vocab), std::move(tgt_vocab),
                     std::move(char_vocab), seed);
}

GradCheckResult run_model_gradcheck(ReprMode mode, std::uint64_t seed, double eps,
                                    double tol) {
  Model model = tiny_model(mode, seed);
  const std::vector<std::string> src = {"aba", "cod", "li"};
  const std::vector<std::string> tgt = {"um", "na"};

  Tape tape;
  Tensor loss = model.sentence_loss(&tape, src, tgt);
  tape.backward(loss);

  GradCheckResult result;
  result.tolerance = tol;
  NamedParams params = model.parameters();
  for (auto& [name, t] : params) {
    const std::vector<double>* g = tape.grad_of(*t);
    GradCheckEntry entry{name, 0.0};
    for (int i = 0; i < t->size(); ++i) {
      double orig = t->at(i);
      t->at(i) = orig + eps;
      double lp = model.sentence_loss(nullptr, src, tgt).value();
      t->at(i) = orig - eps;
      double lm = model.sentence_loss(nullptr, src, tgt).value();
      t->at(i) = orig;
      double fd = (lp - lm) / (2.0 * eps);
      double an = g ? (*g)[i] : 0.0;
      double rel = std::abs(an - fd) / std::max(1.0, std::abs(an));
      entry.max_rel_err = std::max(entry.max_rel_err, rel);
    }
    if (entry.max_rel_err > result.worst) {
      result.worst = entry.max_rel_err;
      result.worst_name = name;
    }
    result.groups.push_back(std::move(entry));
  }
  result.pass = result.worst < tol;
  return result;
}

}  // namespace nmt
