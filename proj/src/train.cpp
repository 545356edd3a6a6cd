#include "nmt/train.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "nmt/bleu.hpp"
#include "nmt/decode.hpp"

namespace nmt {

using json = nlohmann::ordered_json;

GradBuffers zero_grads(const NamedParams& params) {
  GradBuffers g;
  g.reserve(params.size());
  for (const auto& [name, t] : params) g.emplace_back(t->size(), 0.0);
  return g;
}

void accumulate_grads(const Tape& tape, const NamedParams& params, GradBuffers& acc) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::vector<double>* g = tape.grad_of(*params[i].second);
    if (!g) continue;
    for (std::size_t k = 0; k < g->size(); ++k) acc[i][k] += (*g)[k];
  }
}

void scale_grads(GradBuffers& grads, double c) {
  for (auto& g : grads)
    for (double& v : g) v *= c;
}

double global_grad_norm(const GradBuffers& grads) {
  double sq = 0.0;
  for (const auto& g : grads)
    for (double v : g) sq += v * v;
  return std::sqrt(sq);
}

void clip_grads(GradBuffers& grads, double max_norm) {
  double norm = global_grad_norm(grads);
  if (norm > max_norm && norm > 0.0) scale_grads(grads, max_norm / norm);
}

Adam::Adam(NamedParams params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_ = zero_grads(params_);
  v_ = zero_grads(params_);
}

void Adam::step(GradBuffers& grads) {
  if (grads.size() != params_.size()) fail("adam: gradient list size mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    for (double g : grads[i])
      if (!std::isfinite(g))
        fail("adam: non-finite gradient for " + params_[i].first);
  }
  ++t_;
  double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = *params_[i].second;
    std::vector<double>& m = m_[i];
    std::vector<double>& v = v_[i];
    const std::vector<double>& g = grads[i];
    for (int k = 0; k < p.size(); ++k) {
      m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g[k];
      v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g[k] * g[k];
      double mhat = m[k] / bc1;
      double vhat = v[k] / bc2;
      p.at(k) -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
  for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
}

std::string epoch_record_json(const EpochRecord& r) {
  json j;
  j["epoch"] = r.epoch;
  j["loss"] = r.loss;
  if (r.dev_bleu) j["dev_bleu"] = *r.dev_bleu;
  j["seconds"] = r.seconds;
  return j.dump();
}

static double dev_bleu_greedy(const Model& model, const ParallelCorpus& dev,
                              const TrainConfig& cfg) {
  TokenLines cands, refs;
  cands.reserve(dev.size());
  refs.reserve(dev.size());
  for (const auto& pair : dev.pairs) {
    std::vector<int> ids = greedy_decode(model, pair.src, cfg.dev_max_len);
    cands.push_back(ids_to_tokens(model.tgt_vocab, ids));
    refs.push_back(pair.tgt);
  }
  return corpus_bleu(cands, refs, cfg.smooth_dev_bleu).bleu;
}

std::pair<Checkpoint, TrainReport> train(const Model& start, const ParallelCorpus& corpus,
                                         const ParallelCorpus& dev, const TrainConfig& cfg) {
  if (corpus.empty()) fail("train: empty corpus");
  if (cfg.batch_size < 1) fail("train: batch size must be >= 1");

  Model model = start.clone();
  NamedParams params = model.trainable_parameters();
  Adam adam(params, cfg.adam);
  GradBuffers grads = zero_grads(params);

  TrainReport report;
  Checkpoint best{model.clone(), 0, std::nullopt};
  std::optional<double> best_bleu;

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    Rng shuffle_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t done = 0;
    while (done < order.size()) {
      std::size_t batch = std::min<std::size_t>(cfg.batch_size, order.size() - done);
      for (std::size_t b = 0; b < batch; ++b) {
        const SentencePair& pair = corpus.pairs[order[done + b]];
        Tape tape;
        Tensor loss = model.sentence_loss(&tape, pair.src, pair.tgt);
        tape.backward(loss);
        accumulate_grads(tape, params, grads);
        loss_sum += loss.value();
      }
      if (batch > 1) scale_grads(grads, 1.0 / static_cast<double>(batch));
      clip_grads(grads, cfg.clip_norm);
      adam.step(grads);
      done += batch;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / static_cast<double>(corpus.size());
    if (!dev.empty() && cfg.eval_every > 0 && epoch % cfg.eval_every == 0) {
      double bleu = dev_bleu_greedy(model, dev, cfg);
      rec.dev_bleu = bleu;
      if (!best_bleu || bleu > *best_bleu) {
        best_bleu = bleu;
        best = Checkpoint{model.clone(), epoch, bleu};
      }
    }
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cfg.log) (*cfg.log) << epoch_record_json(rec) << "\n" << std::flush;
    report.epochs.push_back(rec);
  }

  if (!best_bleu) best = Checkpoint{model.clone(), cfg.max_epochs, std::nullopt};
  report.best_epoch = best.epoch;
  report.best_dev_bleu = best_bleu;
  return {std::move(best), std::move(report)};
}

// --- checkpoint io ---

static constexpr char kMagic[8] = {'N', 'M', 'T', 'C', 'K', 'P', 'T', '1'};

static void put_u64_le(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 8);
}

static std::uint64_t get_u64_le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

static void put_f64_le(std::ostream& os, double d) {
  put_u64_le(os, std::bit_cast<std::uint64_t>(d));
}

static double get_f64_le(std::istream& is) {
  return std::bit_cast<double>(get_u64_le(is));
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  Model& model = const_cast<Model&>(ckpt.model);
  NamedParams params = model.parameters();

  json header;
  header["format"] = "nmt-checkpoint";
  header["version"] = 1;
  header["mode"] = mode_name(model.cfg.repr.mode);
  header["config"] = {{"word_dim", model.cfg.repr.word_dim},
                      {"char_dim", model.cfg.repr.char_dim},
                      {"char_embed_dim", model.cfg.repr.char_embed_dim},
                      {"char_lstm_hidden", model.cfg.repr.char_lstm_hidden},
                      {"enc_hidden", model.cfg.enc_hidden},
                      {"dec_hidden", model.cfg.dec_hidden},
                      {"att_dim", model.cfg.att_dim},
                      {"freeze_embeddings", model.cfg.freeze_embeddings}};
  header["epoch"] = ckpt.epoch;
  if (ckpt.dev_bleu)
    header["dev_bleu"] = *ckpt.dev_bleu;
  else
    header["dev_bleu"] = nullptr;
  header["src_vocab"] = {{"tokens", model.src_vocab.tokens}, {"freqs", model.src_vocab.freqs}};
  header["tgt_vocab"] = {{"tokens", model.tgt_vocab.tokens}, {"freqs", model.tgt_vocab.freqs}};
  header["char_vocab"] = model.char_vocab.chars;
  json tensors = json::array();
  for (const auto& [name, t] : params)
    tensors.push_back({{"name", name}, {"shape", t->shape()}});
  header["tensors"] = tensors;

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail("checkpoint: cannot write " + path);
  std::string head = header.dump();
  os.write(kMagic, 8);
  put_u64_le(os, head.size());
  os.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& [name, t] : params)
    for (int i = 0; i < t->size(); ++i) put_f64_le(os, t->at(i));
  if (!os) fail("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("checkpoint: cannot open " + path);

  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) fail("checkpoint: bad magic");
  std::uint64_t head_len = get_u64_le(is);
  if (!is) fail("checkpoint: truncated header length");
  std::string head(head_len, '\0');
  is.read(head.data(), static_cast<std::streamsize>(head_len));
  if (!is) fail("checkpoint: truncated header");

  json header;
  try {
    header = json::parse(head);
  } catch (const std::exception& e) {
    fail(std::string("checkpoint: invalid header JSON: ") + e.what());
  }

  auto need = [&](const char* key) -> const json& {
    if (!header.contains(key)) fail(std::string("checkpoint: header missing '") + key + "'");
    return header[key];
  };
  if (need("format") != "nmt-checkpoint") fail("checkpoint: unknown format");
  if (need("version") != 1) fail("checkpoint: unsupported version");

  auto mode = mode_from_name(need("mode").get<std::string>());
  if (!mode) fail("checkpoint: unknown mode '" + need("mode").get<std::string>() + "'");

  const json& jc = need("config");
  ModelConfig cfg;
  cfg.repr.mode = *mode;
  try {
    cfg.repr.word_dim = jc.at("word_dim").get<int>();
    cfg.repr.char_dim = jc.at("char_dim").get<int>();
    cfg.repr.char_embed_dim = jc.at("char_embed_dim").get<int>();
    cfg.repr.char_lstm_hidden = jc.at("char_lstm_hidden").get<int>();
    cfg.enc_hidden = jc.at("enc_hidden").get<int>();
    cfg.dec_hidden = jc.at("dec_hidden").get<int>();
    cfg.att_dim = jc.at("att_dim").get<int>();
    cfg.freeze_embeddings = jc.at("freeze_embeddings").get<bool>();
  } catch (const std::exception& e) {
    fail(std::string("checkpoint: bad config section: ") + e.what());
  }

  Vocabulary src_vocab, tgt_vocab;
  CharVocab char_vocab;
  try {
    src_vocab = Vocabulary::from_tokens(
        need("src_vocab").at("tokens").get<std::vector<std::string>>(),
        need("src_vocab").at("freqs").get<std::vector<long>>());
    tgt_vocab = Vocabulary::from_tokens(
        need("tgt_vocab").at("tokens").get<std::vector<std::string>>(),
        need("tgt_vocab").at("freqs").get<std::vector<long>>());
    std::vector<std::string> chars = need("char_vocab").get<std::vector<std::string>>();
    if (!chars.empty())
      char_vocab = CharVocab::from_chars(std::move(chars));
  } catch (const std::exception& e) {
    fail(std::string("checkpoint: bad vocabulary section: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.epoch = need("epoch").get<int>();
  if (!need("dev_bleu").is_null()) ckpt.dev_bleu = header["dev_bleu"].get<double>();
  ckpt.model = Model::init(cfg, std::move(src_vocab), std::move(tgt_vocab),
                           std::move(char_vocab), 0);

  NamedParams params = ckpt.model.parameters();
  const json& tensors = need("tensors");
  if (tensors.size() != params.size())
    fail("checkpoint: tensor list has " + std::to_string(tensors.size()) +
         " entries, model needs " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const json& entry = tensors[i];
    if (entry.at("name") != params[i].first)
      fail("checkpoint: tensor " + std::to_string(i) + " is '" +
           entry.at("name").get<std::string>() + "', expected '" + params[i].first + "'");
    if (entry.at("shape").get<Shape>() != params[i].second->shape())
      fail("checkpoint: shape mismatch for '" + params[i].first + "'");
    Tensor& t = *params[i].second;
    for (int k = 0; k < t.size(); ++k) {
      t.at(k) = get_f64_le(is);
      if (!is) fail("checkpoint: truncated tensor data for '" + params[i].first + "'");
    }
  }
  is.peek();
  if (!is.eof()) fail("checkpoint: trailing bytes after tensor data");
  return ckpt;
}

}  // namespace nmt
