#include "nmt/decode.hpp"

#include <algorithm>
#include <cmath>

namespace nmt {

std::vector<int> greedy_decode(const Model& model, const std::vector<std::string>& src,
                               int max_len) {
  if (max_len < 1) fail("greedy_decode: max_len must be >= 1");
  EncoderOutput enc = model.encode(nullptr, src);
  DecoderState st = model.decoder_init(enc);
  std::vector<int> out;
  int prev = Vocabulary::kBos;
  for (int step = 0; step < max_len; ++step) {
    auto [logits, next] = model.decode_step(nullptr, st, prev, enc);
    int best = 0;
    for (int v = 1; v < logits.size(); ++v)
      if (logits.at(v) > logits.at(best)) best = v;
    if (best == Vocabulary::kEos) break;
    out.push_back(best);
    st = next;
    prev = best;
  }
  return out;
}

namespace {

struct LiveHyp {
  std::vector<int> tokens;
  double logprob = 0.0;
  DecoderState state;
  int prev = Vocabulary::kBos;
};

// logprob desc, then shorter, then lexicographically smaller tokens.
bool better_tokens(double lp_a, const std::vector<int>& a, double lp_b,
                   const std::vector<int>& b) {
  if (lp_a != lp_b) return lp_a > lp_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool better_hyp(const Hypothesis& a, const Hypothesis& b, double norm_exp) {
  if (norm_exp > 0.0) {
    double sa = a.logprob / std::pow(std::max<std::size_t>(a.tokens.size(), 1), norm_exp);
    double sb = b.logprob / std::pow(std::max<std::size_t>(b.tokens.size(), 1), norm_exp);
    if (sa != sb) return sa > sb;
  }
  return better_tokens(a.logprob, a.tokens, b.logprob, b.tokens);
}

}  // namespace

std::vector<Hypothesis> beam_search(const Model& model, const std::vector<std::string>& src,
                                    int width, int max_len, double norm_exp) {
  if (width < 1) fail("beam_search: width must be >= 1");
  if (max_len < 1) fail("beam_search: max_len must be >= 1");

  EncoderOutput enc = model.encode(nullptr, src);
  std::vector<LiveHyp> live(1);
  live[0].state = model.decoder_init(enc);
  std::vector<Hypothesis> pool;

  auto pool_order = [&](const Hypothesis& a, const Hypothesis& b) {
    return better_tokens(a.logprob, a.tokens, b.logprob, b.tokens);
  };

  struct Cand {
    int parent;
    int token;
    double logprob;
  };

  for (int step = 0; step < max_len && !live.empty(); ++step) {
    std::vector<DecoderState> next_states(live.size());
    std::vector<Cand> cands;
    cands.reserve(live.size() * model.tgt_vocab.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
      auto [logits, next] = model.decode_step(nullptr, live[i].state, live[i].prev, enc);
      next_states[i] = next;
      std::vector<double> ls = log_softmax_values(logits);
      for (int v = 0; v < static_cast<int>(ls.size()); ++v)
        cands.push_back({static_cast<int>(i), v, live[i].logprob + ls[v]});
    }
    auto cand_better = [&](const Cand& a, const Cand& b) {
      if (a.logprob != b.logprob) return a.logprob > b.logprob;
      const auto& ta = live[a.parent].tokens;
      const auto& tb = live[b.parent].tokens;
      // same length at one step; compare prefix then the new token
      if (ta != tb) return ta < tb;
      return a.token < b.token;
    };
    int keep = std::min<int>(width, static_cast<int>(cands.size()));
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(), cand_better);
    cands.resize(keep);

    std::vector<LiveHyp> next_live;
    for (const Cand& c : cands) {
      if (c.token == Vocabulary::kEos) {
        Hypothesis h;
        h.tokens = live[c.parent].tokens;
        h.logprob = c.logprob;
        h.finished = true;
        pool.push_back(std::move(h));
      } else {
        LiveHyp h;
        h.tokens = live[c.parent].tokens;
        h.tokens.push_back(c.token);
        h.logprob = c.logprob;
        h.state = next_states[c.parent];
        h.prev = c.token;
        next_live.push_back(std::move(h));
      }
    }
    std::sort(pool.begin(), pool.end(), pool_order);
    if (static_cast<int>(pool.size()) > width) pool.resize(width);
    live = std::move(next_live);

    if (static_cast<int>(pool.size()) >= width && !live.empty()) {
      double best_live = live[0].logprob;
      for (const auto& h : live) best_live = std::max(best_live, h.logprob);
      if (pool.back().logprob >= best_live) break;
    }
  }

  // anything still alive at max_len competes as an unfinished hypothesis
  for (LiveHyp& h : live)
    pool.push_back(Hypothesis{std::move(h.tokens), h.logprob, false});

  std::sort(pool.begin(), pool.end(),
            [&](const Hypothesis& a, const Hypothesis& b) { return better_hyp(a, b, norm_exp); });
  if (static_cast<int>(pool.size()) > width) pool.resize(width);
  return pool;
}

double score_sequence(const Model& model, const std::vector<std::string>& src,
                      const std::vector<int>& tokens, bool with_eos) {
  EncoderOutput enc = model.encode(nullptr, src);
  DecoderState st = model.decoder_init(enc);
  double total = 0.0;
  int prev = Vocabulary::kBos;
  std::vector<int> steps = tokens;
  if (with_eos) steps.push_back(Vocabulary::kEos);
  for (int tok : steps) {
    auto [logits, next] = model.decode_step(nullptr, st, prev, enc);
    total += log_softmax_values(logits)[tok];
    st = next;
    prev = tok;
  }
  return total;
}

std::vector<std::string> ids_to_tokens(const Vocabulary& vocab, const std::vector<int>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(vocab.token(id));
  return out;
}

}  // namespace nmt
