#include "nmt/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace nmt {

static std::unordered_map<std::string, long> ngram_counts(
    const std::vector<std::string>& toks, int n) {
  std::unordered_map<std::string, long> counts;
  if (static_cast<int>(toks.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key = toks[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += toks[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::pair<long, long> modified_precision(const TokenLines& candidates,
                                         const TokenLines& references, int n) {
  if (n < 1) fail("modified_precision: n must be >= 1");
  if (candidates.size() != references.size())
    fail("modified_precision: candidate/reference count mismatch");
  long matches = 0, total = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto cand = ngram_counts(candidates[i], n);
    auto ref = ngram_counts(references[i], n);
    for (const auto& [gram, count] : cand) {
      auto it = ref.find(gram);
      long cap = it == ref.end() ? 0 : it->second;
      matches += std::min(count, cap);
      total += count;
    }
  }
  return {matches, total};
}

BleuReport corpus_bleu(const TokenLines& candidates, const TokenLines& references,
                       bool smooth) {
  if (candidates.empty()) fail("corpus_bleu: empty corpus");
  if (candidates.size() != references.size())
    fail("corpus_bleu: candidate/reference count mismatch (" +
         std::to_string(candidates.size()) + " vs " + std::to_string(references.size()) + ")");

  BleuReport r;
  r.smoothed = smooth;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    r.cand_len += static_cast<long>(candidates[i].size());
    r.ref_len += static_cast<long>(references[i].size());
  }

  double log_prec_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= 4; ++n) {
    auto [m, t] = modified_precision(candidates, references, n);
    r.matches[n - 1] = m;
    r.totals[n - 1] = t;
    if (t == 0) continue;  // no candidate n-grams of this order anywhere
    double p;
    if (smooth && n >= 2) {
      p = static_cast<double>(m + 1) / static_cast<double>(t + 1);
    } else {
      p = static_cast<double>(m) / static_cast<double>(t);
    }
    r.precisions[n - 1] = p;
    if (p == 0.0) r.zero_precision = true;
    ++orders;
    if (p > 0.0) log_prec_sum += std::log(p);
  }

  r.bp = (r.cand_len >= r.ref_len || r.cand_len == 0)
             ? 1.0
             : std::exp(1.0 - static_cast<double>(r.ref_len) / r.cand_len);
  if (orders == 0 || r.zero_precision) {
    r.bleu = 0.0;
    r.zero_precision = true;
    return r;
  }
  r.bleu = 100.0 * r.bp * std::exp(log_prec_sum / orders);
  return r;
}

std::string BleuReport::to_json() const {
  nlohmann::ordered_json j;
  j["bleu"] = bleu;
  j["precisions"] = precisions;
  j["bp"] = bp;
  j["cand_len"] = cand_len;
  j["ref_len"] = ref_len;
  j["smoothed"] = smoothed;
  j["zero_precision"] = zero_precision;
  return j.dump();
}

std::string BleuReport::human() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "BLEU = %.2f  (BP=%.4f, cand_len=%ld, ref_len=%ld, "
                "p1=%.4f p2=%.4f p3=%.4f p4=%.4f%s%s)",
                bleu, bp, cand_len, ref_len, precisions[0], precisions[1],
                precisions[2], precisions[3], smoothed ? ", smoothed" : "",
                zero_precision ? ", zero n-gram precision" : "");
  return buf;
}

}  // namespace nmt
