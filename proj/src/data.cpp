#include "nmt/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nmt/tensor.hpp"
#include "nmt/utf8.hpp"

namespace nmt {

static bool is_space_cp(std::uint32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f';
}

static bool is_punct_cp(std::uint32_t cp) {
  switch (cp) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case '"': case '(': case ')': case '[': case ']':
      return true;
    default:
      return false;
  }
}

// "wasn't" -> "was" + "n't"; a bare "n't" stays as is.
static void split_clitic(const std::vector<std::uint32_t>& tok,
                         std::vector<std::string>& out) {
  auto emit = [&](std::size_t from, std::size_t to) {
    std::string s;
    for (std::size_t i = from; i < to; ++i) s += utf8::encode(tok[i]);
    out.push_back(std::move(s));
  };
  std::size_t n = tok.size();
  if (n > 3 && tok[n - 3] == 'n' && tok[n - 2] == '\'' && tok[n - 1] == 't') {
    emit(0, n - 3);
    emit(n - 3, n);
  } else {
    emit(0, n);
  }
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::uint32_t> cps = utf8::decode(line);
  for (auto& cp : cps) cp = utf8::fold(cp);

  std::vector<std::string> out;
  std::vector<std::uint32_t> cur;
  auto flush = [&] {
    if (!cur.empty()) {
      split_clitic(cur, out);
      cur.clear();
    }
  };
  for (std::uint32_t cp : cps) {
    if (is_space_cp(cp)) {
      flush();
    } else if (is_punct_cp(cp)) {
      flush();
      out.push_back(utf8::encode(cp));
    } else {
      cur.push_back(cp);
    }
  }
  flush();
  return out;
}

int Vocabulary::id(const std::string& tok) const {
  auto it = ids.find(tok);
  return it == ids.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) fail("vocabulary: id out of range");
  return tokens[id];
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> toks, std::vector<long> freqs) {
  Vocabulary v;
  v.tokens = std::move(toks);
  v.freqs = std::move(freqs);
  if (v.tokens.size() < 4 || v.tokens[0] != "<pad>" || v.tokens[1] != "<s>" ||
      v.tokens[2] != "</s>" || v.tokens[3] != "<unk>")
    fail("vocabulary: reserved entries missing");
  if (v.freqs.size() != v.tokens.size()) fail("vocabulary: frequency table size mismatch");
  for (int i = 0; i < v.size(); ++i) {
    if (!v.ids.emplace(v.tokens[i], i).second)
      fail("vocabulary: duplicate token '" + v.tokens[i] + "'");
  }
  return v;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& side,
                             int min_freq) {
  if (side.empty()) fail("vocabulary: empty corpus");
  std::unordered_map<std::string, long> counts;
  for (const auto& sent : side)
    for (const auto& tok : sent) ++counts[tok];
  std::vector<std::pair<std::string, long>> entries(counts.begin(), counts.end());
  std::erase_if(entries, [&](const auto& e) { return e.second < min_freq; });
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens = {"<pad>", "<s>", "</s>", "<unk>"};
  std::vector<long> freqs = {0, 0, 0, 0};
  for (auto& [tok, freq] : entries) {
    tokens.push_back(tok);
    freqs.push_back(freq);
  }
  return from_tokens(std::move(tokens), std::move(freqs));
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

ParallelCorpus ParallelCorpus::from_lines(const std::vector<std::string>& src_lines,
                                          const std::vector<std::string>& tgt_lines,
                                          int max_len) {
  if (src_lines.size() != tgt_lines.size())
    fail("parallel corpus: source has " + std::to_string(src_lines.size()) +
         " lines, target has " + std::to_string(tgt_lines.size()));
  ParallelCorpus corpus;
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    SentencePair p{tokenize(src_lines[i]), tokenize(tgt_lines[i])};
    if (p.src.empty() || p.tgt.empty() ||
        static_cast<int>(p.src.size()) > max_len ||
        static_cast<int>(p.tgt.size()) > max_len) {
      ++corpus.dropped;
      continue;
    }
    corpus.pairs.push_back(std::move(p));
  }
  return corpus;
}

ParallelCorpus ParallelCorpus::load(const std::string& src_path,
                                    const std::string& tgt_path, int max_len) {
  return from_lines(read_lines(src_path), read_lines(tgt_path), max_len);
}

ParallelCorpus ParallelCorpus::load_tsv(const std::string& path, int max_len) {
  std::vector<std::string> src, tgt;
  std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto tab = lines[i].find('\t');
    if (tab == std::string::npos)
      fail("tsv corpus: line " + std::to_string(i + 1) + ": no tab separator");
    src.push_back(lines[i].substr(0, tab));
    tgt.push_back(lines[i].substr(tab + 1));
  }
  return from_lines(src, tgt, max_len);
}

std::vector<std::vector<std::string>> ParallelCorpus::source_side() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.src);
  return out;
}

std::vector<std::vector<std::string>> ParallelCorpus::target_side() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.tgt);
  return out;
}

static SideStats side_stats(const std::vector<std::vector<std::string>>& side) {
  SideStats s;
  std::set<std::string> uniq;
  long total = 0;
  s.min_len = static_cast<int>(side[0].size());
  s.max_len = s.min_len;
  for (const auto& sent : side) {
    int n = static_cast<int>(sent.size());
    s.min_len = std::min(s.min_len, n);
    s.max_len = std::max(s.max_len, n);
    total += n;
    for (const auto& tok : sent) uniq.insert(tok);
  }
  s.unique = static_cast<long>(uniq.size());
  s.mean_len = std::round(100.0 * total / side.size()) / 100.0;
  return s;
}

CorpusStats corpus_stats(const ParallelCorpus& corpus) {
  if (corpus.empty()) fail("corpus_stats: empty corpus");
  CorpusStats cs;
  cs.pairs = static_cast<long>(corpus.size());
  cs.source = side_stats(corpus.source_side());
  cs.target = side_stats(corpus.target_side());
  return cs;
}

static std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string format_stats_table(const CorpusStats& s) {
  std::ostringstream os;
  auto row = [&](const std::string& name, const std::string& a, const std::string& b) {
    os << name;
    for (std::size_t i = name.size(); i < 28; ++i) os << ' ';
    os << "| ";
    for (std::size_t i = a.size(); i < 10; ++i) os << ' ';
    os << a << " | ";
    for (std::size_t i = b.size(); i < 10; ++i) os << ' ';
    os << b << "\n";
  };
  row("Statistic", "Source", "Target");
  row("Unique words", std::to_string(s.source.unique), std::to_string(s.target.unique));
  row("Minimum of sentence length", std::to_string(s.source.min_len),
      std::to_string(s.target.min_len));
  row("Maximum of sentence length", std::to_string(s.source.max_len),
      std::to_string(s.target.max_len));
  row("Average of sentence length", fixed2(s.source.mean_len), fixed2(s.target.mean_len));
  return os.str();
}

std::string stats_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  auto side = [](const SideStats& st) {
    return nlohmann::ordered_json{{"unique", st.unique},
                                  {"min_len", st.min_len},
                                  {"max_len", st.max_len},
                                  {"mean_len", st.mean_len}};
  };
  j["pairs"] = s.pairs;
  j["source"] = side(s.source);
  j["target"] = side(s.target);
  return j.dump();
}

EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab,
                               int dim, Rng& rng) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open embeddings file: " + path);

  std::unordered_map<std::string, std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::istringstream fs(line);
    std::string f;
    while (fs >> f) fields.push_back(f);
    if (static_cast<int>(fields.size()) != dim + 1)
      fail("embeddings: line " + std::to_string(lineno) + ": expected " +
           std::to_string(dim) + " values, got " +
           std::to_string(static_cast<int>(fields.size()) - 1));
    std::vector<double> vec(dim);
    for (int i = 0; i < dim; ++i) {
      const std::string& sfield = fields[i + 1];
      double v = 0.0;
      auto res = std::from_chars(sfield.data(), sfield.data() + sfield.size(), v);
      if (res.ec != std::errc() || res.ptr != sfield.data() + sfield.size())
        fail("embeddings: line " + std::to_string(lineno) + ": bad number '" + sfield + "'");
      vec[i] = v;
    }
    rows[fields[0]] = std::move(vec);  // last occurrence wins
  }

  EmbeddingTable table;
  table.table = Tensor::zeros({vocab.size(), dim});
  table.trainable = true;
  for (int id = 0; id < vocab.size(); ++id) {
    auto it = rows.find(vocab.token(id));
    if (it != rows.end()) {
      for (int k = 0; k < dim; ++k) table.table.at(id, k) = it->second[k];
    } else {
      for (int k = 0; k < dim; ++k) table.table.at(id, k) = rng.uniform(-0.1, 0.1);
    }
  }
  return table;
}

}  // namespace nmt
