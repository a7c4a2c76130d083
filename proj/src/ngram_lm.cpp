// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "forge/common.hpp"

namespace forge {

namespace {

constexpr int kMinOrder = 1;
constexpr int kMaxOrder = 5;

void check_order(int order) {
  if (order < kMinOrder || order > kMaxOrder) {
    throw UsageError("n-gram order must be in [1,5], got " + std::to_string(order));
  }
}

void check_lambdas(int order, const std::vector<double>& lambdas) {
  if (lambdas.size() != static_cast<std::size_t>(order) + 1) {
    throw UsageError("need " + std::to_string(order + 1) + " interpolation weights");
  }
  double sum = 0.0;
  for (double l : lambdas) {
    if (l < 0.0) throw UsageError("interpolation weights must be nonnegative");
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw UsageError("interpolation weights must sum to 1");
  if (lambdas.back() <= 0.0) {
    throw UsageError("floor weight must be positive (guarantees finite cross-entropy)");
  }
}

}  // namespace

std::vector<double> default_lambdas(int order) {
  switch (order) {
    case 1: return {0.95, 0.05};
    case 2: return {0.60, 0.35, 0.05};
    case 3: return {0.50, 0.30, 0.15, 0.05};
    case 4: return {0.45, 0.27, 0.17, 0.06, 0.05};
    case 5: return {0.40, 0.25, 0.17, 0.08, 0.05, 0.05};
    default: check_order(order); return {};
  }
}

std::string NGramModel::pack(std::span<const TokenId> ids) {
  std::string key;
  key.reserve(ids.size() * 4);
  for (TokenId id : ids) {
    key.push_back(static_cast<char>(id & 0xFF));
    key.push_back(static_cast<char>((id >> 8) & 0xFF));
    key.push_back(static_cast<char>((id >> 16) & 0xFF));
    key.push_back(static_cast<char>((id >> 24) & 0xFF));
  }
  return key;
}

NGramModel::TokenId NGramModel::id_or_unk(const std::string& token) const {
  auto it = token_ids_.find(token);
  return it == token_ids_.end() ? unk_id_ : it->second;
}

void NGramModel::add_ngram_counts(const std::vector<TokenId>& ids) {
  // ids: (order-1) <s> markers, the sentence tokens, one </s>.
  const std::size_t pad = static_cast<std::size_t>(order_) - 1;
  for (std::size_t t = pad; t < ids.size(); ++t) {
    for (int n = 1; n <= order_; ++n) {
      const std::size_t begin = t + 1 - static_cast<std::size_t>(n);
      std::span<const TokenId> gram(ids.data() + begin, static_cast<std::size_t>(n));
      ++counts_[pack(gram)];
      ++ctx_totals_[pack(gram.first(gram.size() - 1))];
    }
  }
}

void NGramModel::finalize_vocab() {
  vocab_size_ = id_tokens_.size() - 1;  // everything except <s>
}

NGramModel NGramModel::train(const std::vector<Sentence>& corpus,
                             const LanguageProfile& profile, int order,
                             const TrainOptions& opts) {
  check_order(order);
  if (corpus.empty()) throw DataError("cannot train a language model on an empty corpus");

  // Pass 1: surface-token frequencies.
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& s : corpus) {
    for (auto& tok : tokenize(s, profile)) ++freq[tok.text];
  }

  NGramModel model;
  model.order_ = order;
  model.lambdas_ = opts.lambdas.empty() ? default_lambdas(order) : opts.lambdas;
  check_lambdas(order, model.lambdas_);
  model.lang_ = profile.lang_code;
  model.mode_ = profile.mode;

  auto intern = [&model](std::string token) {
    const TokenId id = static_cast<TokenId>(model.id_tokens_.size());
    model.token_ids_.emplace(token, id);
    model.id_tokens_.push_back(std::move(token));
    return id;
  };
  model.unk_id_ = intern(std::string(kUnkToken));
  model.eos_id_ = intern(std::string(kEosToken));
  for (const auto& [token, count] : freq) {
    if (count > static_cast<std::uint64_t>(opts.unk_threshold)) intern(token);
  }
  model.bos_id_ = intern(std::string(kBosToken));  // last id; excluded from vocab
  model.finalize_vocab();

  // Pass 2: n-gram counts with <s> padding and </s> terminator.
  const std::size_t pad = static_cast<std::size_t>(order) - 1;
  std::vector<TokenId> ids;
  for (const auto& s : corpus) {
    ids.assign(pad, model.bos_id_);
    for (auto& tok : tokenize(s, profile)) ids.push_back(model.id_or_unk(tok.text));
    ids.push_back(model.eos_id_);
    model.add_ngram_counts(ids);
  }
  return model;
}

NGramModel NGramModel::train_file(const std::string& path, const LanguageProfile& profile,
                                  int order, const TrainOptions& opts) {
  check_order(order);

  std::unordered_map<std::string, std::uint64_t> freq;
  {
    LineReader in(path);
    std::uint64_t lines = 0;
    while (auto s = in.next()) {
      ++lines;
      for (auto& tok : tokenize(*s, profile)) ++freq[tok.text];
    }
    if (lines == 0) throw DataError("cannot train a language model on an empty corpus: " + path);
  }

  NGramModel model;
  model.order_ = order;
  model.lambdas_ = opts.lambdas.empty() ? default_lambdas(order) : opts.lambdas;
  check_lambdas(order, model.lambdas_);
  model.lang_ = profile.lang_code;
  model.mode_ = profile.mode;

  auto intern = [&model](std::string token) {
    const TokenId id = static_cast<TokenId>(model.id_tokens_.size());
    model.token_ids_.emplace(token, id);
    model.id_tokens_.push_back(std::move(token));
    return id;
  };
  model.unk_id_ = intern(std::string(kUnkToken));
  model.eos_id_ = intern(std::string(kEosToken));
  for (const auto& [token, count] : freq) {
    if (count > static_cast<std::uint64_t>(opts.unk_threshold)) intern(token);
  }
  model.bos_id_ = intern(std::string(kBosToken));
  model.finalize_vocab();

  const std::size_t pad = static_cast<std::size_t>(order) - 1;
  std::vector<TokenId> ids;
  LineReader in(path);
  while (auto s = in.next()) {
    ids.assign(pad, model.bos_id_);
    for (auto& tok : tokenize(*s, profile)) ids.push_back(model.id_or_unk(tok.text));
    ids.push_back(model.eos_id_);
    model.add_ngram_counts(ids);
  }
  return model;
}

double NGramModel::prob_ids(std::span<const TokenId> context, TokenId token) const {
  double p = 0.0;
  double floor_weight = lambdas_.back();
  for (int k = order_; k >= 1; --k) {
    const std::size_t ctx_len = static_cast<std::size_t>(k) - 1;
    std::span<const TokenId> ctx = context.subspan(context.size() - ctx_len);
    const std::string ctx_key = pack(ctx);
    const auto den = ctx_totals_.find(ctx_key);
    const double lambda = lambdas_[static_cast<std::size_t>(order_ - k)];
    if (den == ctx_totals_.end() || den->second == 0) {
      // Unseen context: its weight falls through to the uniform floor so the
      // distribution still sums to 1.
      floor_weight += lambda;
      continue;
    }
    std::string full = ctx_key;
    const std::string tok_key = pack(std::span<const TokenId>(&token, 1));
    full += tok_key;
    const auto num = counts_.find(full);
    if (num != counts_.end()) {
      p += lambda * static_cast<double>(num->second) / static_cast<double>(den->second);
    }
  }
  return p + floor_weight / static_cast<double>(vocab_size_);
}

double NGramModel::prob(std::span<const std::string> context, const std::string& token) const {
  const std::size_t need = static_cast<std::size_t>(order_) - 1;
  std::vector<TokenId> ctx(need, bos_id_);
  const std::size_t take = std::min(context.size(), need);
  for (std::size_t i = 0; i < take; ++i) {
    ctx[need - take + i] = id_or_unk(context[context.size() - take + i]);
  }
  return prob_ids(ctx, id_or_unk(token));
}

double NGramModel::cross_entropy(const Sentence& s, const LanguageProfile& profile) const {
  const std::size_t need = static_cast<std::size_t>(order_) - 1;
  std::vector<TokenId> window(need, bos_id_);

  double nll = 0.0;
  std::uint64_t events = 0;
  auto score = [&](TokenId tok) {
    nll -= std::log(prob_ids(window, tok));
    ++events;
    if (!window.empty()) {
      window.erase(window.begin());
      window.push_back(tok);
    }
  };
  for (auto& tok : tokenize(s, profile)) score(id_or_unk(tok.text));
  score(eos_id_);
  return nll / static_cast<double>(events);
}

std::uint64_t NGramModel::count(std::span<const std::string> ngram) const {
  if (ngram.empty() || ngram.size() > static_cast<std::size_t>(order_)) return 0;
  std::vector<TokenId> ids;
  for (const auto& t : ngram) {
    auto it = token_ids_.find(t);
    if (it == token_ids_.end()) return 0;
    ids.push_back(it->second);
  }
  auto it = counts_.find(pack(ids));
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::string> NGramModel::vocab() const {
  std::vector<std::string> out;
  out.reserve(vocab_size_);
  for (TokenId id = 0; id < id_tokens_.size(); ++id) {
    if (id == bos_id_) continue;
    out.push_back(id_tokens_[id]);
  }
  return out;
}

void NGramModel::save(const std::string& path) const {
  std::vector<std::string> lines;
  lines.reserve(counts_.size());
  for (const auto& [key, count] : counts_) {
    const std::size_t n = key.size() / 4;
    std::string line = std::to_string(n);
    line.push_back('\t');
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) line.push_back(' ');
      TokenId id = 0;
      for (int b = 3; b >= 0; --b) {
        id = (id << 8) | static_cast<unsigned char>(key[i * 4 + static_cast<std::size_t>(b)]);
      }
      line += id_tokens_[id];
    }
    line.push_back('\t');
    line += std::to_string(count);
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());

  LineWriter out(path);
  out.write("order\t" + std::to_string(order_));
  out.write("lang\t" + lang_ + "\t" + std::string(mode_name(mode_)));
  std::string lambda_line = "lambda";
  for (double l : lambdas_) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", l);
    lambda_line.push_back(lambda_line.size() == 6 ? '\t' : ' ');
    lambda_line += buf;
  }
  out.write(lambda_line);
  for (const auto& line : lines) out.write(line);
  out.close();
}

NGramModel NGramModel::load(const std::string& path) {
  LineReader in(path);
  auto need_line = [&](const char* what) {
    auto s = in.next();
    if (!s) throw DataError(std::string("model file truncated before ") + what + ": " + path);
    return s->text;
  };

  NGramModel model;
  {
    std::istringstream hdr(need_line("order"));
    std::string tag;
    if (!(hdr >> tag >> model.order_) || tag != "order") {
      throw DataError("bad model header (order line): " + path);
    }
    check_order(model.order_);
  }
  {
    std::istringstream hdr(need_line("lang"));
    std::string tag, lang, mode;
    if (!(hdr >> tag >> lang >> mode) || tag != "lang") {
      throw DataError("bad model header (lang line): " + path);
    }
    model.lang_ = lang;
    model.mode_ = mode_from_name(mode);
  }
  {
    std::istringstream hdr(need_line("lambda"));
    std::string tag;
    hdr >> tag;
    if (tag != "lambda") throw DataError("bad model header (lambda line): " + path);
    double l;
    while (hdr >> l) model.lambdas_.push_back(l);
    check_lambdas(model.order_, model.lambdas_);
  }

  auto intern = [&model](const std::string& token) {
    auto it = model.token_ids_.find(token);
    if (it != model.token_ids_.end()) return it->second;
    const TokenId id = static_cast<TokenId>(model.id_tokens_.size());
    model.token_ids_.emplace(token, id);
    model.id_tokens_.push_back(token);
    return id;
  };
  model.unk_id_ = intern(std::string(kUnkToken));
  model.eos_id_ = intern(std::string(kEosToken));

  struct Row {
    std::vector<std::string> tokens;
    std::uint64_t count;
  };
  std::vector<Row> rows;
  while (auto line = in.next()) {
    const std::string& text = line->text;
    const std::size_t t1 = text.find('\t');
    const std::size_t t2 = text.rfind('\t');
    if (t1 == std::string::npos || t2 == t1) {
      throw DataError("bad model row at " + path + ":" + std::to_string(line->line_no));
    }
    Row row;
    const int n = std::stoi(text.substr(0, t1));
    row.count = std::stoull(text.substr(t2 + 1));
    std::istringstream grams(text.substr(t1 + 1, t2 - t1 - 1));
    std::string tok;
    while (grams >> tok) row.tokens.push_back(tok);
    if (static_cast<int>(row.tokens.size()) != n || n < 1 || n > model.order_) {
      throw DataError("bad model row at " + path + ":" + std::to_string(line->line_no));
    }
    rows.push_back(std::move(row));
  }

  // Intern vocabulary from unigram rows first so ids of real tokens precede <s>.
  for (const auto& row : rows) {
    if (row.tokens.size() == 1 && row.tokens[0] != kBosToken) intern(row.tokens[0]);
  }
  model.bos_id_ = intern(std::string(kBosToken));

  std::vector<TokenId> ids;
  for (const auto& row : rows) {
    ids.clear();
    for (const auto& t : row.tokens) ids.push_back(intern(t));
    const std::string key = pack(ids);
    model.counts_[key] += row.count;
    model.ctx_totals_[pack(std::span<const TokenId>(ids.data(), ids.size() - 1))] += row.count;
  }
  model.finalize_vocab();
  return model;
}

}  // namespace forge
