// Copyright 2026 The QCA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qca/linalg.hpp"

namespace qca {

/// Ordered set of distinct tokens. A token's position is stable for the
/// life of a run and identifies the local basis state |word_k>.
class Vocabulary {
 public:
  /// Returns the index of `word`, inserting it at the end if new.
  int add(const std::string& word) {
    auto it = index_.find(word);
    if (it != index_.end()) {
      return it->second;
    }
    const int id = static_cast<int>(words_.size());
    words_.push_back(word);
    index_.emplace(word, id);
    return id;
  }

  bool contains(const std::string& word) const {
    return index_.count(word) > 0;
  }

  int index_of(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) {
      throw std::out_of_range("unknown word: '" + word + "'");
    }
    return it->second;
  }

  const std::string& word(int index) const { return words_.at(index); }

  /// Number of distinct words; the local dimension d of a chain site.
  int size() const { return static_cast<int>(words_.size()); }

  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

/// Tokenized sentences over a vocabulary. Every stored sentence has at
/// least two tokens; shorter ones contribute no bigram and are dropped or
/// rejected at parse time.
struct Corpus {
  Vocabulary vocabulary;
  std::vector<std::vector<int>> sentences;
};

enum class ShortSentencePolicy : std::uint8_t { skip, error };

struct ParseOptions {
  ShortSentencePolicy short_sentences = ShortSentencePolicy::skip;
  /// Optional sink for skip notices.
  std::vector<std::string>* warnings = nullptr;
};

namespace detail {

inline std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    if (i > start) {
      tokens.emplace_back(line.substr(start, i - start));
    }
  }
  return tokens;
}

}  // namespace detail

/// Parses one whitespace-separated sentence per line. Lines whose first
/// non-space character is '#' are comments; blank lines are ignored.
/// Tokens are kept verbatim (case preserved) and the vocabulary is ordered
/// by first occurrence.
inline Corpus parse_corpus(std::span<const std::string> lines,
                           const ParseOptions& options = {}) {
  Corpus corpus;
  int line_no = 0;
  for (const std::string& line : lines) {
    ++line_no;
    const auto tokens = detail::split_tokens(line);
    if (tokens.empty() || tokens.front().front() == '#') {
      continue;
    }
    if (tokens.size() < 2) {
      std::ostringstream msg;
      msg << "line " << line_no << ": sentence '" << tokens.front()
          << "' has fewer than two words and contributes no bigram";
      if (options.short_sentences == ShortSentencePolicy::error) {
        throw std::invalid_argument(msg.str());
      }
      if (options.warnings != nullptr) {
        options.warnings->push_back(msg.str() + "; skipped");
      }
      continue;
    }
    std::vector<int> sentence;
    sentence.reserve(tokens.size());
    for (const std::string& token : tokens) {
      sentence.push_back(corpus.vocabulary.add(token));
    }
    corpus.sentences.push_back(std::move(sentence));
  }
  if (corpus.sentences.empty()) {
    throw std::invalid_argument("corpus contains no usable sentences");
  }
  if (corpus.vocabulary.size() < 2) {
    throw std::invalid_argument("corpus needs at least two distinct words");
  }
  return corpus;
}

/// Multiset of ordered adjacent word pairs, dense over the d*d pair space.
class BigramTable {
 public:
  explicit BigramTable(int local_dim)
      : d_(local_dim),
        counts_(static_cast<std::size_t>(local_dim) * local_dim, 0) {
    if (local_dim < 2) {
      throw std::invalid_argument("bigram table needs local dimension >= 2");
    }
  }

  int local_dim() const { return d_; }

  std::int64_t& count(int first, int second) {
    return counts_.at(static_cast<std::size_t>(first) * d_ + second);
  }

  std::int64_t count(int first, int second) const {
    return counts_.at(static_cast<std::size_t>(first) * d_ + second);
  }

  std::int64_t total() const {
    std::int64_t sum = 0;
    for (std::int64_t c : counts_) {
      sum += c;
    }
    return sum;
  }

  const std::vector<std::int64_t>& counts() const { return counts_; }

 private:
  int d_;
  std::vector<std::int64_t> counts_;
};

inline BigramTable extract_bigrams(const Corpus& corpus) {
  BigramTable table(corpus.vocabulary.size());
  for (const auto& sentence : corpus.sentences) {
    for (std::size_t i = 0; i + 1 < sentence.size(); ++i) {
      ++table.count(sentence[i], sentence[i + 1]);
    }
  }
  return table;
}

/// Normalized two-site search target whose amplitude on pair (w1, w2) is
/// proportional to the pair's multiplicity in the corpus. Amplitudes are
/// real and non-negative; the index convention is w1 * d + w2.
struct CorpusState {
  int local_dim = 0;
  CVector amplitudes;

  int pair_dim() const { return static_cast<int>(amplitudes.size()); }
};

inline CorpusState build_corpus_state(const BigramTable& table,
                                      const Vocabulary& vocabulary) {
  if (table.local_dim() != vocabulary.size()) {
    throw std::invalid_argument(
        "bigram table dimension does not match vocabulary size");
  }
  double sum_sq = 0.0;
  for (std::int64_t c : table.counts()) {
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
  }
  if (sum_sq == 0.0) {
    throw std::invalid_argument("cannot build a corpus state from an all-zero bigram table");
  }
  const double norm = std::sqrt(sum_sq);
  CorpusState state;
  state.local_dim = table.local_dim();
  state.amplitudes = CVector::Zero(table.counts().size());
  for (std::size_t i = 0; i < table.counts().size(); ++i) {
    state.amplitudes[static_cast<Eigen::Index>(i)] =
        static_cast<double>(table.counts()[i]) / norm;
  }
  return state;
}

/// Occurrence count of `word` in the two-site basis state r = w1 * d + w2.
inline int pair_charge(int r, int word, int local_dim) {
  return static_cast<int>(r / local_dim == word) +
         static_cast<int>(r % local_dim == word);
}

/// Diagonal projectors onto the q = 0, 1, 2 occurrence sectors of `word`
/// in the two-site product basis. They are complete, orthogonal and
/// idempotent by construction.
inline std::array<CMatrix, 3> charge_projectors(int word, int local_dim) {
  if (word < 0 || word >= local_dim) {
    throw std::out_of_range("word index out of range");
  }
  const int pair_dim = local_dim * local_dim;
  std::array<CMatrix, 3> projectors{CMatrix::Zero(pair_dim, pair_dim),
                                    CMatrix::Zero(pair_dim, pair_dim),
                                    CMatrix::Zero(pair_dim, pair_dim)};
  for (int r = 0; r < pair_dim; ++r) {
    projectors[pair_charge(r, word, local_dim)](r, r) = 1.0;
  }
  return projectors;
}

inline std::array<CMatrix, 3> charge_projectors(const std::string& word,
                                                const Vocabulary& vocabulary) {
  return charge_projectors(vocabulary.index_of(word), vocabulary.size());
}

}  // namespace qca
