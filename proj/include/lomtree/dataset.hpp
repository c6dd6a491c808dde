#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "lomtree/error.hpp"
#include "lomtree/sparse_vector.hpp"

namespace lomtree {

/// Sentinel shuffle seed: keep the input order on every pass.
inline constexpr int64_t kNoShuffleSeed = -1;

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Small deterministic generator so shuffles are reproducible across
/// platforms (std::shuffle's draw sequence is implementation-defined).
class SplitMix {
public:
  explicit SplitMix(uint64_t seed) : state_(seed) {}
  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform draw in [0, bound); bound > 0.
  uint64_t below(uint64_t bound) { return next() % bound; }

private:
  uint64_t state_;
};

template <typename T>
void fisher_yates(std::vector<T>& items, uint64_t seed) {
  SplitMix rng(seed);
  for (size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.below(i)]);
  }
}

inline std::vector<uint32_t> identity_order(size_t n) {
  std::vector<uint32_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<uint32_t>(i);
  return order;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

}  // namespace detail

/// Parses one libsvm-style record: `<label> <idx>:<val> <idx>:<val> ...`.
/// A `#` starts a comment that runs to the end of the line. Entries are
/// returned sorted by index. Throws MalformedRecord (carrying the record
/// text) on a non-numeric token, label < 1, negative or duplicate index,
/// or non-finite value.
inline Example parse_line(std::string_view text) {
  const auto fail = [&](const char* why) -> Example {
    throw MalformedRecord(std::string(why) + " in record: \"" + std::string(text) + "\"");
  };

  std::string_view body = text;
  if (const size_t hash = body.find('#'); hash != std::string_view::npos) {
    body = body.substr(0, hash);
  }

  std::vector<std::string_view> tokens;
  size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && detail::is_space(body[pos])) ++pos;
    size_t end = pos;
    while (end < body.size() && !detail::is_space(body[end])) ++end;
    if (end > pos) tokens.push_back(body.substr(pos, end - pos));
    pos = end;
  }
  if (tokens.empty()) return fail("empty record");

  const auto parse_u32 = [](std::string_view tok, uint32_t& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
  };

  uint32_t label = 0;
  if (!parse_u32(tokens[0], label)) return fail("non-numeric label");
  if (label < 1) return fail("label must be >= 1");

  std::vector<FeatureEntry> entries;
  entries.reserve(tokens.size() - 1);
  for (size_t i = 1; i < tokens.size(); ++i) {
    const std::string_view tok = tokens[i];
    const size_t colon = tok.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size()) {
      return fail("expected <index>:<value> token");
    }
    uint32_t index = 0;
    if (!parse_u32(tok.substr(0, colon), index)) return fail("bad feature index");
    double value = 0.0;
    {
      const std::string_view vs = tok.substr(colon + 1);
      auto [ptr, ec] = std::from_chars(vs.data(), vs.data() + vs.size(), value);
      if (ec != std::errc() || ptr != vs.data() + vs.size()) return fail("bad feature value");
    }
    if (!std::isfinite(value)) return fail("non-finite feature value");
    entries.push_back({index, value});
  }

  Example ex;
  try {
    ex.features = SparseVector::from_entries(std::move(entries));
  } catch (const std::invalid_argument& e) {
    return fail(e.what());
  }
  ex.label = label;
  return ex;
}

/// Inverse of parse_line; values printed with enough digits to round-trip.
inline std::string to_line(const Example& ex) {
  char buf[64];
  std::string out = std::to_string(ex.label);
  for (const FeatureEntry& e : ex.features.entries()) {
    std::snprintf(buf, sizeof(buf), " %u:%.17g", e.index, e.value);
    out += buf;
  }
  return out;
}

/// Reads a dataset file: one record per line, blank lines and full-line
/// comments skipped. Files ending in `.gz` are decompressed on the fly.
inline std::vector<Example> load_dataset(const std::string& path) {
  std::vector<std::string> lines;
  if (path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (gz == nullptr) throw IoError("cannot open " + path);
    std::string current;
    char chunk[1 << 14];
    int got = 0;
    while ((got = gzread(gz, chunk, sizeof(chunk))) > 0) {
      for (int i = 0; i < got; ++i) {
        if (chunk[i] == '\n') {
          lines.push_back(std::move(current));
          current.clear();
        } else {
          current.push_back(chunk[i]);
        }
      }
    }
    const bool read_error = got < 0;
    gzclose(gz);
    if (read_error) throw IoError("gzip read failure in " + path);
    if (!current.empty()) lines.push_back(std::move(current));
  } else {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }

  std::vector<Example> examples;
  examples.reserve(lines.size());
  size_t lineno = 0;
  for (const std::string& line : lines) {
    ++lineno;
    std::string_view body = line;
    if (const size_t hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    size_t i = 0;
    while (i < body.size() && detail::is_space(body[i])) ++i;
    if (i == body.size()) continue;  // blank or comment-only
    try {
      examples.push_back(parse_line(line));
    } catch (const MalformedRecord& e) {
      throw MalformedRecord(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return examples;
}

/// Train / validation / test partition of a dataset.
struct DatasetSplit {
  std::vector<Example> train;
  std::vector<Example> validation;
  std::vector<Example> test;
};

/// Deterministic split: test gets floor(n/10) examples, validation gets
/// floor((n - test)/10) of the remaining train portion, the rest train.
/// Requires at least 10 examples.
inline DatasetSplit split_dataset(std::span<const Example> examples, uint64_t seed) {
  const size_t n = examples.size();
  if (n < 10) {
    throw TooFewExamples("need at least 10 examples to split, got " + std::to_string(n));
  }
  std::vector<uint32_t> order = detail::identity_order(n);
  detail::fisher_yates(order, seed);

  const size_t test_n = n / 10;
  const size_t val_n = (n - test_n) / 10;

  DatasetSplit split;
  split.test.reserve(test_n);
  split.validation.reserve(val_n);
  split.train.reserve(n - test_n - val_n);
  for (size_t i = 0; i < n; ++i) {
    const Example& ex = examples[order[i]];
    if (i < test_n) {
      split.test.push_back(ex);
    } else if (i < test_n + val_n) {
      split.validation.push_back(ex);
    } else {
      split.train.push_back(ex);
    }
  }
  return split;
}

/// Per-pass visiting order of a training set. Pass 0, 1, ... each get their
/// own permutation derived from `shuffle_seed`; kNoShuffleSeed keeps the
/// input order on every pass.
inline std::vector<uint32_t> pass_order(size_t n, uint32_t pass, int64_t shuffle_seed) {
  std::vector<uint32_t> order = detail::identity_order(n);
  if (shuffle_seed != kNoShuffleSeed) {
    const uint64_t mixed =
        detail::splitmix64(static_cast<uint64_t>(shuffle_seed) ^ (0x51ed270b + uint64_t{pass} * 0x9e3779b97f4a7c15ULL));
    detail::fisher_yates(order, mixed);
  }
  return order;
}

/// Streams `passes` seeded permutations of a training set, one example at a
/// time. Single consumer; the referenced examples must outlive the stream.
class PassStream {
public:
  PassStream(std::span<const Example> data, uint32_t passes, int64_t shuffle_seed)
      : data_(data), passes_(passes), shuffle_seed_(shuffle_seed) {
    if (passes < 1) throw InvalidConfig("passes must be >= 1");
  }

  /// Next example, or nullptr when all passes are exhausted.
  const Example* next() {
    if (data_.empty()) return nullptr;
    if (cursor_ >= order_.size()) {
      if (pass_ >= passes_) return nullptr;
      order_ = pass_order(data_.size(), pass_, shuffle_seed_);
      ++pass_;
      cursor_ = 0;
    }
    return &data_[order_[cursor_++]];
  }

  /// Pass index (0-based) of the most recently yielded example.
  uint32_t current_pass() const { return pass_ == 0 ? 0 : pass_ - 1; }

private:
  std::span<const Example> data_;
  uint32_t passes_;
  int64_t shuffle_seed_;
  uint32_t pass_ = 0;
  size_t cursor_ = 0;
  std::vector<uint32_t> order_;
};

}  // namespace lomtree
