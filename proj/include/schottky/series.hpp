#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <vector>

#include "schottky/schottky_group.hpp"

namespace schottky {

/// Value of a truncated series together with its truncation certificate.
struct SeriesResult {
  Complex value{};
  double tail_estimate = 0.0;
  int shells_used = 0;
  bool converged = false;
};

/// Per-shell partial sums (shell = word length) and per-shell sums of |term|.
struct ShellSums {
  std::vector<Complex> value;
  std::vector<double> magnitude;

  explicit ShellSums(int maxlen = 0) : value(maxlen + 1), magnitude(maxlen + 1) {}

  void add(std::size_t shell, Complex term) {
    value[shell] += term;
    magnitude[shell] += std::abs(term);
  }
  Complex total() const {
    Complex sum{};
    for (const Complex& v : value) sum += v;
    return sum;
  }
  void merge(const ShellSums& other) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      value[i] += other.value[i];
      magnitude[i] += other.magnitude[i];
    }
  }
};

struct TailFit {
  double ratio = 0.0;
  double tail = 0.0;
  bool geometric = true;  // ratio < 0.95
};

/// Geometric tail from the last three non-trivial shells: r = max of the last two ratios,
/// tail = M_L r / (1 - r). When that fails, the same rule is tried on sums of adjacent shell
/// pairs (series whose shells alternate in size). Ratios >= 0.95 are refused.
TailFit fit_tail(std::span<const double> magnitudes);

/// Total plus certificate; `refuse` forces converged = false (marginal groups).
SeriesResult finish_series(const ShellSums& sums, double tol, bool refuse = false);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be written to
/// per-index slots so that reductions happen afterwards in index order. If tasks throw,
/// the exception of the lowest failing index is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace detail {

template <class Keep, class Term>
void accumulate_subtree(const SchottkyGroup& group, int maxlen, Word& word, const MoebiusMap& element, Keep& keep,
                        Term& term, ShellSums& out) {
  out.add(word.size(), term(element, std::span<const Letter>(word)));
  if (static_cast<int>(word.size()) == maxlen) return;
  const int g = group.genus();
  for (int key = 1; key <= 2 * g; ++key) {
    const Letter r = letter_from_key(key);
    if (!word.empty() && word.back() == -r) continue;
    word.push_back(r);
    if (keep(std::span<const Letter>(word))) {
      const MoebiusMap child = element * group.generator(r);
      accumulate_subtree(group, maxlen, word, child, keep, term, out);
    }
    word.pop_back();
  }
}

}  // namespace detail

/// Sums term(gamma, word) over reduced words of length <= maxlen for which every prefix
/// passes keep(prefix) (keep is not consulted for the empty word). Terms are grouped into
/// shells by word length. The work is split into the fixed family of depth-2 subtrees and
/// reduced in that order, so the result is bit-identical for any thread count.
template <class Keep, class Term>
ShellSums sum_over_group(const SchottkyGroup& group, int maxlen, int threads, Keep keep, Term term) {
  ShellSums sums(maxlen);
  Word root;
  sums.add(0, term(MoebiusMap::identity(), std::span<const Letter>(root)));
  if (maxlen == 0) return sums;

  const int g = group.genus();
  std::vector<Word> prefixes;
  for (int k1 = 1; k1 <= 2 * g; ++k1) {
    const Letter r1 = letter_from_key(k1);
    Word w1{r1};
    if (!keep(std::span<const Letter>(w1))) continue;
    sums.add(1, term(group.generator(r1), std::span<const Letter>(w1)));
    if (maxlen == 1) continue;
    for (int k2 = 1; k2 <= 2 * g; ++k2) {
      const Letter r2 = letter_from_key(k2);
      if (r2 == -r1) continue;
      Word w2{r1, r2};
      if (keep(std::span<const Letter>(w2))) prefixes.push_back(std::move(w2));
    }
  }

  std::vector<ShellSums> partial(prefixes.size(), ShellSums(maxlen));
  parallel_for(prefixes.size(), threads, [&](std::size_t i) {
    Word word = prefixes[i];
    const MoebiusMap element = group.evaluate(word);
    auto local_keep = keep;
    auto local_term = term;
    detail::accumulate_subtree(group, maxlen, word, element, local_keep, local_term, partial[i]);
  });
  for (const auto& p : partial) sums.merge(p);
  return sums;
}

/// keep-everything predicate.
struct KeepAll {
  bool operator()(std::span<const Letter>) const { return true; }
};

}  // namespace schottky
