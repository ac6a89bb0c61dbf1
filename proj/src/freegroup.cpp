#include "schottky/words.hpp"

#include <algorithm>
#include <cstdlib>

#include "schottky/errors.hpp"

namespace schottky {

bool lex_less(std::span<const Letter> lhs, std::span<const Letter> rhs) {
  return std::lexicographical_compare(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(),
                                      [](Letter x, Letter y) { return letter_key(x) < letter_key(y); });
}

bool shortlex_less(std::span<const Letter> lhs, std::span<const Letter> rhs) {
  if (lhs.size() != rhs.size()) return lhs.size() < rhs.size();
  return lex_less(lhs, rhs);
}

Word reduce(std::span<const Letter> letters) {
  Word out;
  out.reserve(letters.size());
  for (Letter r : letters) {
    if (r == 0) throw Error(ErrorKind::InvalidInput, "letter 0 is not a generator index");
    if (!out.empty() && out.back() == -r) {
      out.pop_back();
    } else {
      out.push_back(r);
    }
  }
  return out;
}

Word invert(std::span<const Letter> w) {
  Word out(w.rbegin(), w.rend());
  for (Letter& r : out) r = -r;
  return out;
}

Word multiply(std::span<const Letter> lhs, std::span<const Letter> rhs) {
  Word cat(lhs.begin(), lhs.end());
  cat.insert(cat.end(), rhs.begin(), rhs.end());
  return reduce(cat);
}

CyclicSplit cyclic_split(std::span<const Letter> w) {
  std::size_t lo = 0;
  std::size_t hi = w.size();
  while (hi - lo >= 2 && w[lo] == -w[hi - 1]) {
    ++lo;
    --hi;
  }
  CyclicSplit out;
  out.conjugator.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(lo));
  out.core.assign(w.begin() + static_cast<std::ptrdiff_t>(lo), w.begin() + static_cast<std::ptrdiff_t>(hi));
  return out;
}

Word cyclic_reduce(std::span<const Letter> w) { return cyclic_split(w).core; }

Word minimal_rotation(std::span<const Letter> w) {
  Word best(w.begin(), w.end());
  Word rot(w.begin(), w.end());
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (lex_less(rot, best)) best = rot;
  }
  return best;
}

bool is_proper_power(std::span<const Letter> w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return true;
  }
  return false;
}

std::uint64_t reduced_word_count(int g, int length) {
  if (length == 0) return 1;
  std::uint64_t count = 2 * static_cast<std::uint64_t>(g);
  for (int i = 1; i < length; ++i) count *= static_cast<std::uint64_t>(2 * g - 1);
  return count;
}

namespace {

// Depth-first walk over reduced words of exactly `length` letters with a prefix filter.
// Children are visited in canonical letter order, so leaves come out lexicographically sorted.
template <class Keep, class Leaf>
void walk_exact(int g, int length, Word& prefix, Keep&& keep, Leaf&& leaf) {
  if (static_cast<int>(prefix.size()) == length) {
    leaf(std::span<const Letter>(prefix));
    return;
  }
  for (int key = 1; key <= 2 * g; ++key) {
    const Letter r = letter_from_key(key);
    if (!prefix.empty() && prefix.back() == -r) continue;
    prefix.push_back(r);
    if (keep(std::span<const Letter>(prefix))) walk_exact(g, length, prefix, keep, leaf);
    prefix.pop_back();
  }
}

// Lyndon test in canonical letter order: strictly smaller than every proper rotation.
bool is_lyndon(std::span<const Letter> w) {
  const std::size_t n = w.size();
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const int lhs = letter_key(w[i]);
      const int rhs = letter_key(w[(i + k) % n]);
      if (lhs < rhs) break;
      if (lhs > rhs) return false;
      if (i + 1 == n) return false;  // equal to a rotation: periodic
    }
  }
  return true;
}

}  // namespace

void for_each_word(int g, int maxlen, const std::function<void(std::span<const Letter>)>& visit) {
  if (g < 1) throw Error(ErrorKind::InvalidInput, "rank must be at least 1");
  if (maxlen < 0) throw Error(ErrorKind::InvalidInput, "maxlen must be non-negative");
  Word prefix;
  for (int len = 0; len <= maxlen; ++len) {
    walk_exact(g, len, prefix, [](std::span<const Letter>) { return true; }, visit);
  }
}

std::vector<Word> enumerate_words(int g, int maxlen) {
  std::vector<Word> out;
  for_each_word(g, maxlen, [&](std::span<const Letter> w) { out.emplace_back(w.begin(), w.end()); });
  return out;
}

std::vector<ConjugacyClass> primitive_conjugacy_classes(int g, int maxlen) {
  if (g < 1) throw Error(ErrorKind::InvalidInput, "rank must be at least 1");
  if (maxlen < 1) throw Error(ErrorKind::InvalidInput, "maxlen must be at least 1");
  std::vector<ConjugacyClass> out;
  Word prefix;
  for (int len = 1; len <= maxlen; ++len) {
    // A Lyndon word starts with its least letter, so every later letter has key >= the first.
    auto keep = [](std::span<const Letter> p) { return letter_key(p.back()) >= letter_key(p.front()); };
    walk_exact(g, len, prefix, keep, [&](std::span<const Letter> w) {
      if (w.size() > 1 && w.front() == -w.back()) return;
      if (!is_lyndon(w)) return;
      out.push_back({Word(w.begin(), w.end()), true});
    });
  }
  return out;
}

namespace {

// Length of the reduced form of c^sign * w, for c cyclically reduced.
std::size_t reduced_length_after(std::span<const Letter> core, int sign, std::span<const Letter> w) {
  const std::size_t k = core.size();
  std::size_t cancel = 0;
  // c^{+1} w cancels while w[i] == -c[k-1-i]; c^{-1} = (-c[k-1], ..., -c[0]) cancels while w[i] == c[i].
  while (cancel < k && cancel < w.size()) {
    const Letter want = sign > 0 ? -core[k - 1 - cancel] : core[cancel];
    if (w[cancel] != want) break;
    ++cancel;
  }
  return k + w.size() - 2 * cancel;
}

Word power_times(std::span<const Letter> core, int sign, std::span<const Letter> w) {
  Word lhs = sign > 0 ? Word(core.begin(), core.end()) : invert(core);
  return multiply(lhs, w);
}

}  // namespace

bool is_coset_representative(std::span<const Letter> core, std::span<const Letter> w) {
  if (core.empty()) throw Error(ErrorKind::InvalidInput, "coset of the trivial subgroup");
  for (int sign : {+1, -1}) {
    const std::size_t len = reduced_length_after(core, sign, w);
    if (len < w.size()) return false;
    if (len == w.size()) {
      const Word other = power_times(core, sign, w);
      if (lex_less(other, w)) return false;
    }
  }
  return true;
}

std::vector<Word> coset_representatives(int g, Letter j, int maxlen) {
  if (j == 0 || std::abs(j) > g) throw Error(ErrorKind::InvalidInput, "generator index out of range");
  std::vector<Word> out;
  Word prefix;
  for (int len = 0; len <= maxlen; ++len) {
    auto keep = [j](std::span<const Letter> p) { return p.size() > 1 || std::abs(p.front()) != std::abs(j); };
    walk_exact(g, len, prefix, keep, [&](std::span<const Letter> w) { out.emplace_back(w.begin(), w.end()); });
  }
  return out;
}

std::vector<Word> coset_representatives(int g, std::span<const Letter> core, int maxlen) {
  std::vector<Word> out;
  Word prefix;
  for (int len = 0; len <= maxlen; ++len) {
    // Non-representatives are closed under extension, so the test prunes whole subtrees.
    auto keep = [core](std::span<const Letter> p) { return is_coset_representative(core, p); };
    walk_exact(g, len, prefix, keep, [&](std::span<const Letter> w) {
      if (is_coset_representative(core, w)) out.emplace_back(w.begin(), w.end());
    });
  }
  return out;
}

}  // namespace schottky
