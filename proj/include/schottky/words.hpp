#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace schottky {

/// Generator index r in {+-1, ..., +-g}; -r denotes the inverse generator.
using Letter = int;

/// A sequence of letters. Functions documented as taking a reduced word assume
/// no adjacent (r, -r) pair.
using Word = std::vector<Letter>;

/// Canonical letter order 1 < -1 < 2 < -2 < ...
constexpr int letter_key(Letter r) { return r > 0 ? 2 * r - 1 : -2 * r; }

/// Inverse of letter_key.
constexpr Letter letter_from_key(int key) { return key % 2 == 1 ? (key + 1) / 2 : -(key / 2); }

/// Lexicographic comparison in the canonical letter order (no length priority).
bool lex_less(std::span<const Letter> lhs, std::span<const Letter> rhs);

/// Shortlex order: by length, then lexicographically. This is the enumeration order.
bool shortlex_less(std::span<const Letter> lhs, std::span<const Letter> rhs);

/// Free reduction.
Word reduce(std::span<const Letter> letters);

/// Formal inverse of a word: reversed with negated letters.
Word invert(std::span<const Letter> w);

/// Reduced product of two words.
Word multiply(std::span<const Letter> lhs, std::span<const Letter> rhs);

/// Strips wrap-around cancellations from a reduced word.
Word cyclic_reduce(std::span<const Letter> w);

/// Splits a reduced word as u c u^-1 with c cyclically reduced.
struct CyclicSplit {
  Word conjugator;  // u
  Word core;        // c
};
CyclicSplit cyclic_split(std::span<const Letter> w);

/// Lexicographically least rotation (canonical letter order).
Word minimal_rotation(std::span<const Letter> w);

/// True when w equals u^s for some word u and s >= 2.
bool is_proper_power(std::span<const Letter> w);

/// Number of reduced words of length exactly `length` in the free group of rank g.
std::uint64_t reduced_word_count(int g, int length);

/// Every reduced word of length <= maxlen, in shortlex order.
std::vector<Word> enumerate_words(int g, int maxlen);

/// Calls `visit` on every reduced word of length <= maxlen in shortlex order
/// without materializing the list.
void for_each_word(int g, int maxlen, const std::function<void(std::span<const Letter>)>& visit);

struct ConjugacyClass {
  Word representative;  // cyclically reduced, lexicographically least rotation
  bool primitive = true;
};

/// Primitive conjugacy classes with cyclically reduced length in [1, maxlen], in shortlex
/// order of their representatives. The classes of gamma and gamma^-1 are distinct entries.
std::vector<ConjugacyClass> primitive_conjugacy_classes(int g, int maxlen);

/// Canonical representative test for the coset <c> w, c cyclically reduced and nontrivial:
/// w is the shortest element of its coset, ties broken by lex order.
bool is_coset_representative(std::span<const Letter> core, std::span<const Letter> w);

/// Representatives of <L_j>\Gamma with length <= maxlen: reduced words whose first letter
/// is not +-j, in shortlex order.
std::vector<Word> coset_representatives(int g, Letter j, int maxlen);

/// Representatives of <c>\Gamma for a cyclically reduced word c, length <= maxlen.
std::vector<Word> coset_representatives(int g, std::span<const Letter> core, int maxlen);

}  // namespace schottky
