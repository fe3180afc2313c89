#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "ffsym/coefficient.hpp"
#include "ffsym/key.hpp"

namespace ffsym {

using LetterPair = std::pair<Letter, Letter>;

/// Closure of {ad, da, de} under the dihedral group: the 12 ordered pairs that may
/// never sit in adjacent slots of a nonzero key. Sorted ascending.
const std::vector<LetterPair>& forbidden_pairs();

/// 6x6 table, allowed[x][y] is true when y may directly follow x.
const std::array<std::array<bool, kAlphabetSize>, kAlphabetSize>& allowed_transitions();

constexpr bool is_valid_first(Letter l) noexcept { return l <= Letter::C; }
constexpr bool is_valid_last(Letter l) noexcept { return l >= Letter::D; }

/// True when the adjacency or prefix/suffix rule forces the coefficient to zero.
bool is_trivial_zero(const Key& key) noexcept;

/// True when some adjacent pair inside `word` is forbidden (no prefix/suffix check).
bool has_forbidden_pair(const Key& word) noexcept;

/// Exact number of length-2L keys that are not trivial zeros, by transfer-matrix
/// path counting. Throws Error(Range) unless 1 <= loop <= 8.
Coefficient count_valid_keys(int loop);

/// Every length-2L key that is not a trivial zero, ascending.
std::vector<Key> enumerate_valid_keys(int loop);

}  // namespace ffsym
