#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace ffsym {

/// One of the six alphabet letters, ordered a < b < ... < f.
enum class Letter : std::uint8_t { A = 0, B, C, D, E, F };

inline constexpr int kAlphabetSize = 6;
inline constexpr int kMaxLoop = 8;
inline constexpr int kMaxKeyLength = 2 * kMaxLoop;

constexpr char to_char(Letter l) noexcept { return static_cast<char>('a' + static_cast<int>(l)); }
constexpr int index(Letter l) noexcept { return static_cast<int>(l); }
constexpr Letter letter_at_index(int i) noexcept { return static_cast<Letter>(i); }

/// A word over the alphabet, packed 3 bits per letter with the first letter in the
/// most significant position. For keys of equal length the packed order is the
/// lexicographic order.
class Key {
public:
    constexpr Key() noexcept = default;

    /// Unchecked construction from packed bits; `length` must be <= kMaxKeyLength.
    static constexpr Key from_packed(std::uint64_t bits, int length) noexcept {
        Key k;
        k.bits_ = bits;
        k.length_ = static_cast<std::uint8_t>(length);
        return k;
    }

    /// Builds a key of any length 0..16 (no parity check); used for patterns,
    /// prefixes and contexts as well as full keys.
    static Key from_letters(std::string_view letters);

    constexpr std::uint64_t packed() const noexcept { return bits_; }
    constexpr int size() const noexcept { return length_; }
    constexpr bool empty() const noexcept { return length_ == 0; }
    constexpr int loop() const noexcept { return length_ / 2; }

    constexpr Letter operator[](int i) const noexcept {
        return static_cast<Letter>((bits_ >> (3 * (length_ - 1 - i))) & 7u);
    }
    constexpr Letter front() const noexcept { return (*this)[0]; }
    constexpr Letter back() const noexcept { return (*this)[length_ - 1]; }

    Key substr(int pos, int count) const noexcept;
    Key with_letter(int pos, Letter l) const noexcept;
    Key erase_two(int i, int j) const noexcept;
    Key appended(Letter l) const noexcept {
        return from_packed((bits_ << 3) | static_cast<std::uint64_t>(l), length_ + 1);
    }

    std::string str() const;

    friend constexpr bool operator==(const Key&, const Key&) noexcept = default;
    friend constexpr std::strong_ordering operator<=>(const Key& a, const Key& b) noexcept {
        if (auto c = a.length_ <=> b.length_; c != 0) return c;
        return a.bits_ <=> b.bits_;
    }

private:
    std::uint64_t bits_ = 0;
    std::uint8_t length_ = 0;
};

/// Concatenation; the combined length must stay within kMaxKeyLength.
Key concat(const Key& head, const Key& tail) noexcept;

/// Strict parser for full keys: nonempty, even length <= 16, letters a-f.
/// Throws ParseError carrying the position of the first offending character.
Key parse_key(std::string_view text);
inline std::string format_key(const Key& key) { return key.str(); }

/// Number of distinct keys of length n (6^n).
constexpr std::uint64_t key_space_size(int n) noexcept {
    std::uint64_t r = 1;
    for (int i = 0; i < n; ++i) r *= kAlphabetSize;
    return r;
}

/// The key whose base-6 digits spell `rank` (letter a = digit 0).
Key key_from_rank(std::uint64_t rank, int length) noexcept;

struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
        std::uint64_t x = k.packed() * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(k.size());
        x ^= x >> 29;
        return static_cast<std::size_t>(x);
    }
};

}  // namespace ffsym
