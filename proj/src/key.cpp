#include "ffsym/key.hpp"

#include "ffsym/error.hpp"

namespace ffsym {

namespace {

std::uint64_t low_mask(int letters) {
    return letters >= 21 ? ~0ull : ((1ull << (3 * letters)) - 1);
}

}  // namespace

Key Key::from_letters(std::string_view letters) {
    if (letters.size() > static_cast<std::size_t>(kMaxKeyLength))
        throw ParseError("word longer than " + std::to_string(kMaxKeyLength) + " letters",
                         static_cast<std::size_t>(kMaxKeyLength));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < letters.size(); ++i) {
        const char ch = letters[i];
        if (ch < 'a' || ch > 'f')
            throw ParseError("illegal character '" + std::string(1, ch) + "' at position " + std::to_string(i), i);
        bits = (bits << 3) | static_cast<std::uint64_t>(ch - 'a');
    }
    return from_packed(bits, static_cast<int>(letters.size()));
}

Key Key::substr(int pos, int count) const noexcept {
    const int tail = length_ - pos - count;
    return from_packed((bits_ >> (3 * tail)) & low_mask(count), count);
}

Key Key::with_letter(int pos, Letter l) const noexcept {
    const int shift = 3 * (length_ - 1 - pos);
    const std::uint64_t cleared = bits_ & ~(7ull << shift);
    return from_packed(cleared | (static_cast<std::uint64_t>(l) << shift), length_);
}

Key Key::erase_two(int i, int j) const noexcept {
    Key out;
    for (int p = 0; p < length_; ++p)
        if (p != i && p != j) out = out.appended((*this)[p]);
    return out;
}

std::string Key::str() const {
    std::string s(static_cast<std::size_t>(length_), 'a');
    for (int i = 0; i < length_; ++i) s[static_cast<std::size_t>(i)] = to_char((*this)[i]);
    return s;
}

Key concat(const Key& head, const Key& tail) noexcept {
    return Key::from_packed((head.packed() << (3 * tail.size())) | tail.packed(), head.size() + tail.size());
}

Key parse_key(std::string_view text) {
    if (text.empty()) throw ParseError("empty key", 0);
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (i >= static_cast<std::size_t>(kMaxKeyLength))
            throw ParseError("key longer than " + std::to_string(kMaxKeyLength) + " letters", i);
        const char ch = text[i];
        if (ch < 'a' || ch > 'f')
            throw ParseError("illegal character '" + std::string(1, ch) + "' at position " + std::to_string(i), i);
    }
    if (text.size() % 2 != 0)
        throw ParseError("odd key length " + std::to_string(text.size()), text.size() - 1);
    return Key::from_letters(text);
}

Key key_from_rank(std::uint64_t rank, int length) noexcept {
    std::uint64_t bits = 0;
    for (int i = 0; i < length; ++i) {
        bits |= (rank % kAlphabetSize) << (3 * i);
        rank /= kAlphabetSize;
    }
    return Key::from_packed(bits, length);
}

}  // namespace ffsym
