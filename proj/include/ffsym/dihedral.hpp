#pragma once

#include <array>
#include <string>
#include <vector>

#include "ffsym/key.hpp"

namespace ffsym {

/// A letter permutation from the order-6 dihedral group generated by cycle and flip.
class DihedralElement {
public:
    constexpr DihedralElement() noexcept : image_{Letter::A, Letter::B, Letter::C, Letter::D, Letter::E, Letter::F} {}
    constexpr explicit DihedralElement(std::array<Letter, kAlphabetSize> image) noexcept : image_(image) {}

    static DihedralElement identity() noexcept { return {}; }
    /// {a,b,c,d,e,f} -> {b,c,a,e,f,d}
    static DihedralElement cycle() noexcept;
    /// {a,b,c,d,e,f} -> {b,a,c,e,d,f}
    static DihedralElement flip() noexcept;

    constexpr Letter operator()(Letter l) const noexcept { return image_[index(l)]; }
    Key operator()(const Key& key) const noexcept;

    /// (*this after other)(x) = (*this)(other(x))
    DihedralElement after(const DihedralElement& other) const noexcept;
    DihedralElement inverse() const noexcept;

    /// Image of "abcdef", e.g. "bcaefd" for cycle.
    std::string str() const;

    friend constexpr bool operator==(const DihedralElement&, const DihedralElement&) noexcept = default;

private:
    std::array<Letter, kAlphabetSize> image_;
};

/// All six elements in a fixed order: id, c, c^2, f, f.c, f.c^2.
const std::array<DihedralElement, 6>& dihedral_group();

inline Key cycle(const Key& k) noexcept { return DihedralElement::cycle()(k); }
inline Key flip(const Key& k) noexcept { return DihedralElement::flip()(k); }

/// Distinct images of `key` under the group, sorted ascending (1 to 6 members).
std::vector<Key> dihedral_orbit(const Key& key);

/// Lexicographically smallest member of the orbit.
Key canonical_representative(const Key& key) noexcept;

}  // namespace ffsym
