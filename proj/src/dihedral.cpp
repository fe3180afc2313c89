#include "ffsym/dihedral.hpp"

#include <algorithm>

namespace ffsym {

DihedralElement DihedralElement::cycle() noexcept {
    using enum Letter;
    return DihedralElement({B, C, A, E, F, D});
}

DihedralElement DihedralElement::flip() noexcept {
    using enum Letter;
    return DihedralElement({B, A, C, E, D, F});
}

Key DihedralElement::operator()(const Key& key) const noexcept {
    std::uint64_t bits = 0;
    const int n = key.size();
    for (int i = 0; i < n; ++i) bits = (bits << 3) | static_cast<std::uint64_t>((*this)(key[i]));
    return Key::from_packed(bits, n);
}

DihedralElement DihedralElement::after(const DihedralElement& other) const noexcept {
    std::array<Letter, kAlphabetSize> img{};
    for (int i = 0; i < kAlphabetSize; ++i) img[i] = (*this)(other(letter_at_index(i)));
    return DihedralElement(img);
}

DihedralElement DihedralElement::inverse() const noexcept {
    std::array<Letter, kAlphabetSize> img{};
    for (int i = 0; i < kAlphabetSize; ++i) img[index(image_[i])] = letter_at_index(i);
    return DihedralElement(img);
}

std::string DihedralElement::str() const {
    std::string s;
    for (Letter l : image_) s.push_back(to_char(l));
    return s;
}

const std::array<DihedralElement, 6>& dihedral_group() {
    static const std::array<DihedralElement, 6> group = [] {
        const auto c = DihedralElement::cycle();
        const auto f = DihedralElement::flip();
        const auto c2 = c.after(c);
        return std::array<DihedralElement, 6>{DihedralElement::identity(), c, c2, f, f.after(c), f.after(c2)};
    }();
    return group;
}

std::vector<Key> dihedral_orbit(const Key& key) {
    std::vector<Key> orbit;
    orbit.reserve(6);
    for (const auto& g : dihedral_group()) orbit.push_back(g(key));
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    return orbit;
}

Key canonical_representative(const Key& key) noexcept {
    Key best = key;
    for (const auto& g : dihedral_group()) best = std::min(best, g(key));
    return best;
}

}  // namespace ffsym
