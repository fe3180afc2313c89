#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ffsym/coefficient.hpp"
#include "ffsym/key.hpp"

namespace ffsym {

using Element = std::pair<Key, Coefficient>;

/// Immutable sparse map Key -> Coefficient holding only nonzero entries of a
/// loop-L symbol. Entries are sorted by packed key; lookup is a binary search.
class Symbol {
public:
    Symbol() = default;

    /// Takes arbitrary elements, drops zeros, sorts. Throws Error(Data) on a key of the
    /// wrong length or on two different coefficients for one key.
    Symbol(int loop, std::vector<Element> elements);

    int loop() const noexcept { return loop_; }
    std::size_t size() const noexcept { return keys_.size(); }
    bool empty() const noexcept { return keys_.empty(); }

    /// Stored coefficient, or zero. Throws Error(Range) on a key-length mismatch.
    const Coefficient& lookup(const Key& key) const;
    const Coefficient& operator[](const Key& key) const { return lookup(key); }
    bool contains(const Key& key) const noexcept;

    std::span<const Key> keys() const noexcept { return keys_; }
    std::span<const Coefficient> coefficients() const noexcept { return coefficients_; }
    const Key& key_at(std::size_t i) const noexcept { return keys_[i]; }
    const Coefficient& coefficient_at(std::size_t i) const noexcept { return coefficients_[i]; }

    friend bool operator==(const Symbol&, const Symbol&) = default;

private:
    int loop_ = 0;
    std::vector<Key> keys_;
    std::vector<Coefficient> coefficients_;
};

/// The exactly known one- and two-loop symbols. Throws Error(Range) for other loops.
Symbol builtin_symbol(int loop);

}  // namespace ffsym
