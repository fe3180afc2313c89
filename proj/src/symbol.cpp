#include "ffsym/symbol.hpp"

#include <algorithm>
#include <numeric>

#include "ffsym/error.hpp"

namespace ffsym {

namespace {

const Coefficient& zero_coefficient() {
    static const Coefficient zero = 0;
    return zero;
}

}  // namespace

Symbol::Symbol(int loop, std::vector<Element> elements) : loop_(loop) {
    if (loop < 1 || loop > kMaxLoop)
        throw Error(ErrorKind::Range, "loop order " + std::to_string(loop) + " outside 1.." + std::to_string(kMaxLoop));
    std::sort(elements.begin(), elements.end(),
              [](const Element& a, const Element& b) { return a.first < b.first; });
    keys_.reserve(elements.size());
    coefficients_.reserve(elements.size());
    for (auto& [key, value] : elements) {
        if (key.size() != 2 * loop)
            throw Error(ErrorKind::Data, "key " + key.str() + " has length " + std::to_string(key.size()) +
                                             ", expected " + std::to_string(2 * loop));
        if (!keys_.empty() && keys_.back() == key) {
            if (coefficients_.back() != value)
                throw Error(ErrorKind::Data, "conflicting coefficients for key " + key.str());
            continue;
        }
        if (value == 0) continue;
        keys_.push_back(key);
        coefficients_.push_back(std::move(value));
    }
}

const Coefficient& Symbol::lookup(const Key& key) const {
    if (key.size() != 2 * loop_)
        throw Error(ErrorKind::Range, "key " + key.str() + " does not match loop order " + std::to_string(loop_));
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return zero_coefficient();
    return coefficients_[static_cast<std::size_t>(it - keys_.begin())];
}

bool Symbol::contains(const Key& key) const noexcept {
    return std::binary_search(keys_.begin(), keys_.end(), key);
}

Symbol builtin_symbol(int loop) {
    std::vector<Element> elements;
    if (loop == 1) {
        for (const char* k : {"bd", "ce", "af", "bf", "cd", "ae"}) elements.emplace_back(parse_key(k), -2);
    } else if (loop == 2) {
        for (const char* k : {"bddd", "ceee", "afff", "bfff", "cddd", "aeee"}) elements.emplace_back(parse_key(k), 8);
        for (const char* k : {"bbbd", "ccce", "aaaf", "bbbf", "cccd", "aaae"}) elements.emplace_back(parse_key(k), 16);
    } else {
        throw Error(ErrorKind::Range, "no built-in symbol at loop " + std::to_string(loop) + " (only 1 and 2)");
    }
    return Symbol(loop, std::move(elements));
}

}  // namespace ffsym
