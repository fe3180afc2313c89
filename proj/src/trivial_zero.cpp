#include "ffsym/trivial_zero.hpp"

#include <algorithm>
#include <set>

#include "ffsym/dihedral.hpp"
#include "ffsym/error.hpp"

namespace ffsym {

const std::vector<LetterPair>& forbidden_pairs() {
    static const std::vector<LetterPair> pairs = [] {
        using enum Letter;
        std::set<LetterPair> closure{{A, D}, {D, A}, {D, E}};
        std::vector<LetterPair> frontier(closure.begin(), closure.end());
        while (!frontier.empty()) {
            const LetterPair p = frontier.back();
            frontier.pop_back();
            for (const auto& g : {DihedralElement::cycle(), DihedralElement::flip()}) {
                const LetterPair q{g(p.first), g(p.second)};
                if (closure.insert(q).second) frontier.push_back(q);
            }
        }
        return std::vector<LetterPair>(closure.begin(), closure.end());
    }();
    return pairs;
}

const std::array<std::array<bool, kAlphabetSize>, kAlphabetSize>& allowed_transitions() {
    static const auto table = [] {
        std::array<std::array<bool, kAlphabetSize>, kAlphabetSize> t{};
        for (auto& row : t) row.fill(true);
        for (const auto& [x, y] : forbidden_pairs()) t[index(x)][index(y)] = false;
        return t;
    }();
    return table;
}

bool has_forbidden_pair(const Key& word) noexcept {
    const auto& allowed = allowed_transitions();
    for (int i = 0; i + 1 < word.size(); ++i)
        if (!allowed[index(word[i])][index(word[i + 1])]) return true;
    return false;
}

bool is_trivial_zero(const Key& key) noexcept {
    if (key.empty()) return true;
    return !is_valid_first(key.front()) || !is_valid_last(key.back()) || has_forbidden_pair(key);
}

Coefficient count_valid_keys(int loop) {
    if (loop < 1 || loop > kMaxLoop)
        throw Error(ErrorKind::Range, "loop order " + std::to_string(loop) + " outside 1.." + std::to_string(kMaxLoop));
    const auto& allowed = allowed_transitions();
    // paths[x] = number of admissible words of the current length ending in x
    std::array<Coefficient, kAlphabetSize> paths;
    for (int x = 0; x < kAlphabetSize; ++x) paths[x] = is_valid_first(letter_at_index(x)) ? 1 : 0;
    for (int step = 1; step < 2 * loop; ++step) {
        std::array<Coefficient, kAlphabetSize> next;
        for (int y = 0; y < kAlphabetSize; ++y)
            for (int x = 0; x < kAlphabetSize; ++x)
                if (allowed[x][y]) next[y] += paths[x];
        paths = std::move(next);
    }
    Coefficient total = 0;
    for (int x = 0; x < kAlphabetSize; ++x)
        if (is_valid_last(letter_at_index(x))) total += paths[x];
    return total;
}

std::vector<Key> enumerate_valid_keys(int loop) {
    if (loop < 1 || loop > kMaxLoop)
        throw Error(ErrorKind::Range, "loop order " + std::to_string(loop) + " outside 1.." + std::to_string(kMaxLoop));
    const auto& allowed = allowed_transitions();
    const int n = 2 * loop;
    std::vector<Key> out;
    std::vector<Key> stack;
    for (int x = kAlphabetSize - 1; x >= 0; --x)
        if (is_valid_first(letter_at_index(x))) stack.push_back(Key().appended(letter_at_index(x)));
    // depth-first in reverse letter order so keys come out ascending
    while (!stack.empty()) {
        const Key w = stack.back();
        stack.pop_back();
        if (w.size() == n) {
            if (is_valid_last(w.back())) out.push_back(w);
            continue;
        }
        const int last = index(w.back());
        for (int y = kAlphabetSize - 1; y >= 0; --y)
            if (allowed[last][y]) stack.push_back(w.appended(letter_at_index(y)));
    }
    return out;
}

}  // namespace ffsym
