#include "ffsym/rng.hpp"

#include <numeric>
#include <string>
#include <unordered_map>

#include "ffsym/error.hpp"

namespace ffsym {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char ch : tag) h = (h ^ ch) * 0x100000001B3ull;
    return mix64(seed ^ mix64(h));
}

std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t count) {
    if (count > n)
        throw Error(ErrorKind::Range, "cannot draw " + std::to_string(count) + " items from a pool of " + std::to_string(n));
    // partial Fisher-Yates over a virtual identity array
    std::unordered_map<std::size_t, std::size_t> moved;
    std::vector<std::size_t> out;
    out.reserve(count);
    auto at = [&](std::size_t i) {
        auto it = moved.find(i);
        return it == moved.end() ? i : it->second;
    };
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        const std::size_t vi = at(i), vj = at(j);
        moved[j] = vi;
        out.push_back(vj);
    }
    return out;
}

}  // namespace ffsym
