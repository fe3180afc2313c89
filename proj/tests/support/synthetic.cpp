#include "synthetic.hpp"

#include <map>
#include <set>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "ffsym/dihedral.hpp"
#include "ffsym/relations.hpp"
#include "ffsym/rng.hpp"
#include "ffsym/trivial_zero.hpp"

namespace ffsym::testing {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using Row = std::map<int, Rational>;

struct NullSpace {
    std::vector<Key> representatives;
    std::unordered_map<Key, int, KeyHash> orbit_of;
    std::map<int, Row> pivots;  // reduced row echelon form
    std::vector<int> free_columns;
};

NullSpace solve(int loop) {
    NullSpace ns;
    for (const Key& k : enumerate_valid_keys(loop)) {
        if (ns.orbit_of.contains(k)) continue;
        const int id = static_cast<int>(ns.representatives.size());
        ns.representatives.push_back(canonical_representative(k));
        for (const Key& m : dihedral_orbit(k)) ns.orbit_of.emplace(m, id);
    }
    std::set<std::vector<std::pair<int, int>>> rows;
    for (const auto& rel : catalog()) {
        if (rel.anchor == Anchor::Whole) continue;  // built into the orbit variables
        for_each_instance(rel, loop, [&](const RelationInstance& inst) {
            std::map<int, int> acc;
            for (const auto& m : inst.members)
                if (auto it = ns.orbit_of.find(m.key); it != ns.orbit_of.end()) acc[it->second] += m.weight;
            std::vector<std::pair<int, int>> row;
            for (auto [c, w] : acc)
                if (w) row.emplace_back(c, w);
            if (!row.empty()) rows.insert(std::move(row));
        });
    }
    for (const auto& r : rows) {
        Row row;
        for (auto [c, w] : r) row[c] = w;
        for (const auto& [p, prow] : ns.pivots) {
            auto it = row.find(p);
            if (it == row.end()) continue;
            const Rational f = it->second;
            for (const auto& [c, w] : prow)
                if ((row[c] -= f * w) == 0) row.erase(c);
        }
        if (row.empty()) continue;
        const int p = row.begin()->first;
        const Rational lead = row.begin()->second;
        for (auto& [c, w] : row) w /= lead;
        for (auto& [q, qrow] : ns.pivots) {
            auto it = qrow.find(p);
            if (it == qrow.end()) continue;
            const Rational f = it->second;
            for (const auto& [c, w] : row)
                if ((qrow[c] -= f * w) == 0) qrow.erase(c);
        }
        ns.pivots.emplace(p, std::move(row));
    }
    for (int c = 0; c < static_cast<int>(ns.representatives.size()); ++c)
        if (!ns.pivots.contains(c)) ns.free_columns.push_back(c);
    return ns;
}

const NullSpace& cached(int loop) {
    static std::map<int, NullSpace> cache;
    auto it = cache.find(loop);
    if (it == cache.end()) it = cache.emplace(loop, solve(loop)).first;
    return it->second;
}

}  // namespace

int synthetic_dimension(int loop) { return static_cast<int>(cached(loop).free_columns.size()); }

Symbol synthetic_symbol(int loop, std::uint64_t seed) {
    const NullSpace& ns = cached(loop);
    Rng rng(seed);
    std::vector<Rational> x(ns.representatives.size());
    for (int f : ns.free_columns) x[f] = static_cast<int>(rng.below(21)) - 10;
    for (const auto& [p, row] : ns.pivots)
        for (const auto& [c, w] : row)
            if (c != p) x[p] -= w * x[c];
    boost::multiprecision::cpp_int scale = 1;
    for (const auto& v : x) scale = boost::multiprecision::lcm(scale, boost::multiprecision::denominator(v));
    std::vector<Element> elements;
    for (const auto& [key, id] : ns.orbit_of) {
        const Rational v = x[id] * scale;
        if (v != 0) elements.emplace_back(key, boost::multiprecision::numerator(v));
    }
    return Symbol(loop, std::move(elements));
}

}  // namespace ffsym::testing
