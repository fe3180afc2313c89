#include "ffsym/quad.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include "ffsym/error.hpp"
#include "ffsym/trivial_zero.hpp"

namespace ffsym {

namespace {

constexpr int kSuffixLength = 4;
constexpr std::size_t kSuffixSpace = 1296;  // 6^4

constexpr const char* kQuadLetters[kQuadCount] = {"bbbd", "bbdd", "bdbd", "cddd", "dbbd", "dbdd", "dddd", "fbdd"};

std::size_t suffix_index(const Key& suffix) noexcept {
    std::size_t r = 0;
    for (int i = 0; i < suffix.size(); ++i) r = r * kAlphabetSize + static_cast<std::size_t>(index(suffix[i]));
    return r;
}

Key suffix_of(const Key& key) { return key.substr(key.size() - kSuffixLength, kSuffixLength); }
Key prefix_of(const Key& key) { return key.substr(0, key.size() - kSuffixLength); }

bool suffix_is_zero(const Key& suffix) noexcept {
    return !is_valid_last(suffix.back()) || has_forbidden_pair(suffix);
}

using Row = std::map<int, Rational>;  // column -> weight

}  // namespace

const std::array<QuadSuffix, kQuadCount>& all_quad_suffixes() {
    static const std::array<QuadSuffix, kQuadCount> all = [] {
        std::array<QuadSuffix, kQuadCount> a{};
        for (int i = 0; i < kQuadCount; ++i) a[i] = static_cast<QuadSuffix>(i);
        return a;
    }();
    return all;
}

Key quad_letters(QuadSuffix q) { return Key::from_letters(kQuadLetters[static_cast<int>(q)]); }

std::string quad_token(QuadSuffix q) { return std::string("Q:") + kQuadLetters[static_cast<int>(q)]; }

QuadSuffix parse_quad_token(std::string_view token) {
    for (int i = 0; i < kQuadCount; ++i)
        if (token.size() == 6 && token.substr(0, 2) == "Q:" && token.substr(2) == kQuadLetters[i])
            return static_cast<QuadSuffix>(i);
    throw ParseError("unknown quad token '" + std::string(token) + "'");
}

std::optional<QuadSuffix> quad_from_letters(const Key& suffix) noexcept {
    if (suffix.size() != kSuffixLength) return std::nullopt;
    for (int i = 0; i < kQuadCount; ++i)
        if (suffix.packed() == Key::from_letters(kQuadLetters[i]).packed()) return static_cast<QuadSuffix>(i);
    return std::nullopt;
}

SuffixReducer::SuffixReducer(std::span<const Relation> relations) : table_(kSuffixSpace), quad_orbit_(kSuffixSpace) {
    // Quad-orbit suffixes t = g(q) resolve directly: C[P.t] = C[g^-1(P).q].
    std::vector<std::optional<QuadTerm>> direct(kSuffixSpace);
    for (QuadSuffix q : all_quad_suffixes())
        for (const auto& g : dihedral_group()) {
            const std::size_t t = suffix_index(g(quad_letters(q)));
            quad_orbit_[t] = true;
            if (!direct[t]) direct[t] = QuadTerm{g.inverse(), q, Rational(1)};
        }

    // Column rank: non-quad-orbit suffixes first so elimination expresses them through
    // quad-orbit ones.
    std::vector<int> rank(kSuffixSpace), column_of_rank;
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t t = 0; t < kSuffixSpace; ++t)
            if (quad_orbit_[t] == (pass == 1) && !suffix_is_zero(key_from_rank(t, kSuffixLength))) {
                rank[t] = static_cast<int>(column_of_rank.size());
                column_of_rank.push_back(static_cast<int>(t));
            }

    std::map<int, Row> pivots;  // pivot rank -> fully reduced row keyed by rank
    auto insert = [&](Row row) {
        for (auto& [p, prow] : pivots) {
            auto it = row.find(p);
            if (it == row.end()) continue;
            const Rational f = it->second;
            for (const auto& [c, w] : prow) {
                Rational& v = row[c];
                v -= f * w;
                if (v == 0) row.erase(c);
            }
        }
        if (row.empty()) return;
        const int p = row.begin()->first;
        const Rational lead = row.begin()->second;
        for (auto& [c, w] : row) w /= lead;
        for (auto& [q, qrow] : pivots) {
            auto it = qrow.find(p);
            if (it == qrow.end()) continue;
            const Rational f = it->second;
            for (const auto& [c, w] : row) {
                Rational& v = qrow[c];
                v -= f * w;
                if (v == 0) qrow.erase(c);
            }
        }
        pivots.emplace(p, std::move(row));
    };

    for (const auto& rel : relations) {
        if (rel.anchor != Anchor::Suffix || rel.pattern_length() > kSuffixLength) continue;
        const int pad = kSuffixLength - rel.pattern_length();
        for (const auto& g : dihedral_group())
            for (std::uint64_t u = 0; u < key_space_size(pad); ++u) {
                const Key head = key_from_rank(u, pad);
                Row row;
                for (const auto& term : rel.terms) {
                    const Key t = concat(head, g(term.pattern));
                    if (suffix_is_zero(t)) continue;
                    Rational& v = row[rank[suffix_index(t)]];
                    v += term.weight;
                    if (v == 0) row.erase(rank[suffix_index(t)]);
                }
                if (!row.empty()) insert(std::move(row));
            }
    }

    for (std::size_t t = 0; t < kSuffixSpace; ++t) {
        if (suffix_is_zero(key_from_rank(t, kSuffixLength))) {
            table_[t] = std::vector<QuadTerm>{};
            continue;
        }
        if (quad_orbit_[t]) {
            table_[t] = std::vector<QuadTerm>{*direct[t]};
            continue;
        }
        auto it = pivots.find(rank[t]);
        if (it == pivots.end()) continue;
        std::vector<QuadTerm> terms;
        bool reducible = true;
        for (const auto& [c, w] : it->second) {
            if (c == rank[t]) continue;
            const int col = column_of_rank[c];
            if (!quad_orbit_[col]) {
                reducible = false;
                break;
            }
            QuadTerm term = *direct[col];
            term.weight = -w;
            terms.push_back(std::move(term));
        }
        if (reducible) table_[t] = std::move(terms);
    }
}

const SuffixReducer& SuffixReducer::standard() {
    static const SuffixReducer reducer(catalog());
    return reducer;
}

const std::optional<std::vector<QuadTerm>>& SuffixReducer::reduce(const Key& suffix) const {
    if (suffix.size() != kSuffixLength) throw Error(ErrorKind::Range, "suffix must have four letters");
    return table_[suffix_index(suffix)];
}

bool SuffixReducer::in_quad_orbit(const Key& suffix) const noexcept {
    return suffix.size() == kSuffixLength && quad_orbit_[suffix_index(suffix)];
}

QuadSymbol::QuadSymbol(int loop, std::vector<QuadEntry> entries) : loop_(loop), entries_(std::move(entries)) {
    if (loop < 3 || loop > kMaxLoop) throw Error(ErrorKind::Range, "quad form needs 3 <= L <= 8");
    for (const auto& e : entries_) {
        if (e.prefix.size() != 2 * loop - kSuffixLength)
            throw Error(ErrorKind::Data, "quad prefix " + e.prefix.str() + " has wrong length for loop " + std::to_string(loop));
        if (!is_valid_first(e.prefix.front()))
            throw Error(ErrorKind::Data, "quad prefix " + e.prefix.str() + " starts with a trivially-zero letter");
        if (e.coefficient == 0) throw Error(ErrorKind::Data, "zero coefficient in quad symbol");
    }
    std::sort(entries_.begin(), entries_.end(), [](const QuadEntry& a, const QuadEntry& b) {
        return a.prefix != b.prefix ? a.prefix < b.prefix : a.quad < b.quad;
    });
    for (std::size_t i = 1; i < entries_.size(); ++i)
        if (entries_[i].prefix == entries_[i - 1].prefix && entries_[i].quad == entries_[i - 1].quad)
            throw Error(ErrorKind::Data, "duplicate quad entry " + entries_[i].prefix.str() + " " + quad_token(entries_[i].quad));
}

const Coefficient& QuadSymbol::lookup(const Key& prefix, QuadSuffix quad) const {
    static const Coefficient zero = 0;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{prefix, quad},
                               [](const QuadEntry& e, const std::pair<Key, QuadSuffix>& k) {
                                   return e.prefix != k.first ? e.prefix < k.first : e.quad < k.second;
                               });
    if (it != entries_.end() && it->prefix == prefix && it->quad == quad) return it->coefficient;
    return zero;
}

std::optional<Key> quad_representative(const Key& key) noexcept {
    if (key.size() < kSuffixLength) return std::nullopt;
    std::optional<Key> best;
    for (const auto& g : dihedral_group()) {
        const Key image = g(key);
        if (quad_from_letters(suffix_of(image)) && (!best || image < *best)) best = image;
    }
    return best;
}

QuadSymbol to_quad(const Symbol& symbol, const SuffixReducer& reducer) {
    if (symbol.loop() < 3) throw Error(ErrorKind::Range, "quad form needs L >= 3");
    std::vector<QuadEntry> entries;
    for (std::size_t i = 0; i < symbol.size(); ++i) {
        const Key& key = symbol.key_at(i);
        const Key suffix = suffix_of(key);
        if (!reducer.in_quad_orbit(suffix)) {
            if (!reducer.reduce(suffix))
                throw Error(ErrorKind::Relation, "suffix " + suffix.str() + " of " + key.str() +
                                                     " is irreducible under the final-entry relations");
            continue;
        }
        if (quad_representative(key) != key) continue;
        entries.push_back({prefix_of(key), *quad_from_letters(suffix), symbol.coefficient_at(i)});
    }
    return QuadSymbol(symbol.loop(), std::move(entries));
}

std::vector<Expansion> expand_quad(const QuadSymbol& quad, std::span<const Key> targets, const SuffixReducer& reducer) {
    std::vector<Expansion> out;
    out.reserve(targets.size());
    auto quad_value = [&](const Key& prefix, QuadSuffix q) -> Coefficient {
        const Key rep = *quad_representative(concat(prefix, quad_letters(q)));
        return quad.lookup(prefix_of(rep), *quad_from_letters(suffix_of(rep)));
    };
    for (const Key& key : targets) {
        if (key.size() != 2 * quad.loop())
            throw Error(ErrorKind::Range, "target " + key.str() + " does not match loop " + std::to_string(quad.loop()));
        if (is_trivial_zero(key)) {
            out.push_back({ExpandStatus::Determined, 0});
            continue;
        }
        const auto& terms = reducer.reduce(suffix_of(key));
        if (!terms) {
            out.push_back({});
            continue;
        }
        const Key prefix = prefix_of(key);
        Rational sum = 0;
        for (const auto& t : *terms) {
            const Coefficient c = quad_value(t.prefix_map(prefix), t.quad);
            if (c != 0) sum += t.weight * c;
        }
        if (boost::multiprecision::denominator(sum) != 1) {
            out.push_back({});
            continue;
        }
        out.push_back({ExpandStatus::Determined, boost::multiprecision::numerator(sum)});
    }
    return out;
}

std::array<std::size_t, kQuadCount> quad_stats(const QuadSymbol& quad) noexcept {
    std::array<std::size_t, kQuadCount> counts{};
    for (const auto& e : quad.entries()) ++counts[static_cast<int>(e.quad)];
    return counts;
}

void write_quad(std::ostream& out, const QuadSymbol& quad) {
    for (const auto& e : quad.entries())
        out << e.prefix.str() << '\t' << quad_token(e.quad) << '\t' << to_decimal(e.coefficient) << '\n';
}

QuadSymbol read_quad(std::istream& in) {
    std::vector<QuadEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    int loop = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw ParseError("quad line needs three tab-separated fields", line_no);
        try {
            const Key prefix = Key::from_letters(std::string_view(line).substr(0, t1));
            const int l = (prefix.size() + kSuffixLength) / 2;
            if (loop == 0) loop = l;
            if (l != loop || prefix.size() % 2) throw ParseError("inconsistent prefix length", line_no);
            entries.push_back({prefix, parse_quad_token(std::string_view(line).substr(t1 + 1, t2 - t1 - 1)),
                               parse_decimal(std::string_view(line).substr(t2 + 1))});
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")", line_no);
        }
    }
    if (entries.empty()) return {};
    return QuadSymbol(loop, std::move(entries));
}

}  // namespace ffsym
