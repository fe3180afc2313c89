#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ffsym/coefficient.hpp"
#include "ffsym/dihedral.hpp"
#include "ffsym/key.hpp"
#include "ffsym/relations.hpp"
#include "ffsym/symbol.hpp"

namespace ffsym {

/// The eight final-entry suffixes, in lexicographic order of their letters.
enum class QuadSuffix : std::uint8_t { BBBD, BBDD, BDBD, CDDD, DBBD, DBDD, DDDD, FBDD };
inline constexpr int kQuadCount = 8;

const std::array<QuadSuffix, kQuadCount>& all_quad_suffixes();
Key quad_letters(QuadSuffix q);
/// "Q:dddd" etc.
std::string quad_token(QuadSuffix q);
/// Accepts "Q:xxxx"; throws ParseError otherwise.
QuadSuffix parse_quad_token(std::string_view token);
std::optional<QuadSuffix> quad_from_letters(const Key& suffix) noexcept;

using Rational = boost::multiprecision::cpp_rational;

/// One term of a suffix reduction: coefficient of P.s gains weight * C[map(P).quad].
struct QuadTerm {
    DihedralElement prefix_map;
    QuadSuffix quad;
    Rational weight;
};

/// Exact linear reduction of every four-letter suffix to quad-suffixed terms, obtained by
/// Gaussian elimination over the suffix-anchored relations, their dihedral images and the
/// suffix-internal trivial-zero rules. Suffixes already in the dihedral orbit of a quad
/// suffix map to a single unit term.
class SuffixReducer {
public:
    /// Built from every suffix-anchored relation in the catalog.
    static const SuffixReducer& standard();
    /// Built from the suffix-anchored members of `relations` (others are ignored).
    explicit SuffixReducer(std::span<const Relation> relations);

    /// Terms for `suffix` (length 4), empty for a suffix that is always zero,
    /// nullopt when the relation set cannot reduce it.
    const std::optional<std::vector<QuadTerm>>& reduce(const Key& suffix) const;
    bool in_quad_orbit(const Key& suffix) const noexcept;

private:
    std::vector<std::optional<std::vector<QuadTerm>>> table_;  // indexed by packed suffix
    std::vector<bool> quad_orbit_;
};

struct QuadEntry {
    Key prefix;
    QuadSuffix quad;
    Coefficient coefficient;
};

/// Nonzero coefficients of quad-suffixed keys, one per dihedral orbit, sorted by (prefix, quad).
class QuadSymbol {
public:
    QuadSymbol() = default;
    /// Throws Error(Data) on a wrong prefix length, a prefix starting with d/e/f,
    /// a zero coefficient, or a duplicate entry.
    QuadSymbol(int loop, std::vector<QuadEntry> entries);

    int loop() const noexcept { return loop_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::span<const QuadEntry> entries() const noexcept { return entries_; }
    /// Zero when absent.
    const Coefficient& lookup(const Key& prefix, QuadSuffix quad) const;

    friend bool operator==(const QuadSymbol& a, const QuadSymbol& b) {
        if (a.loop_ != b.loop_ || a.entries_.size() != b.entries_.size()) return false;
        for (std::size_t i = 0; i < a.entries_.size(); ++i) {
            const auto &x = a.entries_[i], &y = b.entries_[i];
            if (x.prefix != y.prefix || x.quad != y.quad || x.coefficient != y.coefficient) return false;
        }
        return true;
    }

private:
    int loop_ = 0;
    std::vector<QuadEntry> entries_;
};

/// Lexicographically smallest quad-suffixed member of the key's dihedral orbit, if any.
std::optional<Key> quad_representative(const Key& key) noexcept;

/// Throws Error(Range) for L < 3 and Error(Relation) naming the first suffix that the
/// reducer cannot express through quad-suffixed terms.
QuadSymbol to_quad(const Symbol& symbol, const SuffixReducer& reducer = SuffixReducer::standard());

enum class ExpandStatus { Determined, Undetermined };

struct Expansion {
    ExpandStatus status = ExpandStatus::Undetermined;
    Coefficient value;  ///< meaningful only when determined
};

/// Reconstructs full-key coefficients. Keys the reducer cannot express, or whose
/// reconstruction is not an integer, are reported undetermined.
/// Throws Error(Range) when a target key has the wrong length.
std::vector<Expansion> expand_quad(const QuadSymbol& quad, std::span<const Key> targets,
                                   const SuffixReducer& reducer = SuffixReducer::standard());

/// Nonzero entries per suffix, indexed by QuadSuffix.
std::array<std::size_t, kQuadCount> quad_stats(const QuadSymbol& quad) noexcept;

/// `<prefix>\t<Q:xxxx>\t<coefficient>` lines, sorted by (prefix, token).
void write_quad(std::ostream& out, const QuadSymbol& quad);
/// Inverse of write_quad; accepts any order. Throws ParseError carrying the 1-based line.
QuadSymbol read_quad(std::istream& in);

}  // namespace ffsym
