#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ffsym/coefficient.hpp"
#include "ffsym/dihedral.hpp"
#include "ffsym/key.hpp"
#include "ffsym/symbol.hpp"

namespace ffsym {

enum class Anchor {
    Sliding,  ///< pattern window may sit at any slot
    Suffix,   ///< pattern window is the end of the key
    Whole,    ///< two-term equivalence between a key and its image under a generator
};

struct RelationTerm {
    Key pattern;
    int weight = 0;
};

/// Homogeneous linear constraint on coefficients. Weights are integers: relations with
/// half-integer weights are stored multiplied through by `scale`.
struct Relation {
    std::string name;
    Anchor anchor = Anchor::Sliding;
    std::vector<RelationTerm> terms;
    int scale = 1;
    DihedralElement generator;  ///< only meaningful for Anchor::Whole

    int pattern_length() const noexcept { return terms.empty() ? 0 : terms.front().pattern.size(); }
    bool is_one_term() const noexcept { return terms.size() == 1; }
    std::size_t term_count() const noexcept { return anchor == Anchor::Whole ? 2 : terms.size(); }
};

/// triple 0, integ 0-2, final 0-25, cycle, flip (32 entries, in that order).
const std::vector<Relation>& catalog();

/// Throws Error(Usage) for an unknown name.
const Relation& find_relation(std::string_view name);

struct InstanceMember {
    Key key;
    int weight = 0;
};

struct RelationInstance {
    std::string relation;
    int loop = 0;
    int slot = 1;    ///< 1-based position of the pattern window
    Key context;     ///< letters outside the window; the whole key for Anchor::Whole
    std::vector<InstanceMember> members;
};

/// Valid slots for `rel` at `loop`, as a closed 1-based range. Empty (first > last)
/// when the pattern does not fit.
std::pair<int, int> slot_range(const Relation& rel, int loop) noexcept;

/// Splices every pattern into `context` at `slot`. For Anchor::Whole the context is
/// the full key and the slot must be 1. Throws Error(Range) on a bad slot or context.
RelationInstance instantiate(const Relation& rel, int loop, int slot, const Key& context);

/// Redraws allowed per instance before falling back to exact sampling from the set
/// of windows that touch a nonzero coefficient.
inline constexpr int kInstanceRetryBudget = 1000;

/// Draws `n` instances with uniformly random slot and context. Multi-term instances
/// always contain a member with a nonzero truth coefficient; Whole-anchored relations
/// get at most one instance per dihedral orbit. Deterministic in `seed`.
/// Throws Error(Data) when no instance can satisfy the filter.
std::vector<RelationInstance> generate_instances(const Relation& rel, int loop, std::size_t n,
                                                 const Symbol& truth, std::uint64_t seed);

/// Size of the exhaustive instance space (slots x contexts, or keys for Whole).
std::uint64_t instance_space_size(const Relation& rel, int loop) noexcept;

/// Visits every instance: all slots and contexts, or one instance per orbit for Whole.
void for_each_instance(const Relation& rel, int loop, const std::function<void(const RelationInstance&)>& visit);

/// Sum of weight x coefficient over the members.
Coefficient residual(const RelationInstance& instance, const Symbol& coefficients);
Coefficient residual(const RelationInstance& instance, std::span<const Coefficient> member_values);

/// Model output keyed by key; std::nullopt marks an unparseable prediction.
using KeyedPredictions = std::unordered_map<Key, std::optional<Coefficient>, KeyHash>;

struct RelationRates {
    std::size_t instances = 0;
    double satisfied = 0;   ///< predicted coefficients satisfy the relation
    double magnitudes = 0;  ///< satisfied and every magnitude correct
    double signs = 0;       ///< satisfied and every sign correct (zero counts as '+')
    double exact = 0;       ///< every coefficient correct
};

struct ScoreOptions {
    /// Replace predictions for trivially-zero member keys by 0 before scoring.
    bool force_trivial_zero = false;
};

/// Absent predictions count as zero; invalid ones fail every metric.
/// Throws Error(Range) on an empty instance list.
RelationRates score_instances(std::span<const RelationInstance> instances, const Symbol& truth,
                              const KeyedPredictions& predictions, ScoreOptions options = {});

/// `<relation-name>\t<slot>\t<key1>,<key2>,...` (no newline).
std::string format_instance(const RelationInstance& instance);
/// Inverse of format_instance; the loop is inferred from the key length.
RelationInstance parse_instance(std::string_view line);

}  // namespace ffsym
