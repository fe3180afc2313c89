#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffsym/key.hpp"
#include "ffsym/quad.hpp"
#include "ffsym/rng.hpp"
#include "ffsym/symbol.hpp"
#include "ffsym/tokenizer.hpp"

namespace ffsym {

/// Sort key for canonical output order: (loop, packed key, tag).
struct MetaKey {
    int loop = 0;
    std::uint64_t packed = 0;
    std::uint32_t tag = 0;
    friend auto operator<=>(const MetaKey&, const MetaKey&) = default;
};

/// Input and target held as space-joined token text.
struct DatasetExample {
    std::string input;
    std::string target;
    MetaKey meta;
};

struct DatasetHeader {
    std::string task;
    int loop = 0;
    std::uint64_t seed = 0;
    std::string variant;
};

struct Dataset {
    DatasetHeader header;
    std::vector<DatasetExample> train;
    std::vector<DatasetExample> test;
};

enum class ZeroPolicy { Uniform, Biased };

struct SplitSpec {
    std::optional<std::size_t> train;  ///< nullopt: everything not in test
    std::size_t test = 0;
    std::uint64_t seed = 0;
    ZeroPolicy zeros = ZeroPolicy::Uniform;
    double trivial_fraction = 0.05;  ///< share of trivial zeros under ZeroPolicy::Biased
    SignPosition sign = SignPosition::First;
};

/// `count` distinct zero-coefficient keys at the symbol's loop. Uniform draws from all
/// zero keys; Biased takes floor(trivial_fraction * count) trivial zeros and fills the rest
/// with zeros that pass the trivial-zero rules. Throws Error(Range) if a pool is too small.
std::vector<Key> sample_zero_keys(const Symbol& symbol, std::size_t count, ZeroPolicy policy,
                                  double trivial_fraction, Rng& rng);

/// Uniform over keys that are not trivial zeros.
Key sample_valid_key(int loop, Rng& rng);

enum class ZeroNonzeroTarget { Label, Coefficient };

/// Every nonzero element plus as many zeros, split with equal classes on both sides
/// (train and test sizes must be even). Label targets are "+ 1" / "+ 0".
Dataset make_zero_nonzero(const Symbol& symbol, const SplitSpec& spec,
                          ZeroNonzeroTarget target = ZeroNonzeroTarget::Label);

enum class Representation { Full, Quad };
enum class ValueMode { Plain, MagnitudeOnly, SignOnly };

std::string_view to_string(ValueMode mode) noexcept;
ValueMode parse_value_mode(std::string_view text);

/// Nonzero elements as key -> coefficient pairs. SignOnly targets are +-1.
Dataset make_coeff_from_key(const Symbol& symbol, const SplitSpec& spec, ValueMode mode = ValueMode::Plain);
Dataset make_coeff_from_key(const QuadSymbol& quad, const SplitSpec& spec, ValueMode mode = ValueMode::Plain);

struct MixedLoopSet {
    Dataset low;      ///< all loop-L nonzero elements plus as many zeros
    Dataset high;     ///< as many loop-(L+1) nonzero elements plus as many zeros
    Dataset merged;   ///< train = low.train + high.train, test = low.test + high.test
    Dataset control;  ///< loop-(L+1) only, train as large as merged.train, test = high.test
};

/// Coefficient targets; uniform zero sampling; per-loop test size spec.test.
/// spec.train is ignored (per-loop train is whatever remains of the low-loop set).
MixedLoopSet make_mixed_loop(const Symbol& low, const Symbol& high, const SplitSpec& spec);

struct StrikePair {
    int first;
    int second;
};

/// Position pairs i < j in lexicographic order, keeping j - i <= max_distance when given.
/// Throws Error(Range) unless 1 <= max_distance <= length - 1.
std::vector<StrikePair> strike_pairs(int length, std::optional<int> max_distance = std::nullopt);
/// Keys obtained by deleting each strike pair from `key` (length >= 4).
std::vector<Key> strike_parents(const Key& key, std::optional<int> max_distance = std::nullopt);
/// 2kL - k(k+1)/2, or L(2L-1) for the full set.
std::size_t strike_parent_count(int loop, std::optional<int> max_distance = std::nullopt);

enum class StrikeVariant { Plain, Shuffled, Sorted, SortedUnique, SignsOnly, MagnitudesOnly, ZeroNonzero };

std::string_view to_string(StrikeVariant v) noexcept;
/// Throws Error(Usage) for an unknown name.
StrikeVariant parse_strike_variant(std::string_view text);

struct StrikeoutConfig {
    std::optional<int> max_distance;
    StrikeVariant variant = StrikeVariant::Plain;
    std::uint64_t seed = 0;
    SignPosition sign = SignPosition::First;
};

/// Parent coefficients of `child` against `parents`, after the variant transform.
std::vector<Coefficient> strikeout_input(const Key& child, const Symbol& parents, const StrikeoutConfig& config);
DatasetExample strikeout_example(const Key& child, const Symbol& child_symbol, const Symbol& parents,
                                 const StrikeoutConfig& config);

/// Children are held by key; examples are rebuilt on demand.
struct StrikeoutSet {
    DatasetHeader header;
    StrikeoutConfig config;
    std::size_t candidates = 0;  ///< examples before deduplication
    std::vector<Key> train;
    std::vector<Key> test;
};

/// Every nonzero child, transformed, deduplicated on (input, target) keeping the first child
/// in key order, then split.
StrikeoutSet make_strikeout(const Symbol& child, const Symbol& parents, const StrikeoutConfig& config,
                            const SplitSpec& spec);

/// Removes repeated (input, target) pairs, keeping first occurrences in place.
void dedup(std::vector<DatasetExample>& examples);

/// `#task=<name> loop=<L> seed=<s> variant=<v>`
std::string format_header(const DatasetHeader& header);
/// Throws ParseError.
DatasetHeader parse_header(std::string_view line);
void write_dataset(std::ostream& out, const DatasetHeader& header, std::span<const DatasetExample> examples);

}  // namespace ffsym
