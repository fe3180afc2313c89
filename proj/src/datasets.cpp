#include "ffsym/datasets.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "ffsym/error.hpp"
#include "ffsym/trivial_zero.hpp"

namespace ffsym {

namespace {

// Keys up to this length are enumerated instead of rejection-sampled.
constexpr int kEnumerateLength = 8;

using WayTable = std::array<std::array<std::uint64_t, kAlphabetSize>, kMaxKeyLength>;

// ways[n][i][x]: valid completions of a length-n key whose letter i is x.
const std::array<WayTable, kMaxKeyLength + 1>& completion_table() {
    static const auto table = [] {
        std::array<WayTable, kMaxKeyLength + 1> t{};
        const auto& allowed = allowed_transitions();
        for (int n = 1; n <= kMaxKeyLength; ++n) {
            for (int x = 0; x < kAlphabetSize; ++x) t[n][n - 1][x] = is_valid_last(letter_at_index(x));
            for (int i = n - 2; i >= 0; --i)
                for (int x = 0; x < kAlphabetSize; ++x)
                    for (int y = 0; y < kAlphabetSize; ++y)
                        if (allowed[x][y]) t[n][i][x] += t[n][i + 1][y];
        }
        return t;
    }();
    return table;
}

std::uint64_t to_u64(const Coefficient& c) { return static_cast<std::uint64_t>(c); }

std::string coefficient_text(const Coefficient& c, SignPosition sign) {
    return join_tokens(encode_coefficient(c, sign));
}

DatasetExample key_example(const Key& key, std::string target) {
    return {join_tokens(encode_key(key)), std::move(target), {key.loop(), key.packed(), 0}};
}

void sort_by_meta(std::vector<DatasetExample>& v) {
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.meta < b.meta; });
}

Coefficient apply_mode(const Coefficient& c, ValueMode mode) {
    switch (mode) {
        case ValueMode::Plain: return c;
        case ValueMode::MagnitudeOnly: return magnitude(c);
        case ValueMode::SignOnly: return is_negative(c) ? -1 : 1;
    }
    return c;
}

/// Draws `count` distinct keys of length n accepted by `accept`, from a pool of `pool` keys.
template <class Accept, class Draw>
std::vector<Key> draw_distinct(int n, std::size_t count, std::uint64_t pool, Rng& rng, Accept accept, Draw draw) {
    if (count > pool)
        throw Error(ErrorKind::Range, "requested " + std::to_string(count) + " zero keys from a pool of " +
                                          std::to_string(pool));
    std::vector<Key> out;
    if (count == 0) return out;
    out.reserve(count);
    if (n <= kEnumerateLength) {
        std::vector<Key> all;
        for (std::uint64_t r = 0; r < key_space_size(n); ++r) {
            const Key k = key_from_rank(r, n);
            if (accept(k)) all.push_back(k);
        }
        for (std::size_t i : sample_indices(rng, all.size(), count)) out.push_back(all[i]);
        return out;
    }
    std::unordered_set<Key, KeyHash> chosen;
    chosen.reserve(count * 2);
    while (out.size() < count) {
        const Key k = draw();
        if (accept(k) && chosen.insert(k).second) out.push_back(k);
    }
    return out;
}

void check_even(std::size_t n, const char* what) {
    if (n % 2) throw Error(ErrorKind::Range, std::string(what) + " size must be even for a balanced split");
}

/// Per-class index lists: first `test` go to test, the next `train` to train.
struct ClassSplit {
    std::vector<std::size_t> test, train;
};

ClassSplit split_class(std::size_t n, std::size_t test, std::size_t train, Rng& rng) {
    if (test + train > n)
        throw Error(ErrorKind::Range, "split needs " + std::to_string(test + train) + " examples per class, have " +
                                          std::to_string(n));
    auto idx = sample_indices(rng, n, test + train);
    ClassSplit s;
    s.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(test));
    s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(test), idx.end());
    return s;
}

std::uint64_t fnv1a(std::string_view a, std::string_view b) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char ch : a) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001b3ull;
    h = (h ^ 0x1f) * 0x100000001b3ull;
    for (char ch : b) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001b3ull;
    return h;
}

}  // namespace

Key sample_valid_key(int loop, Rng& rng) {
    if (loop < 1 || loop > kMaxLoop) throw Error(ErrorKind::Range, "loop order out of range");
    const int n = 2 * loop;
    const auto& ways = completion_table()[n];
    const auto& allowed = allowed_transitions();
    std::uint64_t total = 0;
    for (int x = 0; x < 3; ++x) total += ways[0][x];
    std::uint64_t r = rng.below(total);
    Key key;
    int prev = -1;
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < kAlphabetSize; ++x) {
            if (i == 0 ? x >= 3 : !allowed[prev][x]) continue;
            if (r < ways[i][x]) {
                key = key.appended(letter_at_index(x));
                prev = x;
                break;
            }
            r -= ways[i][x];
        }
    return key;
}

std::vector<Key> sample_zero_keys(const Symbol& symbol, std::size_t count, ZeroPolicy policy, double trivial_fraction,
                                  Rng& rng) {
    const int loop = symbol.loop();
    const int n = 2 * loop;
    const std::uint64_t total = key_space_size(n);
    const std::uint64_t valid = to_u64(count_valid_keys(loop));
    std::uint64_t nonzero_valid = 0;
    for (const Key& k : symbol.keys()) nonzero_valid += !is_trivial_zero(k);
    const std::uint64_t nonzero_trivial = symbol.size() - nonzero_valid;

    auto draw_any = [&] { return key_from_rank(rng.below(total), n); };
    if (policy == ZeroPolicy::Uniform)
        return draw_distinct(n, count, total - symbol.size(), rng, [&](const Key& k) { return !symbol.contains(k); },
                             draw_any);

    if (trivial_fraction < 0 || trivial_fraction > 1) throw Error(ErrorKind::Range, "trivial fraction must be in [0,1]");
    const auto trivial = static_cast<std::size_t>(std::floor(trivial_fraction * static_cast<double>(count)));
    auto out = draw_distinct(
        n, trivial, total - valid - nonzero_trivial, rng,
        [&](const Key& k) { return is_trivial_zero(k) && !symbol.contains(k); }, draw_any);
    auto rest = draw_distinct(
        n, count - trivial, valid - nonzero_valid, rng,
        [&](const Key& k) { return !is_trivial_zero(k) && !symbol.contains(k); },
        [&] { return sample_valid_key(loop, rng); });
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

Dataset make_zero_nonzero(const Symbol& symbol, const SplitSpec& spec, ZeroNonzeroTarget target) {
    const std::size_t n = symbol.size();
    check_even(spec.test, "test");
    const std::size_t train = spec.train.value_or(2 * n - std::min(spec.test, 2 * n));
    check_even(train, "train");

    Rng zero_rng(derive_seed(spec.seed, "zeros"));
    const auto zeros = sample_zero_keys(symbol, n, spec.zeros, spec.trivial_fraction, zero_rng);
    Rng split_rng(derive_seed(spec.seed, "split"));
    const auto pos = split_class(n, spec.test / 2, train / 2, split_rng);
    const auto neg = split_class(n, spec.test / 2, train / 2, split_rng);

    auto nonzero_target = [&](std::size_t i) {
        return target == ZeroNonzeroTarget::Label ? std::string("+ 1") : coefficient_text(symbol.coefficient_at(i), spec.sign);
    };
    const std::string zero_target = coefficient_text(0, spec.sign);

    Dataset d;
    d.header = {"zero-nonzero", symbol.loop(), spec.seed,
                std::string(spec.zeros == ZeroPolicy::Uniform ? "uniform" : "biased") +
                    (target == ZeroNonzeroTarget::Label ? "-label" : "-coeff")};
    for (auto [src, dst] : {std::pair{&pos.test, &d.test}, std::pair{&pos.train, &d.train}})
        for (std::size_t i : *src) dst->push_back(key_example(symbol.key_at(i), nonzero_target(i)));
    for (auto [src, dst] : {std::pair{&neg.test, &d.test}, std::pair{&neg.train, &d.train}})
        for (std::size_t i : *src) dst->push_back(key_example(zeros[i], zero_target));
    sort_by_meta(d.train);
    sort_by_meta(d.test);
    return d;
}

std::string_view to_string(ValueMode mode) noexcept {
    switch (mode) {
        case ValueMode::Plain: return "plain";
        case ValueMode::MagnitudeOnly: return "magnitude";
        case ValueMode::SignOnly: return "sign";
    }
    return "?";
}

ValueMode parse_value_mode(std::string_view text) {
    for (auto m : {ValueMode::Plain, ValueMode::MagnitudeOnly, ValueMode::SignOnly})
        if (to_string(m) == text) return m;
    throw Error(ErrorKind::Usage, "unknown value mode '" + std::string(text) + "'");
}

namespace {

template <class MakeExample>
Dataset split_elements(std::size_t n, const SplitSpec& spec, DatasetHeader header, MakeExample make) {
    const std::size_t train = spec.train.value_or(n - std::min(spec.test, n));
    Rng rng(derive_seed(spec.seed, "split"));
    const auto s = split_class(n, spec.test, train, rng);
    Dataset d;
    d.header = std::move(header);
    for (std::size_t i : s.test) d.test.push_back(make(i));
    for (std::size_t i : s.train) d.train.push_back(make(i));
    sort_by_meta(d.train);
    sort_by_meta(d.test);
    return d;
}

}  // namespace

Dataset make_coeff_from_key(const Symbol& symbol, const SplitSpec& spec, ValueMode mode) {
    return split_elements(symbol.size(), spec, {"coeff", symbol.loop(), spec.seed, "full-" + std::string(to_string(mode))},
                          [&](std::size_t i) {
                              return key_example(symbol.key_at(i),
                                                 coefficient_text(apply_mode(symbol.coefficient_at(i), mode), spec.sign));
                          });
}

Dataset make_coeff_from_key(const QuadSymbol& quad, const SplitSpec& spec, ValueMode mode) {
    const auto entries = quad.entries();
    return split_elements(entries.size(), spec, {"coeff", quad.loop(), spec.seed, "quad-" + std::string(to_string(mode))},
                          [&](std::size_t i) {
                              const auto& e = entries[i];
                              return DatasetExample{join_tokens(encode_quad_key(e.prefix, e.quad)),
                                                    coefficient_text(apply_mode(e.coefficient, mode), spec.sign),
                                                    {quad.loop(), e.prefix.packed(), static_cast<std::uint32_t>(e.quad)}};
                          });
}

MixedLoopSet make_mixed_loop(const Symbol& low, const Symbol& high, const SplitSpec& spec) {
    if (high.loop() != low.loop() + 1) throw Error(ErrorKind::Data, "mixed-loop needs symbols at consecutive loops");
    check_even(spec.test, "test");
    const std::size_t n = low.size();
    const std::size_t half_test = spec.test / 2;
    if (half_test > n) throw Error(ErrorKind::Range, "test set larger than the low-loop symbol");
    const std::size_t per_loop_train = n - half_test;  // per class
    const std::size_t high_needed = half_test + 2 * per_loop_train;
    if (high.size() < high_needed)
        throw Error(ErrorKind::Range, "high-loop symbol has " + std::to_string(high.size()) + " nonzero elements, need " +
                                          std::to_string(high_needed));

    const std::string zero_target = coefficient_text(0, spec.sign);
    auto coeff = [&](const Symbol& s, std::size_t i) {
        return key_example(s.key_at(i), coefficient_text(s.coefficient_at(i), spec.sign));
    };

    MixedLoopSet m;
    const std::string variant = "uniform-coeff";
    m.low.header = {"mixed-low", low.loop(), spec.seed, variant};
    m.high.header = {"mixed-high", high.loop(), spec.seed, variant};
    m.merged.header = {"mixed", high.loop(), spec.seed, variant};
    m.control.header = {"mixed-control", high.loop(), spec.seed, variant};

    {
        Rng zr(derive_seed(spec.seed, "low-zeros"));
        const auto zeros = sample_zero_keys(low, n, ZeroPolicy::Uniform, 0, zr);
        Rng sr(derive_seed(spec.seed, "low-split"));
        const auto pos = split_class(n, half_test, per_loop_train, sr);
        const auto neg = split_class(n, half_test, per_loop_train, sr);
        for (std::size_t i : pos.test) m.low.test.push_back(coeff(low, i));
        for (std::size_t i : pos.train) m.low.train.push_back(coeff(low, i));
        for (std::size_t i : neg.test) m.low.test.push_back(key_example(zeros[i], zero_target));
        for (std::size_t i : neg.train) m.low.train.push_back(key_example(zeros[i], zero_target));
    }
    {
        Rng zr(derive_seed(spec.seed, "high-zeros"));
        const auto zeros = sample_zero_keys(high, high_needed, ZeroPolicy::Uniform, 0, zr);
        Rng sr(derive_seed(spec.seed, "high-split"));
        const auto order = sample_indices(sr, high.size(), high_needed);
        for (std::size_t j = 0; j < high_needed; ++j) {
            auto pos = coeff(high, order[j]);
            auto neg = key_example(zeros[j], zero_target);
            if (j < half_test) {
                m.high.test.push_back(pos);
                m.high.test.push_back(neg);
                continue;
            }
            if (j < half_test + per_loop_train) {
                m.high.train.push_back(pos);
                m.high.train.push_back(neg);
            }
            m.control.train.push_back(std::move(pos));
            m.control.train.push_back(std::move(neg));
        }
    }
    for (Dataset* d : {&m.low, &m.high}) {
        sort_by_meta(d->train);
        sort_by_meta(d->test);
    }
    m.merged.train = m.low.train;
    m.merged.train.insert(m.merged.train.end(), m.high.train.begin(), m.high.train.end());
    m.merged.test = m.low.test;
    m.merged.test.insert(m.merged.test.end(), m.high.test.begin(), m.high.test.end());
    m.control.test = m.high.test;
    sort_by_meta(m.control.train);
    return m;
}

std::vector<StrikePair> strike_pairs(int length, std::optional<int> max_distance) {
    if (max_distance && (*max_distance < 1 || *max_distance > length - 1))
        throw Error(ErrorKind::Range, "strike distance " + std::to_string(*max_distance) + " outside 1.." +
                                          std::to_string(length - 1));
    std::vector<StrikePair> pairs;
    for (int i = 0; i < length; ++i)
        for (int j = i + 1; j < length; ++j)
            if (!max_distance || j - i <= *max_distance) pairs.push_back({i, j});
    return pairs;
}

std::vector<Key> strike_parents(const Key& key, std::optional<int> max_distance) {
    if (key.size() < 4 || key.size() % 2) throw Error(ErrorKind::Range, "strike-two needs a key of loop >= 2");
    std::vector<Key> parents;
    for (auto [i, j] : strike_pairs(key.size(), max_distance)) parents.push_back(key.erase_two(i, j));
    return parents;
}

std::size_t strike_parent_count(int loop, std::optional<int> max_distance) {
    const auto L = static_cast<std::size_t>(loop);
    if (!max_distance) return L * (2 * L - 1);
    if (*max_distance < 1 || *max_distance > 2 * loop - 1) throw Error(ErrorKind::Range, "strike distance out of range");
    const auto k = static_cast<std::size_t>(*max_distance);
    return 2 * k * L - k * (k + 1) / 2;
}

std::string_view to_string(StrikeVariant v) noexcept {
    switch (v) {
        case StrikeVariant::Plain: return "plain";
        case StrikeVariant::Shuffled: return "shuffled";
        case StrikeVariant::Sorted: return "sorted";
        case StrikeVariant::SortedUnique: return "sorted-unique";
        case StrikeVariant::SignsOnly: return "signs-only";
        case StrikeVariant::MagnitudesOnly: return "magnitudes-only";
        case StrikeVariant::ZeroNonzero: return "zero-nonzero";
    }
    return "?";
}

StrikeVariant parse_strike_variant(std::string_view text) {
    for (auto v : {StrikeVariant::Plain, StrikeVariant::Shuffled, StrikeVariant::Sorted, StrikeVariant::SortedUnique,
                   StrikeVariant::SignsOnly, StrikeVariant::MagnitudesOnly, StrikeVariant::ZeroNonzero})
        if (to_string(v) == text) return v;
    throw Error(ErrorKind::Usage, "unknown strikeout variant '" + std::string(text) + "'");
}

std::vector<Coefficient> strikeout_input(const Key& child, const Symbol& parents, const StrikeoutConfig& config) {
    if (parents.loop() != child.loop() - 1) throw Error(ErrorKind::Data, "parent symbol must be one loop below the child");
    std::vector<Coefficient> c;
    for (const Key& p : strike_parents(child, config.max_distance)) c.push_back(parents.lookup(p));
    switch (config.variant) {
        case StrikeVariant::Plain: break;
        case StrikeVariant::Shuffled: {
            Rng rng(derive_seed(config.seed, child.str()));
            rng.shuffle(c);
            break;
        }
        case StrikeVariant::Sorted: std::sort(c.begin(), c.end()); break;
        case StrikeVariant::SortedUnique:
            std::sort(c.begin(), c.end());
            c.erase(std::unique(c.begin(), c.end()), c.end());
            break;
        case StrikeVariant::SignsOnly:
            for (auto& x : c) x = x.sign();
            break;
        case StrikeVariant::MagnitudesOnly:
            for (auto& x : c) x = magnitude(x);
            break;
        case StrikeVariant::ZeroNonzero:
            for (auto& x : c) x = x != 0 ? 1 : 0;
            break;
    }
    return c;
}

DatasetExample strikeout_example(const Key& child, const Symbol& child_symbol, const Symbol& parents,
                                 const StrikeoutConfig& config) {
    DatasetExample e;
    for (const auto& c : strikeout_input(child, parents, config)) {
        if (!e.input.empty()) e.input += ' ';
        e.input += coefficient_text(c, config.sign);
    }
    e.target = coefficient_text(child_symbol.lookup(child), config.sign);
    e.meta = {child.loop(), child.packed(), 0};
    return e;
}

StrikeoutSet make_strikeout(const Symbol& child, const Symbol& parents, const StrikeoutConfig& config,
                            const SplitSpec& spec) {
    StrikeoutSet s;
    s.config = config;
    s.header = {"strikeout", child.loop(), spec.seed,
                std::string(to_string(config.variant)) +
                    (config.max_distance ? "-k" + std::to_string(*config.max_distance) : std::string("-full"))};
    s.candidates = child.size();

    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> seen;
    std::vector<std::size_t> unique;
    for (std::size_t i = 0; i < child.size(); ++i) {
        const auto e = strikeout_example(child.key_at(i), child, parents, config);
        auto& bucket = seen[fnv1a(e.input, e.target)];
        const bool duplicate = std::any_of(bucket.begin(), bucket.end(), [&](std::uint32_t j) {
            const auto prior = strikeout_example(child.key_at(j), child, parents, config);
            return prior.input == e.input && prior.target == e.target;
        });
        if (duplicate) continue;
        bucket.push_back(static_cast<std::uint32_t>(i));
        unique.push_back(i);
    }

    const std::size_t train = spec.train.value_or(unique.size() - std::min(spec.test, unique.size()));
    Rng rng(derive_seed(spec.seed, "split"));
    const auto split = split_class(unique.size(), spec.test, train, rng);
    for (std::size_t i : split.test) s.test.push_back(child.key_at(unique[i]));
    for (std::size_t i : split.train) s.train.push_back(child.key_at(unique[i]));
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

void dedup(std::vector<DatasetExample>& examples) {
    std::unordered_set<std::string> seen;
    std::erase_if(examples, [&](const DatasetExample& e) { return !seen.insert(e.input + '\t' + e.target).second; });
}

std::string format_header(const DatasetHeader& h) {
    return "#task=" + h.task + " loop=" + std::to_string(h.loop) + " seed=" + std::to_string(h.seed) +
           " variant=" + h.variant;
}

DatasetHeader parse_header(std::string_view line) {
    if (!line.starts_with('#')) throw ParseError("dataset header must start with '#'");
    DatasetHeader h;
    bool task = false, loop = false, seed = false, variant = false;
    const auto fields = split_tokens(line.substr(1));
    for (const auto& f : fields) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) throw ParseError("header field '" + f + "' lacks '='");
        const std::string name = f.substr(0, eq), value = f.substr(eq + 1);
        auto number = [&](auto& out) {
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
            if (ec != std::errc{} || p != value.data() + value.size()) throw ParseError("bad " + name + " '" + value + "'");
        };
        if (name == "task") h.task = value, task = true;
        else if (name == "loop") number(h.loop), loop = true;
        else if (name == "seed") number(h.seed), seed = true;
        else if (name == "variant") h.variant = value, variant = true;
    }
    if (!(task && loop && seed && variant)) throw ParseError("dataset header needs task, loop, seed and variant");
    return h;
}

void write_dataset(std::ostream& out, const DatasetHeader& header, std::span<const DatasetExample> examples) {
    out << format_header(header) << '\n';
    for (const auto& e : examples) out << e.input << '\t' << e.target << '\n';
}

}  // namespace ffsym
