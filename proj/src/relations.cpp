#include "ffsym/relations.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_set>

#include "ffsym/error.hpp"
#include "ffsym/rng.hpp"
#include "ffsym/trivial_zero.hpp"

namespace ffsym {

namespace {

Relation make(std::string name, Anchor anchor, std::initializer_list<std::pair<const char*, int>> terms, int scale = 1) {
    Relation r;
    r.name = std::move(name);
    r.anchor = anchor;
    r.scale = scale;
    for (const auto& [pattern, weight] : terms) r.terms.push_back({Key::from_letters(pattern), weight});
    return r;
}

Relation make_whole(std::string name, DihedralElement generator) {
    Relation r;
    r.name = std::move(name);
    r.anchor = Anchor::Whole;
    r.generator = generator;
    return r;
}

std::vector<Relation> build_catalog() {
    std::vector<Relation> c;
    using A = Anchor;
    c.push_back(make("triple 0", A::Sliding, {{"aab", 1}, {"abb", 1}, {"acb", 1}}));
    c.push_back(make("integ 0", A::Sliding, {{"ab", 1}, {"ac", 1}, {"ba", -1}, {"ca", -1}}));
    c.push_back(make("integ 1", A::Sliding, {{"ca", 1}, {"cb", 1}, {"ac", -1}, {"bc", -1}}));
    c.push_back(make("integ 2", A::Sliding,
                     {{"db", 1}, {"dc", -1}, {"bd", -1}, {"cd", 1}, {"ec", 1}, {"ea", -1}, {"ce", -1},
                      {"ae", 1}, {"fa", 1}, {"fb", -1}, {"af", -1}, {"bf", 1}, {"cb", 2}, {"bc", -2}}));
    const char* vanishing[] = {"ad",   "ed",   "add",  "abd",  "ace",  "ebd",  "edd",  "addd",
                               "abbd", "adbd", "cbbd", "ebbd", "ebdd", "edbd", "eddd", "fdbd"};
    for (int i = 0; i < 16; ++i) c.push_back(make("final " + std::to_string(i), A::Suffix, {{vanishing[i], 1}}));
    c.push_back(make("final 16", A::Suffix, {{"bf", 1}, {"bd", -1}}));
    c.push_back(make("final 17", A::Suffix, {{"cdd", 1}, {"cee", 1}}));
    c.push_back(make("final 18", A::Suffix, {{"ddbd", 1}, {"dbdd", -1}}));
    c.push_back(make("final 19", A::Suffix, {{"cbdd", 1}, {"cdbd", -1}}));
    c.push_back(make("final 20", A::Suffix, {{"fbd", 1}, {"dbd", -1}, {"bdd", 1}}));
    c.push_back(make("final 21", A::Suffix,
                     {{"bddd", 1}, {"faff", 1}, {"dbdd", -1}, {"eaff", -1}, {"fbdd", 1}, {"aeee", -1}}));
    // half-integer weights, multiplied through by 2
    c.push_back(make("final 22", A::Suffix,
                     {{"abdd", 2}, {"cddd", -1}, {"dcee", -1}, {"aeee", 1}, {"eaff", 1}, {"faff", -1}, {"ecee", 1}}, 2));
    c.push_back(make("final 23", A::Suffix,
                     {{"cbdd", 2}, {"bfff", -1}, {"dcee", 1}, {"ecee", -1}, {"cddd", 1}, {"dbdd", 1}, {"fbdd", -1}}, 2));
    c.push_back(make("final 24", A::Suffix,
                     {{"cdbd", 2}, {"bfff", -1}, {"dcee", 1}, {"ecee", -1}, {"cddd", 1}, {"dbdd", 1}, {"fbdd", -1}}, 2));
    c.push_back(make("final 25", A::Suffix,
                     {{"fbbd", 2}, {"dbbd", -2}, {"bbdd", 2}, {"faff", -1}, {"dbdd", 1}, {"fbdd", -1}, {"eaff", 1},
                      {"aeee", 1}, {"bfff", -1}},
                     2));
    c.push_back(make_whole("cycle", DihedralElement::cycle()));
    c.push_back(make_whole("flip", DihedralElement::flip()));
    return c;
}

Key random_word(Rng& rng, int length) {
    return key_from_rank(rng.below(key_space_size(length)), length);
}

Key splice(const Key& context, int slot, const Key& pattern) {
    const int before = slot - 1;
    return concat(concat(context.substr(0, before), pattern), context.substr(before, context.size() - before));
}

bool any_nonzero(const RelationInstance& inst, const Symbol& truth) {
    return std::any_of(inst.members.begin(), inst.members.end(),
                       [&](const InstanceMember& m) { return truth.contains(m.key); });
}

struct Window {
    int slot;
    Key context;
    friend auto operator<=>(const Window&, const Window&) = default;
};

/// Every (slot, context) whose instance touches a nonzero truth coefficient.
std::vector<Window> nonzero_support(const Relation& rel, int loop, const Symbol& truth) {
    const auto [lo, hi] = slot_range(rel, loop);
    const int m = rel.pattern_length();
    std::set<Window> support;
    for (const Key& key : truth.keys()) {
        for (int slot = lo; slot <= hi; ++slot) {
            const Key window = key.substr(slot - 1, m);
            for (const auto& term : rel.terms) {
                if (term.pattern != window) continue;
                support.insert({slot, concat(key.substr(0, slot - 1), key.substr(slot - 1 + m, key.size() - slot + 1 - m))});
                break;
            }
        }
    }
    return {support.begin(), support.end()};
}

}  // namespace

const std::vector<Relation>& catalog() {
    static const std::vector<Relation> relations = build_catalog();
    return relations;
}

const Relation& find_relation(std::string_view name) {
    for (const auto& r : catalog())
        if (r.name == name) return r;
    throw Error(ErrorKind::Usage, "unknown relation '" + std::string(name) + "'");
}

std::pair<int, int> slot_range(const Relation& rel, int loop) noexcept {
    const int n = 2 * loop;
    switch (rel.anchor) {
        case Anchor::Whole: return {1, 1};
        case Anchor::Suffix: {
            const int s = n - rel.pattern_length() + 1;
            return s >= 1 ? std::pair{s, s} : std::pair{1, 0};
        }
        case Anchor::Sliding: return {1, n - rel.pattern_length() + 1};
    }
    return {1, 0};
}

RelationInstance instantiate(const Relation& rel, int loop, int slot, const Key& context) {
    if (loop < 1 || loop > kMaxLoop) throw Error(ErrorKind::Range, "loop order " + std::to_string(loop) + " out of range");
    const auto [lo, hi] = slot_range(rel, loop);
    if (slot < lo || slot > hi)
        throw Error(ErrorKind::Range, "slot " + std::to_string(slot) + " invalid for " + rel.name + " at loop " +
                                          std::to_string(loop));
    RelationInstance inst;
    inst.relation = rel.name;
    inst.loop = loop;
    inst.slot = slot;
    inst.context = context;
    if (rel.anchor == Anchor::Whole) {
        if (context.size() != 2 * loop)
            throw Error(ErrorKind::Range, rel.name + " needs a full key of length " + std::to_string(2 * loop));
        inst.members = {{context, 1}, {rel.generator(context), -1}};
        return inst;
    }
    if (context.size() != 2 * loop - rel.pattern_length())
        throw Error(ErrorKind::Range, "context length " + std::to_string(context.size()) + " does not fit " + rel.name +
                                          " at loop " + std::to_string(loop));
    inst.members.reserve(rel.terms.size());
    for (const auto& term : rel.terms) inst.members.push_back({splice(context, slot, term.pattern), term.weight});
    return inst;
}

std::vector<RelationInstance> generate_instances(const Relation& rel, int loop, std::size_t n, const Symbol& truth,
                                                 std::uint64_t seed) {
    if (n == 0) throw Error(ErrorKind::Range, "instance count must be positive");
    if (truth.loop() != loop)
        throw Error(ErrorKind::Data, "truth symbol is loop " + std::to_string(truth.loop()) + ", expected " + std::to_string(loop));
    const auto [lo, hi] = slot_range(rel, loop);
    if (lo > hi) throw Error(ErrorKind::Data, rel.name + " does not fit in a loop-" + std::to_string(loop) + " key");

    Rng rng(derive_seed(seed, rel.name + "/" + std::to_string(loop)));
    std::vector<RelationInstance> out;
    out.reserve(n);

    if (rel.anchor == Anchor::Whole) {
        std::unordered_set<Key, KeyHash> used_orbits;
        std::vector<Key> support;  // built on first fallback
        bool have_support = false;
        while (out.size() < n) {
            std::optional<Key> pick;
            for (int attempt = 0; attempt < kInstanceRetryBudget && !pick; ++attempt) {
                const Key k = random_word(rng, 2 * loop);
                if (truth.contains(k) && !used_orbits.contains(canonical_representative(k))) pick = k;
            }
            if (!pick) {
                if (!have_support) {
                    support.assign(truth.keys().begin(), truth.keys().end());
                    have_support = true;
                }
                std::erase_if(support, [&](const Key& k) { return used_orbits.contains(canonical_representative(k)); });
                if (support.empty())
                    throw Error(ErrorKind::Data, rel.name + ": only " + std::to_string(out.size()) +
                                                     " nonzero dihedral orbits at loop " + std::to_string(loop));
                pick = support[rng.below(support.size())];
            }
            used_orbits.insert(canonical_representative(*pick));
            out.push_back(instantiate(rel, loop, 1, *pick));
        }
        return out;
    }

    const int context_length = 2 * loop - rel.pattern_length();
    const auto slots = static_cast<std::uint64_t>(hi - lo + 1);
    std::optional<std::vector<Window>> support;
    while (out.size() < n) {
        std::optional<RelationInstance> pick;
        for (int attempt = 0; attempt < kInstanceRetryBudget && !pick; ++attempt) {
            const int slot = lo + static_cast<int>(rng.below(slots));
            auto inst = instantiate(rel, loop, slot, random_word(rng, context_length));
            if (rel.is_one_term() || any_nonzero(inst, truth)) pick = std::move(inst);
        }
        if (!pick) {
            if (!support) support = nonzero_support(rel, loop, truth);
            if (support->empty())
                throw Error(ErrorKind::Data, rel.name + " has no nonzero support at loop " + std::to_string(loop));
            const Window& w = (*support)[rng.below(support->size())];
            pick = instantiate(rel, loop, w.slot, w.context);
        }
        out.push_back(std::move(*pick));
    }
    return out;
}

std::uint64_t instance_space_size(const Relation& rel, int loop) noexcept {
    const auto [lo, hi] = slot_range(rel, loop);
    if (lo > hi) return 0;
    if (rel.anchor == Anchor::Whole) return key_space_size(2 * loop);
    return static_cast<std::uint64_t>(hi - lo + 1) * key_space_size(2 * loop - rel.pattern_length());
}

void for_each_instance(const Relation& rel, int loop, const std::function<void(const RelationInstance&)>& visit) {
    const auto [lo, hi] = slot_range(rel, loop);
    if (lo > hi) return;
    if (rel.anchor == Anchor::Whole) {
        const std::uint64_t total = key_space_size(2 * loop);
        for (std::uint64_t r = 0; r < total; ++r) {
            const Key k = key_from_rank(r, 2 * loop);
            if (canonical_representative(k) == k) visit(instantiate(rel, loop, 1, k));
        }
        return;
    }
    const int context_length = 2 * loop - rel.pattern_length();
    const std::uint64_t contexts = key_space_size(context_length);
    for (int slot = lo; slot <= hi; ++slot)
        for (std::uint64_t r = 0; r < contexts; ++r) visit(instantiate(rel, loop, slot, key_from_rank(r, context_length)));
}

Coefficient residual(const RelationInstance& instance, const Symbol& coefficients) {
    Coefficient sum = 0;
    for (const auto& m : instance.members) {
        const Coefficient& c = coefficients.lookup(m.key);
        if (c != 0) sum += m.weight * c;
    }
    return sum;
}

Coefficient residual(const RelationInstance& instance, std::span<const Coefficient> member_values) {
    if (member_values.size() != instance.members.size())
        throw Error(ErrorKind::Range, "expected " + std::to_string(instance.members.size()) + " member values");
    Coefficient sum = 0;
    for (std::size_t i = 0; i < member_values.size(); ++i) sum += instance.members[i].weight * member_values[i];
    return sum;
}

RelationRates score_instances(std::span<const RelationInstance> instances, const Symbol& truth,
                              const KeyedPredictions& predictions, ScoreOptions options) {
    if (instances.empty()) throw Error(ErrorKind::Range, "no relation instances to score");
    std::size_t satisfied = 0, magnitudes = 0, signs = 0, exact = 0;
    std::vector<Coefficient> predicted;
    for (const auto& inst : instances) {
        predicted.clear();
        bool valid = true, all_magnitudes = true, all_signs = true, all_exact = true;
        for (const auto& m : inst.members) {
            Coefficient p = 0;
            if (!(options.force_trivial_zero && is_trivial_zero(m.key))) {
                if (auto it = predictions.find(m.key); it != predictions.end()) {
                    if (!it->second) {
                        valid = false;
                        break;
                    }
                    p = *it->second;
                }
            }
            const Coefficient& t = truth.lookup(m.key);
            all_magnitudes = all_magnitudes && magnitude(p) == magnitude(t);
            all_signs = all_signs && sign_char(p) == sign_char(t);
            all_exact = all_exact && p == t;
            predicted.push_back(std::move(p));
        }
        if (!valid) continue;
        const bool ok = residual(inst, predicted) == 0;
        satisfied += ok;
        magnitudes += ok && all_magnitudes;
        signs += ok && all_signs;
        exact += all_exact;
    }
    const double n = static_cast<double>(instances.size());
    return {instances.size(), satisfied / n, magnitudes / n, signs / n, exact / n};
}

std::string format_instance(const RelationInstance& instance) {
    std::string line = instance.relation + "\t" + std::to_string(instance.slot) + "\t";
    for (std::size_t i = 0; i < instance.members.size(); ++i) {
        if (i) line += ',';
        line += instance.members[i].key.str();
    }
    return line;
}

RelationInstance parse_instance(std::string_view line) {
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) throw ParseError("instance line needs three tab-separated fields");
    const Relation& rel = find_relation(line.substr(0, tab1));
    int slot = 0;
    const auto slot_text = line.substr(tab1 + 1, tab2 - tab1 - 1);
    if (auto [p, ec] = std::from_chars(slot_text.data(), slot_text.data() + slot_text.size(), slot);
        ec != std::errc{} || p != slot_text.data() + slot_text.size())
        throw ParseError("bad slot '" + std::string(slot_text) + "'", tab1 + 1);
    std::vector<Key> keys;
    std::string_view rest = line.substr(tab2 + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        keys.push_back(parse_key(rest.substr(0, comma)));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (keys.empty()) throw ParseError("instance without member keys");
    const int loop = keys.front().loop();
    Key context = keys.front();
    if (rel.anchor != Anchor::Whole) {
        const int m = rel.pattern_length();
        context = concat(context.substr(0, slot - 1), context.substr(slot - 1 + m, context.size() - slot + 1 - m));
    }
    RelationInstance inst = instantiate(rel, loop, slot, context);
    if (inst.members.size() != keys.size())
        throw ParseError(rel.name + " expects " + std::to_string(inst.members.size()) + " member keys");
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (inst.members[i].key != keys[i])
            throw ParseError("member " + keys[i].str() + " does not match " + rel.name + " at slot " + std::to_string(slot));
    return inst;
}

}  // namespace ffsym
