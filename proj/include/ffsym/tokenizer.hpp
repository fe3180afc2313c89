#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffsym/coefficient.hpp"
#include "ffsym/key.hpp"
#include "ffsym/quad.hpp"

namespace ffsym {

using TokenSequence = std::vector<std::string>;

enum class SignPosition { First, Last };

inline constexpr unsigned kNumberBase = 1000;

/// Sign token then base-1000 chunks, most significant first. Zero is ["+", "0"].
TokenSequence encode_coefficient(const Coefficient& c, SignPosition sign = SignPosition::First);

/// Accepts the sign at either end, as '+', '-' or U+2212. Throws ParseError on a missing
/// or repeated sign, no chunks, a non-numeric chunk, a chunk >= 1000, or a leading zero chunk.
Coefficient decode_coefficient(std::span<const std::string> tokens);

TokenSequence encode_key(const Key& key);
TokenSequence encode_quad_key(const Key& prefix, QuadSuffix quad);

/// Tokens separated by commas and/or whitespace.
TokenSequence split_tokens(std::string_view text);
std::string join_tokens(std::span<const std::string> tokens, char separator = ' ');

/// Model output as text: a plain decimal or a token sequence. nullopt for anything
/// that does not decode to a single coefficient (e.g. "+++").
std::optional<Coefficient> parse_prediction(std::string_view text);

}  // namespace ffsym
