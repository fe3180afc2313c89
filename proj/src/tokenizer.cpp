#include "ffsym/tokenizer.hpp"

#include <algorithm>

#include "ffsym/error.hpp"

namespace ffsym {

namespace {

constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";

int sign_of(std::string_view token) noexcept {
    if (token == "+") return 1;
    if (token == "-" || token == kUnicodeMinus) return -1;
    return 0;
}

}  // namespace

TokenSequence encode_coefficient(const Coefficient& c, SignPosition sign) {
    TokenSequence chunks;
    Coefficient m = magnitude(c);
    do {
        chunks.push_back(std::to_string(static_cast<unsigned>(m % kNumberBase)));
        m /= kNumberBase;
    } while (m != 0);
    std::reverse(chunks.begin(), chunks.end());
    const std::string s(1, sign_char(c));
    if (sign == SignPosition::First) chunks.insert(chunks.begin(), s);
    else chunks.push_back(s);
    return chunks;
}

Coefficient decode_coefficient(std::span<const std::string> tokens) {
    if (tokens.empty()) throw ParseError("empty coefficient");
    int sign = sign_of(tokens.front());
    auto digits = tokens.subspan(1);
    if (sign == 0) {
        sign = sign_of(tokens.back());
        if (sign == 0) throw ParseError("coefficient has no sign token");
        digits = tokens.first(tokens.size() - 1);
    }
    if (digits.empty()) throw ParseError("coefficient has no digit chunks");
    Coefficient value = 0;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        const std::string& chunk = digits[i];
        const bool numeric = !chunk.empty() && chunk.size() <= 3 &&
                             std::all_of(chunk.begin(), chunk.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
        if (!numeric) throw ParseError("bad chunk '" + chunk + "'", i);
        if (chunk.size() > 1 && chunk.front() == '0') throw ParseError("chunk '" + chunk + "' is not canonical", i);
        if (i == 0 && chunk == "0" && digits.size() > 1) throw ParseError("leading zero chunk", i);
        value = value * kNumberBase + std::stoi(chunk);
    }
    return sign < 0 ? Coefficient(-value) : value;
}

TokenSequence encode_key(const Key& key) {
    TokenSequence t;
    t.reserve(key.size());
    for (int i = 0; i < key.size(); ++i) t.emplace_back(1, to_char(key[i]));
    return t;
}

TokenSequence encode_quad_key(const Key& prefix, QuadSuffix quad) {
    TokenSequence t = encode_key(prefix);
    t.push_back(quad_token(quad));
    return t;
}

TokenSequence split_tokens(std::string_view text) {
    TokenSequence out;
    std::string current;
    for (char ch : text) {
        if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else {
            current += ch;
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::string join_tokens(std::span<const std::string> tokens, char separator) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += separator;
        out += tokens[i];
    }
    return out;
}

std::optional<Coefficient> parse_prediction(std::string_view text) {
    const TokenSequence tokens = split_tokens(text);
    if (tokens.empty()) return std::nullopt;
    try {
        if (tokens.size() == 1) return parse_decimal(tokens.front());
        return decode_coefficient(tokens);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

}  // namespace ffsym
