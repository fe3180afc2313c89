#include <doctest.h>

#include <random>

#include "ffsym/error.hpp"
#include "ffsym/key.hpp"

using namespace ffsym;

TEST_SUITE("key") {
    TEST_CASE("parse and format round trip") {
        CHECK(format_key(parse_key("bd")) == "bd");
        const Key k = parse_key("aacf");
        CHECK(k.size() == 4);
        CHECK(k.loop() == 2);
        CHECK(k[0] == Letter::A);
        CHECK(k[3] == Letter::F);
        CHECK(k.str() == "aacf");
    }

    TEST_CASE("rejections carry the offending position") {
        auto position_of = [](std::string_view text) -> std::size_t {
            try {
                parse_key(text);
            } catch (const ParseError& e) {
                return e.position();
            }
            return 12345;
        };
        CHECK(position_of("bdg") == 2);
        CHECK(position_of("abgd") == 2);
        CHECK(position_of("Ab") == 0);
        CHECK(position_of("abc") == 2);  // the unpaired last letter
        CHECK(position_of("") == 0);
        CHECK(position_of("abababababababab") == 12345);
        CHECK(position_of("ababababababababab") == 16);
        CHECK_THROWS_AS(parse_key("bdg"), ParseError);
    }

    TEST_CASE("exhaustive round trip for loop <= 2") {
        for (int n : {2, 4})
            for (std::uint64_t r = 0; r < key_space_size(n); ++r) {
                // independent base-6 spelling
                std::string text(n, 'a');
                std::uint64_t x = r;
                for (int i = n - 1; i >= 0; --i, x /= 6) text[i] = static_cast<char>('a' + x % 6);
                const Key k = parse_key(text);
                REQUIRE(k.str() == text);
                REQUIRE(key_from_rank(r, n) == k);
                REQUIRE(Key::from_packed(k.packed(), n) == k);
            }
    }

    TEST_CASE("random round trip at loop 8") {
        std::mt19937_64 gen(12345);
        for (int i = 0; i < 1'000'000; ++i) {
            std::string text(16, 'a');
            for (char& ch : text) ch = static_cast<char>('a' + gen() % 6);
            const Key k = parse_key(text);
            REQUIRE(k.str() == text);
            REQUIRE(Key::from_packed(k.packed(), 16).str() == text);
        }
    }

    TEST_CASE("packed order is lexicographic") {
        CHECK(parse_key("abdd") < parse_key("acaa"));
        CHECK(parse_key("fa") > parse_key("ef"));
        CHECK(parse_key("ab").packed() == 1);
    }

    TEST_CASE("substr, erase_two and concat") {
        const Key k = parse_key("abcdef");
        CHECK(k.substr(1, 3).str() == "bcd");
        CHECK(k.erase_two(0, 5).str() == "bcde");
        CHECK(k.erase_two(2, 3).str() == "abef");
        CHECK(concat(Key::from_letters("ab"), Key::from_letters("cd")).str() == "abcd");
        CHECK(k.with_letter(0, Letter::F).str() == "fbcdef");
    }
}
