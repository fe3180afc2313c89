#include <doctest.h>

#include "ffsym/dihedral.hpp"
#include "ffsym/error.hpp"
#include "ffsym/symbol.hpp"
#include "ffsym/trivial_zero.hpp"
#include "synthetic.hpp"

using namespace ffsym;

TEST_SUITE("symbol") {
    TEST_CASE("one-loop symbol") {
        const Symbol s = builtin_symbol(1);
        CHECK(s.loop() == 1);
        CHECK(s.size() == 6);
        for (const char* k : {"bd", "ce", "af", "bf", "cd", "ae"}) CHECK(s[parse_key(k)] == -2);
        CHECK(s[parse_key("ab")] == 0);
        CHECK(s[parse_key("aa")] == 0);
        CHECK(s.lookup(parse_key("cd")) == -2);
    }

    TEST_CASE("two-loop symbol") {
        const Symbol s = builtin_symbol(2);
        CHECK(s.size() == 12);
        CHECK(s[parse_key("bddd")] == 8);
        CHECK(s[parse_key("bbbd")] == 16);
        int eights = 0, sixteens = 0;
        for (const auto& c : s.coefficients()) {
            eights += c == 8;
            sixteens += c == 16;
        }
        CHECK(eights == 6);
        CHECK(sixteens == 6);
        CHECK_THROWS_AS(builtin_symbol(3), Error);
    }

    TEST_CASE("dihedral invariance and trivial-zero soundness, exhaustive") {
        for (int loop : {1, 2}) {
            const Symbol s = builtin_symbol(loop);
            for (std::uint64_t r = 0; r < key_space_size(2 * loop); ++r) {
                const Key k = key_from_rank(r, 2 * loop);
                for (const auto& g : dihedral_group()) REQUIRE(s[g(k)] == s[k]);
                if (is_trivial_zero(k)) REQUIRE(s[k] == 0);
            }
        }
    }

    TEST_CASE("lookup rejects a length mismatch") {
        CHECK_THROWS_AS(builtin_symbol(1).lookup(parse_key("bddd")), Error);
    }

    TEST_CASE("construction normalises") {
        const Symbol s(1, {{parse_key("ce"), -2}, {parse_key("bd"), -2}, {parse_key("aa"), 0}, {parse_key("bd"), -2}});
        CHECK(s.size() == 2);
        CHECK(s.key_at(0).str() == "bd");
        CHECK_THROWS_AS(Symbol(1, {{parse_key("bd"), -2}, {parse_key("bd"), 3}}), Error);
        CHECK_THROWS_AS(Symbol(1, {{parse_key("bddd"), 1}}), Error);
    }

    TEST_CASE("synthetic fixture is invariant and avoids trivial zeros") {
        const Symbol s = testing::synthetic_symbol(3, 1);
        CHECK(s.size() > 0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            REQUIRE_FALSE(is_trivial_zero(s.key_at(i)));
            for (const auto& g : dihedral_group()) REQUIRE(s[g(s.key_at(i))] == s.coefficient_at(i));
        }
    }
}
