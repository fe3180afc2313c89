#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "ffsym/error.hpp"
#include "ffsym/io.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace ffsym;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ffsym-test-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

std::string canonical_text(const Symbol& s) {
    std::ostringstream out;
    write_symbol(out, s);
    return out.str();
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("single element file") {
        std::istringstream in("bd\t-2\n");
        const auto r = read_symbol(in, SymbolFormat::Canonical);
        CHECK(r.symbol.loop() == 1);
        CHECK(r.symbol.size() == 1);
        CHECK(r.symbol[parse_key("bd")] == -2);
    }

    TEST_CASE("canonical round trip is byte identical") {
        for (const Symbol& s : {builtin_symbol(1), builtin_symbol(2), testing::synthetic_symbol(3, 8)}) {
            const std::string text = canonical_text(s);
            std::istringstream in(text);
            CHECK(canonical_text(read_symbol(in, SymbolFormat::Canonical).symbol) == text);
        }
        CHECK(canonical_text(builtin_symbol(1)) == "ae\t-2\naf\t-2\nbd\t-2\nbf\t-2\ncd\t-2\nce\t-2\n");
    }

    TEST_CASE("canonical reader is strict") {
        for (const char* bad : {"bd -2\n", "bd\t+2\n", "bd\t-02\n", "bd\t0\n", "ce\t-2\nbd\t-2\n", "bd\t-2\nbd\t-2\n",
                                "bdg\t1\n", "bd\t1x\n"}) {
            std::istringstream in(bad);
            CHECK_THROWS_AS(read_symbol(in, SymbolFormat::Canonical), ParseError);
        }
        std::istringstream mixed("bd\t-2\nbddd\t8\n");
        CHECK_THROWS_AS(read_symbol(mixed, SymbolFormat::Canonical), Error);
    }

    TEST_CASE("permissive reader normalises") {
        std::istringstream in("# header\nce, -2\r\nbd -2\n\naa\t0\nbd\t-2\nbf,+5\n");
        const auto r = read_symbol(in, SymbolFormat::Permissive);
        CHECK(r.symbol.size() == 3);
        CHECK(r.zeros_dropped == 1);
        CHECK(r.duplicates_merged == 1);
        CHECK(r.symbol[parse_key("bf")] == 5);
        std::istringstream conflict("bd -2\nbd 3\n");
        CHECK_THROWS_AS(read_symbol(conflict, SymbolFormat::Permissive), Error);
        std::istringstream bad("bd\n");
        try {
            read_symbol(bad, SymbolFormat::Permissive);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.position() == 1);
        }
        std::istringstream empty("");
        CHECK_THROWS_AS(read_symbol(empty, SymbolFormat::Permissive), Error);
        std::istringstream empty2("");
        CHECK(read_symbol(empty2, SymbolFormat::Permissive, 3).symbol.empty());
    }

    TEST_CASE("gzip files are read transparently") {
        TempDir tmp;
        const fs::path p = tmp.path / "s.txt.gz";
        gzFile f = gzopen(p.c_str(), "wb");
        const std::string text = canonical_text(builtin_symbol(2));
        gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
        gzclose(f);
        CHECK(read_symbol(p, SymbolFormat::Permissive).symbol == builtin_symbol(2));
        write_symbol(tmp.path / "plain.txt", builtin_symbol(2));
        CHECK(read_symbol(tmp.path / "plain.txt", SymbolFormat::Canonical).symbol == builtin_symbol(2));
        CHECK_THROWS_AS(read_symbol(tmp.path / "missing.txt", SymbolFormat::Canonical), Error);
    }

    TEST_CASE("sha256") {
        TempDir tmp;
        write_text(tmp.path / "abc", "abc");
        CHECK(sha256_file(tmp.path / "abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        write_text(tmp.path / "empty", "");
        CHECK(sha256_file(tmp.path / "empty") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    TEST_CASE("manifest") {
        std::istringstream in("# comment\nL1/s.txt\t" + std::string(64, 'a') + "\t1\t6\nL5/s.txt.gz\t" +
                              std::string(64, 'b') + "\t5\t?\n");
        const auto m = read_manifest(in);
        REQUIRE(m.size() == 2);
        CHECK(m[0].relative_path == "L1/s.txt");
        CHECK(m[0].count == 6u);
        CHECK(m[1].loop == 5);
        CHECK_FALSE(m[1].count.has_value());
        for (std::string bad : {std::string("a\tb\t1\t1\n"), "/abs\t" + std::string(64, 'a') + "\t1\t1\n",
                                "../x\t" + std::string(64, 'a') + "\t1\t1\n", "x\t" + std::string(64, 'a') + "\t9\t1\n",
                                "x\t" + std::string(64, 'a') + "\t1\n"}) {
            std::istringstream b(bad);
            CHECK_THROWS_AS(read_manifest(b), ParseError);
        }
    }

    TEST_CASE("fetch, verify, quarantine") {
        TempDir tmp;
        const fs::path remote = tmp.path / "remote";
        write_text(remote / "L2" / "sym.txt", canonical_text(builtin_symbol(2)));
        const std::string url = "file://" + remote.string();
        ManifestEntry e{"L2/sym.txt", sha256_file(remote / "L2" / "sym.txt"), 2, 12};
        const fs::path local = tmp.path / "local";
        FetchOptions fast;
        fast.max_attempts = 2;
        fast.initial_backoff = std::chrono::milliseconds(1);

        CHECK(fetch_file(e, url, local, fast) == FetchStatus::Downloaded);
        CHECK(fs::exists(local / "L2" / "sym.txt"));
        CHECK(fetch_file(e, url, local, fast) == FetchStatus::AlreadyVerified);

        // a tampered local copy is quarantined and replaced
        write_text(local / "L2" / "sym.txt", "bd\t-2\n");
        CHECK(fetch_file(e, url, local, fast) == FetchStatus::Downloaded);
        CHECK(fs::exists(local / ".quarantine" / "L2" / "sym.txt"));

        // a remote that does not match is never accepted
        ManifestEntry wrong = e;
        wrong.relative_path = "L2/other.txt";
        write_text(remote / "L2" / "other.txt", "bd\t-2\n");
        try {
            fetch_file(wrong, url, local, fast);
            FAIL("expected a checksum error");
        } catch (const Error& err) {
            CHECK(err.kind() == ErrorKind::Checksum);
        }
        CHECK_FALSE(fs::exists(local / "L2" / "other.txt"));
        CHECK(fs::exists(local / ".quarantine" / "L2" / "other.txt"));

        ManifestEntry missing = e;
        missing.relative_path = "L2/none.txt";
        try {
            fetch_file(missing, url, local, fast);
            FAIL("expected a network error");
        } catch (const Error& err) {
            CHECK(err.kind() == ErrorKind::Network);
        }
    }

    TEST_CASE("ingest writes the registry and checks counts") {
        TempDir tmp;
        const fs::path remote = tmp.path / "remote";
        write_text(remote / "one.txt", "ce,-2\nbd,-2\naf -2\nae -2\nbf -2\ncd -2\n");
        write_text(remote / "two.txt", canonical_text(builtin_symbol(2)));
        const std::string url = "file://" + remote.string();
        std::vector<ManifestEntry> m{{"one.txt", sha256_file(remote / "one.txt"), 1, 6},
                                     {"two.txt", sha256_file(remote / "two.txt"), 2, std::nullopt}};
        const auto reports = ingest(m, url, tmp.path / "raw", tmp.path / "reg");
        CHECK(reports.size() == 2);
        CHECK(reports[0].elements == 6);
        CHECK(load_symbol(1, tmp.path / "reg") == builtin_symbol(1));
        CHECK(load_symbol(2, tmp.path / "reg") == builtin_symbol(2));
        CHECK_THROWS_AS(load_symbol(3, tmp.path / "reg"), Error);

        m[1].count = 13;
        try {
            ingest(m, url, tmp.path / "raw", tmp.path / "reg2");
            FAIL("expected a count mismatch");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Data);
        }
    }

    TEST_CASE("data directory comes from the environment") {
        ::setenv("FFSYM_DATA_DIR", "/tmp/somewhere", 1);
        CHECK(data_dir() == fs::path("/tmp/somewhere"));
        ::unsetenv("FFSYM_DATA_DIR");
        CHECK(data_dir() == fs::path("data"));
        CHECK(registry_path("d", 5) == fs::path("d/symbol_L5.txt"));
    }

    TEST_CASE("predictions") {
        std::istringstream in("a\t+, 12, 334\nb\t+++\nc\t-7\n");
        const auto p = read_predictions(in);
        REQUIRE(p.size() == 3);
        CHECK(p[0].second == Coefficient(12334));
        CHECK_FALSE(p[1].second.has_value());
        CHECK(p[2].second == Coefficient(-7));
        std::istringstream empty("");
        CHECK(read_predictions(empty).empty());
        std::istringstream dup("a\t1\na\t2\n");
        CHECK_THROWS_AS(read_predictions(dup), Error);
        std::istringstream notab("a 1\n");
        CHECK_THROWS_AS(read_predictions(notab), ParseError);
    }

    TEST_CASE("truth from symbol and dataset files") {
        std::istringstream sym("bd\t-2\nce\t-2\n");
        const Truth a = read_truth(sym);
        CHECK(a.ids == std::vector<std::string>{"bd", "ce"});
        CHECK(a.symbol.has_value());
        std::istringstream ds("#task=coeff loop=1 seed=0 variant=full-plain\nb d\t- 2\nc e\t+ 5\n");
        const Truth b = read_truth(ds);
        CHECK(b.ids == std::vector<std::string>{"0", "1"});
        CHECK(b.values == std::vector<Coefficient>{-2, 5});
        CHECK_FALSE(b.symbol.has_value());
    }

    TEST_CASE("instance files") {
        const auto inst = generate_instances(find_relation("integ 1"), 3, 10, testing::synthetic_symbol(3, 8), 4);
        std::stringstream ss;
        write_instances(ss, inst);
        const auto back = read_instances(ss);
        REQUIRE(back.size() == inst.size());
        for (std::size_t i = 0; i < inst.size(); ++i) CHECK(format_instance(back[i]) == format_instance(inst[i]));
        std::istringstream bad("integ 1\t1\tab\n");
        CHECK_THROWS_AS(read_instances(bad), ParseError);
    }
}
