#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ffsym/coefficient.hpp"
#include "ffsym/relations.hpp"
#include "ffsym/symbol.hpp"

namespace ffsym {

enum class SymbolFormat {
    Canonical,   ///< `<key>\t<coefficient>`, strictly ascending, no zeros
    Permissive,  ///< any comma/whitespace delimiter, any order, '+' signs, zeros, comments, gzip
};

struct SymbolReadResult {
    Symbol symbol;
    std::size_t zeros_dropped = 0;
    std::size_t duplicates_merged = 0;
};

/// Loop is taken from the first key unless given. Throws ParseError (with the 1-based
/// line) on malformed lines and Error(Data) on conflicting duplicates or mixed key lengths.
SymbolReadResult read_symbol(std::istream& in, SymbolFormat format, std::optional<int> loop = std::nullopt);
/// Files are opened through zlib, so gzip-compressed input is read transparently.
SymbolReadResult read_symbol(const std::filesystem::path& path, SymbolFormat format,
                             std::optional<int> loop = std::nullopt);
void write_symbol(std::ostream& out, const Symbol& symbol);
void write_symbol(const std::filesystem::path& path, const Symbol& symbol);

/// Reads a whole file (gzip or plain) line by line.
void for_each_line(const std::filesystem::path& path, const std::function<void(std::string_view)>& visit);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestEntry {
    std::string relative_path;
    std::string sha256;
    int loop = 0;
    std::optional<std::size_t> count;
};

/// `<relative-path>\t<sha256>\t<loop>\t<count|?>` per line; '#' lines and blank lines ignored.
std::vector<ManifestEntry> read_manifest(std::istream& in);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

struct FetchOptions {
    int max_attempts = 5;
    std::chrono::milliseconds initial_backoff{500};
};

enum class FetchStatus { AlreadyVerified, Downloaded };

/// Ensures `dest_dir/relative_path` exists with the expected checksum, downloading from
/// `base_url/relative_path` (any libcurl URL, including file://) when it does not. A file
/// with the wrong checksum is moved under `dest_dir/.quarantine` and never parsed.
/// Throws Error(Checksum) after a mismatching download and Error(Network) once the
/// retries are spent.
FetchStatus fetch_file(const ManifestEntry& entry, const std::string& base_url, const std::filesystem::path& dest_dir,
                       const FetchOptions& options = {});

/// FFSYM_DATA_DIR, or ./data.
std::filesystem::path data_dir();
std::filesystem::path registry_path(const std::filesystem::path& dir, int loop);

struct IngestReport {
    ManifestEntry entry;
    FetchStatus fetch = FetchStatus::AlreadyVerified;
    std::size_t elements = 0;
    std::size_t zeros_dropped = 0;
};

/// Fetches, verifies and parses every manifest file, checks loop and count, and writes a
/// canonical `symbol_L<L>.txt` into `registry`. Files of one loop are merged.
std::vector<IngestReport> ingest(const std::vector<ManifestEntry>& manifest, const std::string& base_url,
                                 const std::filesystem::path& download_dir, const std::filesystem::path& registry,
                                 const FetchOptions& options = {});

/// Registry file if present, else the built-in symbol for L <= 2. Throws Error(Data)
/// when a higher loop has not been ingested.
Symbol load_symbol(int loop, const std::filesystem::path& registry = data_dir());

/// Ordered `(id, prediction)` pairs; nullopt marks an unparseable prediction.
using PredictionList = std::vector<std::pair<std::string, std::optional<Coefficient>>>;

/// `<id>\t<prediction>` lines. Throws ParseError on a line without a tab and
/// Error(Data) on a repeated id.
PredictionList read_predictions(std::istream& in);

/// Ground truth addressed by id: keys for a symbol file, 0-based line indices for a
/// dataset file (recognised by its `#task=` header).
struct Truth {
    std::vector<std::string> ids;
    std::vector<Coefficient> values;
    std::optional<Symbol> symbol;  ///< set for symbol files; any key of its loop is a valid id
};
Truth read_truth(std::istream& in);

void write_instances(std::ostream& out, const std::vector<RelationInstance>& instances);
std::vector<RelationInstance> read_instances(std::istream& in);

}  // namespace ffsym
