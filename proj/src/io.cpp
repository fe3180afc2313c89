#include "ffsym/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include "ffsym/error.hpp"
#include "ffsym/tokenizer.hpp"

namespace fs = std::filesystem;

namespace ffsym {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

ParseError at_line(const std::string& what, std::size_t line) {
    return ParseError(what + " (line " + std::to_string(line) + ")", line);
}

class LineParser {
public:
    LineParser(SymbolFormat format, std::optional<int> loop) : format_(format), loop_(loop) {}

    void feed(std::string_view raw) {
        ++line_;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r' && format_ == SymbolFormat::Permissive) line.remove_suffix(1);
        if (format_ == SymbolFormat::Permissive) {
            line = trim(line);
            if (line.empty() || line.front() == '#') return;
        }
        std::string_view key_text, value_text;
        if (format_ == SymbolFormat::Canonical) {
            const auto tab = line.find('\t');
            if (tab == std::string_view::npos) throw at_line("expected <key>\\t<coefficient>", line_);
            key_text = line.substr(0, tab);
            value_text = line.substr(tab + 1);
        } else {
            const auto end = line.find_first_of(" \t,;");
            if (end == std::string_view::npos) throw at_line("missing coefficient", line_);
            key_text = line.substr(0, end);
            const auto start = line.find_first_not_of(" \t,;", end);
            if (start == std::string_view::npos) throw at_line("missing coefficient", line_);
            value_text = line.substr(start);
        }
        Key key;
        Coefficient value;
        try {
            key = parse_key(key_text);
            if (format_ == SymbolFormat::Canonical) {
                const bool canonical = !value_text.empty() && value_text.front() != '+' &&
                                       !(value_text.size() > 1 && value_text.front() == '0') &&
                                       !value_text.starts_with("-0");
                if (!canonical) throw ParseError("non-canonical coefficient '" + std::string(value_text) + "'");
            }
            value = parse_decimal(value_text);
        } catch (const ParseError& e) {
            throw at_line(e.what(), line_);
        }
        if (!loop_) loop_ = key.loop();
        if (key.size() != 2 * *loop_)
            throw Error(ErrorKind::Data, "key " + key.str() + " on line " + std::to_string(line_) +
                                             " does not match loop " + std::to_string(*loop_));
        if (value == 0) {
            if (format_ == SymbolFormat::Canonical) throw at_line("zero coefficient in canonical file", line_);
            ++result_.zeros_dropped;
            return;
        }
        if (format_ == SymbolFormat::Canonical && !elements_.empty() && !(elements_.back().first < key))
            throw at_line("keys not strictly ascending", line_);
        elements_.emplace_back(key, std::move(value));
    }

    SymbolReadResult finish() {
        if (!loop_) throw Error(ErrorKind::Data, "empty symbol file and no loop order given");
        const std::size_t before = elements_.size();
        result_.symbol = Symbol(*loop_, std::move(elements_));
        result_.duplicates_merged = before - result_.symbol.size();
        return std::move(result_);
    }

private:
    SymbolFormat format_;
    std::optional<int> loop_;
    std::size_t line_ = 0;
    std::vector<Element> elements_;
    SymbolReadResult result_;
};

std::string curl_error_text(CURLcode code, const char* buffer) {
    return buffer[0] ? std::string(buffer) : std::string(curl_easy_strerror(code));
}

void curl_global() {
    static const bool ok = curl_global_init(CURL_GLOBAL_DEFAULT) == CURLE_OK;
    if (!ok) throw Error(ErrorKind::Network, "libcurl initialisation failed");
}

/// One transfer attempt into `out`; returns an error message or empty on success.
std::string download(const std::string& url, const fs::path& out) {
    curl_global();
    std::FILE* f = std::fopen(out.c_str(), "wb");
    if (!f) throw Error(ErrorKind::Io, "cannot write " + out.string());
    CURL* h = curl_easy_init();
    char errbuf[CURL_ERROR_SIZE] = {};
    curl_easy_setopt(h, CURLOPT_URL, url.c_str());
    curl_easy_setopt(h, CURLOPT_WRITEDATA, f);
    curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(h, CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(h, CURLOPT_CONNECTTIMEOUT, 30L);
    curl_easy_setopt(h, CURLOPT_ERRORBUFFER, errbuf);
    const CURLcode code = curl_easy_perform(h);
    curl_easy_cleanup(h);
    std::fclose(f);
    return code == CURLE_OK ? std::string{} : url + ": " + curl_error_text(code, errbuf);
}

void quarantine(const fs::path& file, const fs::path& dest_dir, const std::string& relative) {
    const fs::path target = dest_dir / ".quarantine" / relative;
    fs::create_directories(target.parent_path());
    fs::rename(file, target);
}

}  // namespace

SymbolReadResult read_symbol(std::istream& in, SymbolFormat format, std::optional<int> loop) {
    LineParser parser(format, loop);
    std::string line;
    while (std::getline(in, line)) parser.feed(line);
    return parser.finish();
}

void for_each_line(const fs::path& path, const std::function<void(std::string_view)>& visit) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::string pending;
    char buf[1 << 16];
    int n;
    try {
        while ((n = gzread(f, buf, sizeof buf)) > 0) {
            pending.append(buf, static_cast<std::size_t>(n));
            std::size_t start = 0, nl;
            while ((nl = pending.find('\n', start)) != std::string::npos) {
                visit(std::string_view(pending).substr(start, nl - start));
                start = nl + 1;
            }
            pending.erase(0, start);
        }
        if (n < 0) {
            int err = 0;
            const std::string msg = gzerror(f, &err);
            throw Error(ErrorKind::Io, "read error in " + path.string() + ": " + msg);
        }
        if (!pending.empty()) visit(pending);
    } catch (...) {
        gzclose(f);
        throw;
    }
    gzclose(f);
}

SymbolReadResult read_symbol(const fs::path& path, SymbolFormat format, std::optional<int> loop) {
    LineParser parser(format, loop);
    for_each_line(path, [&](std::string_view line) { parser.feed(line); });
    return parser.finish();
}

void write_symbol(std::ostream& out, const Symbol& symbol) {
    for (std::size_t i = 0; i < symbol.size(); ++i)
        out << symbol.key_at(i).str() << '\t' << to_decimal(symbol.coefficient_at(i)) << '\n';
}

void write_symbol(const fs::path& path, const Symbol& symbol) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_symbol(out, symbol);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::vector<ManifestEntry> read_manifest(std::istream& in) {
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view l = trim(line);
        if (l.empty() || l.front() == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss{std::string(l)};
        for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
        if (fields.size() != 4) throw at_line("manifest line needs 4 tab-separated fields", line_no);
        ManifestEntry e;
        e.relative_path = fields[0];
        if (e.relative_path.empty() || fs::path(e.relative_path).is_absolute() ||
            e.relative_path.find("..") != std::string::npos)
            throw at_line("manifest path must be relative", line_no);
        e.sha256 = fields[1];
        if (e.sha256.size() != 64 || e.sha256.find_first_not_of("0123456789abcdef") != std::string::npos)
            throw at_line("checksum must be 64 lowercase hex digits", line_no);
        try {
            e.loop = std::stoi(fields[2]);
            if (fields[3] != "?") e.count = std::stoull(fields[3]);
        } catch (const std::exception&) {
            throw at_line("bad loop or count field", line_no);
        }
        if (e.loop < 1 || e.loop > kMaxLoop) throw at_line("loop out of range", line_no);
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + path.string());
    return read_manifest(in);
}

FetchStatus fetch_file(const ManifestEntry& entry, const std::string& base_url, const fs::path& dest_dir,
                       const FetchOptions& options) {
    const fs::path dest = dest_dir / entry.relative_path;
    if (fs::exists(dest)) {
        if (sha256_file(dest) == entry.sha256) return FetchStatus::AlreadyVerified;
        quarantine(dest, dest_dir, entry.relative_path);
    }
    fs::create_directories(dest.parent_path());
    const fs::path part = dest.string() + ".part";
    std::string url = base_url;
    if (!url.empty() && url.back() != '/') url += '/';
    url += entry.relative_path;

    auto backoff = options.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        last_error = download(url, part);
        if (last_error.empty()) break;
        fs::remove(part);
        if (attempt < options.max_attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    if (!last_error.empty())
        throw Error(ErrorKind::Network, "giving up after " + std::to_string(options.max_attempts) + " attempts: " + last_error);
    const std::string got = sha256_file(part);
    if (got != entry.sha256) {
        quarantine(part, dest_dir, entry.relative_path);
        throw Error(ErrorKind::Checksum, entry.relative_path + ": sha256 " + got + " != expected " + entry.sha256);
    }
    fs::rename(part, dest);
    return FetchStatus::Downloaded;
}

fs::path data_dir() {
    const char* env = std::getenv("FFSYM_DATA_DIR");
    return env && *env ? fs::path(env) : fs::path("data");
}

fs::path registry_path(const fs::path& dir, int loop) { return dir / ("symbol_L" + std::to_string(loop) + ".txt"); }

std::vector<IngestReport> ingest(const std::vector<ManifestEntry>& manifest, const std::string& base_url,
                                 const fs::path& download_dir, const fs::path& registry, const FetchOptions& options) {
    std::vector<IngestReport> reports;
    std::map<int, std::vector<Element>> by_loop;
    for (const auto& entry : manifest) {
        IngestReport r{entry};
        r.fetch = fetch_file(entry, base_url, download_dir, options);
        auto read = read_symbol(download_dir / entry.relative_path, SymbolFormat::Permissive, entry.loop);
        r.elements = read.symbol.size();
        r.zeros_dropped = read.zeros_dropped;
        if (entry.count && *entry.count != r.elements)
            throw Error(ErrorKind::Data, entry.relative_path + ": " + std::to_string(r.elements) +
                                             " nonzero elements, manifest expects " + std::to_string(*entry.count));
        auto& bucket = by_loop[entry.loop];
        for (std::size_t i = 0; i < read.symbol.size(); ++i)
            bucket.emplace_back(read.symbol.key_at(i), read.symbol.coefficient_at(i));
        reports.push_back(std::move(r));
    }
    fs::create_directories(registry);
    for (auto& [loop, elements] : by_loop) {
        const Symbol symbol(loop, std::move(elements));
        const fs::path out = registry_path(registry, loop);
        const fs::path tmp = out.string() + ".tmp";
        write_symbol(tmp, symbol);
        fs::rename(tmp, out);
    }
    return reports;
}

Symbol load_symbol(int loop, const fs::path& registry) {
    const fs::path p = registry_path(registry, loop);
    if (fs::exists(p)) return read_symbol(p, SymbolFormat::Canonical, loop).symbol;
    if (loop == 1 || loop == 2) return builtin_symbol(loop);
    throw Error(ErrorKind::Data, "no loop-" + std::to_string(loop) + " symbol in " + registry.string() +
                                     "; run `ffsym ingest` first");
}

PredictionList read_predictions(std::istream& in) {
    PredictionList out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw at_line("prediction line needs <id>\\t<value>", line_no);
        std::string id = line.substr(0, tab);
        if (!seen.insert(id).second) throw Error(ErrorKind::Data, "duplicate prediction id '" + id + "'");
        out.emplace_back(std::move(id), parse_prediction(std::string_view(line).substr(tab + 1)));
    }
    return out;
}

Truth read_truth(std::istream& in) {
    Truth t;
    std::string line;
    if (in.peek() == '#') {
        std::getline(in, line);
        if (line.starts_with("#task=")) {
            std::size_t index = 0, line_no = 1;
            while (std::getline(in, line)) {
                ++line_no;
                const auto tab = line.find('\t');
                if (tab == std::string::npos) throw at_line("dataset line needs <input>\\t<target>", line_no);
                try {
                    t.values.push_back(decode_coefficient(split_tokens(std::string_view(line).substr(tab + 1))));
                } catch (const ParseError& e) {
                    throw at_line(e.what(), line_no);
                }
                t.ids.push_back(std::to_string(index++));
            }
            return t;
        }
    }
    auto read = read_symbol(in, SymbolFormat::Permissive);
    for (std::size_t i = 0; i < read.symbol.size(); ++i) {
        t.ids.push_back(read.symbol.key_at(i).str());
        t.values.push_back(read.symbol.coefficient_at(i));
    }
    t.symbol = std::move(read.symbol);
    return t;
}

void write_instances(std::ostream& out, const std::vector<RelationInstance>& instances) {
    for (const auto& inst : instances) out << format_instance(inst) << '\n';
}

std::vector<RelationInstance> read_instances(std::istream& in) {
    std::vector<RelationInstance> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(parse_instance(line));
        } catch (const ParseError& e) {
            throw at_line(e.what(), line_no);
        }
    }
    return out;
}

}  // namespace ffsym
