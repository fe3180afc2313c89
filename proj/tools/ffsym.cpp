#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ffsym/datasets.hpp"
#include "ffsym/error.hpp"
#include "ffsym/eval.hpp"
#include "ffsym/io.hpp"
#include "ffsym/quad.hpp"
#include "ffsym/relations.hpp"
#include "ffsym/symbol.hpp"
#include "ffsym/trivial_zero.hpp"

namespace fs = std::filesystem;
using namespace ffsym;

namespace {

constexpr std::uint64_t kExhaustiveLimit = 10'000'000;

/// stdout unless a path is given.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw Error(ErrorKind::Io, "cannot write " + path);
    }
    std::ostream& operator*() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

/// "-" reads standard input once; later requests for "-" get the same bytes.
class InputSource {
public:
    std::unique_ptr<std::istream> open(const std::string& path) {
        if (path == "-") {
            if (!stdin_) stdin_ = std::string(std::istreambuf_iterator<char>(std::cin), {});
            return std::make_unique<std::istringstream>(*stdin_);
        }
        auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
        if (!*in) throw Error(ErrorKind::Io, "cannot open " + path);
        return in;
    }

private:
    std::optional<std::string> stdin_;
};

Symbol symbol_from(const std::string& path, int loop) {
    if (path.empty()) return load_symbol(loop);
    if (path == "-") return read_symbol(std::cin, SymbolFormat::Permissive, loop).symbol;
    return read_symbol(fs::path(path), SymbolFormat::Permissive, loop).symbol;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct VerifyResult {
    std::string status = "ok";
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::vector<RelationInstance> kept;
};

int run_verify(int loop, const std::string& n_text, std::optional<std::uint64_t> seed, const std::string& only,
               unsigned threads, const std::string& truth_path, const std::string& out_path) {
    const Symbol truth = symbol_from(truth_path, loop);
    const bool exhaustive = n_text == "all";
    std::size_t n = 0;
    if (!exhaustive) {
        try {
            n = std::stoull(n_text);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Usage, "--n takes a positive count or 'all'");
        }
        if (n == 0) throw Error(ErrorKind::Usage, "--n must be positive");
        if (!seed) throw Error(ErrorKind::Usage, "sampled verification requires --seed");
    }
    std::vector<const Relation*> relations;
    for (const auto& r : catalog())
        if (only.empty() || r.name == only) relations.push_back(&r);
    if (relations.empty()) find_relation(only);  // throws a usage error

    if (exhaustive)
        for (const Relation* r : relations)
            if (instance_space_size(*r, loop) > kExhaustiveLimit)
                throw Error(ErrorKind::Usage, r->name + " has " + std::to_string(instance_space_size(*r, loop)) +
                                                  " instances at loop " + std::to_string(loop) +
                                                  "; exhaustive mode is capped at 10^7, use --n <count> --seed <s>");

    const bool keep = !out_path.empty();
    std::vector<VerifyResult> results(relations.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(relations.size());
    auto worker = [&] {
        for (std::size_t i; (i = next++) < relations.size();) try {
            const Relation& rel = *relations[i];
            VerifyResult& res = results[i];
            auto check = [&](const RelationInstance& inst) {
                ++res.instances;
                if (residual(inst, truth) != 0) ++res.failures;
                if (keep) res.kept.push_back(inst);
            };
            const auto [lo, hi] = slot_range(rel, loop);
            if (lo > hi) {
                res.status = "n/a";
                continue;
            }
            if (exhaustive) {
                for_each_instance(rel, loop, check);
            } else {
                try {
                    for (const auto& inst : generate_instances(rel, loop, n, truth, *seed)) check(inst);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::Data) throw;
                    res.status = "no-support";
                    continue;
                }
            }
            if (res.failures) res.status = "fail";
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < std::min<unsigned>(threads, static_cast<unsigned>(relations.size())); ++t)
        pool.emplace_back(worker);
    worker();
    pool.clear();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::size_t failures = 0, total = 0;
    std::cout << "relation\tstatus\tinstances\tnonzero_residuals\n";
    for (std::size_t i = 0; i < relations.size(); ++i) {
        std::cout << relations[i]->name << '\t' << results[i].status << '\t' << results[i].instances << '\t'
                  << results[i].failures << '\n';
        failures += results[i].failures;
        total += results[i].instances;
    }
    std::cout << "total\t" << (failures ? "fail" : "ok") << '\t' << total << '\t' << failures << '\n';
    if (keep) {
        Output out(out_path);
        for (const auto& r : results) write_instances(*out, r.kept);
    }
    if (failures)
        throw Error(ErrorKind::Relation, std::to_string(failures) + " of " + std::to_string(total) +
                                             " instances have a nonzero residual");
    return 0;
}

void write_split(const fs::path& dir, const Dataset& d) {
    fs::create_directories(dir);
    for (auto [name, examples] : {std::pair{"train.txt", &d.train}, std::pair{"test.txt", &d.test}}) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / name).string());
        write_dataset(out, d.header, *examples);
    }
    std::cout << d.header.task << '\t' << dir.string() << "\ttrain=" << d.train.size() << "\ttest=" << d.test.size()
              << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symbol calculus, relation checks, dataset emission and scoring for the three-gluon form factor symbol"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ffsym 0.1.0");

    // count
    int count_loop = 0;
    bool count_brute = false;
    auto* count = app.add_subcommand("count", "Number of keys that are not trivial zeros");
    count->add_option("--loop", count_loop, "Loop order")->required()->check(CLI::Range(1, kMaxLoop));
    count->add_flag("--brute", count_brute, "Also enumerate every key (loop <= 4)");

    // builtin
    int builtin_loop = 0;
    std::string builtin_out;
    auto* builtin = app.add_subcommand("builtin", "Emit the exactly known one- or two-loop symbol");
    builtin->add_option("--loop", builtin_loop)->required()->check(CLI::IsMember({1, 2}));
    builtin->add_option("--out", builtin_out, "Output file (default stdout)");

    // ingest
    std::string manifest_path, base_url, download_dir, registry_dir;
    int attempts = 5;
    auto* ingest_cmd = app.add_subcommand("ingest", "Fetch, verify and normalise published symbol files");
    ingest_cmd->add_option("--manifest", manifest_path)->required();
    ingest_cmd->add_option("--base-url", base_url, "Prefix for manifest paths (http, https or file URL)")->required();
    ingest_cmd->add_option("--download-dir", download_dir, "Where raw files are kept (default <registry>/raw)");
    ingest_cmd->add_option("--registry", registry_dir, "Canonical symbol directory (default $FFSYM_DATA_DIR or ./data)");
    ingest_cmd->add_option("--attempts", attempts, "Download attempts per file")->check(CLI::PositiveNumber);

    // verify-relations
    int verify_loop = 0;
    std::string verify_n = "500", verify_relation, verify_truth, verify_out;
    std::optional<std::uint64_t> verify_seed;
    unsigned verify_threads = default_threads();
    auto* verify = app.add_subcommand("verify-relations", "Check catalog relations against a symbol");
    verify->add_option("--loop", verify_loop)->required()->check(CLI::Range(1, kMaxLoop));
    verify->add_option("--n", verify_n, "Instances per relation, or 'all' for exhaustive enumeration");
    verify->add_option("--seed", verify_seed);
    verify->add_option("--relation", verify_relation, "Only this relation");
    verify->add_option("--truth", verify_truth, "Symbol file (default: registry or built-in)");
    verify->add_option("--threads", verify_threads)->check(CLI::PositiveNumber);
    verify->add_option("--out", verify_out, "Write the checked instances here");

    // quad
    std::string quad_in, quad_out;
    int quad_loop = 0;
    bool quad_stats_flag = false;
    auto* quad = app.add_subcommand("quad", "Compress a symbol to the quad representation");
    quad->add_option("--in", quad_in, "Symbol file")->required();
    quad->add_option("--loop", quad_loop, "Loop order (default: from the file)");
    quad->add_option("--out", quad_out, "Quad file (default stdout)");
    quad->add_flag("--stats", quad_stats_flag, "Print per-suffix counts to stderr");

    // dataset
    std::string ds_task, ds_out, ds_symbol, ds_lower, ds_quad, ds_zeros = "uniform", ds_target = "label", ds_repr = "full",
                                                                ds_mode = "plain", ds_variant = "plain";
    int ds_loop = 0;
    std::optional<std::size_t> ds_train;
    std::size_t ds_test = 10'000;
    std::optional<int> ds_k;
    std::uint64_t ds_seed = 0;
    bool ds_sign_last = false;
    double ds_trivial = 0.05;
    auto* dataset = app.add_subcommand("dataset", "Emit a training/test dataset");
    dataset->add_option("--task", ds_task)->required()->check(CLI::IsMember({"zero-nonzero", "coeff", "mixed", "strikeout"}));
    dataset->add_option("--loop", ds_loop, "Loop order (the higher loop for mixed and strikeout)")->required()->check(CLI::Range(1, kMaxLoop));
    dataset->add_option("--seed", ds_seed)->required();
    dataset->add_option("--out-dir", ds_out)->required();
    dataset->add_option("--symbol", ds_symbol, "Symbol file for --loop (default registry)");
    dataset->add_option("--lower-symbol", ds_lower, "Symbol file for --loop - 1 (default registry)");
    dataset->add_option("--quad", ds_quad, "Quad file for --repr quad (default: compress the symbol)");
    dataset->add_option("--train", ds_train, "Training examples (default: all not in test)");
    dataset->add_option("--test", ds_test, "Test examples (per loop for mixed)");
    dataset->add_option("--zeros", ds_zeros)->check(CLI::IsMember({"uniform", "biased"}));
    dataset->add_option("--trivial-fraction", ds_trivial, "Trivial share of zeros under --zeros biased");
    dataset->add_option("--target", ds_target)->check(CLI::IsMember({"label", "coeff"}));
    dataset->add_option("--repr", ds_repr)->check(CLI::IsMember({"full", "quad"}));
    dataset->add_option("--mode", ds_mode)->check(CLI::IsMember({"plain", "magnitude", "sign"}));
    dataset->add_option("--k", ds_k, "Strike distance (default: all parents)");
    dataset->add_option("--variant", ds_variant, "Strikeout input transform");
    dataset->add_flag("--sign-last", ds_sign_last, "Put the sign token after the digits");

    // score
    std::string score_truth, score_pred, score_ids, score_out;
    auto* score = app.add_subcommand("score", "Score a prediction file against truth");
    score->add_option("--truth", score_truth, "Symbol or dataset file, '-' for stdin")->required();
    score->add_option("--pred", score_pred, "Prediction file, '-' for stdin")->required();
    score->add_option("--test-ids", score_ids, "One id per line (default: every truth id)");
    score->add_option("--out", score_out);

    // curves
    std::string curves_dir, curves_instances, curves_truth, curves_out;
    int curves_loop = 0;
    bool curves_force = false;
    auto* curves = app.add_subcommand("curves", "Relation metrics per epoch");
    curves->add_option("--dir", curves_dir, "Directory of epoch prediction files")->required();
    curves->add_option("--instances", curves_instances, "Instance file")->required();
    curves->add_option("--loop", curves_loop, "Loop order of the truth")->required()->check(CLI::Range(1, kMaxLoop));
    curves->add_option("--truth", curves_truth, "Symbol file (default registry or built-in)");
    curves->add_flag("--force-trivial-zero", curves_force, "Score trivially-zero members as predicted 0");
    curves->add_option("--out", curves_out);

    // hist
    std::string hist_in, hist_out;
    int hist_loop = 0, hist_bins = 10;
    auto* hist = app.add_subcommand("hist", "Histogram of log10 coefficient magnitudes");
    hist->add_option("--in", hist_in, "Symbol file");
    hist->add_option("--loop", hist_loop, "Registry or built-in symbol instead of --in");
    hist->add_option("--bins-per-decade", hist_bins)->check(CLI::PositiveNumber);
    hist->add_option("--out", hist_out);

    // angles
    std::string angles_in, angles_out;
    auto* angles = app.add_subcommand("angles", "Angles between the six letter embeddings");
    angles->add_option("--in", angles_in, "Six rows of numbers")->required();
    angles->add_option("--out", angles_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ffsym: error[usage]: " << e.what() << '\n';
        return 2;
    }

    try {
        if (count->parsed()) {
            const Coefficient c = count_valid_keys(count_loop);
            std::cout << to_decimal(c) << '\n';
            if (count_brute) {
                if (count_loop > 4) throw Error(ErrorKind::Usage, "--brute is limited to loop <= 4");
                std::uint64_t brute = 0;
                for (std::uint64_t r = 0; r < key_space_size(2 * count_loop); ++r)
                    brute += !is_trivial_zero(key_from_rank(r, 2 * count_loop));
                std::cout << brute << '\n';
                if (Coefficient(brute) != c) throw Error(ErrorKind::Data, "transfer matrix and enumeration disagree");
            }
        } else if (builtin->parsed()) {
            Output out(builtin_out);
            write_symbol(*out, builtin_symbol(builtin_loop));
        } else if (ingest_cmd->parsed()) {
            const fs::path registry = registry_dir.empty() ? data_dir() : fs::path(registry_dir);
            const fs::path raw = download_dir.empty() ? registry / "raw" : fs::path(download_dir);
            FetchOptions opts;
            opts.max_attempts = attempts;
            const auto reports = ingest(read_manifest(fs::path(manifest_path)), base_url, raw, registry, opts);
            std::cout << "file\tloop\tfetch\telements\tzeros_dropped\n";
            for (const auto& r : reports)
                std::cout << r.entry.relative_path << '\t' << r.entry.loop << '\t'
                          << (r.fetch == FetchStatus::Downloaded ? "downloaded" : "verified") << '\t' << r.elements << '\t'
                          << r.zeros_dropped << '\n';
            // kept beside the registry so later runs can compare counts for loops 6 and 7
            const fs::path kept = registry / "manifest.tsv";
            if (!fs::exists(kept) || !fs::equivalent(manifest_path, kept))
                fs::copy_file(manifest_path, kept, fs::copy_options::overwrite_existing);
        } else if (verify->parsed()) {
            return run_verify(verify_loop, verify_n, verify_seed, verify_relation, verify_threads, verify_truth, verify_out);
        } else if (quad->parsed()) {
            auto read = read_symbol(fs::path(quad_in), SymbolFormat::Permissive,
                                    quad_loop ? std::optional<int>(quad_loop) : std::nullopt);
            const QuadSymbol q = to_quad(read.symbol);
            Output out(quad_out);
            write_quad(*out, q);
            if (quad_stats_flag) {
                const auto stats = quad_stats(q);
                for (QuadSuffix s : all_quad_suffixes())
                    std::cerr << quad_token(s) << '\t' << stats[static_cast<int>(s)] << '\n';
                std::cerr << "total\t" << q.size() << '\n';
            }
        } else if (dataset->parsed()) {
            SplitSpec spec;
            spec.train = ds_train;
            spec.test = ds_test;
            spec.seed = ds_seed;
            spec.zeros = ds_zeros == "biased" ? ZeroPolicy::Biased : ZeroPolicy::Uniform;
            spec.trivial_fraction = ds_trivial;
            spec.sign = ds_sign_last ? SignPosition::Last : SignPosition::First;
            const fs::path dir(ds_out);
            if (ds_task == "zero-nonzero") {
                write_split(dir, make_zero_nonzero(symbol_from(ds_symbol, ds_loop), spec,
                                                   ds_target == "coeff" ? ZeroNonzeroTarget::Coefficient
                                                                        : ZeroNonzeroTarget::Label));
            } else if (ds_task == "coeff") {
                const ValueMode mode = parse_value_mode(ds_mode);
                if (ds_repr == "quad") {
                    QuadSymbol q;
                    if (!ds_quad.empty()) {
                        std::ifstream in(ds_quad);
                        if (!in) throw Error(ErrorKind::Io, "cannot open " + ds_quad);
                        q = read_quad(in);
                    } else {
                        q = to_quad(symbol_from(ds_symbol, ds_loop));
                    }
                    write_split(dir, make_coeff_from_key(q, spec, mode));
                } else {
                    write_split(dir, make_coeff_from_key(symbol_from(ds_symbol, ds_loop), spec, mode));
                }
            } else if (ds_task == "mixed") {
                if (ds_loop < 2) throw Error(ErrorKind::Usage, "mixed needs --loop >= 2");
                const auto m = make_mixed_loop(symbol_from(ds_lower, ds_loop - 1), symbol_from(ds_symbol, ds_loop), spec);
                write_split(dir / "low", m.low);
                write_split(dir / "high", m.high);
                write_split(dir / "merged", m.merged);
                write_split(dir / "control", m.control);
            } else {
                if (ds_loop < 2) throw Error(ErrorKind::Usage, "strikeout needs --loop >= 2");
                const Symbol child = symbol_from(ds_symbol, ds_loop);
                const Symbol parents = symbol_from(ds_lower, ds_loop - 1);
                StrikeoutConfig config{ds_k, parse_strike_variant(ds_variant), ds_seed, spec.sign};
                const auto s = make_strikeout(child, parents, config, spec);
                fs::create_directories(dir);
                for (auto [name, keys] : {std::pair{"train.txt", &s.train}, std::pair{"test.txt", &s.test}}) {
                    std::ofstream out(dir / name, std::ios::binary);
                    if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / name).string());
                    out << format_header(s.header) << '\n';
                    for (const Key& k : *keys) {
                        const auto e = strikeout_example(k, child, parents, config);
                        out << e.input << '\t' << e.target << '\n';
                    }
                }
                std::cout << "strikeout\t" << dir.string() << "\tcandidates=" << s.candidates
                          << "\tunique=" << s.train.size() + s.test.size() << "\ttrain=" << s.train.size()
                          << "\ttest=" << s.test.size() << '\n';
            }
        } else if (score->parsed()) {
            InputSource inputs;
            const Truth truth = read_truth(*inputs.open(score_truth));
            const PredictionList preds = read_predictions(*inputs.open(score_pred));
            std::optional<std::vector<std::string>> ids;
            if (!score_ids.empty()) {
                ids.emplace();
                auto in = inputs.open(score_ids);
                for (std::string line; std::getline(*in, line);)
                    if (!line.empty()) ids->push_back(line);
            }
            Output out(score_out);
            write_metrics(*out, score_predictions(truth, preds, ids));
        } else if (curves->parsed()) {
            const Symbol truth = symbol_from(curves_truth, curves_loop);
            std::ifstream in(curves_instances);
            if (!in) throw Error(ErrorKind::Io, "cannot open " + curves_instances);
            const auto table = relation_curves(curves_dir, read_instances(in), truth, {curves_force});
            for (const auto& w : table.warnings) std::cerr << "ffsym: warning: " << w << '\n';
            Output out(curves_out);
            write_curves(*out, table);
        } else if (hist->parsed()) {
            if (hist_in.empty() == (hist_loop == 0)) throw Error(ErrorKind::Usage, "hist needs exactly one of --in, --loop");
            const Symbol s = hist_in.empty() ? load_symbol(hist_loop)
                                             : read_symbol(fs::path(hist_in), SymbolFormat::Permissive).symbol;
            Output out(hist_out);
            write_histogram(*out, magnitude_histogram(s, hist_bins));
        } else if (angles->parsed()) {
            std::ifstream in(angles_in);
            if (!in) throw Error(ErrorKind::Io, "cannot open " + angles_in);
            Output out(angles_out);
            write_angles(*out, embedding_angles(read_embeddings(in)));
        }
    } catch (const Error& e) {
        std::cerr << "ffsym: error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ffsym: error[internal]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
