#include "ffsym/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ffsym/error.hpp"

namespace fs = std::filesystem;

namespace ffsym {

double confidence_interval(double accuracy, std::size_t n) {
    if (n == 0) throw Error(ErrorKind::Range, "confidence interval of an empty test set");
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - accuracy) / static_cast<double>(n));
}

Metrics score_predictions(const Truth& truth, const PredictionList& predictions,
                          const std::optional<std::vector<std::string>>& test_ids) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < truth.ids.size(); ++i) index.emplace(truth.ids[i], i);

    auto truth_value = [&](const std::string& id) -> Coefficient {
        if (auto it = index.find(id); it != index.end()) return truth.values[it->second];
        if (truth.symbol) {
            Key k;
            try {
                k = parse_key(id);
            } catch (const ParseError&) {
                throw Error(ErrorKind::Data, "id '" + id + "' is not a key");
            }
            if (k.size() != 2 * truth.symbol->loop())
                throw Error(ErrorKind::Data, "id '" + id + "' does not match the truth loop order");
            return truth.symbol->lookup(k);
        }
        throw Error(ErrorKind::Data, "unknown example id '" + id + "'");
    };

    std::unordered_map<std::string, const std::optional<Coefficient>*> predicted;
    for (const auto& [id, value] : predictions) {
        truth_value(id);  // rejects unknown ids
        predicted.emplace(id, &value);
    }

    const std::vector<std::string>& ids = test_ids ? *test_ids : truth.ids;
    if (ids.empty()) throw Error(ErrorKind::Range, "empty test set");

    Metrics m;
    m.n = ids.size();
    std::size_t element = 0, mag = 0, sign = 0, nonzero = 0, positive = 0;
    for (const auto& id : ids) {
        const Coefficient t = truth_value(id);
        auto it = predicted.find(id);
        if (it == predicted.end()) continue;
        ++m.covered;
        const auto& p = *it->second;
        if (!p) {
            ++m.invalid;
            continue;
        }
        element += *p == t;
        mag += magnitude(*p) == magnitude(t);
        sign += sign_char(*p) == sign_char(t);
        if (*p != 0) {
            ++nonzero;
            positive += !is_negative(*p);
        }
    }
    const double n = static_cast<double>(m.n);
    m.element = element / n;
    m.magnitude = mag / n;
    m.sign = sign / n;
    if (nonzero) m.sign_balance = static_cast<double>(positive) / static_cast<double>(nonzero);
    m.interval = confidence_interval(m.element, m.n);
    return m;
}

KeyedPredictions keyed_predictions(const PredictionList& predictions) {
    KeyedPredictions out;
    out.reserve(predictions.size());
    for (const auto& [id, value] : predictions) out.emplace(parse_key(id), value);
    return out;
}

double log10_magnitude(const Coefficient& c) {
    if (c == 0) throw Error(ErrorKind::Range, "log of zero coefficient");
    const std::string digits = to_decimal(magnitude(c));
    if (digits.size() <= 15) return std::log10(std::stod(digits));
    return std::log10(std::stod(digits.substr(0, 17))) + static_cast<double>(digits.size() - 17);
}

std::vector<HistogramBin> magnitude_histogram(const Symbol& symbol, int bins_per_decade) {
    if (bins_per_decade < 1) throw Error(ErrorKind::Range, "bins per decade must be positive");
    std::map<long, std::size_t> counts;
    for (const auto& c : symbol.coefficients())
        ++counts[static_cast<long>(std::floor(log10_magnitude(c) * bins_per_decade + 1e-9))];
    std::vector<HistogramBin> bins;
    if (counts.empty()) return bins;
    const double w = 1.0 / bins_per_decade;
    for (long b = counts.begin()->first; b <= counts.rbegin()->first; ++b) {
        auto it = counts.find(b);
        bins.push_back({b * w, (b + 1) * w, it == counts.end() ? 0 : it->second});
    }
    return bins;
}

namespace {

double angle_between(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0 || nv == 0) throw Error(ErrorKind::Range, "angle with a zero-length vector");
    const double c = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace

double round_angle(double degrees) { return std::round(degrees * 10.0) / 10.0; }

AngleReport embedding_angles(const Eigen::MatrixXd& vectors) {
    if (vectors.rows() != 6 || vectors.cols() < 1) throw Error(ErrorKind::Range, "expected six embedding rows");
    for (int i = 0; i < 6; ++i)
        if (vectors.row(i).norm() == 0)
            throw Error(ErrorKind::Range, std::string("embedding of '") + static_cast<char>('a' + i) + "' has zero norm");
    AngleReport r;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            r.pairwise[i][j] = i == j ? 0.0 : angle_between(vectors.row(i).transpose(), vectors.row(j).transpose());
    for (const char* name : {"abc", "def", "abf", "bcd", "ace"}) {
        TriangleReport t{name};
        for (int k = 0; k < 3; ++k) {
            const Eigen::VectorXd p = vectors.row(name[k] - 'a').transpose();
            const Eigen::VectorXd q = vectors.row(name[(k + 1) % 3] - 'a').transpose();
            const Eigen::VectorXd s = vectors.row(name[(k + 2) % 3] - 'a').transpose();
            t.angles[k] = angle_between(q - p, s - p);
            t.max_deviation = std::max(t.max_deviation, std::abs(t.angles[k] - 60.0));
        }
        r.triangles.push_back(t);
    }
    return r;
}

Eigen::MatrixXd read_embeddings(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        bool first = true;
        while (ss >> tok) {
            if (first && tok.size() == 1 && tok[0] >= 'a' && tok[0] <= 'f') {
                first = false;
                continue;
            }
            first = false;
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError("bad number '" + tok + "' in embedding row " + std::to_string(rows.size() + 1));
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.size() != 6) throw Error(ErrorKind::Range, "expected 6 embedding rows, found " + std::to_string(rows.size()));
    const auto d = rows.front().size();
    Eigen::MatrixXd m(6, static_cast<Eigen::Index>(d));
    for (int i = 0; i < 6; ++i) {
        if (rows[i].size() != d) throw Error(ErrorKind::Range, "embedding rows differ in length");
        for (std::size_t j = 0; j < d; ++j) m(i, static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

CurveTable relation_curves(const fs::path& dir, const std::vector<RelationInstance>& instances, const Symbol& truth,
                           ScoreOptions options) {
    if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, dir.string() + " is not a directory");
    std::map<int, fs::path> epochs;
    CurveTable table;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        const auto start = name.find_first_of("0123456789");
        if (start == std::string::npos) continue;
        const auto end = name.find_first_not_of("0123456789", start);
        const int epoch = std::stoi(name.substr(start, end - start));
        if (!epochs.emplace(epoch, entry.path()).second)
            table.warnings.push_back("epoch " + std::to_string(epoch) + " has several files; using " +
                                     epochs[epoch].filename().string());
    }
    if (epochs.empty()) throw Error(ErrorKind::Data, "no epoch prediction files in " + dir.string());
    for (int e = epochs.begin()->first; e < epochs.rbegin()->first; ++e)
        if (!epochs.contains(e)) table.warnings.push_back("epoch " + std::to_string(e) + " missing; skipped");

    std::vector<std::string> order;
    std::map<std::string, std::vector<RelationInstance>> groups;
    for (const auto& rel : catalog())
        if (std::any_of(instances.begin(), instances.end(), [&](const auto& i) { return i.relation == rel.name; }))
            order.push_back(rel.name);
    for (const auto& inst : instances) groups[inst.relation].push_back(inst);

    for (const auto& [epoch, path] : epochs) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
        const KeyedPredictions predictions = keyed_predictions(read_predictions(in));
        for (const auto& name : order)
            table.rows.push_back({epoch, name, score_instances(groups[name], truth, predictions, options)});
    }
    return table;
}

namespace {

std::string fixed(double v, int digits = 6) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

}  // namespace

void write_metrics(std::ostream& out, const Metrics& m) {
    out << "n\tcovered\tinvalid\telement\tmagnitude\tsign\tsign_balance\tinterval95\n"
        << m.n << '\t' << m.covered << '\t' << m.invalid << '\t' << fixed(m.element) << '\t' << fixed(m.magnitude) << '\t'
        << fixed(m.sign) << '\t' << (m.sign_balance ? fixed(*m.sign_balance) : std::string("na")) << '\t'
        << fixed(m.interval) << '\n';
}

void write_histogram(std::ostream& out, const std::vector<HistogramBin>& bins) {
    out << "log10_lower\tlog10_upper\tcount\n";
    for (const auto& b : bins) out << fixed(b.lower, 3) << '\t' << fixed(b.upper, 3) << '\t' << b.count << '\n';
}

void write_angles(std::ostream& out, const AngleReport& r) {
    out << "pair\tdegrees\n";
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            out << static_cast<char>('a' + i) << static_cast<char>('a' + j) << '\t' << fixed(round_angle(r.pairwise[i][j]), 1)
                << '\n';
    out << "triangle\tangle1\tangle2\tangle3\tmax_dev_from_60\n";
    for (const auto& t : r.triangles)
        out << t.name << '\t' << fixed(round_angle(t.angles[0]), 1) << '\t' << fixed(round_angle(t.angles[1]), 1) << '\t'
            << fixed(round_angle(t.angles[2]), 1) << '\t' << fixed(round_angle(t.max_deviation), 1) << '\n';
}

void write_curves(std::ostream& out, const CurveTable& table) {
    out << "epoch\trelation\tinstances\tsatisfied\tmagnitudes\tsigns\texact\n";
    for (const auto& row : table.rows)
        out << row.epoch << '\t' << row.relation << '\t' << row.rates.instances << '\t' << fixed(row.rates.satisfied) << '\t'
            << fixed(row.rates.magnitudes) << '\t' << fixed(row.rates.signs) << '\t' << fixed(row.rates.exact) << '\n';
}

}  // namespace ffsym
