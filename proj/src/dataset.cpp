#include "dagfault/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <zlib.h>

#include "dagfault/log.hpp"
#include "dagfault/rng.hpp"

namespace dagfault {

std::vector<std::string> Dataset::variable_ids() const {
    std::vector<std::string> ids;
    ids.reserve(variables.size());
    for (const auto& v : variables) ids.push_back(v.id);
    return ids;
}

std::map<ClassId, Index> Dataset::class_histogram() const {
    std::map<ClassId, Index> h;
    for (ClassId c : labels) ++h[c];
    return h;
}

std::vector<ClassId> Dataset::distinct_classes() const {
    auto h = class_histogram();
    std::vector<ClassId> out;
    out.reserve(h.size());
    for (const auto& [c, n] : h) out.push_back(c);
    return out;
}

Dataset Dataset::select_rows(const std::vector<Index>& rows) const {
    Dataset out;
    out.variables = variables;
    out.values.resize(static_cast<Index>(rows.size()), values.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.values.row(static_cast<Index>(i)) = values.row(rows[i]);
        out.labels.push_back(labels[static_cast<std::size_t>(rows[i])]);
    }
    return out;
}

Dataset Dataset::select_columns(const std::vector<Index>& cols) const {
    Dataset out;
    out.labels = labels;
    out.values.resize(values.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.values.col(static_cast<Index>(j)) = values.col(cols[j]);
        out.variables.push_back(variables[static_cast<std::size_t>(cols[j])]);
    }
    return out;
}

namespace {

bool is_gzip(const std::string& raw) {
    return raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0x1f &&
           static_cast<unsigned char>(raw[1]) == 0x8b;
}

std::string gunzip(const std::string& raw) {
    z_stream zs;
    std::memset(&zs, 0, sizeof(zs));
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
        throw IoError("zlib init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
    zs.avail_in = static_cast<uInt>(raw.size());
    std::string out;
    char buf[1 << 16];
    int ret;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof(buf);
        ret = inflate(&zs, Z_NO_FLUSH);
        if (ret != Z_OK && ret != Z_STREAM_END) {
            inflateEnd(&zs);
            throw IoError("gzip decompression failed");
        }
        out.append(buf, sizeof(buf) - zs.avail_out);
    } while (ret != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && p == last;
}

// Accepts "k" (integer) or "IDV(k)"; returns false on anything else.
bool parse_label(const std::string& cell, long& out) {
    std::string t = trim(cell);
    if (t.rfind("IDV(", 0) == 0 && t.back() == ')')
        t = t.substr(4, t.size() - 5);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && p == last;
}

}  // namespace

CsvLoadResult load_csv(const std::string& path, const VariableSchema& schema,
                       const std::string& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::string raw((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    if (is_gzip(raw)) raw = gunzip(raw);

    std::istringstream stream(raw);
    std::string line;
    if (!std::getline(stream, line)) throw EmptyDataset();

    const auto header = split_line(line);
    std::vector<Index> col_of(static_cast<std::size_t>(schema.size()), -1);
    Index label_col = -1;
    for (std::size_t h = 0; h < header.size(); ++h) {
        const std::string name = trim(header[h]);
        if (name == label_column) label_col = static_cast<Index>(h);
        Index si = schema.find(name);
        if (si >= 0) col_of[static_cast<std::size_t>(si)] = static_cast<Index>(h);
    }
    for (Index j = 0; j < schema.size(); ++j)
        if (col_of[static_cast<std::size_t>(j)] < 0)
            throw MissingColumn(schema.variables[static_cast<std::size_t>(j)].id);
    if (label_col < 0) throw MissingColumn(label_column);

    const Index d = schema.size();
    std::vector<double> flat;
    std::vector<ClassId> labels;
    Index dropped = 0;
    Index row_no = 0;
    std::vector<double> rowbuf(static_cast<std::size_t>(d));
    while (std::getline(stream, line)) {
        if (trim(line).empty()) continue;
        ++row_no;
        const auto cells = split_line(line);
        if (static_cast<Index>(cells.size()) <= label_col) {
            ++dropped;
            continue;
        }
        long lab;
        if (!parse_label(cells[static_cast<std::size_t>(label_col)], lab))
            throw LabelOutOfRange(row_no, cells[static_cast<std::size_t>(label_col)]);
        if (lab < 0 || lab > kMaxClassId)
            throw LabelOutOfRange(row_no, cells[static_cast<std::size_t>(label_col)]);
        bool ok = true;
        for (Index j = 0; j < d; ++j) {
            const Index src = col_of[static_cast<std::size_t>(j)];
            double v;
            if (static_cast<Index>(cells.size()) <= src ||
                !parse_double(cells[static_cast<std::size_t>(src)], v) ||
                !std::isfinite(v)) {
                ok = false;
                break;
            }
            rowbuf[static_cast<std::size_t>(j)] = v;
        }
        if (!ok) {
            ++dropped;
            continue;
        }
        flat.insert(flat.end(), rowbuf.begin(), rowbuf.end());
        labels.push_back(static_cast<ClassId>(lab));
    }

    if (labels.empty()) throw EmptyDataset();
    if (dropped > 0)
        log::info("load_csv: dropped " + std::to_string(dropped) +
                  " rows with unparseable or non-finite cells");

    CsvLoadResult res;
    res.dropped_rows = dropped;
    res.data.variables = schema.variables;
    res.data.labels = std::move(labels);
    const Index n = static_cast<Index>(res.data.labels.size());
    res.data.values.resize(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j)
            res.data.values(i, j) = flat[static_cast<std::size_t>(i * d + j)];
    return res;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace

void save_csv(const Dataset& ds, const std::string& path,
              const std::string& label_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const auto& v : ds.variables) out << v.id << ",";
    out << label_column << "\n";
    for (Index i = 0; i < ds.n_rows(); ++i) {
        for (Index j = 0; j < ds.n_cols(); ++j)
            out << format_double(ds.values(i, j)) << ",";
        out << ds.labels[static_cast<std::size_t>(i)] << "\n";
    }
}

namespace {

std::map<ClassId, std::vector<Index>> indices_by_class(const Dataset& ds) {
    std::map<ClassId, std::vector<Index>> by;
    for (Index i = 0; i < ds.n_rows(); ++i)
        by[ds.labels[static_cast<std::size_t>(i)]].push_back(i);
    return by;
}

}  // namespace

SplitResult stratified_split(const Dataset& ds, double test_fraction,
                             std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw Error("test_fraction must be in (0, 1)");
    auto by = indices_by_class(ds);
    Rng rng(derive_seed(seed, hash_label("stratified_split")));
    std::vector<Index> test_idx, train_idx;
    for (auto& [cls, idx] : by) {
        if (static_cast<Index>(idx.size()) < 2)
            throw ClassTooSmall(cls, static_cast<Index>(idx.size()), 2);
        rng.shuffle(idx);
        const auto n_test = static_cast<std::size_t>(
            std::llround(static_cast<double>(idx.size()) * test_fraction));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_test ? test_idx : train_idx).push_back(idx[i]);
    }
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    return {ds.select_rows(train_idx), ds.select_rows(test_idx)};
}

std::vector<Fold> stratified_kfold(const Dataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw Error("k must be >= 2");
    auto by = indices_by_class(ds);
    Rng rng(derive_seed(seed, hash_label("stratified_kfold")));
    std::vector<std::vector<Index>> valid(static_cast<std::size_t>(k));
    for (auto& [cls, idx] : by) {
        if (static_cast<Index>(idx.size()) < k)
            throw ClassTooSmall(cls, static_cast<Index>(idx.size()), k);
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            valid[i % static_cast<std::size_t>(k)].push_back(idx[i]);
    }
    std::vector<Fold> folds(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        auto& fold = folds[static_cast<std::size_t>(f)];
        fold.valid_idx = valid[static_cast<std::size_t>(f)];
        std::sort(fold.valid_idx.begin(), fold.valid_idx.end());
        for (int g = 0; g < k; ++g)
            if (g != f)
                fold.train_idx.insert(fold.train_idx.end(),
                                      valid[static_cast<std::size_t>(g)].begin(),
                                      valid[static_cast<std::size_t>(g)].end());
        std::sort(fold.train_idx.begin(), fold.train_idx.end());
    }
    return folds;
}

Scaler fit_scaler(const Dataset& train) {
    if (train.n_rows() == 0) throw EmptyDataset();
    Scaler s;
    const double n = static_cast<double>(train.n_rows());
    s.mean = train.values.colwise().mean();
    Matrix centered = train.values.rowwise() - s.mean.transpose();
    s.stddev = (centered.array().square().colwise().sum() / n).sqrt();
    s.stddev = s.stddev.cwiseMax(Scaler::kStddevFloor);
    return s;
}

Matrix apply_scaler(const Scaler& s, const Matrix& values) {
    Matrix out = values.rowwise() - s.mean.transpose();
    out.array().rowwise() /= s.stddev.transpose().array();
    return out;
}

Dataset apply_scaler(const Scaler& s, const Dataset& ds) {
    Dataset out = ds;
    out.values = apply_scaler(s, ds.values);
    return out;
}

}  // namespace dagfault
