#ifndef DAGFAULT_DATASET_HPP_
#define DAGFAULT_DATASET_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dagfault/schema.hpp"
#include "dagfault/types.hpp"

namespace dagfault {

class MissingColumn : public Error {
public:
    explicit MissingColumn(const std::string& name)
        : Error("missing column: " + name), name(name) {}
    std::string name;
};

class EmptyDataset : public Error {
public:
    EmptyDataset() : Error("dataset has no rows") {}
};

class LabelOutOfRange : public Error {
public:
    LabelOutOfRange(Index row, const std::string& value)
        : Error("label out of range at row " + std::to_string(row) + ": " + value),
          row(row), value(value) {}
    Index row;
    std::string value;
};

class ClassTooSmall : public Error {
public:
    ClassTooSmall(ClassId cls, Index count, Index needed)
        : Error("class " + std::to_string(cls) + " has " + std::to_string(count) +
                " samples, needs >= " + std::to_string(needed)),
          cls(cls) {}
    ClassId cls;
};

/// Column-labeled numeric matrix with per-row class labels.
/// Immutable by convention: operations return fresh datasets.
struct Dataset {
    std::vector<VariableInfo> variables;
    Matrix values;                 // n_samples x n_variables
    std::vector<ClassId> labels;   // one per row, each in [0, 20]

    Index n_rows() const { return values.rows(); }
    Index n_cols() const { return values.cols(); }

    std::vector<std::string> variable_ids() const;
    std::map<ClassId, Index> class_histogram() const;
    std::vector<ClassId> distinct_classes() const;  // ascending

    Dataset select_rows(const std::vector<Index>& rows) const;
    Dataset select_columns(const std::vector<Index>& cols) const;
};

struct CsvLoadResult {
    Dataset data;
    Index dropped_rows = 0;  // rows removed for unparseable / non-finite cells
};

/// Reads a comma-separated file (plain or gzip, detected by magic bytes)
/// with a header row. Columns are reordered to schema order; extra columns
/// are ignored. Labels accept integers 0..20 or the strings "IDV(k)".
CsvLoadResult load_csv(const std::string& path, const VariableSchema& schema,
                       const std::string& label_column);

/// Writer is the exact inverse of load_csv: doubles are printed shortest
/// round-trip so a write/load cycle is bitwise-equal.
void save_csv(const Dataset& ds, const std::string& path,
              const std::string& label_column = "fault");

struct SplitResult {
    Dataset train;
    Dataset test;
};

/// Per-class test counts are round(count * fraction); deterministic in seed.
SplitResult stratified_split(const Dataset& ds, double test_fraction,
                             std::uint64_t seed);

struct Fold {
    std::vector<Index> train_idx;
    std::vector<Index> valid_idx;
};

/// Per-class index lists are shuffled, then dealt round-robin to the k
/// folds, so per-class counts across folds differ by at most one.
std::vector<Fold> stratified_kfold(const Dataset& ds, int k, std::uint64_t seed);

/// Per-column z-score parameters. Population (1/n) standard deviation;
/// constant columns get a 1e-12 floor so the transform stays finite.
struct Scaler {
    Vector mean;
    Vector stddev;

    static constexpr double kStddevFloor = 1e-12;
};

Scaler fit_scaler(const Dataset& train);
Dataset apply_scaler(const Scaler& s, const Dataset& ds);
Matrix apply_scaler(const Scaler& s, const Matrix& values);

}  // namespace dagfault

#endif  // DAGFAULT_DATASET_HPP_
