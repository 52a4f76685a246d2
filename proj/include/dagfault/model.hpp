#ifndef DAGFAULT_MODEL_HPP_
#define DAGFAULT_MODEL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "dagfault/dataset.hpp"
#include "dagfault/gbt.hpp"
#include "dagfault/knn.hpp"
#include "dagfault/mlp.hpp"
#include "dagfault/types.hpp"

namespace dagfault {

class SingleClassTrainingSet : public Error {
public:
    SingleClassTrainingSet() : Error("training set has a single class") {}
};

class WidthMismatch : public Error {
public:
    WidthMismatch(Index got, Index want)
        : Error("input width " + std::to_string(got) + " does not match training width " +
                std::to_string(want)) {}
};

enum class ModelKind { knn, mlp, gbt };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

using HyperValue =
    std::variant<std::int64_t, double, std::string, std::vector<std::int64_t>>;
using HyperMap = std::map<std::string, HyperValue>;

struct ModelSpec {
    ModelKind kind = ModelKind::knn;
    HyperMap hyper;
    std::uint64_t seed = 0;
};

/// Throws on keys outside the kind's search-space keys.
void validate_hyper_keys(ModelKind kind, const HyperMap& hyper);

std::int64_t hyper_int(const HyperMap& h, const std::string& key, std::int64_t def);
double hyper_double(const HyperMap& h, const std::string& key, double def);
std::string hyper_string(const HyperMap& h, const std::string& key, const std::string& def);
std::vector<std::int64_t> hyper_int_list(const HyperMap& h, const std::string& key,
                                         const std::vector<std::int64_t>& def);

struct TrainedModel {
    ModelSpec spec;
    Scaler scaler;
    std::vector<ClassId> classes;  // ascending
    std::variant<KnnParams, MlpParams, GbtParams> params;

    Index n_features() const { return scaler.mean.size(); }
};

TrainedModel fit(const ModelSpec& spec, const Dataset& train);

/// argmax of predict_proba rows; probability ties resolve to the lowest
/// class id.
std::vector<ClassId> predict(const TrainedModel& model, const Matrix& X);
Matrix predict_proba(const TrainedModel& model, const Matrix& X);

/// predict_proba with columns aligned to `classes` (zero for classes the
/// model has never seen).
Matrix predict_proba_for(const TrainedModel& model, const Matrix& X,
                         const std::vector<ClassId>& classes);

/// Paper preset configurations, keyed by variable count {7,10,12,15,52}.
ModelSpec mlp_preset(int n_vars, std::uint64_t seed = 0);
ModelSpec gbt_preset(int n_vars, std::uint64_t seed = 0);
ModelSpec knn_preset(int n_vars, std::uint64_t seed = 0);
ModelSpec preset(ModelKind kind, int n_vars, std::uint64_t seed = 0);

/// Self-describing binary format, magic "DFM1", version header.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

/// JSON export of hyperparameters and parameter shapes.
std::string model_to_json(const TrainedModel& model);

}  // namespace dagfault

#endif  // DAGFAULT_MODEL_HPP_
