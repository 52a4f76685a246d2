#include "dagfault/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

namespace dagfault {

using nlohmann::json;

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::knn: return "knn";
        case ModelKind::mlp: return "mlp";
        case ModelKind::gbt: return "gbt";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "knn") return ModelKind::knn;
    if (s == "mlp") return ModelKind::mlp;
    if (s == "gbt" || s == "xgb" || s == "xgboost") return ModelKind::gbt;
    throw Error("unknown model kind: " + s);
}

void validate_hyper_keys(ModelKind kind, const HyperMap& hyper) {
    static const std::map<ModelKind, std::set<std::string>> allowed = {
        {ModelKind::knn, {"k", "weights", "metric", "p", "leaf_size"}},
        {ModelKind::mlp,
         {"hidden_layers", "activation", "learning_rate", "l2", "batch_size",
          "max_epochs"}},
        {ModelKind::gbt,
         {"learning_rate", "max_depth", "n_estimators", "subsample",
          "min_child_weight", "gamma"}},
    };
    const auto& keys = allowed.at(kind);
    for (const auto& [k, v] : hyper) {
        (void)v;
        if (!keys.count(k))
            throw Error("hyperparameter '" + k + "' not allowed for kind " +
                        to_string(kind));
    }
}

std::int64_t hyper_int(const HyperMap& h, const std::string& key, std::int64_t def) {
    auto it = h.find(key);
    if (it == h.end()) return def;
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
    if (const auto* v = std::get_if<double>(&it->second))
        return static_cast<std::int64_t>(*v);
    throw Error("hyperparameter '" + key + "' must be an integer");
}

double hyper_double(const HyperMap& h, const std::string& key, double def) {
    auto it = h.find(key);
    if (it == h.end()) return def;
    if (const auto* v = std::get_if<double>(&it->second)) return *v;
    if (const auto* v = std::get_if<std::int64_t>(&it->second))
        return static_cast<double>(*v);
    throw Error("hyperparameter '" + key + "' must be numeric");
}

std::string hyper_string(const HyperMap& h, const std::string& key,
                         const std::string& def) {
    auto it = h.find(key);
    if (it == h.end()) return def;
    if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
    throw Error("hyperparameter '" + key + "' must be a string");
}

std::vector<std::int64_t> hyper_int_list(const HyperMap& h, const std::string& key,
                                         const std::vector<std::int64_t>& def) {
    auto it = h.find(key);
    if (it == h.end()) return def;
    if (const auto* v = std::get_if<std::vector<std::int64_t>>(&it->second)) return *v;
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) return {*v};
    throw Error("hyperparameter '" + key + "' must be an integer list");
}

namespace {

std::vector<Index> class_indices(const std::vector<ClassId>& labels,
                                 std::vector<ClassId>& classes) {
    classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    std::vector<Index> idx(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        idx[i] = static_cast<Index>(
            std::lower_bound(classes.begin(), classes.end(), labels[i]) -
            classes.begin());
    return idx;
}

}  // namespace

TrainedModel fit(const ModelSpec& spec, const Dataset& train) {
    if (train.n_rows() == 0) throw EmptyDataset();
    validate_hyper_keys(spec.kind, spec.hyper);

    TrainedModel model;
    model.spec = spec;
    model.scaler = fit_scaler(train);
    const Matrix X = apply_scaler(model.scaler, train.values);
    const auto y_idx = class_indices(train.labels, model.classes);
    if (model.classes.size() < 2) throw SingleClassTrainingSet();
    const Index nc = static_cast<Index>(model.classes.size());

    switch (spec.kind) {
        case ModelKind::knn: {
            KnnParams p;
            p.train = X;
            p.labels = train.labels;
            p.k = static_cast<int>(hyper_int(spec.hyper, "k", 5));
            p.weights = hyper_string(spec.hyper, "weights", "uniform");
            p.metric = hyper_string(spec.hyper, "metric", "manhattan");
            p.p = hyper_double(spec.hyper, "p", 2.0);
            p.leaf_size = static_cast<int>(hyper_int(spec.hyper, "leaf_size", 20));
            model.params = std::move(p);
            break;
        }
        case ModelKind::mlp: {
            MlpConfig cfg;
            cfg.hidden_layers.clear();
            for (auto v : hyper_int_list(spec.hyper, "hidden_layers", {100}))
                cfg.hidden_layers.push_back(static_cast<Index>(v));
            cfg.activation = hyper_string(spec.hyper, "activation", "relu");
            cfg.learning_rate = hyper_double(spec.hyper, "learning_rate", 1e-3);
            cfg.l2 = hyper_double(spec.hyper, "l2", 1e-4);
            cfg.batch_size = static_cast<Index>(hyper_int(spec.hyper, "batch_size", 64));
            cfg.max_epochs = static_cast<int>(hyper_int(spec.hyper, "max_epochs", 200));
            model.params = mlp_train(cfg, X, y_idx, nc, spec.seed);
            break;
        }
        case ModelKind::gbt: {
            GbtConfig cfg;
            cfg.learning_rate = hyper_double(spec.hyper, "learning_rate", 0.1);
            cfg.max_depth = static_cast<int>(hyper_int(spec.hyper, "max_depth", 3));
            cfg.n_estimators =
                static_cast<int>(hyper_int(spec.hyper, "n_estimators", 100));
            cfg.subsample = hyper_double(spec.hyper, "subsample", 1.0);
            cfg.min_child_weight = hyper_double(spec.hyper, "min_child_weight", 1.0);
            cfg.gamma = hyper_double(spec.hyper, "gamma", 0.0);
            model.params = gbt_train(cfg, X, y_idx, nc, spec.seed);
            break;
        }
    }
    return model;
}

Matrix predict_proba(const TrainedModel& model, const Matrix& X) {
    if (X.cols() != model.n_features())
        throw WidthMismatch(X.cols(), model.n_features());
    const Matrix Xs = apply_scaler(model.scaler, X);
    if (const auto* knn = std::get_if<KnnParams>(&model.params))
        return knn_proba(*knn, model.classes, Xs);
    if (const auto* mlp = std::get_if<MlpParams>(&model.params))
        return mlp_forward(*mlp, Xs);
    return gbt_proba(std::get<GbtParams>(model.params), Xs);
}

std::vector<ClassId> predict(const TrainedModel& model, const Matrix& X) {
    const Matrix proba = predict_proba(model, X);
    std::vector<ClassId> out(static_cast<std::size_t>(proba.rows()));
    for (Index i = 0; i < proba.rows(); ++i) {
        Index best = 0;
        for (Index c = 1; c < proba.cols(); ++c)
            if (proba(i, c) > proba(i, best)) best = c;  // tie keeps lowest id
        out[static_cast<std::size_t>(i)] = model.classes[static_cast<std::size_t>(best)];
    }
    return out;
}

Matrix predict_proba_for(const TrainedModel& model, const Matrix& X,
                         const std::vector<ClassId>& classes) {
    const Matrix proba = predict_proba(model, X);
    Matrix out = Matrix::Zero(X.rows(), static_cast<Index>(classes.size()));
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        const auto it =
            std::lower_bound(classes.begin(), classes.end(), model.classes[c]);
        if (it != classes.end() && *it == model.classes[c])
            out.col(static_cast<Index>(it - classes.begin())) =
                proba.col(static_cast<Index>(c));
    }
    return out;
}

namespace {

// Table rows keyed by variable count; 52 is the full-set baseline.
struct MlpRow {
    std::vector<std::int64_t> hidden;
    double lr, l2;
    std::int64_t batch;
};
const std::map<int, MlpRow> kMlpTable = {
    {52, {{300, 150, 75}, 0.001, 0.0001, 128}},
    {7, {{300, 150, 75}, 0.001, 0.001, 128}},
    {10, {{250, 125, 60}, 0.001, 0.0001, 64}},
    {12, {{250, 125, 60}, 0.001, 0.001, 64}},
    {15, {{250, 125, 60}, 0.005, 0.0001, 128}},
};

struct GbtRow {
    double lr;
    std::int64_t depth, est;
    double subsample;
    std::int64_t min_child;
    double gamma;
};
const std::map<int, GbtRow> kGbtTable = {
    {52, {0.05, 3, 200, 0.9, 5, 0.0}},
    {7, {0.05, 3, 200, 0.9, 3, 0.2}},
    {10, {0.05, 3, 200, 0.9, 3, 0.2}},
    {12, {0.05, 3, 200, 0.9, 3, 0.2}},
    {15, {0.05, 3, 200, 0.9, 5, 0.0}},
};

template <typename TableT>
const typename TableT::mapped_type& table_row(const TableT& table, int n_vars,
                                              const char* what) {
    auto it = table.find(n_vars);
    if (it == table.end())
        throw Error(std::string(what) + " preset has no row for " +
                    std::to_string(n_vars) + " variables");
    return it->second;
}

}  // namespace

ModelSpec mlp_preset(int n_vars, std::uint64_t seed) {
    const auto& r = table_row(kMlpTable, n_vars, "mlp");
    ModelSpec s;
    s.kind = ModelKind::mlp;
    s.seed = seed;
    s.hyper = {{"hidden_layers", r.hidden},
               {"activation", std::string("relu")},
               {"learning_rate", r.lr},
               {"l2", r.l2},
               {"batch_size", r.batch}};
    return s;
}

ModelSpec gbt_preset(int n_vars, std::uint64_t seed) {
    const auto& r = table_row(kGbtTable, n_vars, "gbt");
    ModelSpec s;
    s.kind = ModelKind::gbt;
    s.seed = seed;
    s.hyper = {{"learning_rate", r.lr},   {"max_depth", r.depth},
               {"n_estimators", r.est},  {"subsample", r.subsample},
               {"min_child_weight", r.min_child}, {"gamma", r.gamma}};
    return s;
}

ModelSpec knn_preset(int n_vars, std::uint64_t seed) {
    // Identical across all variable counts. The table lists metric
    // "manhattan" together with p=2; the metric string is effective and p
    // is carried as inert metadata.
    (void)n_vars;
    ModelSpec s;
    s.kind = ModelKind::knn;
    s.seed = seed;
    s.hyper = {{"k", std::int64_t{5}},
               {"weights", std::string("uniform")},
               {"metric", std::string("manhattan")},
               {"p", std::int64_t{2}},
               {"leaf_size", std::int64_t{20}}};
    return s;
}

ModelSpec preset(ModelKind kind, int n_vars, std::uint64_t seed) {
    switch (kind) {
        case ModelKind::knn: return knn_preset(n_vars, seed);
        case ModelKind::mlp: return mlp_preset(n_vars, seed);
        case ModelKind::gbt: return gbt_preset(n_vars, seed);
    }
    throw Error("bad kind");
}

// ---------------------------------------------------------------------------
// Serialization: magic "DFM1", little-endian, version 1.

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_string(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void write_matrix(std::ostream& out, const Matrix& m) {
    write_u64(out, static_cast<std::uint64_t>(m.rows()));
    write_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) write_f64(out, m(i, j));
}
void write_vector(std::ostream& out, const Vector& v) {
    write_u64(out, static_cast<std::uint64_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) write_f64(out, v[i]);
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
double read_f64(std::istream& in) {
    double v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::string read_string(std::istream& in) {
    std::string s(read_u64(in), '\0');
    in.read(s.data(), static_cast<std::streamsize>(s.size()));
    return s;
}
Matrix read_matrix(std::istream& in) {
    const auto rows = static_cast<Index>(read_u64(in));
    const auto cols = static_cast<Index>(read_u64(in));
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = read_f64(in);
    return m;
}
Vector read_vector(std::istream& in) {
    Vector v(static_cast<Index>(read_u64(in)));
    for (Index i = 0; i < v.size(); ++i) v[i] = read_f64(in);
    return v;
}

json hyper_to_json(const HyperMap& h) {
    json j = json::object();
    for (const auto& [k, v] : h) {
        std::visit([&](const auto& x) { j[k] = x; }, v);
    }
    return j;
}

HyperMap hyper_from_json(const json& j) {
    HyperMap h;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& v = it.value();
        if (v.is_array()) {
            std::vector<std::int64_t> xs;
            for (const auto& x : v) xs.push_back(x.get<std::int64_t>());
            h[it.key()] = xs;
        } else if (v.is_number_integer()) {
            h[it.key()] = v.get<std::int64_t>();
        } else if (v.is_number_float()) {
            h[it.key()] = v.get<double>();
        } else {
            h[it.key()] = v.get<std::string>();
        }
    }
    return h;
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write("DFM1", 4);
    write_u32(out, 1);  // version
    json spec = {{"kind", to_string(model.spec.kind)},
                 {"hyper", hyper_to_json(model.spec.hyper)},
                 {"seed", model.spec.seed}};
    write_string(out, spec.dump());
    write_vector(out, model.scaler.mean);
    write_vector(out, model.scaler.stddev);
    write_u64(out, model.classes.size());
    for (ClassId c : model.classes) write_u32(out, static_cast<std::uint32_t>(c));

    if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
        write_u32(out, 0);
        write_matrix(out, knn->train);
        write_u64(out, knn->labels.size());
        for (ClassId c : knn->labels) write_u32(out, static_cast<std::uint32_t>(c));
    } else if (const auto* mlp = std::get_if<MlpParams>(&model.params)) {
        write_u32(out, 1);
        write_string(out, mlp->activation);
        write_u64(out, mlp->weights.size());
        for (std::size_t l = 0; l < mlp->weights.size(); ++l) {
            write_matrix(out, mlp->weights[l]);
            write_vector(out, mlp->biases[l].transpose());
        }
    } else {
        const auto& gbt = std::get<GbtParams>(model.params);
        write_u32(out, 2);
        write_f64(out, gbt.learning_rate);
        write_u64(out, static_cast<std::uint64_t>(gbt.n_classes));
        write_u64(out, gbt.trees.size());
        for (const auto& round : gbt.trees) {
            for (const auto& tree : round) {
                write_u64(out, tree.nodes.size());
                for (const auto& nd : tree.nodes) {
                    write_u32(out, static_cast<std::uint32_t>(nd.feature + 1));
                    write_f64(out, nd.threshold);
                    write_u32(out, static_cast<std::uint32_t>(nd.left + 1));
                    write_u32(out, static_cast<std::uint32_t>(nd.right + 1));
                    write_f64(out, nd.weight);
                }
            }
        }
    }
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::string(magic, 4) != "DFM1") throw IoError("bad model magic");
    const auto version = read_u32(in);
    if (version != 1) throw IoError("unsupported model version");

    TrainedModel model;
    const json spec = json::parse(read_string(in));
    model.spec.kind = model_kind_from_string(spec.at("kind").get<std::string>());
    model.spec.hyper = hyper_from_json(spec.at("hyper"));
    model.spec.seed = spec.at("seed").get<std::uint64_t>();
    model.scaler.mean = read_vector(in);
    model.scaler.stddev = read_vector(in);
    const auto nc = read_u64(in);
    for (std::uint64_t i = 0; i < nc; ++i)
        model.classes.push_back(static_cast<ClassId>(read_u32(in)));

    const auto tag = read_u32(in);
    if (tag == 0) {
        KnnParams p;
        p.train = read_matrix(in);
        const auto nl = read_u64(in);
        for (std::uint64_t i = 0; i < nl; ++i)
            p.labels.push_back(static_cast<ClassId>(read_u32(in)));
        p.k = static_cast<int>(hyper_int(model.spec.hyper, "k", 5));
        p.weights = hyper_string(model.spec.hyper, "weights", "uniform");
        p.metric = hyper_string(model.spec.hyper, "metric", "manhattan");
        p.p = hyper_double(model.spec.hyper, "p", 2.0);
        p.leaf_size = static_cast<int>(hyper_int(model.spec.hyper, "leaf_size", 20));
        model.params = std::move(p);
    } else if (tag == 1) {
        MlpParams p;
        p.activation = read_string(in);
        const auto layers = read_u64(in);
        for (std::uint64_t l = 0; l < layers; ++l) {
            p.weights.push_back(read_matrix(in));
            p.biases.push_back(read_vector(in).transpose());
        }
        model.params = std::move(p);
    } else if (tag == 2) {
        GbtParams p;
        p.learning_rate = read_f64(in);
        p.n_classes = static_cast<Index>(read_u64(in));
        const auto rounds = read_u64(in);
        for (std::uint64_t r = 0; r < rounds; ++r) {
            std::vector<GbtTree> round;
            for (Index c = 0; c < p.n_classes; ++c) {
                GbtTree tree;
                const auto nn = read_u64(in);
                for (std::uint64_t t = 0; t < nn; ++t) {
                    GbtNode nd;
                    nd.feature = static_cast<int>(read_u32(in)) - 1;
                    nd.threshold = read_f64(in);
                    nd.left = static_cast<int>(read_u32(in)) - 1;
                    nd.right = static_cast<int>(read_u32(in)) - 1;
                    nd.weight = read_f64(in);
                    tree.nodes.push_back(nd);
                }
                round.push_back(std::move(tree));
            }
            p.trees.push_back(std::move(round));
        }
        model.params = std::move(p);
    } else {
        throw IoError("bad parameter tag");
    }
    if (!in) throw IoError("truncated model file");
    return model;
}

std::string model_to_json(const TrainedModel& model) {
    json j;
    j["kind"] = to_string(model.spec.kind);
    j["hyperparameters"] = hyper_to_json(model.spec.hyper);
    j["seed"] = model.spec.seed;
    j["n_features"] = model.n_features();
    j["classes"] = model.classes;
    if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
        j["shape"] = {{"train_rows", knn->train.rows()},
                      {"train_cols", knn->train.cols()}};
    } else if (const auto* mlp = std::get_if<MlpParams>(&model.params)) {
        json layers = json::array();
        for (const auto& w : mlp->weights)
            layers.push_back({w.rows(), w.cols()});
        j["shape"] = {{"layers", layers}};
    } else {
        const auto& gbt = std::get<GbtParams>(model.params);
        j["shape"] = {{"rounds", gbt.trees.size()}, {"classes", gbt.n_classes}};
    }
    return j.dump(2) + "\n";
}

}  // namespace dagfault
