#include "dagfault/search.hpp"

#include <limits>
#include <set>
#include <sstream>

#include "dagfault/log.hpp"
#include "dagfault/parallel.hpp"
#include "dagfault/rng.hpp"

namespace dagfault {

SearchSpace default_search_space(ModelKind kind) {
    SearchSpace s;
    s.kind = kind;
    auto ints = [](std::initializer_list<std::int64_t> xs) {
        std::vector<HyperValue> v;
        for (auto x : xs) v.emplace_back(x);
        return v;
    };
    auto doubles = [](std::initializer_list<double> xs) {
        std::vector<HyperValue> v;
        for (auto x : xs) v.emplace_back(x);
        return v;
    };
    auto strings = [](std::initializer_list<const char*> xs) {
        std::vector<HyperValue> v;
        for (auto x : xs) v.emplace_back(std::string(x));
        return v;
    };
    switch (kind) {
        case ModelKind::knn:
            s.grid["k"] = ints({1, 3, 5, 7, 11, 15, 25, 51});
            s.grid["weights"] = strings({"uniform", "distance"});
            s.grid["metric"] = strings({"manhattan", "euclidean"});
            s.grid["p"] = ints({1, 2});
            s.grid["leaf_size"] = ints({20, 30});
            break;
        case ModelKind::mlp: {
            std::vector<HyperValue> layers;
            layers.emplace_back(std::vector<std::int64_t>{300, 150, 75});
            layers.emplace_back(std::vector<std::int64_t>{250, 125, 60});
            layers.emplace_back(std::vector<std::int64_t>{128, 64});
            layers.emplace_back(std::vector<std::int64_t>{64, 32});
            layers.emplace_back(std::vector<std::int64_t>{50});
            s.grid["hidden_layers"] = layers;
            s.grid["activation"] = strings({"relu"});
            s.grid["learning_rate"] = doubles({0.0005, 0.001, 0.005, 0.01});
            s.grid["l2"] = doubles({0.0001, 0.001, 0.01});
            s.grid["batch_size"] = ints({32, 64, 128});
            break;
        }
        case ModelKind::gbt:
            s.grid["learning_rate"] = doubles({0.05, 0.1, 0.3});
            s.grid["max_depth"] = ints({2, 3, 4, 6});
            s.grid["n_estimators"] = ints({50, 100, 200});
            s.grid["subsample"] = doubles({0.8, 0.9, 1.0});
            s.grid["min_child_weight"] = doubles({1, 3, 5});
            s.grid["gamma"] = doubles({0, 0.1, 0.2});
            break;
    }
    return s;
}

namespace {

std::string spec_signature(const HyperMap& h) {
    std::ostringstream os;
    for (const auto& [k, v] : h) {
        os << k << '=';
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, std::vector<std::int64_t>>) {
                    for (auto e : x) os << e << ',';
                } else {
                    os << x;
                }
            },
            v);
        os << ';';
    }
    return os.str();
}

}  // namespace

SearchResult random_search(const SearchSpace& space, const Dataset& train, int k,
                           const ResamplePlan& plan, std::uint64_t seed,
                           int threads) {
    if (space.grid.empty() || space.n_iter < 1)
        throw Error("random_search: empty search space");

    Rng rng(derive_seed(seed, hash_label("random_search")));
    std::vector<ModelSpec> candidates;
    std::set<std::string> seen;
    const int retry_cap = 10 * space.n_iter;
    int draws = 0;
    while (static_cast<int>(candidates.size()) < space.n_iter && draws < retry_cap) {
        ++draws;
        ModelSpec spec;
        spec.kind = space.kind;
        for (const auto& [key, values] : space.grid)
            spec.hyper[key] = values[rng.below(values.size())];
        if (!seen.insert(spec_signature(spec.hyper)).second) continue;
        candidates.push_back(std::move(spec));
    }

    std::vector<double> scores(candidates.size(),
                               -std::numeric_limits<double>::infinity());
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
        ModelSpec spec = candidates[i];
        spec.seed = derive_seed(seed, hash_label("candidate") + i);
        candidates[i].seed = spec.seed;
        try {
            const MetricSummary cv = cross_validate(spec, train, k, plan, spec.seed);
            scores[i] = cv.mean.by_name(space.objective);
        } catch (const Error& e) {
            log::warn(std::string("random_search: candidate failed: ") + e.what());
        }
    });

    SearchResult result;
    std::size_t best = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        result.table.emplace_back(candidates[i], scores[i]);
        if (scores[i] > scores[best]) best = i;
    }
    result.best = candidates[best];
    return result;
}

}  // namespace dagfault
