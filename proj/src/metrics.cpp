#include "dagfault/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "dagfault/model.hpp"
#include "dagfault/parallel.hpp"
#include "dagfault/resample.hpp"
#include "dagfault/rng.hpp"

namespace dagfault {

Index ConfusionMatrix::index_of(ClassId c) const {
    auto it = std::lower_bound(classes.begin(), classes.end(), c);
    if (it == classes.end() || *it != c) return -1;
    return static_cast<Index>(it - classes.begin());
}

ConfusionMatrix confusion(const std::vector<ClassId>& y_true,
                          const std::vector<ClassId>& y_pred,
                          const std::vector<ClassId>& classes) {
    if (y_true.size() != y_pred.size())
        throw Error("confusion: length mismatch");
    ConfusionMatrix cm;
    cm.classes = classes;
    std::sort(cm.classes.begin(), cm.classes.end());
    const Index k = static_cast<Index>(cm.classes.size());
    cm.counts = Eigen::MatrixXi::Zero(k, k);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const Index r = cm.index_of(y_true[i]);
        const Index c = cm.index_of(y_pred[i]);
        if (r < 0) throw UnknownLabel(y_true[i]);
        if (c < 0) throw UnknownLabel(y_pred[i]);
        ++cm.counts(r, c);
    }
    return cm;
}

ConfusionMatrix confusion(const std::vector<ClassId>& y_true,
                          const std::vector<ClassId>& y_pred) {
    std::vector<ClassId> classes(y_true);
    classes.insert(classes.end(), y_pred.begin(), y_pred.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return confusion(y_true, y_pred, classes);
}

double MetricSet::by_name(const std::string& name) const {
    if (name == "acc") return acc;
    if (name == "bacc") return bacc;
    if (name == "precision") return precision;
    if (name == "recall") return recall;
    if (name == "f1" || name == "f1_macro") return f1;
    if (name == "auc") return auc;
    throw Error("unknown metric: " + name);
}

namespace {

struct OvrCounts {
    double tp = 0, tn = 0, fp = 0, fn = 0;
};

OvrCounts one_vs_rest(const ConfusionMatrix& cm, Index c) {
    OvrCounts o;
    const Index k = static_cast<Index>(cm.classes.size());
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) {
            const double v = cm.counts(i, j);
            if (i == c && j == c) o.tp += v;
            else if (i == c) o.fn += v;
            else if (j == c) o.fp += v;
            else o.tn += v;
        }
    }
    return o;
}

double safe_div(double num, double den, int& flags) {
    if (den == 0.0) {
        ++flags;
        return 0.0;
    }
    return num / den;
}

}  // namespace

double binary_auc(const Vector& scores, const std::vector<bool>& positive) {
    const Index n = scores.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups, then Mann-Whitney U.
    std::vector<double> rank(static_cast<std::size_t>(n));
    Index i = 0;
    while (i < n) {
        Index j = i;
        while (j + 1 < n && scores[order[static_cast<std::size_t>(j + 1)]] ==
                                scores[order[static_cast<std::size_t>(i)]])
            ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Index t = i; t <= j; ++t)
            rank[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = avg;
        i = j + 1;
    }
    double rank_sum = 0;
    double n_pos = 0, n_neg = 0;
    for (Index t = 0; t < n; ++t) {
        if (positive[static_cast<std::size_t>(t)]) {
            rank_sum += rank[static_cast<std::size_t>(t)];
            n_pos += 1;
        } else {
            n_neg += 1;
        }
    }
    if (n_pos == 0 || n_neg == 0) return 0.5;
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
}

double binary_auc_trapezoid(const Vector& scores, const std::vector<bool>& positive) {
    const Index n = scores.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return scores[a] > scores[b]; });
    double n_pos = 0, n_neg = 0;
    for (bool p : positive) (p ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) return 0.5;

    double area = 0, tp = 0, fp = 0, prev_tp = 0, prev_fp = 0;
    Index i = 0;
    while (i < n) {
        const double s = scores[order[static_cast<std::size_t>(i)]];
        while (i < n && scores[order[static_cast<std::size_t>(i)]] == s) {
            if (positive[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
                tp += 1;
            else
                fp += 1;
            ++i;
        }
        area += (fp - prev_fp) / n_neg * (tp + prev_tp) / (2.0 * n_pos);
        prev_tp = tp;
        prev_fp = fp;
    }
    return area;
}

MetricSet compute_metrics(const ConfusionMatrix& cm) {
    (void)cm;
    throw ScoresMissingForAUC();
}

MetricSet compute_metrics(const ConfusionMatrix& cm, const Matrix& scores,
                          const std::vector<ClassId>& y_true) {
    if (cm.total() == 0) throw Error("compute_metrics: empty confusion matrix");
    const Index k = static_cast<Index>(cm.classes.size());
    MetricSet m;
    m.acc = static_cast<double>(cm.counts.diagonal().sum()) /
            static_cast<double>(cm.total());

    if (k == 2) {
        // Literal binary formulas; positive class = larger id.
        const OvrCounts o = one_vs_rest(cm, 1);
        m.recall = safe_div(o.tp, o.tp + o.fn, m.zero_denominator_terms);
        m.precision = safe_div(o.tp, o.tp + o.fp, m.zero_denominator_terms);
        m.f1 = (m.precision + m.recall) > 0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        const double tnr = safe_div(o.tn, o.tn + o.fp, m.zero_denominator_terms);
        m.bacc = 0.5 * (m.recall + tnr);
    } else {
        double rec = 0, prec = 0, f1 = 0;
        for (Index c = 0; c < k; ++c) {
            const OvrCounts o = one_vs_rest(cm, c);
            const double r = safe_div(o.tp, o.tp + o.fn, m.zero_denominator_terms);
            const double p = safe_div(o.tp, o.tp + o.fp, m.zero_denominator_terms);
            rec += r;
            prec += p;
            f1 += (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
        }
        m.recall = rec / static_cast<double>(k);
        m.precision = prec / static_cast<double>(k);
        m.f1 = f1 / static_cast<double>(k);
        m.bacc = m.recall;  // mean per-class recall
    }

    // AUC from scores: one column per class in cm.classes order.
    if (scores.rows() != static_cast<Index>(y_true.size()) || scores.cols() < (k == 2 ? 1 : k))
        throw ScoresMissingForAUC();
    if (k == 2) {
        std::vector<bool> pos(y_true.size());
        for (std::size_t i = 0; i < y_true.size(); ++i)
            pos[i] = y_true[i] == cm.classes[1];
        const Vector s = scores.cols() >= 2 ? Vector(scores.col(1)) : Vector(scores.col(0));
        m.auc = binary_auc(s, pos);
    } else {
        double total = 0;
        int used = 0;
        for (Index c = 0; c < k; ++c) {
            std::vector<bool> pos(y_true.size());
            Index n_pos = 0;
            for (std::size_t i = 0; i < y_true.size(); ++i) {
                pos[i] = y_true[i] == cm.classes[static_cast<std::size_t>(c)];
                n_pos += pos[i];
            }
            if (n_pos == 0 || n_pos == static_cast<Index>(y_true.size())) {
                ++m.zero_denominator_terms;
                continue;
            }
            total += binary_auc(scores.col(c), pos);
            ++used;
        }
        m.auc = used > 0 ? total / used : 0.0;
    }
    return m;
}

namespace {

MetricSet apply_elementwise(const std::vector<MetricSet>& folds,
                            const std::function<double(std::vector<double>&)>& f) {
    auto gather = [&](auto field) {
        std::vector<double> v;
        v.reserve(folds.size());
        for (const auto& m : folds) v.push_back(m.*field);
        return f(v);
    };
    MetricSet out;
    out.acc = gather(&MetricSet::acc);
    out.bacc = gather(&MetricSet::bacc);
    out.precision = gather(&MetricSet::precision);
    out.recall = gather(&MetricSet::recall);
    out.f1 = gather(&MetricSet::f1);
    out.auc = gather(&MetricSet::auc);
    return out;
}

}  // namespace

MetricSummary summarize_folds(const std::vector<MetricSet>& folds) {
    MetricSummary s;
    s.folds = folds;
    s.n_folds = static_cast<int>(folds.size());
    s.mean = apply_elementwise(folds, [](std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    });
    s.stddev = apply_elementwise(folds, [](std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const double mean =
            std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / static_cast<double>(v.size() - 1));
    });
    return s;
}

MetricSummary cross_validate(const ModelSpec& spec, const Dataset& ds, int k,
                             const ResamplePlan& plan, std::uint64_t seed,
                             int threads) {
    const auto folds = stratified_kfold(ds, k, seed);
    const auto classes = ds.distinct_classes();
    std::vector<MetricSet> results(folds.size());
    parallel_for(folds.size(), threads, [&](std::size_t f) {
        const auto& fold = folds[f];
        Dataset train = ds.select_rows(fold.train_idx);
        Dataset valid = ds.select_rows(fold.valid_idx);

        ResamplePlan fold_plan = plan;
        fold_plan.seed = derive_seed(plan.seed, hash_label("fold") + f);
        Dataset balanced = rebalance(train, fold_plan);

        ModelSpec fold_spec = spec;
        fold_spec.seed = derive_seed(spec.seed, hash_label("fold") + f);
        TrainedModel model = fit(fold_spec, balanced);

        // Scores aligned to the dataset's class set so folds are comparable.
        const Matrix proba = predict_proba_for(model, valid.values, classes);
        const auto y_pred = predict(model, valid.values);
        const auto cm = confusion(valid.labels, y_pred, classes);
        results[f] = compute_metrics(cm, proba, valid.labels);
    });
    return summarize_folds(results);
}

std::string metrics_to_json(const MetricSummary& s) {
    nlohmann::json j;
    auto set = [](nlohmann::json& dst, const MetricSet& m) {
        dst = {{"acc", m.acc},         {"bacc", m.bacc}, {"precision", m.precision},
               {"recall", m.recall},   {"f1", m.f1},     {"auc", m.auc}};
    };
    set(j["mean"], s.mean);
    set(j["std"], s.stddev);
    j["n_folds"] = s.n_folds;
    j["folds"] = nlohmann::json::array();
    for (const auto& f : s.folds) {
        nlohmann::json jf;
        set(jf, f);
        j["folds"].push_back(jf);
    }
    return j.dump(2) + "\n";
}

std::string metrics_to_table_row(const std::string& label, const MetricSummary& s) {
    std::ostringstream os;
    auto cell = [&](double mean, double sd) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f±%.3f", mean, sd);
        os << buf << "  ";
    };
    os << label;
    for (std::size_t i = label.size(); i < 14; ++i) os << ' ';
    cell(s.mean.acc, s.stddev.acc);
    cell(s.mean.bacc, s.stddev.bacc);
    cell(s.mean.precision, s.stddev.precision);
    cell(s.mean.recall, s.stddev.recall);
    cell(s.mean.f1, s.stddev.f1);
    cell(s.mean.auc, s.stddev.auc);
    return os.str();
}

}  // namespace dagfault
