#include "dagfault/shap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "dagfault/metrics.hpp"
#include "dagfault/parallel.hpp"
#include "dagfault/rng.hpp"

namespace dagfault {

namespace {

// Mean score over background rows with coalition features taken from x.
double coalition_value(const ScoreFn& f, const RowVector& x, const Matrix& background,
                       std::uint64_t mask) {
    const Index b = background.rows();
    Matrix rows = background;
    for (Index j = 0; j < x.size(); ++j)
        if (mask & (1ull << j)) rows.col(j).setConstant(x[j]);
    return f(rows).mean();
}

std::vector<double> shapley_size_weights(Index m) {
    // w(s) = s! (m-1-s)! / m!  via log-gamma for stability.
    std::vector<double> w(static_cast<std::size_t>(m));
    for (Index s = 0; s < m; ++s)
        w[static_cast<std::size_t>(s)] =
            std::exp(std::lgamma(static_cast<double>(s) + 1) +
                     std::lgamma(static_cast<double>(m - s)) -
                     std::lgamma(static_cast<double>(m) + 1));
    return w;
}

ShapVector explain_exact(const ScoreFn& f, const RowVector& x,
                         const Matrix& background) {
    const Index m = x.size();
    const std::uint64_t n_masks = 1ull << m;
    std::vector<double> v(static_cast<std::size_t>(n_masks));
    for (std::uint64_t mask = 0; mask < n_masks; ++mask)
        v[static_cast<std::size_t>(mask)] = coalition_value(f, x, background, mask);

    const auto w = shapley_size_weights(m);
    ShapVector out;
    out.exact = true;
    out.base_value = v[0];
    out.fx = v[static_cast<std::size_t>(n_masks - 1)];
    out.phi = Vector::Zero(m);
    for (Index j = 0; j < m; ++j) {
        const std::uint64_t bit = 1ull << j;
        double phi = 0;
        for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const int s = __builtin_popcountll(mask);
            phi += w[static_cast<std::size_t>(s)] *
                   (v[static_cast<std::size_t>(mask | bit)] -
                    v[static_cast<std::size_t>(mask)]);
        }
        out.phi[j] = phi;
    }
    return out;
}

ShapVector explain_sampled(const ScoreFn& f, const RowVector& x,
                           const Matrix& background, const CoalitionBudget& budget) {
    const Index m = x.size();
    if (budget.budget < m + 2) throw BudgetTooSmall(budget.budget, m + 2);

    // Size distribution induced by the Shapley kernel:
    // sum over the C(m,s) masks of size s of (m-1)/(C(m,s) s (m-s)).
    Vector size_mass(m - 1);
    for (Index s = 1; s < m; ++s)
        size_mass[s - 1] = static_cast<double>(m - 1) /
                           (static_cast<double>(s) * static_cast<double>(m - s));
    size_mass /= size_mass.sum();

    Rng rng(derive_seed(budget.seed, hash_label("kernel_shap")));
    std::map<std::uint64_t, double> counts;  // mask -> multiplicity
    std::vector<Index> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    for (Index draw = 0; draw < budget.budget; ++draw) {
        double u = rng.uniform();
        Index s = 1;
        for (Index t = 1; t < m; ++t) {
            if (u < size_mass[t - 1]) {
                s = t;
                break;
            }
            u -= size_mass[t - 1];
            s = m - 1;
        }
        rng.shuffle(perm);
        std::uint64_t mask = 0;
        for (Index t = 0; t < s; ++t) mask |= 1ull << perm[static_cast<std::size_t>(t)];
        counts[mask] += 1.0;
    }

    const double v0 = coalition_value(f, x, background, 0);
    const double v1 = coalition_value(f, x, background, (1ull << m) - 1);
    const double delta = v1 - v0;

    // Efficiency constraint eliminated by substituting
    // phi_{m-1} = delta - sum_{j<m-1} phi_j.
    const Index rows = static_cast<Index>(counts.size());
    Matrix A(rows, m - 1);
    Vector y(rows);
    Index r = 0;
    for (const auto& [mask, count] : counts) {
        const double v = coalition_value(f, x, background, mask);
        const double z_last = (mask >> (m - 1)) & 1ull ? 1.0 : 0.0;
        const double sqw = std::sqrt(count);
        for (Index j = 0; j + 1 < m; ++j) {
            const double zj = (mask >> j) & 1ull ? 1.0 : 0.0;
            A(r, j) = sqw * (zj - z_last);
        }
        y[r] = sqw * (v - v0 - z_last * delta);
        ++r;
    }

    const Vector head = A.colPivHouseholderQr().solve(y);
    ShapVector out;
    out.exact = false;
    out.base_value = v0;
    out.fx = v1;
    out.phi = Vector::Zero(m);
    out.phi.head(m - 1) = head;
    out.phi[m - 1] = delta - head.sum();
    return out;
}

}  // namespace

ShapVector shap_explain_fn(const ScoreFn& f, const RowVector& x,
                           const Matrix& background, const CoalitionBudget& budget) {
    if (background.rows() == 0) throw EmptyBackground();
    if (x.size() != background.cols())
        throw WidthMismatch(x.size(), background.cols());
    if (x.size() > 62) throw Error("shap_explain: more than 62 features unsupported");
    if (x.size() <= budget.exact_threshold) return explain_exact(f, x, background);
    return explain_sampled(f, x, background, budget);
}

namespace {

ScoreFn class_score(const TrainedModel& model, ClassId target) {
    const auto it =
        std::lower_bound(model.classes.begin(), model.classes.end(), target);
    if (it == model.classes.end() || *it != target)
        throw UnknownLabel(target);
    const Index col = static_cast<Index>(it - model.classes.begin());
    return [&model, col](const Matrix& rows) -> Vector {
        return predict_proba(model, rows).col(col);
    };
}

std::uint64_t hash_row(const RowVector& x) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (Index j = 0; j < x.size(); ++j) {
        std::uint64_t bits;
        const double v = x[j];
        std::memcpy(&bits, &v, sizeof(bits));
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (bits >> (8 * byte)) & 0xffull;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

}  // namespace

ShapVector shap_explain(const TrainedModel& model, const RowVector& x,
                        const Dataset& background, ClassId target_class,
                        const CoalitionBudget& budget) {
    if (background.n_rows() == 0) throw EmptyBackground();
    return shap_explain_fn(class_score(model, target_class), x, background.values,
                           budget);
}

ShapMatrix shap_matrix(const TrainedModel& model, const Dataset& sample,
                       const Dataset& background, const CoalitionBudget& budget,
                       int threads) {
    if (background.n_rows() == 0) throw EmptyBackground();
    const Index n = sample.n_rows();
    ShapMatrix out;
    out.features = sample.variables;
    out.values.resize(n, sample.n_cols());
    out.base_values.resize(n);
    out.explained_class = predict(model, sample.values);

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        const RowVector x = sample.values.row(static_cast<Index>(i));
        CoalitionBudget row_budget = budget;
        row_budget.seed = derive_seed(budget.seed, hash_row(x));
        const auto sv = shap_explain(model, x, background,
                                     out.explained_class[i], row_budget);
        out.values.row(static_cast<Index>(i)) = sv.phi.transpose();
        out.base_values[static_cast<Index>(i)] = sv.base_value;
    });
    return out;
}

Ranking rank_features(const ShapMatrix& sm) {
    const Index d = sm.values.cols();
    const Vector importance = sm.values.cwiseAbs().colwise().mean();
    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (importance[a] != importance[b]) return importance[a] > importance[b];
        return a < b;
    });
    Ranking r;
    for (Index rank = 0; rank < d; ++rank) {
        const Index col = order[static_cast<std::size_t>(rank)];
        r.items.push_back({sm.features[static_cast<std::size_t>(col)], col,
                           importance[col]});
    }
    return r;
}

VariableSubset select_top(const Ranking& r, Index m) {
    if (m > static_cast<Index>(r.items.size()))
        throw MTooLarge(m, static_cast<Index>(r.items.size()));
    VariableSubset out;
    for (Index i = 0; i < m; ++i) {
        out.indices.push_back(r.items[static_cast<std::size_t>(i)].index);
        out.variables.push_back(r.items[static_cast<std::size_t>(i)].variable);
    }
    return out;
}

std::string ranking_to_json(const Ranking& r) {
    nlohmann::json j;
    j["ranking"] = nlohmann::json::array();
    for (const auto& item : r.items)
        j["ranking"].push_back({{"id", item.variable.id},
                                {"index", item.index},
                                {"importance", item.importance}});
    return j.dump(2) + "\n";
}

std::string ranking_to_svg(const Ranking& r, Index top_n) {
    const Index n = std::min<Index>(top_n, static_cast<Index>(r.items.size()));
    const int bar_h = 22, gap = 6, left = 140, width = 640, top = 40;
    const int height = top + static_cast<int>(n) * (bar_h + gap) + 20;
    double max_imp = 1e-300;
    for (Index i = 0; i < n; ++i)
        max_imp = std::max(max_imp, r.items[static_cast<std::size_t>(i)].importance);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\">\n";
    os << "<text x=\"" << left << "\" y=\"20\" font-family=\"sans-serif\" "
          "font-size=\"14\">Top features by mean |SHAP value|</text>\n";
    for (Index i = 0; i < n; ++i) {
        const auto& item = r.items[static_cast<std::size_t>(i)];
        const int y = top + static_cast<int>(i) * (bar_h + gap);
        const double frac = item.importance / max_imp;
        const int w = static_cast<int>(frac * (width - left - 80));
        os << "<text x=\"" << left - 8 << "\" y=\"" << y + bar_h - 6
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
           << item.variable.id << "</text>\n";
        os << "<rect x=\"" << left << "\" y=\"" << y << "\" width=\"" << std::max(w, 1)
           << "\" height=\"" << bar_h << "\" fill=\"#4878a8\"/>\n";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", item.importance);
        os << "<text x=\"" << left + std::max(w, 1) + 6 << "\" y=\"" << y + bar_h - 6
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << buf
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace dagfault
