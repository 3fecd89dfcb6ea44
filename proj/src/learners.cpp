#include "seqtune/learners.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace seqtune {

LearnerKind learner_from_string(const std::string& s) {
    if (s == "elastic_net") return LearnerKind::elastic_net;
    if (s == "cart_tree") return LearnerKind::cart_tree;
    throw std::invalid_argument("unknown learner '" + s + "'");
}

std::string to_string(LearnerKind k) {
    return k == LearnerKind::elastic_net ? "elastic_net" : "cart_tree";
}

ParamSpace default_space(LearnerKind kind) {
    if (kind == LearnerKind::elastic_net) {
        return ParamSpace({ParamDef::make_log2("lambda", -15.0, 15.0),
                           ParamDef::make_continuous("alpha", 0.0, 1.0)});
    }
    return ParamSpace({ParamDef::make_continuous("cp", 0.0, 0.5),
                       ParamDef::make_integer("maxdepth", 1, 30)});
}

// ---------------------------------------------------------------------------
// elastic net
// ---------------------------------------------------------------------------

namespace {

// One-hot expansion layout: numeric column -> itself, categorical column ->
// one indicator per level.
struct DesignLayout {
    std::vector<std::size_t> offset;  // per raw feature
    std::size_t width = 0;
};

DesignLayout make_layout(const Dataset& ds) {
    DesignLayout lay;
    lay.offset.reserve(ds.features.size());
    for (const auto& col : ds.features) {
        lay.offset.push_back(lay.width);
        lay.width += col.numeric ? 1 : col.levels.size();
    }
    return lay;
}

void fill_design_row(const Dataset& ds, const DesignLayout& lay, int row, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t f = 0; f < ds.features.size(); ++f) {
        const auto& col = ds.features[f];
        if (col.numeric)
            out[lay.offset[f]] = col.num[static_cast<std::size_t>(row)];
        else
            out[lay.offset[f] + static_cast<std::size_t>(col.cat[static_cast<std::size_t>(row)])] = 1.0;
    }
}

inline double soft_threshold(double rho, double t) {
    if (rho > t) return rho - t;
    if (rho < -t) return rho + t;
    return 0.0;
}

inline double clamp_prob(double p) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

struct EnetProblem {
    std::size_t n = 0, width = 0;
    std::vector<double> x;  // row-major n x width
    std::vector<double> y;

    double col(std::size_t i, std::size_t j) const { return x[i * width + j]; }
};

double enet_penalty(const std::vector<double>& coef, double lambda, double alpha) {
    double l1 = 0.0, l2 = 0.0;
    for (double b : coef) {
        l1 += std::fabs(b);
        l2 += b * b;
    }
    return lambda * (alpha * l1 + 0.5 * (1.0 - alpha) * l2);
}

double gaussian_objective(const EnetProblem& pr, double intercept, const std::vector<double>& coef,
                          double lambda, double alpha) {
    double rss = 0.0;
    for (std::size_t i = 0; i < pr.n; ++i) {
        double eta = intercept;
        for (std::size_t j = 0; j < pr.width; ++j) eta += pr.col(i, j) * coef[j];
        const double r = pr.y[i] - eta;
        rss += r * r;
    }
    return rss / (2.0 * static_cast<double>(pr.n)) + enet_penalty(coef, lambda, alpha);
}

double logistic_objective(const EnetProblem& pr, double intercept, const std::vector<double>& coef,
                          double lambda, double alpha) {
    double nll = 0.0;
    for (std::size_t i = 0; i < pr.n; ++i) {
        double eta = intercept;
        for (std::size_t j = 0; j < pr.width; ++j) eta += pr.col(i, j) * coef[j];
        // log(1 + e^eta) - y*eta, computed stably
        const double m = std::max(eta, 0.0);
        nll += m + std::log(std::exp(-m) + std::exp(eta - m)) - pr.y[i] * eta;
    }
    return nll / static_cast<double>(pr.n) + enet_penalty(coef, lambda, alpha);
}

ElasticNetModel fit_enet_gaussian(const EnetProblem& pr, double lambda, double alpha) {
    const std::size_t n = pr.n, w = pr.width;
    const double dn = static_cast<double>(n);
    ElasticNetModel m;
    m.coef.assign(w, 0.0);
    m.intercept = std::accumulate(pr.y.begin(), pr.y.end(), 0.0) / dn;

    std::vector<double> colsq(w, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < w; ++j) colsq[j] += pr.col(i, j) * pr.col(i, j);
    for (auto& v : colsq) v /= dn;

    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = pr.y[i] - m.intercept;

    double prev_obj = gaussian_objective(pr, m.intercept, m.coef, lambda, alpha);
    for (int sweep = 0; sweep < kEnetMaxSweeps; ++sweep) {
        for (std::size_t j = 0; j < w; ++j) {
            const double denom = colsq[j] + lambda * (1.0 - alpha);
            if (denom <= 0.0) continue;
            double rho = colsq[j] * m.coef[j];
            for (std::size_t i = 0; i < n; ++i) rho += pr.col(i, j) * resid[i] / dn;
            const double bj = soft_threshold(rho, lambda * alpha) / denom;
            if (bj != m.coef[j]) {
                const double delta = m.coef[j] - bj;
                for (std::size_t i = 0; i < n; ++i) resid[i] += pr.col(i, j) * delta;
                m.coef[j] = bj;
            }
        }
        // unpenalized intercept
        double shift = std::accumulate(resid.begin(), resid.end(), 0.0) / dn;
        if (shift != 0.0) {
            m.intercept += shift;
            for (auto& r : resid) r -= shift;
        }

        const double obj = gaussian_objective(pr, m.intercept, m.coef, lambda, alpha);
        assert(obj <= prev_obj + 1e-12 * (1.0 + std::fabs(prev_obj)));
        if (std::fabs(prev_obj - obj) <= kEnetTol * (std::fabs(prev_obj) + kEnetTol)) break;
        prev_obj = obj;
    }
    return m;
}

ElasticNetModel fit_enet_logistic(const EnetProblem& pr, double lambda, double alpha) {
    const std::size_t n = pr.n, w = pr.width;
    const double dn = static_cast<double>(n);

    const double ymean = std::accumulate(pr.y.begin(), pr.y.end(), 0.0) / dn;
    ElasticNetModel m;
    m.coef.assign(w, 0.0);
    {
        const double p0 = clamp_prob(ymean);
        m.intercept = std::log(p0 / (1.0 - p0));
    }
    if (ymean == 0.0 || ymean == 1.0) return m;  // constant target: intercept-only

    std::vector<double> eta(n), weight(n), z(n);
    double prev_obj = logistic_objective(pr, m.intercept, m.coef, lambda, alpha);

    for (int sweep = 0; sweep < kEnetMaxSweeps; ++sweep) {
        // one IRLS quadratic approximation per sweep
        for (std::size_t i = 0; i < n; ++i) {
            double e = m.intercept;
            for (std::size_t j = 0; j < w; ++j) e += pr.col(i, j) * m.coef[j];
            eta[i] = e;
            const double p = clamp_prob(1.0 / (1.0 + std::exp(-e)));
            weight[i] = p * (1.0 - p);
            z[i] = e + (pr.y[i] - p) / weight[i];
        }

        const double old_intercept = m.intercept;
        std::vector<double> old_coef = m.coef;

        std::vector<double> resid(n);
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] = z[i] - eta[i];
            wsum += weight[i];
        }
        // one cyclic pass on the weighted least-squares surrogate
        for (std::size_t j = 0; j < w; ++j) {
            double wxx = 0.0, wxr = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double xij = pr.col(i, j);
                wxx += weight[i] * xij * xij;
                wxr += weight[i] * xij * resid[i];
            }
            wxx /= dn;
            const double denom = wxx + lambda * (1.0 - alpha);
            if (denom <= 0.0) continue;
            const double rho = wxr / dn + wxx * m.coef[j];
            const double bj = soft_threshold(rho, lambda * alpha) / denom;
            if (bj != m.coef[j]) {
                const double delta = m.coef[j] - bj;
                for (std::size_t i = 0; i < n; ++i) resid[i] += pr.col(i, j) * delta;
                m.coef[j] = bj;
            }
        }
        {
            double wr = 0.0;
            for (std::size_t i = 0; i < n; ++i) wr += weight[i] * resid[i];
            const double shift = wr / wsum;
            m.intercept += shift;
            for (std::size_t i = 0; i < n; ++i) resid[i] -= shift;
        }

        // the IRLS surrogate can overshoot the true objective; halve the step
        // until it does not increase
        double obj = logistic_objective(pr, m.intercept, m.coef, lambda, alpha);
        int halvings = 0;
        while (obj > prev_obj && halvings < 30) {
            m.intercept = 0.5 * (m.intercept + old_intercept);
            for (std::size_t j = 0; j < w; ++j) m.coef[j] = 0.5 * (m.coef[j] + old_coef[j]);
            obj = logistic_objective(pr, m.intercept, m.coef, lambda, alpha);
            ++halvings;
        }
        if (obj > prev_obj) {
            m.intercept = old_intercept;
            m.coef = std::move(old_coef);
            break;
        }
        assert(obj <= prev_obj + 1e-12 * (1.0 + std::fabs(prev_obj)));
        if (std::fabs(prev_obj - obj) <= kEnetTol * (std::fabs(prev_obj) + kEnetTol)) break;
        prev_obj = obj;
    }
    return m;
}

Model fit_elastic_net(const Config& cfg, const Dataset& ds, std::span<const int> rows) {
    const double lambda = cfg.get_real("lambda");
    const double alpha = cfg.get_real("alpha");
    if (!(lambda > 0.0)) throw std::invalid_argument("elastic_net: lambda must be > 0");
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("elastic_net: alpha must be in [0,1]");

    const DesignLayout lay = make_layout(ds);
    EnetProblem pr;
    pr.n = rows.size();
    pr.width = lay.width;
    pr.x.resize(pr.n * pr.width);
    pr.y.resize(pr.n);
    for (std::size_t i = 0; i < pr.n; ++i) {
        fill_design_row(ds, lay, rows[i], std::span<double>(pr.x).subspan(i * pr.width, pr.width));
        pr.y[i] = ds.target[static_cast<std::size_t>(rows[i])];
    }

    // the penalty acts on standardized columns (train-set mean and 1/n sd),
    // so the lambda grid means the same thing whatever the feature scales;
    // coefficients are mapped back to the original scale afterwards
    const double dn = static_cast<double>(pr.n);
    std::vector<double> mu(pr.width, 0.0), sd(pr.width, 0.0);
    for (std::size_t i = 0; i < pr.n; ++i)
        for (std::size_t j = 0; j < pr.width; ++j) mu[j] += pr.col(i, j);
    for (auto& v : mu) v /= dn;
    for (std::size_t i = 0; i < pr.n; ++i)
        for (std::size_t j = 0; j < pr.width; ++j) {
            const double d = pr.col(i, j) - mu[j];
            sd[j] += d * d;
        }
    for (auto& v : sd) v = std::sqrt(v / dn);
    for (std::size_t i = 0; i < pr.n; ++i)
        for (std::size_t j = 0; j < pr.width; ++j) {
            double& x = pr.x[i * pr.width + j];
            x = sd[j] > 0.0 ? (x - mu[j]) / sd[j] : 0.0;
        }

    ElasticNetModel em = ds.task == TaskKind::regression ? fit_enet_gaussian(pr, lambda, alpha)
                                                         : fit_enet_logistic(pr, lambda, alpha);
    for (std::size_t j = 0; j < pr.width; ++j) {
        if (sd[j] > 0.0) {
            em.coef[j] /= sd[j];
            em.intercept -= em.coef[j] * mu[j];
        } else {
            em.coef[j] = 0.0;
        }
    }

    Model m;
    m.kind = LearnerKind::elastic_net;
    m.task = ds.task;
    m.n_features = ds.features.size();
    m.impl = std::move(em);
    return m;
}

// ---------------------------------------------------------------------------
// cart tree
// ---------------------------------------------------------------------------

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    std::uint64_t left_levels = 0;
    double criterion = std::numeric_limits<double>::infinity();
    double key = 0.0;  // tie-break within a feature (threshold / prefix length)
};

// impurity sum for a would-be node: Gini * count (classification) or SSE
inline double impurity_sum(TaskKind task, double cnt, double sum, double sumsq) {
    if (cnt <= 0.0) return 0.0;
    if (task == TaskKind::classification) {
        const double p = sum / cnt;  // targets are 0/1, sum = positives
        return cnt * 2.0 * p * (1.0 - p);
    }
    return sumsq - sum * sum / cnt;
}

struct TreeBuilder {
    const Dataset& ds;
    TaskKind task;
    int maxdepth;
    double cp;
    std::vector<TreeNode> nodes;

    // risk used for pruning: misclassified count (classification) or SSE
    static double node_risk(TaskKind task, double cnt, double sum, double sumsq) {
        if (task == TaskKind::classification) {
            const double pos = sum;
            return std::min(pos, cnt - pos);
        }
        return sumsq - sum * sum / cnt;
    }

    SplitChoice best_numeric_split(const Column& col, int feature, std::vector<int>& rows) {
        std::sort(rows.begin(), rows.end(), [&](int a, int b) {
            return col.num[static_cast<std::size_t>(a)] < col.num[static_cast<std::size_t>(b)];
        });
        const std::size_t n = rows.size();
        std::vector<double> ps(n + 1, 0.0), pss(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double y = ds.target[static_cast<std::size_t>(rows[i])];
            ps[i + 1] = ps[i] + y;
            pss[i + 1] = pss[i] + y * y;
        }
        SplitChoice best;
        best.feature = feature;
        for (std::size_t i = 1; i < n; ++i) {
            const double va = col.num[static_cast<std::size_t>(rows[i - 1])];
            const double vb = col.num[static_cast<std::size_t>(rows[i])];
            if (va == vb) continue;
            if (i < static_cast<std::size_t>(kTreeMinLeaf) ||
                n - i < static_cast<std::size_t>(kTreeMinLeaf))
                continue;
            const double cl = static_cast<double>(i), cr = static_cast<double>(n - i);
            const double crit = impurity_sum(task, cl, ps[i], pss[i]) +
                                impurity_sum(task, cr, ps[n] - ps[i], pss[n] - pss[i]);
            const double thr = va + 0.5 * (vb - va);
            if (crit < best.criterion - 1e-12 ||
                (std::fabs(crit - best.criterion) <= 1e-12 && best.found && thr < best.key)) {
                best.found = true;
                best.criterion = crit;
                best.threshold = thr;
                best.key = thr;
            }
        }
        return best;
    }

    SplitChoice best_categorical_split(const Column& col, int feature,
                                       const std::vector<int>& rows) {
        const std::size_t nlev = col.levels.size();
        std::vector<double> cnt(nlev, 0.0), sum(nlev, 0.0), sumsq(nlev, 0.0);
        for (int r : rows) {
            const auto lv = static_cast<std::size_t>(col.cat[static_cast<std::size_t>(r)]);
            const double y = ds.target[static_cast<std::size_t>(r)];
            cnt[lv] += 1.0;
            sum[lv] += y;
            sumsq[lv] += y * y;
        }
        std::vector<std::size_t> present;
        for (std::size_t l = 0; l < nlev; ++l)
            if (cnt[l] > 0.0) present.push_back(l);
        if (present.size() < 2) return {};
        // ordering levels by mean target makes the best subset a prefix
        std::sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
            const double ma = sum[a] / cnt[a], mb = sum[b] / cnt[b];
            if (ma != mb) return ma < mb;
            return a < b;
        });
        const double tot_cnt = static_cast<double>(rows.size());
        double tot_sum = 0.0, tot_ss = 0.0;
        for (std::size_t l : present) {
            tot_sum += sum[l];
            tot_ss += sumsq[l];
        }
        SplitChoice best;
        best.feature = feature;
        double lc = 0.0, lsum = 0.0, lss = 0.0;
        std::uint64_t mask = 0;
        for (std::size_t k = 0; k + 1 < present.size(); ++k) {
            const std::size_t l = present[k];
            lc += cnt[l];
            lsum += sum[l];
            lss += sumsq[l];
            mask |= (1ULL << l);
            if (lc < kTreeMinLeaf || tot_cnt - lc < kTreeMinLeaf) continue;
            const double crit = impurity_sum(task, lc, lsum, lss) +
                                impurity_sum(task, tot_cnt - lc, tot_sum - lsum, tot_ss - lss);
            const double key = static_cast<double>(k + 1);
            if (crit < best.criterion - 1e-12 ||
                (std::fabs(crit - best.criterion) <= 1e-12 && best.found && key < best.key)) {
                best.found = true;
                best.criterion = crit;
                best.left_levels = mask;
                best.key = key;
            }
        }
        return best;
    }

    int build(std::vector<int> rows, int depth) {
        const double cnt = static_cast<double>(rows.size());
        double sum = 0.0, sumsq = 0.0;
        for (int r : rows) {
            const double y = ds.target[static_cast<std::size_t>(r)];
            sum += y;
            sumsq += y * y;
        }

        TreeNode node;
        if (task == TaskKind::classification)
            node.prediction = (sum > cnt - sum) ? 1.0 : 0.0;  // exact tie -> class 0
        else
            node.prediction = sum / cnt;

        const double imp = impurity_sum(task, cnt, sum, sumsq);
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(node);

        if (depth >= maxdepth || rows.size() < static_cast<std::size_t>(kTreeMinSplit) ||
            imp <= 1e-12)
            return id;

        SplitChoice best;
        for (std::size_t f = 0; f < ds.features.size(); ++f) {
            const auto& col = ds.features[f];
            SplitChoice s = col.numeric ? best_numeric_split(col, static_cast<int>(f), rows)
                                        : best_categorical_split(col, static_cast<int>(f), rows);
            // lowest feature index wins ties across features
            if (s.found && s.criterion < best.criterion - 1e-12) best = s;
        }
        if (!best.found || best.criterion >= imp - 1e-12) return id;

        const auto& col = ds.features[static_cast<std::size_t>(best.feature)];
        std::vector<int> left_rows, right_rows;
        for (int r : rows) {
            const bool goes_left =
                col.numeric
                    ? col.num[static_cast<std::size_t>(r)] < best.threshold
                    : ((best.left_levels >> col.cat[static_cast<std::size_t>(r)]) & 1ULL) != 0;
            (goes_left ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        nodes[static_cast<std::size_t>(id)].leaf = false;
        nodes[static_cast<std::size_t>(id)].feature = best.feature;
        nodes[static_cast<std::size_t>(id)].threshold = best.threshold;
        nodes[static_cast<std::size_t>(id)].left_levels = best.left_levels;
        const int l = build(std::move(left_rows), depth + 1);
        nodes[static_cast<std::size_t>(id)].left = l;
        const int r = build(std::move(right_rows), depth + 1);
        nodes[static_cast<std::size_t>(id)].right = r;
        return id;
    }
};

// risk of the (possibly pruned) subtree and of the node collapsed to a leaf,
// computed from the training rows; prunes in post-order
struct Pruner {
    const Dataset& ds;
    TaskKind task;
    std::vector<TreeNode>& nodes;
    double root_risk;
    double cp;

    double prune(int id, const std::vector<int>& rows) {
        TreeNode& node = nodes[static_cast<std::size_t>(id)];
        double cnt = static_cast<double>(rows.size()), sum = 0.0, sumsq = 0.0;
        for (int r : rows) {
            const double y = ds.target[static_cast<std::size_t>(r)];
            sum += y;
            sumsq += y * y;
        }
        const double leaf_risk = TreeBuilder::node_risk(task, cnt, sum, sumsq);
        if (node.leaf) return leaf_risk;

        const auto& col = ds.features[static_cast<std::size_t>(node.feature)];
        std::vector<int> left_rows, right_rows;
        for (int r : rows) {
            const bool goes_left =
                col.numeric
                    ? col.num[static_cast<std::size_t>(r)] < node.threshold
                    : ((node.left_levels >> col.cat[static_cast<std::size_t>(r)]) & 1ULL) != 0;
            (goes_left ? left_rows : right_rows).push_back(r);
        }
        const double subtree_risk = prune(node.left, left_rows) + prune(node.right, right_rows);
        const double improvement = (leaf_risk - subtree_risk) / root_risk;
        if (improvement < cp) {
            node.leaf = true;
            node.left = node.right = -1;
            node.feature = -1;
            return leaf_risk;
        }
        return subtree_risk;
    }
};

Model fit_cart_tree(const Config& cfg, const Dataset& ds, std::span<const int> rows) {
    const double cp = cfg.get_real("cp");
    const auto maxdepth = cfg.get_int("maxdepth");
    if (cp < 0.0) throw std::invalid_argument("cart_tree: cp must be >= 0");
    if (maxdepth < 1) throw std::invalid_argument("cart_tree: maxdepth must be >= 1");
    for (const auto& col : ds.features)
        if (!col.numeric && col.levels.size() > 64)
            throw std::invalid_argument("cart_tree: categorical feature '" + col.name +
                                        "' has more than 64 levels");

    TreeBuilder builder{ds, ds.task, static_cast<int>(maxdepth), cp, {}};
    std::vector<int> all(rows.begin(), rows.end());
    builder.build(all, 0);

    // root-normalized pruning; a pure root has nothing to prune
    {
        double cnt = static_cast<double>(all.size()), sum = 0.0, sumsq = 0.0;
        for (int r : all) {
            const double y = ds.target[static_cast<std::size_t>(r)];
            sum += y;
            sumsq += y * y;
        }
        const double root_risk = TreeBuilder::node_risk(ds.task, cnt, sum, sumsq);
        if (root_risk > 0.0) {
            Pruner pruner{ds, ds.task, builder.nodes, root_risk, cp};
            pruner.prune(0, all);
        }
    }

    Model m;
    m.kind = LearnerKind::cart_tree;
    m.task = ds.task;
    m.n_features = ds.features.size();
    m.impl = TreeModel{std::move(builder.nodes)};
    return m;
}

}  // namespace

Model fit(LearnerKind kind, const Config& cfg, const Dataset& ds, std::span<const int> train_rows) {
    if (train_rows.empty()) throw std::invalid_argument("fit: empty training set");
    return kind == LearnerKind::elastic_net ? fit_elastic_net(cfg, ds, train_rows)
                                            : fit_cart_tree(cfg, ds, train_rows);
}

std::vector<double> predict(const Model& m, const Dataset& ds, std::span<const int> rows) {
    if (ds.features.size() != m.n_features)
        throw std::invalid_argument("predict: feature schema mismatch");
    std::vector<double> out;
    out.reserve(rows.size());

    if (m.kind == LearnerKind::elastic_net) {
        const auto& em = std::get<ElasticNetModel>(m.impl);
        const DesignLayout lay = make_layout(ds);
        if (lay.width != em.coef.size())
            throw std::invalid_argument("predict: feature schema mismatch");
        std::vector<double> xrow(lay.width);
        for (int r : rows) {
            fill_design_row(ds, lay, r, xrow);
            double eta = em.intercept;
            for (std::size_t j = 0; j < lay.width; ++j) eta += xrow[j] * em.coef[j];
            out.push_back(m.task == TaskKind::classification ? (eta > 0.0 ? 1.0 : 0.0) : eta);
        }
    } else {
        const auto& tm = std::get<TreeModel>(m.impl);
        for (int r : rows) {
            const TreeNode* node = &tm.nodes[0];
            while (!node->leaf) {
                const auto& col = ds.features[static_cast<std::size_t>(node->feature)];
                const bool goes_left =
                    col.numeric
                        ? col.num[static_cast<std::size_t>(r)] < node->threshold
                        : ((node->left_levels >> col.cat[static_cast<std::size_t>(r)]) & 1ULL) != 0;
                node = &tm.nodes[static_cast<std::size_t>(goes_left ? node->left : node->right)];
            }
            out.push_back(node->prediction);
        }
    }
    return out;
}

}  // namespace seqtune
