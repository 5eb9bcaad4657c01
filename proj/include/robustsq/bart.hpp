// Sum-of-trees Bayesian nonparametric regression.
//
// Continuous outcomes: Metropolis-within-Gibbs backfitting over a forest of
// m regularized trees with a conjugate normal prior on terminal-node means
// and a scaled-inverse-chi-square prior on the residual variance.
// Binary outcomes: probit data augmentation (truncated-normal latents) on top
// of the same backfitting sweep with sigma fixed at 1.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "robustsq/rng.hpp"
#include "robustsq/stats.hpp"

namespace robustsq {

struct BartConfig {
    int num_trees = 200;
    int burn_in = 250;
    int num_draws = 1000;
    double alpha = 0.95;  // split prob alpha (1+depth)^-beta
    double beta = 2.0;
    double k = 2.0;       // terminal-mean prior scale
    double nu = 3.0;      // sigma prior df
    double q = 0.90;      // sigma prior quantile
    int min_node_size = 5;
    double p_grow = 0.28, p_prune = 0.28, p_change = 0.44;
    int max_depth = 0;        // 0 = unlimited; >0 truncates the tree space
    double fixed_sigma = 0.0; // >0 skips the sigma Gibbs step
    bool keep_forests = true;

    void validate() const {
        if (num_trees < 1 || burn_in < 0 || num_draws < 1)
            throw std::invalid_argument("BartConfig: chain sizes must be positive");
        if (!(alpha > 0.0 && alpha < 1.0) || !(beta >= 0.0) || !(k > 0.0) ||
            !(nu > 0.0) || !(q > 0.0 && q < 1.0) || min_node_size < 1)
            throw std::invalid_argument("BartConfig: invalid hyperparameter");
        if (std::abs(p_grow + p_prune + p_change - 1.0) > 1e-9)
            throw std::invalid_argument("BartConfig: proposal probabilities must sum to 1");
    }

    // Desk-scale preset used by the simulation harness.
    static BartConfig desk() {
        BartConfig c;
        c.num_trees = 50;
        c.burn_in = 100;
        c.num_draws = 200;
        return c;
    }
};

struct TreeNode {
    int var = -1;  // -1 marks a terminal node
    double cut = 0.0;
    int left = -1, right = -1;
    int parent = -1;
    int depth = 0;
    double mu = 0.0;
    bool is_leaf() const { return var < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes{TreeNode{}};  // node 0 is the root

    int route(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
        int id = 0;
        while (!nodes[id].is_leaf())
            id = x[nodes[id].var] < nodes[id].cut ? nodes[id].left : nodes[id].right;
        return id;
    }
    double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
        return nodes[route(x)].mu;
    }
    int max_leaf_depth() const {
        int d = 0;
        for (int id : live_nodes())
            if (nodes[id].is_leaf()) d = std::max(d, nodes[id].depth);
        return d;
    }
    // Indices of nodes reachable from the root (prunes leave dead slots).
    std::vector<int> live_nodes() const {
        std::vector<int> out, stack{0};
        while (!stack.empty()) {
            const int id = stack.back();
            stack.pop_back();
            out.push_back(id);
            if (!nodes[id].is_leaf()) {
                stack.push_back(nodes[id].left);
                stack.push_back(nodes[id].right);
            }
        }
        return out;
    }
};

// log P(tree structure): internal node at depth d contributes
// log(alpha (1+d)^-beta), terminal contributes log(1 - alpha (1+d)^-beta).
// Split-rule mass is uniform over the candidates available at each node and
// cancels against the identical proposal distribution in the sampler, so it
// is not included here.
inline double log_tree_prior(const Tree& tree, double alpha, double beta) {
    double lp = 0.0;
    for (int id : tree.live_nodes()) {
        const double p_split = alpha * std::pow(1.0 + tree.nodes[id].depth, -beta);
        lp += tree.nodes[id].is_leaf() ? std::log(1.0 - p_split) : std::log(p_split);
    }
    return lp;
}

struct ForestSnapshot {
    std::vector<Tree> trees;
    double sigma = 1.0;  // on the model's internal scale
};

struct BartPosterior {
    std::vector<ForestSnapshot> draws;  // post-burn snapshots (if kept)
    std::vector<double> sigma_trace;    // original scale; empty in probit mode
    Eigen::MatrixXd train_pred;         // n x num_draws, original scale / probability
    bool probit = false;
    // affine mapping between model scale and data scale
    double y_center = 0.0, y_range = 1.0, offset = 0.0;
    int num_covariates = 0;

    Eigen::VectorXd train_mean() const { return train_pred.rowwise().mean(); }
};

namespace detail {

class BartSampler {
public:
    BartSampler(const Eigen::MatrixXd& x, const BartConfig& cfg, RngStream& rng)
        : x_(x), cfg_(cfg), rng_(rng), n_(x.rows()), p_(static_cast<int>(x.cols())) {
        trees_.assign(cfg.num_trees, Tree{});
        node_of_row_.assign(cfg.num_trees, std::vector<int>(n_, 0));
        total_fit_ = Eigen::VectorXd::Zero(n_);
        res_.resize(n_);
    }

    // One full Gibbs sweep on target y (model scale), current sigma_.
    void sweep(const Eigen::VectorXd& y) {
        for (int j = 0; j < cfg_.num_trees; ++j) {
            Tree& tree = trees_[j];
            auto& assign = node_of_row_[j];
            for (Eigen::Index i = 0; i < n_; ++i) {
                total_fit_[i] -= tree.nodes[assign[i]].mu;
                res_[i] = y[i] - total_fit_[i];
            }
            build_row_lists(tree, assign);
            propose_move(tree, assign);
            draw_leaf_means(tree, assign);
            for (Eigen::Index i = 0; i < n_; ++i)
                total_fit_[i] += tree.nodes[assign[i]].mu;
        }
    }

    void draw_sigma(const Eigen::VectorXd& y) {
        double ss = 0.0;
        for (Eigen::Index i = 0; i < n_; ++i) {
            const double r = y[i] - total_fit_[i];
            ss += r * r;
        }
        const double nu_post = cfg_.nu + static_cast<double>(n_);
        const double lambda_post = (cfg_.nu * lambda_cal_ + ss) / nu_post;
        sigma_ = std::sqrt(rng_.scaled_inv_chisq(nu_post, lambda_post));
    }

    const Eigen::VectorXd& total_fit() const { return total_fit_; }
    const std::vector<Tree>& trees() const { return trees_; }
    double sigma() const { return sigma_; }
    void set_sigma(double s) { sigma_ = s; }
    void set_tau(double t) { tau_ = t; }
    void set_lambda_cal(double l) { lambda_cal_ = l; }

private:
    void build_row_lists(const Tree& tree, const std::vector<int>& assign) {
        rows_of_node_.assign(tree.nodes.size(), {});
        for (Eigen::Index i = 0; i < n_; ++i)
            rows_of_node_[assign[i]].push_back(static_cast<int>(i));
    }

    // Integrated leaf likelihood (terms constant across partitions dropped).
    double log_marginal(double count, double sum) const {
        const double s2 = sigma_ * sigma_, t2 = tau_ * tau_;
        const double denom = s2 + count * t2;
        return 0.5 * std::log(s2 / denom) + t2 * sum * sum / (2.0 * s2 * denom);
    }

    double leaf_sum(int node) const {
        double s = 0.0;
        for (int i : rows_of_node_[node]) s += res_[i];
        return s;
    }

    void collect(const Tree& tree, std::vector<int>& leaves, std::vector<int>& prunable) const {
        leaves.clear();
        prunable.clear();
        for (int id : tree.live_nodes()) {
            const TreeNode& nd = tree.nodes[id];
            if (nd.is_leaf()) leaves.push_back(id);
            else if (tree.nodes[nd.left].is_leaf() && tree.nodes[nd.right].is_leaf())
                prunable.push_back(id);
        }
    }

    // log of the structural prior ratio for splitting a leaf at depth d.
    double log_grow_prior(int depth) const {
        const double ps = cfg_.alpha * std::pow(1.0 + depth, -cfg_.beta);
        const double pc = cfg_.alpha * std::pow(2.0 + depth, -cfg_.beta);
        return std::log(ps) + 2.0 * std::log(1.0 - pc) - std::log(1.0 - ps);
    }

    // Distinct observed values of covariate `var` among `rows`.
    std::vector<double> candidate_cuts(const std::vector<int>& rows, int var) const {
        std::vector<double> vals;
        vals.reserve(rows.size());
        for (int i : rows) vals.push_back(x_(i, var));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        return vals;
    }

    void propose_move(Tree& tree, std::vector<int>& assign) {
        std::vector<int> leaves, prunable;
        collect(tree, leaves, prunable);
        const double u = rng_.uniform();
        if (u < cfg_.p_grow) grow(tree, assign, leaves, prunable);
        else if (u < cfg_.p_grow + cfg_.p_prune) prune(tree, assign, leaves, prunable);
        else change(tree, assign, prunable);
    }

    void grow(Tree& tree, std::vector<int>& assign,
              const std::vector<int>& leaves, const std::vector<int>& prunable) {
        const int leaf = leaves[rng_.uniform_index(leaves.size())];
        const TreeNode& nd = tree.nodes[leaf];
        if (cfg_.max_depth > 0 && nd.depth >= cfg_.max_depth) return;
        const auto& rows = rows_of_node_[leaf];
        if (static_cast<int>(rows.size()) < 2 * cfg_.min_node_size) return;

        const int var = static_cast<int>(rng_.uniform_index(p_));
        const auto cuts = candidate_cuts(rows, var);
        const double cut = cuts[rng_.uniform_index(cuts.size())];

        double n_left = 0.0, s_left = 0.0;
        for (int i : rows)
            if (x_(i, var) < cut) {
                n_left += 1.0;
                s_left += res_[i];
            }
        const double n_all = static_cast<double>(rows.size());
        const double n_right = n_all - n_left;
        if (n_left < cfg_.min_node_size || n_right < cfg_.min_node_size) return;
        const double s_all = leaf_sum(leaf);
        const double s_right = s_all - s_left;

        // Prunable count after the grow: the new internal node becomes
        // prunable; the parent (if it had two leaf children) no longer is.
        int w2_after = static_cast<int>(prunable.size()) + 1;
        if (nd.parent >= 0) {
            const TreeNode& pa = tree.nodes[nd.parent];
            const int sibling = pa.left == leaf ? pa.right : pa.left;
            if (tree.nodes[sibling].is_leaf()) w2_after -= 1;
        }

        const double log_accept =
            std::log(cfg_.p_prune) - std::log(cfg_.p_grow) +
            std::log(static_cast<double>(leaves.size())) - std::log(static_cast<double>(w2_after)) +
            log_grow_prior(nd.depth) +
            log_marginal(n_left, s_left) + log_marginal(n_right, s_right) -
            log_marginal(n_all, s_all);
        if (std::log(rng_.uniform()) >= log_accept) return;

        const int li = alloc_node(tree), ri = alloc_node(tree);
        TreeNode& parent = tree.nodes[leaf];
        parent.var = var;
        parent.cut = cut;
        parent.left = li;
        parent.right = ri;
        tree.nodes[li] = TreeNode{-1, 0.0, -1, -1, leaf, parent.depth + 1, 0.0};
        tree.nodes[ri] = TreeNode{-1, 0.0, -1, -1, leaf, parent.depth + 1, 0.0};
        rows_of_node_.resize(tree.nodes.size());
        rows_of_node_[li].clear();
        rows_of_node_[ri].clear();
        for (int i : rows_of_node_[leaf]) {
            const int child = x_(i, var) < cut ? li : ri;
            assign[i] = child;
            rows_of_node_[child].push_back(i);
        }
    }

    void prune(Tree& tree, std::vector<int>& assign,
               const std::vector<int>& leaves, const std::vector<int>& prunable) {
        if (prunable.empty()) return;
        const int node = prunable[rng_.uniform_index(prunable.size())];
        const TreeNode& nd = tree.nodes[node];
        const double n_left = static_cast<double>(rows_of_node_[nd.left].size());
        const double n_right = static_cast<double>(rows_of_node_[nd.right].size());
        const double s_left = leaf_sum(nd.left), s_right = leaf_sum(nd.right);
        const double n_all = n_left + n_right, s_all = s_left + s_right;

        const double log_accept =
            std::log(cfg_.p_grow) - std::log(cfg_.p_prune) +
            std::log(static_cast<double>(prunable.size())) -
            std::log(static_cast<double>(leaves.size()) - 1.0) -
            log_grow_prior(nd.depth) +
            log_marginal(n_all, s_all) -
            log_marginal(n_left, s_left) - log_marginal(n_right, s_right);
        if (std::log(rng_.uniform()) >= log_accept) return;

        for (int i : rows_of_node_[nd.left]) assign[i] = node;
        for (int i : rows_of_node_[nd.right]) assign[i] = node;
        auto& merged = rows_of_node_[node];
        merged = rows_of_node_[nd.left];
        merged.insert(merged.end(), rows_of_node_[nd.right].begin(), rows_of_node_[nd.right].end());
        free_node(tree, nd.left);
        free_node(tree, nd.right);
        TreeNode& parent = tree.nodes[node];
        parent.var = -1;
        parent.left = parent.right = -1;
    }

    void change(Tree& tree, std::vector<int>& assign, const std::vector<int>& prunable) {
        if (prunable.empty()) return;
        const int node = prunable[rng_.uniform_index(prunable.size())];
        const TreeNode& nd = tree.nodes[node];
        auto& left_rows = rows_of_node_[nd.left];
        auto& right_rows = rows_of_node_[nd.right];

        std::vector<int> rows;
        rows.reserve(left_rows.size() + right_rows.size());
        rows.insert(rows.end(), left_rows.begin(), left_rows.end());
        rows.insert(rows.end(), right_rows.begin(), right_rows.end());

        const int var = static_cast<int>(rng_.uniform_index(p_));
        const auto cuts = candidate_cuts(rows, var);
        const double cut = cuts[rng_.uniform_index(cuts.size())];

        double n_new_l = 0.0, s_new_l = 0.0, s_all = 0.0;
        for (int i : rows) {
            s_all += res_[i];
            if (x_(i, var) < cut) {
                n_new_l += 1.0;
                s_new_l += res_[i];
            }
        }
        const double n_all = static_cast<double>(rows.size());
        const double n_new_r = n_all - n_new_l;
        const double s_new_r = s_all - s_new_l;
        if (n_new_l < cfg_.min_node_size || n_new_r < cfg_.min_node_size) return;

        const double n_old_l = static_cast<double>(left_rows.size());
        const double n_old_r = static_cast<double>(right_rows.size());
        const double s_old_l = leaf_sum(nd.left);
        const double s_old_r = s_all - s_old_l;

        const double log_accept =
            log_marginal(n_new_l, s_new_l) + log_marginal(n_new_r, s_new_r) -
            log_marginal(n_old_l, s_old_l) - log_marginal(n_old_r, s_old_r);
        if (std::log(rng_.uniform()) >= log_accept) return;

        TreeNode& parent = tree.nodes[node];
        parent.var = var;
        parent.cut = cut;
        left_rows.clear();
        right_rows.clear();
        for (int i : rows) {
            const int child = x_(i, var) < cut ? nd.left : nd.right;
            assign[i] = child;
            rows_of_node_[child].push_back(i);
        }
    }

    void draw_leaf_means(Tree& tree, const std::vector<int>& assign) {
        (void)assign;
        const double s2 = sigma_ * sigma_, t2 = tau_ * tau_;
        for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
            if (!tree.nodes[id].is_leaf() || id >= rows_of_node_.size()) continue;
            const auto& rows = rows_of_node_[id];
            if (rows.empty()) continue;
            double s = 0.0;
            for (int i : rows) s += res_[i];
            const double nc = static_cast<double>(rows.size());
            const double v = s2 * t2 / (s2 + nc * t2);
            const double m = t2 * s / (s2 + nc * t2);
            tree.nodes[id].mu = rng_.normal(m, v);
        }
    }

    // Pruned slots are marked dead (depth == -1) and reused; trees stay small
    // enough that the linear scan is cheap.
    int alloc_node(Tree& tree) {
        for (std::size_t id = 1; id < tree.nodes.size(); ++id)
            if (tree.nodes[id].depth < 0) {
                tree.nodes[id] = TreeNode{};
                return static_cast<int>(id);
            }
        tree.nodes.emplace_back();
        return static_cast<int>(tree.nodes.size()) - 1;
    }
    void free_node(Tree& tree, int id) {
        tree.nodes[id] = TreeNode{};
        tree.nodes[id].depth = -1;
        rows_of_node_[id].clear();
    }

    const Eigen::MatrixXd& x_;
    const BartConfig& cfg_;
    RngStream& rng_;
    Eigen::Index n_;
    int p_;
    double sigma_ = 1.0, tau_ = 0.1, lambda_cal_ = 1.0;
    std::vector<Tree> trees_;
    std::vector<std::vector<int>> node_of_row_;
    std::vector<std::vector<int>> rows_of_node_;
    Eigen::VectorXd total_fit_;
    std::vector<double> res_;
};

}  // namespace detail

inline BartPosterior backfit_continuous(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        const BartConfig& cfg, RngStream& rng) {
    cfg.validate();
    const Eigen::Index n = x.rows();
    if (n != y.size()) throw std::invalid_argument("backfit_continuous: rows(x) != len(y)");
    if (n < 2 * cfg.min_node_size)
        throw std::invalid_argument("backfit_continuous: need at least 2*min_node_size rows");
    if (!y.allFinite()) throw std::invalid_argument("backfit_continuous: y must be finite");

    BartPosterior post;
    post.probit = false;
    post.num_covariates = static_cast<int>(x.cols());
    post.y_center = (y.minCoeff() + y.maxCoeff()) / 2.0;
    post.y_range = y.maxCoeff() - y.minCoeff();
    if (post.y_range < 1e-12) post.y_range = 1.0;  // constant outcome is legal
    const Eigen::VectorXd ys = (y.array() - post.y_center) / post.y_range;

    detail::BartSampler sampler(x, cfg, rng);
    sampler.set_tau(0.5 / (cfg.k * std::sqrt(static_cast<double>(cfg.num_trees))));

    double sd = std::sqrt(std::max((ys.array() - ys.mean()).square().sum() /
                                       std::max<double>(1.0, static_cast<double>(n - 1)),
                                   1e-12));
    sampler.set_lambda_cal(sd * sd * chisq_quantile(1.0 - cfg.q, cfg.nu) / cfg.nu);
    sampler.set_sigma(cfg.fixed_sigma > 0.0 ? cfg.fixed_sigma : sd);

    post.train_pred.resize(n, cfg.num_draws);
    post.sigma_trace.reserve(cfg.num_draws);
    if (cfg.keep_forests) post.draws.reserve(cfg.num_draws);

    const int total = cfg.burn_in + cfg.num_draws;
    for (int sweep = 0; sweep < total; ++sweep) {
        sampler.sweep(ys);
        if (cfg.fixed_sigma <= 0.0) sampler.draw_sigma(ys);
        if (sweep < cfg.burn_in) continue;
        const int d = sweep - cfg.burn_in;
        post.train_pred.col(d) = sampler.total_fit().array() * post.y_range + post.y_center;
        post.sigma_trace.push_back(sampler.sigma() * post.y_range);
        if (cfg.keep_forests) post.draws.push_back({sampler.trees(), sampler.sigma()});
    }
    return post;
}

inline BartPosterior backfit_probit(const Eigen::MatrixXd& x, const Eigen::VectorXd& r,
                                    const BartConfig& cfg, RngStream& rng) {
    cfg.validate();
    const Eigen::Index n = x.rows();
    if (n != r.size()) throw std::invalid_argument("backfit_probit: rows(x) != len(r)");
    double pbar = 0.0;
    bool any0 = false, any1 = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (r[i] == 0.0) any0 = true;
        else if (r[i] == 1.0) any1 = true;
        else throw std::invalid_argument("backfit_probit: response must be 0/1");
        pbar += r[i];
    }
    if (!any0 || !any1)
        throw std::invalid_argument("backfit_probit: both response classes must be present");
    pbar /= static_cast<double>(n);

    BartPosterior post;
    post.probit = true;
    post.num_covariates = static_cast<int>(x.cols());
    post.offset = normal_quantile(pbar);

    detail::BartSampler sampler(x, cfg, rng);
    sampler.set_tau(3.0 / (cfg.k * std::sqrt(static_cast<double>(cfg.num_trees))));
    sampler.set_sigma(1.0);

    post.train_pred.resize(n, cfg.num_draws);
    if (cfg.keep_forests) post.draws.reserve(cfg.num_draws);

    const double inf = std::numeric_limits<double>::infinity();
    Eigen::VectorXd latent(n);
    const int total = cfg.burn_in + cfg.num_draws;
    for (int sweep = 0; sweep < total; ++sweep) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double g = sampler.total_fit()[i] + post.offset;
            latent[i] = r[i] == 1.0 ? rng.truncated_normal(g, 0.0, inf)
                                    : rng.truncated_normal(g, -inf, 0.0);
            latent[i] -= post.offset;
        }
        sampler.sweep(latent);
        if (sweep < cfg.burn_in) continue;
        const int d = sweep - cfg.burn_in;
        for (Eigen::Index i = 0; i < n; ++i)
            post.train_pred(i, d) = normal_cdf(sampler.total_fit()[i] + post.offset);
        if (cfg.keep_forests) post.draws.push_back({sampler.trees(), 1.0});
    }
    return post;
}

namespace detail {
inline Eigen::VectorXd raw_forest_prediction(const ForestSnapshot& snap,
                                             const Eigen::MatrixXd& xnew) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(xnew.rows());
    for (const Tree& t : snap.trees)
        for (Eigen::Index i = 0; i < xnew.rows(); ++i) out[i] += t.predict(xnew.row(i));
    return out;
}
}  // namespace detail

// Prediction from a single stored posterior draw.
inline Eigen::VectorXd posterior_predict_draw(const BartPosterior& post,
                                              const Eigen::MatrixXd& xnew, int index) {
    if (post.draws.empty())
        throw std::logic_error("posterior_predict: forests were not kept at fit time");
    if (index < 0 || index >= static_cast<int>(post.draws.size()))
        throw std::out_of_range("posterior_predict: draw index out of range");
    if (xnew.cols() != post.num_covariates)
        throw std::invalid_argument("posterior_predict: covariate count mismatch");
    Eigen::VectorXd g = detail::raw_forest_prediction(post.draws[index], xnew);
    if (post.probit) {
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = normal_cdf(g[i] + post.offset);
        return g;
    }
    return g.array() * post.y_range + post.y_center;
}

// Posterior-mean prediction (average of all stored draws).
inline Eigen::VectorXd posterior_predict_mean(const BartPosterior& post,
                                              const Eigen::MatrixXd& xnew) {
    if (post.draws.empty())
        throw std::logic_error("posterior_predict: forests were not kept at fit time");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(xnew.rows());
    for (int d = 0; d < static_cast<int>(post.draws.size()); ++d)
        acc += posterior_predict_draw(post, xnew, d);
    return acc / static_cast<double>(post.draws.size());
}

// --- optional binary dump/load for debugging (versioned; no stability promise)

namespace detail {
template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
}  // namespace detail

inline void dump_posterior(const BartPosterior& post, std::ostream& os) {
    os.write("RSQB", 4);
    detail::put<std::uint32_t>(os, 1);  // format version
    detail::put<std::uint8_t>(os, post.probit ? 1 : 0);
    detail::put(os, post.y_center);
    detail::put(os, post.y_range);
    detail::put(os, post.offset);
    detail::put<std::int32_t>(os, post.num_covariates);
    detail::put<std::uint64_t>(os, post.draws.size());
    for (const auto& snap : post.draws) {
        detail::put(os, snap.sigma);
        detail::put<std::uint64_t>(os, snap.trees.size());
        for (const Tree& t : snap.trees) {
            detail::put<std::uint64_t>(os, t.nodes.size());
            for (const TreeNode& nd : t.nodes) {
                detail::put<std::int32_t>(os, nd.var);
                detail::put(os, nd.cut);
                detail::put<std::int32_t>(os, nd.left);
                detail::put<std::int32_t>(os, nd.right);
                detail::put<std::int32_t>(os, nd.parent);
                detail::put<std::int32_t>(os, nd.depth);
                detail::put(os, nd.mu);
            }
        }
    }
}

inline BartPosterior load_posterior(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "RSQB")
        throw std::runtime_error("load_posterior: bad magic");
    if (detail::get<std::uint32_t>(is) != 1)
        throw std::runtime_error("load_posterior: unsupported version");
    BartPosterior post;
    post.probit = detail::get<std::uint8_t>(is) != 0;
    post.y_center = detail::get<double>(is);
    post.y_range = detail::get<double>(is);
    post.offset = detail::get<double>(is);
    post.num_covariates = detail::get<std::int32_t>(is);
    post.draws.resize(detail::get<std::uint64_t>(is));
    for (auto& snap : post.draws) {
        snap.sigma = detail::get<double>(is);
        snap.trees.resize(detail::get<std::uint64_t>(is));
        for (Tree& t : snap.trees) {
            t.nodes.resize(detail::get<std::uint64_t>(is));
            for (TreeNode& nd : t.nodes) {
                nd.var = detail::get<std::int32_t>(is);
                nd.cut = detail::get<double>(is);
                nd.left = detail::get<std::int32_t>(is);
                nd.right = detail::get<std::int32_t>(is);
                nd.parent = detail::get<std::int32_t>(is);
                nd.depth = detail::get<std::int32_t>(is);
                nd.mu = detail::get<double>(is);
            }
        }
    }
    if (!is) throw std::runtime_error("load_posterior: truncated stream");
    return post;
}

}  // namespace robustsq
