#include "estimator.hpp"

#include <cmath>

namespace bsde {

double evaluate_functional(const ParticleTree& tree, const TerminalFn& terminal,
                           const PriorFn& prior, double t, const BranchingLaw& law,
                           const LocalPolynomialDriver& driver) {
    const double horizon = tree.horizon;
    double value = 1.0;
    for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) {
        const TreeNode& node = tree.nodes[i];
        if (tree.is_survivor(i)) {
            value *= terminal(tree.end_position(i)) / law.survival(horizon - node.birth);
        } else {
            const double t_branch = t + node.death;
            const double* pos = tree.end_position(i);
            const double prior_value = prior(t_branch, pos);
            const double numerator = driver.branch_coeff(t_branch, pos, node.offspring, prior_value);
            value *= numerator / (law.offspring_probs[node.offspring] * law.density(node.lifetime));
            if (value == 0.0) return 0.0;
        }
    }
    return value;
}

WeightBreakdown evaluate_functional_detailed(const ParticleTree& tree, const TerminalFn& terminal,
                                             const PriorFn& prior, double t,
                                             const BranchingLaw& law,
                                             const LocalPolynomialDriver& driver) {
    WeightBreakdown out;
    const double horizon = tree.horizon;
    for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) {
        const TreeNode& node = tree.nodes[i];
        if (tree.is_survivor(i)) {
            const double w = terminal(tree.end_position(i)) / law.survival(horizon - node.birth);
            out.survivor_weights.push_back(w);
            out.value *= w;
        } else {
            const double t_branch = t + node.death;
            const double* pos = tree.end_position(i);
            const double prior_value = prior(t_branch, pos);
            const double w =
                driver.branch_coeff(t_branch, pos, node.offspring, prior_value) /
                (law.offspring_probs[node.offspring] * law.density(node.lifetime));
            out.branch_weights.push_back(w);
            out.value *= w;
        }
    }
    return out;
}

double dominating_weight(const ParticleTree& tree, const BranchingLaw& law, double coeff_bound,
                         double bound) {
    const double horizon = tree.horizon;
    double value = 1.0;
    for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) {
        const TreeNode& node = tree.nodes[i];
        if (tree.is_survivor(i)) {
            value *= bound / law.survival(horizon - node.birth);
        } else {
            value *= 2.0 * coeff_bound /
                     (law.offspring_probs[node.offspring] * law.density(node.lifetime));
        }
    }
    return value;
}

McEstimate mc_estimate(double t, double t_next, std::span<const double> x,
                       const TerminalFn& terminal, const PriorFn& prior, const BranchingLaw& law,
                       const Dynamics& dyn, const LocalPolynomialDriver& driver,
                       const McControls& mc, RandomStream& rng) {
    if (!(mc.tol > 0.0)) throw std::invalid_argument("mc_estimate: tol must be > 0");
    if (mc.batch < 2 || mc.cap < mc.batch)
        throw std::invalid_argument("mc_estimate: need cap >= batch >= 2");
    const double horizon = t_next - t;
    if (horizon < 0.0) throw std::invalid_argument("mc_estimate: t_next before t");

    TreeSimOptions opts;
    opts.node_cap = mc.node_cap;
    ParticleTree tree;  // reused across samples

    double sum = 0.0, sum_sq = 0.0;
    long n = 0;
    McEstimate est;
    while (true) {
        const long take = std::min(mc.batch, mc.cap - n);
        for (long b = 0; b < take; ++b) {
            simulate_tree(law, dyn, x, horizon, rng, tree, opts);
            const double v = evaluate_functional(tree, terminal, prior, t, law, driver);
            sum += v;
            sum_sq += v * v;
        }
        n += take;
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
        est.mean = mean;
        est.std_err = std::sqrt(var / n);
        est.n_samples = n;
        if (est.std_err < mc.tol) break;
        if (n >= mc.cap) {
            est.hit_cap = true;
            break;
        }
    }
    return est;
}

}  // namespace bsde
