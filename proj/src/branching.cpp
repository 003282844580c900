#include "branching.hpp"

#include <algorithm>
#include <cmath>

namespace bsde {

BranchingLaw::BranchingLaw(std::vector<double> probs, double rate)
    : offspring_probs(std::move(probs)), lifetime_rate(rate) {
    if (offspring_probs.empty()) throw std::invalid_argument("branching law: empty offspring law");
    double sum = 0.0;
    for (double p : offspring_probs) {
        if (p < 0.0) throw std::invalid_argument("branching law: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("branching law: probabilities must sum to one");
    if (!(lifetime_rate > 0.0)) throw std::invalid_argument("branching law: rate must be > 0");
}

BranchingLaw BranchingLaw::uniform(int ell_max, double rate) {
    return BranchingLaw(std::vector<double>(ell_max + 1, 1.0 / (ell_max + 1)), rate);
}

double BranchingLaw::mean_offspring() const {
    double m = 0.0;
    for (std::size_t l = 0; l < offspring_probs.size(); ++l) m += l * offspring_probs[l];
    return m;
}

std::vector<int> ParticleTree::label(int i) const {
    std::vector<int> rev;
    for (int k = i; k >= 0; k = nodes[k].parent) rev.push_back(nodes[k].child_ordinal);
    return {rev.rbegin(), rev.rend()};
}

std::vector<int> ParticleTree::alive_at(double t) const {
    if (t < 0.0 || t > horizon) throw std::out_of_range("alive_at: t outside [0, horizon]");
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
        if (nodes[i].birth <= t && t < nodes[i].death) out.push_back(i);
    return out;
}

std::vector<int> ParticleTree::dead_in(double t) const {
    if (t < 0.0 || t > horizon) throw std::out_of_range("dead_in: t outside [0, horizon]");
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
        if (nodes[i].death <= t) out.push_back(i);
    return out;
}

int ParticleTree::survivor_count() const {
    int n = 0;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
        if (is_survivor(i)) ++n;
    return n;
}

int ParticleTree::dead_count() const { return static_cast<int>(nodes.size()) - survivor_count(); }

void ParticleTree::dump(std::ostream& os) const {
    os << "# label birth death offspring x_birth.. x_end..\n";
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        const auto lbl = label(i);
        os << "(";
        for (std::size_t k = 0; k < lbl.size(); ++k) os << (k ? "," : "") << lbl[k];
        os << ") " << nodes[i].birth << " " << nodes[i].death << " " << nodes[i].offspring;
        for (int a = 0; a < dim; ++a) os << " " << birth_position(i)[a];
        for (int a = 0; a < dim; ++a) os << " " << end_position(i)[a];
        os << "\n";
    }
}

void simulate_tree(const BranchingLaw& law, const Dynamics& dyn, std::span<const double> x0,
                   double horizon, RandomStream& rng, ParticleTree& out,
                   const TreeSimOptions& opts) {
    if (horizon < 0.0) throw std::invalid_argument("simulate_tree: negative horizon");
    out.clear();
    out.dim = dyn.dim;
    out.horizon = horizon;

    const int dim = dyn.dim;
    double x[kMaxDim];

    // Seed the root; nodes are then processed in birth (BFS) order.
    out.nodes.push_back({-1, 1, 0.0, 0.0, 0.0, -1});
    out.pos_birth.insert(out.pos_birth.end(), x0.begin(), x0.end());
    out.pos_end.resize(dim, 0.0);
    if (opts.record_paths) out.paths.emplace_back();

    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        TreeNode& node = out.nodes[i];
        const double delta = rng.exponential(law.lifetime_rate);
        node.lifetime = delta;
        node.death = node.birth + delta;
        const bool dies = node.death < horizon;
        const double branch_duration = (dies ? delta : horizon - node.birth);

        for (int a = 0; a < dim; ++a) x[a] = out.pos_birth[i * dim + a];
        PathRecord* rec = nullptr;
        if (opts.record_paths) {
            rec = &out.paths[i];
            rec->clear();
        }
        simulate_path(dyn, x, branch_duration, rng, rec, node.birth);
        for (int a = 0; a < dim; ++a) out.pos_end[i * dim + a] = x[a];

        if (dies) {
            const int xi = rng.categorical(law.offspring_probs);
            node.offspring = xi;
            if (static_cast<long>(out.nodes.size()) + xi > opts.node_cap)
                throw TreeOverflowError(opts.node_cap);
            for (int j = 1; j <= xi; ++j) {
                out.nodes.push_back({static_cast<int>(i), j, out.nodes[i].death, 0.0, 0.0, -1});
                out.pos_birth.insert(out.pos_birth.end(), x, x + dim);
                out.pos_end.resize(out.pos_end.size() + dim, 0.0);
                if (opts.record_paths) out.paths.emplace_back();
            }
        }
    }
}

ParticleTree simulate_tree(const BranchingLaw& law, const Dynamics& dyn,
                           std::span<const double> x0, double horizon, RandomStream& rng,
                           const TreeSimOptions& opts) {
    ParticleTree tree;
    simulate_tree(law, dyn, x0, horizon, rng, tree, opts);
    return tree;
}

}  // namespace bsde
