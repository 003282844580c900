#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "dynamics.hpp"

namespace bsde {

// Offspring distribution and exponential lifetime law of the particle system.
struct BranchingLaw {
    std::vector<double> offspring_probs;  // p_0 .. p_ell_max
    double lifetime_rate = 0.4;

    BranchingLaw() = default;
    BranchingLaw(std::vector<double> probs, double rate);

    static BranchingLaw uniform(int ell_max, double rate = 0.4);

    int max_offspring() const { return static_cast<int>(offspring_probs.size()) - 1; }
    double mean_offspring() const;
    // Lifetime density and survival function.
    double density(double s) const { return lifetime_rate * std::exp(-lifetime_rate * s); }
    double survival(double t) const { return std::exp(-lifetime_rate * t); }
};

struct TreeNode {
    int parent;         // -1 for the root
    int child_ordinal;  // 1-based index among siblings; 1 for the root
    double birth;       // T_{k-}
    double death;       // raw T_k = birth + lifetime (may exceed the horizon)
    double lifetime;    // delta_k
    int offspring;      // xi_k for nodes dying before the horizon, -1 otherwise
    int path_begin = -1, path_len = 0;  // into ParticleTree::paths when recorded
};

// One realization of the marked branching diffusion over [0, horizon].
// Nodes are in breadth-first order; node k's children are contiguous.
// A node is a survivor iff death >= horizon.
class ParticleTree {
  public:
    int dim = 1;
    double horizon = 0.0;
    std::vector<TreeNode> nodes;
    std::vector<double> pos_birth;  // nodes.size() * dim
    std::vector<double> pos_end;    // position at min(death, horizon)
    std::vector<PathRecord> paths;  // per node when recording was requested

    bool is_survivor(int i) const { return nodes[i].death >= horizon; }
    const double* birth_position(int i) const { return pos_birth.data() + i * dim; }
    const double* end_position(int i) const { return pos_end.data() + i * dim; }

    // Label in the (1, k_2, ..., k_n) indexing: root (1), child j of k is k + (j).
    std::vector<int> label(int i) const;

    // {k : birth <= t < death} and {k : death <= t}; t must lie in [0, horizon].
    std::vector<int> alive_at(double t) const;
    std::vector<int> dead_in(double t) const;

    int survivor_count() const;
    int dead_count() const;

    void clear() {
        nodes.clear();
        pos_birth.clear();
        pos_end.clear();
        paths.clear();
    }

    // One node per line: label, birth, death, offspring, positions.
    void dump(std::ostream& os) const;
};

struct TreeSimOptions {
    long node_cap = 1'000'000;
    bool record_paths = false;
};

struct TreeOverflowError : std::runtime_error {
    explicit TreeOverflowError(long cap)
        : std::runtime_error("tree overflow: node cap " + std::to_string(cap) + " exceeded") {}
};

// Breadth-first simulation. Per node the stream is consumed in a fixed
// order: one uniform for the lifetime, the branch diffusion (see
// simulate_path), then one uniform for the offspring count if the node dies
// before the horizon. Each branch restarts the diffusion afresh from its
// birth position, which has the law of the concatenated construction by the
// strong Markov property.
void simulate_tree(const BranchingLaw& law, const Dynamics& dyn, std::span<const double> x0,
                   double horizon, RandomStream& rng, ParticleTree& out,
                   const TreeSimOptions& opts = {});

ParticleTree simulate_tree(const BranchingLaw& law, const Dynamics& dyn,
                           std::span<const double> x0, double horizon, RandomStream& rng,
                           const TreeSimOptions& opts = {});

}  // namespace bsde
