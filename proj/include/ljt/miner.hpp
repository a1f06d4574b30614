#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ljt/contract.hpp"
#include "ljt/lj_energy.hpp"

namespace ljt {

/// xoshiro256** seeded by four successive splitmix64 outputs of `seed`.
///
///   splitmix64: s += 0x9e3779b97f4a7c15; z = s;
///               z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
///               z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
///               return z ^ (z >> 31);
///   next():     result = rotl(s1 * 5, 7) * 9; t = s1 << 17;
///               s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
///   uniform01:  (next() >> 11) * 2^-53, in [0, 1)
///   uniform:    lo + (hi - lo) * uniform01()
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next() noexcept;
    double uniform01() noexcept;
    double uniform(double lo, double hi) noexcept;

private:
    std::uint64_t s_[4];
};

struct OptimizerConfig {
    std::uint64_t seed = 0;
    std::size_t hops = 100;
    double step = 0.35;          // perturbation half-width, sigma
    double temperature = 0.8;    // Metropolis temperature, epsilon
    double gmax_tol = 1e-8;
    std::size_t max_lm_iters = 5000;

    /// Throws BadParams unless step > 0, temperature >= 0 and hops >= 1.
    void validate() const;
};

struct Candidate {
    std::vector<double> positions;  // 3n, sigma units
    double energy = 0.0;            // epsilon units
};

/// Diagnostics of one local minimization.
struct MinimizeTrace {
    std::vector<double> accepted_energies;  // energy after every accepted step
    std::size_t iterations = 0;
    double gmax = 0.0;                      // final max-norm of the gradient
    bool converged = false;                 // gmax < gmax_tol
};

/// Steepest descent with backtracking: from x with gradient g, try
/// x - a*g and halve a until E(trial) < E(x) and
/// E(trial) <= E(x) - 1e-4 * a * |g|^2. The first trial of each iteration
/// uses twice the previously accepted a, limited so no coordinate moves more
/// than 0.2 sigma. Stops when max|g| < gmax_tol, after max_lm_iters
/// iterations, or when no representable step decreases the energy.
/// Throws NumericalBlowup if the starting energy is not finite.
Candidate local_minimize(std::vector<double> start, const OptimizerConfig& cfg,
                         MinimizeTrace* trace = nullptr);

struct BasinHopTrace {
    std::vector<double> best_after_hop;  // best energy after each hop
    std::size_t accepted_hops = 0;
    std::size_t blowups = 0;             // hops skipped on NumericalBlowup
};

/// Basin hopping from local_minimize(simple_cubic(n, 1.0)). Each hop
/// displaces every coordinate of the anchor by uniform(-step, step) (in
/// coordinate order), minimizes, and accepts the result as the new anchor if
/// it is lower, or else with probability exp(-(E_new - E_anchor)/T) using one
/// further uniform01 draw (none when T = 0). Returns the lowest candidate
/// seen. Deterministic in (n, cfg).
Candidate basin_hop(std::size_t n, const OptimizerConfig& cfg, BasinHopTrace* trace = nullptr);

/// Translates so each axis starts at 0, rounds to micro-sigma (half-even)
/// and validates. Throws CoordOutOfRange or CoincidentParticles.
ClusterConfig to_fixed(const Candidate& c);

// --- mining loop -----------------------------------------------------------

class NodeClient;

enum class MineStatus { Accepted, Rejected, Skipped, NetworkError, Failed };

std::string_view to_string(MineStatus s) noexcept;

struct MineOutcome {
    std::size_t n = 0;
    MineStatus status = MineStatus::Skipped;
    std::optional<FxEnergy> stored_energy;   // known before submitting, if readable
    std::optional<FxEnergy> candidate_energy;
    TokenAmount reward;
    std::string message;
    std::optional<ClusterConfig> config;     // the submitted (or checked) structure
};

struct MineReport {
    std::vector<MineOutcome> outcomes;

    std::size_t accepted() const;
    TokenAmount total_reward() const;
};

struct MineLoopOptions {
    std::size_t n_from = 2;
    std::size_t n_to = 50;
    OptimizerConfig optimizer;  // the run for size n uses seed optimizer.seed + n
    Ratio delta{3, 100};        // local pre-check against a readable stored energy
};

/// For every n: read the stored energy if the miner may, run basin_hop,
/// and submit a MineToken when the candidate passes the improvement rule
/// locally (or the stored energy is unknown). Network failures are recorded
/// per n and the loop continues.
MineReport mine_loop(NodeClient& node, const Address& miner, const MineLoopOptions& options);

}  // namespace ljt
