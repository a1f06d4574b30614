#include "ljt/miner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ljt/client.hpp"
#include "ljt/error.hpp"

namespace ljt {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
    for (auto& s : s_) s = splitmix64(seed);
}

std::uint64_t Xoshiro256::next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256::uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Xoshiro256::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

void OptimizerConfig::validate() const {
    if (!(step > 0.0)) throw Error(ErrorCode::BadParams, "step must be positive");
    if (!(temperature >= 0.0)) throw Error(ErrorCode::BadParams, "temperature must be >= 0");
    if (hops < 1) throw Error(ErrorCode::BadParams, "hops must be at least 1");
}

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMaxDisplacement = 0.2;
constexpr double kInitialStep = 1e-2;
constexpr int kMaxHalvings = 60;

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

Candidate local_minimize(std::vector<double> start, const OptimizerConfig& cfg,
                         MinimizeTrace* trace) {
    std::vector<double> x = std::move(start);
    std::vector<double> g(x.size());
    double energy = lj_energy_gradient(x, g);
    if (!std::isfinite(energy)) throw Error(ErrorCode::NumericalBlowup, "non-finite start energy");

    std::vector<double> trial(x.size());
    std::vector<double> trial_g(x.size());
    double alpha = kInitialStep;
    double gmax = max_abs(g);
    std::size_t iter = 0;
    for (; iter < cfg.max_lm_iters && gmax >= cfg.gmax_tol; ++iter) {
        double gg = 0.0;
        for (const double c : g) gg += c * c;
        double a = std::min(2.0 * alpha, kMaxDisplacement / gmax);
        bool moved = false;
        for (int halvings = 0; halvings < kMaxHalvings; ++halvings, a *= 0.5) {
            for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] - a * g[k];
            const double e = lj_energy_gradient(trial, trial_g);
            if (std::isfinite(e) && e < energy && e <= energy - kArmijo * a * gg) {
                x.swap(trial);
                g.swap(trial_g);
                energy = e;
                alpha = a;
                moved = true;
                break;
            }
        }
        if (!moved) break;  // stationary to within floating-point resolution
        gmax = max_abs(g);
        if (trace) trace->accepted_energies.push_back(energy);
    }
    if (trace) {
        trace->iterations = iter;
        trace->gmax = gmax;
        trace->converged = gmax < cfg.gmax_tol;
    }
    return Candidate{std::move(x), energy};
}

Candidate basin_hop(std::size_t n, const OptimizerConfig& cfg, BasinHopTrace* trace) {
    cfg.validate();
    Xoshiro256 rng(cfg.seed);
    Candidate anchor = local_minimize(simple_cubic(n, 1.0), cfg);
    Candidate best = anchor;
    std::vector<double> perturbed(anchor.positions.size());
    for (std::size_t hop = 0; hop < cfg.hops; ++hop) {
        for (std::size_t k = 0; k < perturbed.size(); ++k) {
            perturbed[k] = anchor.positions[k] + rng.uniform(-cfg.step, cfg.step);
        }
        std::optional<Candidate> next;
        try {
            next = local_minimize(perturbed, cfg);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NumericalBlowup) throw;
            if (trace) {
                ++trace->blowups;
                trace->best_after_hop.push_back(best.energy);
            }
            continue;
        }
        bool accept = next->energy <= anchor.energy;
        if (!accept && cfg.temperature > 0.0) {
            accept = rng.uniform01() < std::exp(-(next->energy - anchor.energy) / cfg.temperature);
        }
        if (next->energy < best.energy) best = *next;
        if (accept) {
            anchor = std::move(*next);
            if (trace) ++trace->accepted_hops;
        }
        if (trace) trace->best_after_hop.push_back(best.energy);
    }
    return best;
}

ClusterConfig to_fixed(const Candidate& c) {
    const std::size_t count = c.positions.size();
    if (count % 3 != 0) throw Error(ErrorCode::BadLength, "positions not a multiple of 3");
    std::array<double, 3> lo{std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity()};
    for (std::size_t k = 0; k < count; ++k) {
        if (!std::isfinite(c.positions[k])) {
            throw Error(ErrorCode::CoordOutOfRange, "non-finite coordinate");
        }
        lo[k % 3] = std::min(lo[k % 3], c.positions[k]);
    }
    std::vector<std::uint64_t> coords(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double micro = std::nearbyint((c.positions[k] - lo[k % 3]) * 1e6);
        if (micro > static_cast<double>(kMaxCoord)) {
            throw Error(ErrorCode::CoordOutOfRange, "cluster spans more than 100 sigma");
        }
        coords[k] = static_cast<std::uint64_t>(micro);
    }
    return ClusterConfig::from_coords(std::move(coords));
}

std::string_view to_string(MineStatus s) noexcept {
    switch (s) {
        case MineStatus::Accepted: return "accepted";
        case MineStatus::Rejected: return "rejected";
        case MineStatus::Skipped: return "skipped";
        case MineStatus::NetworkError: return "network-error";
        case MineStatus::Failed: return "failed";
    }
    return "unknown";
}

std::size_t MineReport::accepted() const {
    return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) {
        return o.status == MineStatus::Accepted;
    }));
}

TokenAmount MineReport::total_reward() const {
    TokenAmount total;
    for (const auto& o : outcomes) total.value += o.reward.value;
    return total;
}

MineReport mine_loop(NodeClient& node, const Address& miner, const MineLoopOptions& options) {
    MineReport report;
    for (std::size_t n = options.n_from; n <= options.n_to; ++n) {
        MineOutcome outcome;
        outcome.n = n;
        try {
            if (const auto stored = node.view_data(miner, n)) outcome.stored_energy = stored->energy;

            auto cfg = options.optimizer;
            cfg.seed += n;
            auto config = to_fixed(basin_hop(n, cfg));
            outcome.candidate_energy = calc_energy(config);
            outcome.config = std::move(config);
            if (outcome.stored_energy &&
                !improves(*outcome.candidate_energy, *outcome.stored_energy, options.delta)) {
                outcome.status = MineStatus::Skipped;
                outcome.message = "candidate does not beat the stored energy by delta";
            } else {
                const auto receipt =
                    node.submit(miner, MineTokenCall{std::vector<std::uint64_t>(
                                           outcome.config->coords().begin(),
                                           outcome.config->coords().end())});
                if (!receipt.ok()) {
                    outcome.status = MineStatus::Failed;
                    outcome.message = receipt.message;
                } else if (receipt.mine && receipt.mine->accepted) {
                    outcome.status = MineStatus::Accepted;
                    outcome.reward = receipt.mine->reward;
                    outcome.stored_energy = receipt.mine->previous_energy;
                } else {
                    outcome.status = MineStatus::Rejected;
                    if (receipt.mine) outcome.stored_energy = receipt.mine->previous_energy;
                }
            }
        } catch (const NetworkError& e) {
            outcome.status = MineStatus::NetworkError;
            outcome.message = e.what();
        } catch (const Error& e) {
            outcome.status = MineStatus::Failed;
            outcome.message = e.what();
        }
        report.outcomes.push_back(std::move(outcome));
    }
    return report;
}

}  // namespace ljt
