#pragma once

// Lennard-Jones cluster energy over the fixed-point on-chain encoding.
//
// Coordinates are stored as unsigned micro-sigma (1e-6 sigma) and energies as
// signed micro-epsilon. calc_energy is consensus-critical: every node must
// produce the same FxEnergy bits for the same ClusterConfig. The evaluation
// contract is
//
//   x      = double(value) / 1e6                     (correctly rounded decode)
//   d      = x_i - x_j  per axis
//   r2     = (dx*dx + dy*dy) + dz*dz
//   s2     = (sigma*sigma) / r2,  s6 = (s2*s2)*s2,  s12 = s6*s6
//   term   = (4*epsilon) * (s12 - s6)
//   U      = sum of terms for i ascending, j = i+1.. ascending, left to right
//   result = round_half_even(U * 1e6), saturated to int64
//
// using only IEEE binary64 +, -, *, / with no contraction (the library is
// compiled with -ffp-contract=off). No libm call is involved, so the result
// does not depend on the platform's math library.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ljt {

inline constexpr std::size_t kMinParticles = 2;
inline constexpr std::size_t kMaxParticles = 50;
inline constexpr std::uint64_t kCoordScale = 1'000'000;          // micro-sigma per sigma
inline constexpr std::uint64_t kMaxCoord = 100 * kCoordScale;      // 100 sigma
inline constexpr std::int64_t kEnergyScale = 1'000'000;            // micro-epsilon per epsilon

/// Particle count of a cluster, always within [2, 50].
class ClusterSize {
public:
    /// Throws Error(BadClusterSize) outside [2, 50].
    explicit ClusterSize(std::size_t n);

    std::size_t value() const noexcept { return n_; }
    auto operator<=>(const ClusterSize&) const = default;

private:
    std::size_t n_;
};

/// Energy in micro-epsilon.
struct FxEnergy {
    std::int64_t micro = 0;

    double to_real() const noexcept { return static_cast<double>(micro) / 1e6; }
    auto operator<=>(const FxEnergy&) const = default;
};

/// Rounds an energy in epsilon units to micro-epsilon, ties to even,
/// saturating at the int64 range. NaN maps to the positive bound.
FxEnergy round_energy(double energy_eps) noexcept;

struct LjParams {
    double epsilon = 1.0;
    double sigma = 1.0;
};

/// Validated fixed-point configuration: 3*n coordinates x0,y0,z0,x1,...
class ClusterConfig {
public:
    /// Throws BadLength, CoordOutOfRange or CoincidentParticles.
    static ClusterConfig from_coords(std::vector<std::uint64_t> coords);

    std::size_t particle_count() const noexcept { return coords_.size() / 3; }
    ClusterSize size() const { return ClusterSize(particle_count()); }
    std::span<const std::uint64_t> coords() const noexcept { return coords_; }
    std::array<std::uint64_t, 3> particle(std::size_t i) const {
        return {coords_[3 * i], coords_[3 * i + 1], coords_[3 * i + 2]};
    }

    /// Positions in sigma units, decoded per the consensus contract.
    std::vector<double> to_real() const;

    bool operator==(const ClusterConfig&) const = default;

private:
    explicit ClusterConfig(std::vector<std::uint64_t> coords) : coords_(std::move(coords)) {}

    std::vector<std::uint64_t> coords_;
};

/// Consensus energy of a configuration (epsilon = sigma = 1).
FxEnergy calc_energy(const ClusterConfig& config);

/// Real-valued energy of 3*n positions in sigma units. Uses the same pair
/// order and arithmetic as calc_energy, so calc_energy(c) equals
/// round_energy(lj_energy(c.to_real())).
double lj_energy(std::span<const double> positions, const LjParams& params = {});

/// Energy plus analytic gradient; `grad` must have the size of `positions`.
double lj_energy_gradient(std::span<const double> positions, std::span<double> grad,
                          const LjParams& params = {});

/// Analytic gradient of the real-valued energy at the decoded configuration.
std::vector<double> gradient(const ClusterConfig& config);

/// First n sites of the m*m*m grid (m = ceil(cbrt(n))) in row-major order,
/// x fastest, then y, then z. Throws BadClusterSize.
std::vector<double> simple_cubic(std::size_t n, double spacing);

/// simple_cubic(n, 1.0) encoded exactly in micro-sigma.
ClusterConfig simple_cubic_fixed(ClusterSize n);

/// Parses the position CSV format: one particle per nonempty line, three
/// comma-separated decimals in sigma units, no header. Each value is scaled
/// by 1e6 and rounded half-even using exact decimal arithmetic.
ClusterConfig parse_positions_csv(std::string_view text);

/// Writes positions with exactly six decimals, so parsing the result
/// reproduces the configuration.
std::string format_positions_csv(const ClusterConfig& config);

}  // namespace ljt
