#include "ljt/lj_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ljt/error.hpp"

namespace ljt {

ClusterSize::ClusterSize(std::size_t n) : n_(n) {
    if (n < kMinParticles || n > kMaxParticles) {
        throw Error(ErrorCode::BadClusterSize,
                    "cluster size " + std::to_string(n) + " outside [2, 50]");
    }
}

FxEnergy round_energy(double energy_eps) noexcept {
    constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
    // 2^63 is exactly representable; anything at or beyond it saturates.
    constexpr double kLimit = 9223372036854775808.0;
    const double scaled = energy_eps * 1e6;
    if (std::isnan(scaled) || scaled >= kLimit) return {kMax};
    if (scaled <= -kLimit) return {-kMax};
    // nearbyint honours the default FE_TONEAREST mode: ties to even.
    return {static_cast<std::int64_t>(std::nearbyint(scaled))};
}

ClusterConfig ClusterConfig::from_coords(std::vector<std::uint64_t> coords) {
    if (coords.size() % 3 != 0) {
        throw Error(ErrorCode::BadLength,
                    std::to_string(coords.size()) + " coordinates is not a multiple of 3");
    }
    const std::size_t n = coords.size() / 3;
    if (n < kMinParticles || n > kMaxParticles) {
        throw Error(ErrorCode::BadLength, std::to_string(n) + " particles outside [2, 50]");
    }
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (coords[k] > kMaxCoord) {
            throw Error(ErrorCode::CoordOutOfRange,
                        "coordinate " + std::to_string(k) + " exceeds 100 sigma");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (coords[3 * i] == coords[3 * j] && coords[3 * i + 1] == coords[3 * j + 1] &&
                coords[3 * i + 2] == coords[3 * j + 2]) {
                throw Error(ErrorCode::CoincidentParticles,
                            "particles " + std::to_string(i) + " and " + std::to_string(j));
            }
        }
    }
    return ClusterConfig(std::move(coords));
}

std::vector<double> ClusterConfig::to_real() const {
    std::vector<double> out(coords_.size());
    for (std::size_t k = 0; k < coords_.size(); ++k) {
        out[k] = static_cast<double>(coords_[k]) / 1e6;
    }
    return out;
}

double lj_energy(std::span<const double> positions, const LjParams& params) {
    const std::size_t n = positions.size() / 3;
    const double sigma2 = params.sigma * params.sigma;
    const double eps4 = 4.0 * params.epsilon;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = positions[3 * i];
        const double yi = positions[3 * i + 1];
        const double zi = positions[3 * i + 2];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = xi - positions[3 * j];
            const double dy = yi - positions[3 * j + 1];
            const double dz = zi - positions[3 * j + 2];
            const double r2 = dx * dx + dy * dy + dz * dz;
            const double s2 = sigma2 / r2;
            const double s6 = s2 * s2 * s2;
            const double s12 = s6 * s6;
            total += eps4 * (s12 - s6);
        }
    }
    return total;
}

double lj_energy_gradient(std::span<const double> positions, std::span<double> grad,
                          const LjParams& params) {
    const std::size_t n = positions.size() / 3;
    const double sigma2 = params.sigma * params.sigma;
    const double eps4 = 4.0 * params.epsilon;
    const double eps24 = 24.0 * params.epsilon;
    std::fill(grad.begin(), grad.end(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = positions[3 * i] - positions[3 * j];
            const double dy = positions[3 * i + 1] - positions[3 * j + 1];
            const double dz = positions[3 * i + 2] - positions[3 * j + 2];
            const double r2 = dx * dx + dy * dy + dz * dz;
            const double s2 = sigma2 / r2;
            const double s6 = s2 * s2 * s2;
            const double s12 = s6 * s6;
            total += eps4 * (s12 - s6);
            // dU/dx_i = 24 eps (-2 s12 + s6) (x_i - x_j) / r^2
            const double f = eps24 * (s6 - 2.0 * s12) / r2;
            grad[3 * i] += f * dx;
            grad[3 * i + 1] += f * dy;
            grad[3 * i + 2] += f * dz;
            grad[3 * j] -= f * dx;
            grad[3 * j + 1] -= f * dy;
            grad[3 * j + 2] -= f * dz;
        }
    }
    return total;
}

FxEnergy calc_energy(const ClusterConfig& config) {
    return round_energy(lj_energy(config.to_real()));
}

std::vector<double> gradient(const ClusterConfig& config) {
    const auto positions = config.to_real();
    std::vector<double> grad(positions.size());
    lj_energy_gradient(positions, grad);
    return grad;
}

namespace {

std::size_t grid_edge(std::size_t n) {
    std::size_t m = 1;
    while (m * m * m < n) ++m;
    return m;
}

}  // namespace

std::vector<double> simple_cubic(std::size_t n, double spacing) {
    const ClusterSize size(n);
    const std::size_t m = grid_edge(size.value());
    std::vector<double> out;
    out.reserve(3 * n);
    for (std::size_t site = 0; site < n; ++site) {
        out.push_back(static_cast<double>(site % m) * spacing);
        out.push_back(static_cast<double>((site / m) % m) * spacing);
        out.push_back(static_cast<double>(site / (m * m)) * spacing);
    }
    return out;
}

ClusterConfig simple_cubic_fixed(ClusterSize n) {
    const std::size_t m = grid_edge(n.value());
    std::vector<std::uint64_t> coords;
    coords.reserve(3 * n.value());
    for (std::size_t site = 0; site < n.value(); ++site) {
        coords.push_back((site % m) * kCoordScale);
        coords.push_back(((site / m) % m) * kCoordScale);
        coords.push_back((site / (m * m)) * kCoordScale);
    }
    return ClusterConfig::from_coords(std::move(coords));
}

namespace {

std::string_view trim(std::string_view s) {
    const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && blank(s.front())) s.remove_prefix(1);
    while (!s.empty() && blank(s.back())) s.remove_suffix(1);
    return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

// Exact decimal to micro-sigma conversion with round-half-even.
std::uint64_t parse_micro(std::string_view field, std::size_t line) {
    field = trim(field);
    bool negative = false;
    if (!field.empty() && (field.front() == '+' || field.front() == '-')) {
        negative = field.front() == '-';
        field.remove_prefix(1);
    }
    std::string digits;
    long long exponent = 0;
    bool seen_dot = false;
    std::size_t pos = 0;
    for (; pos < field.size(); ++pos) {
        const char c = field[pos];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_dot) --exponent;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (digits.empty()) parse_fail(line, "not a number: '" + std::string(field) + "'");
    if (pos < field.size()) {
        if (field[pos] != 'e' && field[pos] != 'E') {
            parse_fail(line, "not a number: '" + std::string(field) + "'");
        }
        ++pos;
        bool exp_negative = false;
        if (pos < field.size() && (field[pos] == '+' || field[pos] == '-')) {
            exp_negative = field[pos] == '-';
            ++pos;
        }
        if (pos == field.size()) parse_fail(line, "empty exponent");
        long long e = 0;
        for (; pos < field.size(); ++pos) {
            const char c = field[pos];
            if (c < '0' || c > '9') parse_fail(line, "bad exponent in '" + std::string(field) + "'");
            if (e < 100000) e = e * 10 + (c - '0');
        }
        exponent += exp_negative ? -e : e;
    }

    const auto first_nonzero = digits.find_first_not_of('0');
    if (first_nonzero == std::string::npos) return 0;
    digits.erase(0, first_nonzero);

    // value = digits * 10^(exponent + 6) micro-sigma
    const long long shift = exponent + 6;
    std::string integral;
    bool round_up = false;
    if (shift >= 0) {
        if (static_cast<long long>(digits.size()) + shift > 12) {
            throw Error(negative ? ErrorCode::NegativeCoordinate : ErrorCode::CoordOutOfRange,
                        "line " + std::to_string(line) + ": coordinate out of range");
        }
        integral = digits + std::string(static_cast<std::size_t>(shift), '0');
    } else {
        const auto drop = static_cast<std::size_t>(-shift);
        const std::size_t keep = digits.size() > drop ? digits.size() - drop : 0;
        integral = digits.substr(0, keep);
        // Dropped digits, left-padded with zeros when drop exceeds the length.
        std::string rest = digits.substr(keep);
        if (rest.size() < drop) rest.insert(0, drop - rest.size(), '0');
        const char lead = rest.front();
        const bool tail_nonzero = rest.find_first_not_of('0', 1) != std::string::npos;
        if (lead > '5' || (lead == '5' && tail_nonzero)) {
            round_up = true;
        } else if (lead == '5') {
            const int last = integral.empty() ? 0 : integral.back() - '0';
            round_up = (last % 2) == 1;
        }
    }
    if (integral.size() > 12) {
        throw Error(negative ? ErrorCode::NegativeCoordinate : ErrorCode::CoordOutOfRange,
                    "line " + std::to_string(line) + ": coordinate out of range");
    }
    std::uint64_t value = 0;
    for (char c : integral) value = value * 10 + static_cast<std::uint64_t>(c - '0');
    if (round_up) ++value;
    if (value != 0 && negative) {
        throw Error(ErrorCode::NegativeCoordinate,
                    "line " + std::to_string(line) + ": negative coordinate");
    }
    if (value > kMaxCoord) {
        throw Error(ErrorCode::CoordOutOfRange,
                    "line " + std::to_string(line) + ": coordinate exceeds 100 sigma");
    }
    return value;
}

}  // namespace

ClusterConfig parse_positions_csv(std::string_view text) {
    std::vector<std::uint64_t> coords;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (trim(line).empty()) continue;

        std::array<std::string_view, 3> fields{};
        std::size_t count = 0;
        while (true) {
            const auto comma = line.find(',');
            if (count == 3) parse_fail(line_no, "expected 3 columns");
            fields[count++] = line.substr(0, comma);
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (count != 3) parse_fail(line_no, "expected 3 columns, got " + std::to_string(count));
        for (const auto field : fields) coords.push_back(parse_micro(field, line_no));
    }
    return ClusterConfig::from_coords(std::move(coords));
}

std::string format_positions_csv(const ClusterConfig& config) {
    std::string out;
    const auto coords = config.coords();
    for (std::size_t k = 0; k < coords.size(); ++k) {
        const auto whole = coords[k] / kCoordScale;
        auto frac = std::to_string(coords[k] % kCoordScale);
        frac.insert(0, 6 - frac.size(), '0');
        out += std::to_string(whole) + "." + frac;
        out += (k % 3 == 2) ? '\n' : ',';
    }
    return out;
}

}  // namespace ljt
