#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ljt/chain.hpp"
#include "ljt/lj_energy.hpp"
#include "ljt/serialization.hpp"

namespace ljt::test {

inline Address addr(std::uint8_t fill) {
    std::array<std::uint8_t, 20> b{};
    b.fill(fill);
    return Address(b);
}

inline const Address kOwner = addr(0x11);
inline const Address kAlice = addr(0xaa);
inline const Address kBob = addr(0xbb);
inline const Address kCarol = addr(0xcc);
inline const Address kDave = addr(0xdd);

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(LJT_FIXTURE_DIR) / name;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string first_line(const std::filesystem::path& path) {
    auto text = read_text(path);
    return text.substr(0, text.find('\n'));
}

/// Owner 0x11.., four funded accounts 0xaa.. to 0xdd.. with 10 coins each.
inline GenesisConfig fixture_genesis() {
    GenesisConfig g;
    g.params.owner = kOwner;
    for (const auto& a : {kAlice, kBob, kCarol, kDave}) {
        g.native_allocations[a] = NativeAmount{10 * kNativePerCoin};
    }
    g.timestamp = 1'700'000'000;
    return g;
}

// Energy oracle: long double, powers via std::pow on the distance itself,
// independent of the library's s2/s6/s12 evaluation.
inline long double oracle_energy(const std::vector<long double>& p) {
    long double u = 0;
    const std::size_t n = p.size() / 3;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const long double dx = p[3 * i] - p[3 * j];
            const long double dy = p[3 * i + 1] - p[3 * j + 1];
            const long double dz = p[3 * i + 2] - p[3 * j + 2];
            const long double r = std::sqrt(dx * dx + dy * dy + dz * dz);
            u += 4 * (std::pow(r, -12.0L) - std::pow(r, -6.0L));
        }
    }
    return u;
}

inline long double oracle_energy(const ClusterConfig& c) {
    std::vector<long double> p;
    for (const auto v : c.coords()) p.push_back(static_cast<long double>(v) / 1e6L);
    return oracle_energy(p);
}

inline std::vector<std::uint64_t> to_micro(const std::vector<long double>& p) {
    std::vector<std::uint64_t> out;
    for (const auto v : p) out.push_back(static_cast<std::uint64_t>(std::llround(v * 1e6L)));
    return out;
}

inline const long double kPairMin = std::pow(2.0L, 1.0L / 6.0L);

/// Regular tetrahedron with edge 2^(1/6), non-negative coordinates.
inline ClusterConfig tetrahedron() {
    const long double a = kPairMin;
    return ClusterConfig::from_coords(to_micro({0, 0, 0, a, 0, 0, a / 2, a * std::sqrt(3.0L) / 2, 0,
                                                a / 2, a * std::sqrt(3.0L) / 6,
                                                a * std::sqrt(2.0L / 3.0L)}));
}

inline std::vector<std::uint64_t> coords_of(const ClusterConfig& c) {
    return {c.coords().begin(), c.coords().end()};
}

inline ClusterConfig dimer(std::uint64_t x) { return ClusterConfig::from_coords({0, 0, 0, x, 0, 0}); }

inline ClusterConfig triangle() {
    const long double a = kPairMin;
    return ClusterConfig::from_coords(to_micro({0, 0, 0, a, 0, 0, a / 2, a * std::sqrt(3.0L) / 2, 0}));
}

/// simple-cubic sites scaled by `spacing`, in micro-sigma.
inline std::vector<std::uint64_t> scaled_lattice(std::size_t n, double spacing) {
    std::vector<std::uint64_t> out;
    for (const double v : simple_cubic(n, 1.0)) {
        out.push_back(static_cast<std::uint64_t>(std::llround(v * spacing * 1e6)));
    }
    return out;
}

/// Deterministic scripted chain: a mix of mines (accepted and rejected),
/// access purchases, rate changes, token purchases, transfers and failing
/// calls. Used for the frozen 50-block fixture.
inline Chain build_fixture_chain(std::size_t blocks) {
    Chain chain(fixture_genesis());
    std::mt19937_64 rng(20240601);
    const std::vector<Address> actors{kOwner, kAlice, kBob, kCarol, kDave};
    const double spacings[] = {1.05, 1.08, 1.10, 1.12, 1.122462};
    const std::uint64_t rates[] = {0, 50, 100, 150, 300};
    const std::uint64_t values[] = {1'000'000, 500'000'000, 1'000'000'000, 3'000'000'000};
    auto pick = [&](std::size_t k) { return static_cast<std::size_t>(rng() % k); };

    for (std::size_t h = 1; h <= blocks; ++h) {
        std::vector<Transaction> txs;
        std::map<Address, std::uint64_t> used;
        const std::size_t count = pick(5);
        for (std::size_t t = 0; t < count; ++t) {
            const auto& caller = actors[pick(actors.size())];
            Call call;
            switch (pick(10)) {
                case 0: case 1: case 2: case 3: {
                    const std::size_t n = 2 + pick(11);
                    auto pos = scaled_lattice(n, spacings[pick(5)]);
                    if (pick(8) == 0) std::copy(pos.begin(), pos.begin() + 3, pos.begin() + 3);
                    call = MineTokenCall{std::move(pos)};
                    break;
                }
                case 4: call = GainAccessCall{2 + pick(12)}; break;
                case 5: call = SetExchangeRateCall{{rates[pick(5)]}}; break;
                case 6: case 7:
                    call = BuyTokenCall{actors[pick(actors.size())], NativeAmount{values[pick(4)]}};
                    break;
                case 8: call = TransferCall{actors[pick(actors.size())], TokenAmount{1 + pick(20)}}; break;
                default: call = FaucetNativeCall{NativeAmount{pick(3) * 250'000'000}}; break;
            }
            const auto nonce = chain.state().next_nonce(caller) + used[caller]++;
            txs.push_back(Transaction{caller, nonce, std::move(call)});
        }
        chain.seal_block(txs, fixture_genesis().timestamp + 10 * h);
    }
    return chain;
}

inline std::vector<std::string> to_lines(std::span<const Block> blocks) {
    std::vector<std::string> lines;
    for (const auto& b : blocks) lines.push_back(block_to_line(b));
    return lines;
}

inline std::vector<std::string> load_fixture_lines() {
    std::vector<std::string> lines;
    std::ifstream in(fixture_path("chain50.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace ljt::test
