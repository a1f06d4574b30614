#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "ljt/lj_energy.hpp"
#include "ljt/token_ledger.hpp"

namespace ljt {

/// Non-negative rational num/den.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    bool operator==(const Ratio&) const = default;
};

/// LJT granted per coin (1e9 native base units).
struct ExchangeRate {
    std::uint64_t tokens_per_coin = 0;
    auto operator<=>(const ExchangeRate&) const = default;
};

struct ContractParams {
    Ratio delta{3, 100};                  // required relative improvement
    TokenAmount rho{10};                  // mining reward
    Address owner;
    ExchangeRate owner_min_rate{100};     // greed-limiting floor, also the default rate
    TokenAmount initial_owner_grant{1000};

    /// Throws BadParams unless 0 < delta < 1 (den <= 1e12), rho > 0 and
    /// owner_min_rate >= 1.
    void validate() const;

    bool operator==(const ContractParams&) const = default;
};

/// Current best structure for one cluster size.
struct ClusterRecord {
    FxEnergy energy;
    ClusterConfig config;
    Address contributor;

    bool operator==(const ClusterRecord&) const = default;
};

struct ContractState {
    ContractParams params;
    std::map<std::size_t, ClusterRecord> clusters;      // keys exactly 2..50
    std::set<std::pair<Address, std::size_t>> access;   // perpetual grants
    std::map<Address, ExchangeRate> rates;

    bool operator==(const ContractState&) const = default;
};

/// Everything a transaction can touch besides nonces.
struct World {
    LedgerState ledger;
    ContractState contract;

    bool operator==(const World&) const = default;
};

struct MineResult {
    bool accepted = false;
    std::size_t n = 0;
    FxEnergy energy;
    FxEnergy previous_energy;
    TokenAmount reward;

    bool operator==(const MineResult&) const = default;
};

/// Acceptance rule for a submission: candidate < stored - delta * |stored|,
/// evaluated exactly in integer arithmetic.
bool improves(FxEnergy candidate, FxEnergy stored, Ratio delta);

/// Simple-cubic structures (spacing 1 sigma) for every size, all credited to
/// the owner, plus the owner's initial token grant. Throws BadParams.
World genesis_world(const ContractParams& params);

/// Evaluates a submission and, if it improves the stored energy by at least
/// delta, stores it and mints rho to the caller. A rejection changes nothing.
MineResult mine_token(World& world, const Address& caller, const ClusterConfig& pos);

/// Charges 1 LJT, paid to the current contributor of size n, for perpetual
/// read access. Throws BadClusterSize, AlreadyGranted or InsufficientBalance.
void gain_access(World& world, const Address& caller, std::size_t n);

bool has_access(const World& world, const Address& caller, std::size_t n);

/// Throws BadClusterSize or AccessDenied. The owner and the contributor of
/// record read for free.
const ClusterRecord& view_data(const World& world, const Address& caller, std::size_t n);

/// Throws ZeroRate. The owner's stored rate is floored at owner_min_rate.
void set_exchange_rate(World& world, const Address& caller, ExchangeRate rate);

ExchangeRate effective_rate(const World& world, const Address& seller);

/// Moves `value` native units buyer -> seller and the corresponding
/// floor(value * rate / 1e9) LJT seller -> buyer. Returns the token amount.
/// Throws InsufficientNative, DustPurchase or SellerInsufficientTokens.
TokenAmount buy_token(World& world, const Address& buyer, const Address& seller,
                      NativeAmount value);

inline constexpr std::size_t kLeaderboardSize = 10;

/// Largest token holders, balance descending then address ascending.
std::vector<std::pair<Address, TokenAmount>> view_top_balance(const World& world);

/// Token holders by effective rate descending (most LJT per coin first),
/// then address ascending.
std::vector<std::pair<Address, ExchangeRate>> view_top_rate(const World& world);

}  // namespace ljt
