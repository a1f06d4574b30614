#include "ljt/contract.hpp"

#include <algorithm>
#include <limits>

#include "ljt/error.hpp"

namespace ljt {

void ContractParams::validate() const {
    if (delta.den == 0 || delta.den > 1'000'000'000'000ULL || delta.num == 0 ||
        delta.num >= delta.den) {
        throw Error(ErrorCode::BadParams, "delta must satisfy 0 < delta < 1");
    }
    if (rho.value == 0) throw Error(ErrorCode::BadParams, "rho must be positive");
    if (owner_min_rate.tokens_per_coin == 0) {
        throw Error(ErrorCode::BadParams, "owner_min_rate must be at least 1");
    }
}

bool improves(FxEnergy candidate, FxEnergy stored, Ratio delta) {
    using i128 = __int128;
    const i128 e = stored.micro;
    const i128 magnitude = e < 0 ? -e : e;
    // den * U < den * E - num * |E|
    return static_cast<i128>(delta.den) * candidate.micro <
           static_cast<i128>(delta.den) * e - static_cast<i128>(delta.num) * magnitude;
}

World genesis_world(const ContractParams& params) {
    params.validate();
    World world;
    world.contract.params = params;
    for (std::size_t n = kMinParticles; n <= kMaxParticles; ++n) {
        auto config = simple_cubic_fixed(ClusterSize(n));
        const auto energy = calc_energy(config);
        world.contract.clusters.emplace(n, ClusterRecord{energy, std::move(config), params.owner});
    }
    world.ledger.mint(params.owner, params.initial_owner_grant);
    return world;
}

MineResult mine_token(World& world, const Address& caller, const ClusterConfig& pos) {
    const std::size_t n = pos.particle_count();
    auto& record = world.contract.clusters.at(n);
    MineResult result;
    result.n = n;
    result.energy = calc_energy(pos);
    result.previous_energy = record.energy;
    if (!improves(result.energy, record.energy, world.contract.params.delta)) return result;

    const auto reward = world.contract.params.rho;
    world.ledger.mint(caller, reward);  // only throwing step; runs before the record changes
    record = ClusterRecord{result.energy, pos, caller};
    result.accepted = true;
    result.reward = reward;
    return result;
}

namespace {

const ClusterRecord& record_for(const World& world, std::size_t n) {
    const ClusterSize size(n);
    return world.contract.clusters.at(size.value());
}

}  // namespace

bool has_access(const World& world, const Address& caller, std::size_t n) {
    return world.contract.access.contains({caller, n});
}

void gain_access(World& world, const Address& caller, std::size_t n) {
    const auto& record = record_for(world, n);
    if (has_access(world, caller, n)) {
        throw Error(ErrorCode::AlreadyGranted,
                    caller.to_hex() + " already has access to N=" + std::to_string(n));
    }
    world.ledger.transfer(caller, record.contributor, TokenAmount{1});
    world.contract.access.emplace(caller, n);
}

const ClusterRecord& view_data(const World& world, const Address& caller, std::size_t n) {
    const auto& record = record_for(world, n);
    if (caller != world.contract.params.owner && caller != record.contributor &&
        !has_access(world, caller, n)) {
        throw Error(ErrorCode::AccessDenied,
                    caller.to_hex() + " has no access to N=" + std::to_string(n));
    }
    return record;
}

void set_exchange_rate(World& world, const Address& caller, ExchangeRate rate) {
    if (rate.tokens_per_coin == 0) throw Error(ErrorCode::ZeroRate, "rate must be at least 1");
    const auto& params = world.contract.params;
    if (caller == params.owner) rate = std::max(rate, params.owner_min_rate);
    world.contract.rates[caller] = rate;
}

ExchangeRate effective_rate(const World& world, const Address& seller) {
    const auto it = world.contract.rates.find(seller);
    return it == world.contract.rates.end() ? world.contract.params.owner_min_rate : it->second;
}

TokenAmount buy_token(World& world, const Address& buyer, const Address& seller,
                      NativeAmount value) {
    auto& ledger = world.ledger;
    if (ledger.native_balance_of(buyer).value < value.value) {
        throw Error(ErrorCode::InsufficientNative,
                    buyer.to_hex() + " cannot pay " + std::to_string(value.value));
    }
    const unsigned __int128 tokens =
        static_cast<unsigned __int128>(value.value) * effective_rate(world, seller).tokens_per_coin /
        kNativePerCoin;
    if (tokens == 0) throw Error(ErrorCode::DustPurchase, "purchase buys 0 LJT");
    if (tokens > ledger.balance_of(seller).value) {
        throw Error(ErrorCode::SellerInsufficientTokens,
                    seller.to_hex() + " holds " + std::to_string(ledger.balance_of(seller).value) +
                        " LJT");
    }
    const TokenAmount amount{static_cast<std::uint64_t>(tokens)};
    // Both legs are validated above; native_transfer can only fail on
    // recipient overflow, checked before any token moves.
    ledger.native_transfer(buyer, seller, value);
    ledger.transfer(seller, buyer, amount);
    return amount;
}

std::vector<std::pair<Address, TokenAmount>> view_top_balance(const World& world) {
    const auto& balances = world.ledger.token_balances();
    std::vector<std::pair<Address, TokenAmount>> out(balances.begin(), balances.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (out.size() > kLeaderboardSize) out.resize(kLeaderboardSize);
    return out;
}

std::vector<std::pair<Address, ExchangeRate>> view_top_rate(const World& world) {
    std::vector<std::pair<Address, ExchangeRate>> out;
    for (const auto& [address, balance] : world.ledger.token_balances()) {
        if (balance.value >= 1) out.emplace_back(address, effective_rate(world, address));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (out.size() > kLeaderboardSize) out.resize(kLeaderboardSize);
    return out;
}

}  // namespace ljt
