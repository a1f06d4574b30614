#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace ljt {

/// 20-byte account identifier, rendered as 0x-prefixed lowercase hex.
class Address {
public:
    Address() = default;
    explicit Address(const std::array<std::uint8_t, 20>& bytes) : bytes_(bytes) {}

    /// Accepts exactly "0x" followed by 40 lowercase hex digits; throws
    /// std::invalid_argument otherwise.
    static Address from_hex(std::string_view text);

    std::string to_hex() const;
    const std::array<std::uint8_t, 20>& bytes() const noexcept { return bytes_; }

    auto operator<=>(const Address&) const = default;

private:
    std::array<std::uint8_t, 20> bytes_{};
};

/// Whole LJT tokens (no decimals).
struct TokenAmount {
    std::uint64_t value = 0;
    auto operator<=>(const TokenAmount&) const = default;
};

inline constexpr std::uint64_t kNativePerCoin = 1'000'000'000;

/// Native currency in base units; 1 coin = 1e9 base units.
struct NativeAmount {
    std::uint64_t value = 0;
    auto operator<=>(const NativeAmount&) const = default;
};

/// Token balances, simulated native balances and the token supply. Zero
/// balances are never stored, so equal ledgers compare (and serialize) equal.
///
/// Every mutator checks all preconditions before touching state: a throwing
/// call leaves the ledger unchanged.
class LedgerState {
public:
    TokenAmount balance_of(const Address& a) const;
    NativeAmount native_balance_of(const Address& a) const;
    TokenAmount total_supply() const noexcept { return total_supply_; }

    /// Throws InsufficientBalance. from == to only validates the balance.
    void transfer(const Address& from, const Address& to, TokenAmount amount);

    /// Throws SupplyOverflow if the supply would exceed 2^64 - 1.
    void mint(const Address& to, TokenAmount amount);

    /// Throws InsufficientNative.
    void native_transfer(const Address& from, const Address& to, NativeAmount amount);

    /// Credits native currency out of thin air (genesis allocations and the
    /// dev faucet). Throws NativeOverflow.
    void native_credit(const Address& to, NativeAmount amount);

    const std::map<Address, TokenAmount>& token_balances() const noexcept { return tokens_; }
    const std::map<Address, NativeAmount>& native_balances() const noexcept { return native_; }

    /// Rebuilds a ledger from stored maps; throws BadParams if the balances
    /// do not sum to the supply or contain zero entries.
    static LedgerState restore(std::map<Address, TokenAmount> tokens,
                               std::map<Address, NativeAmount> native, TokenAmount supply);

    bool operator==(const LedgerState&) const = default;

private:
    std::map<Address, TokenAmount> tokens_;
    std::map<Address, NativeAmount> native_;
    TokenAmount total_supply_{};
};

}  // namespace ljt
