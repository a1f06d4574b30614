#include "ljt/token_ledger.hpp"

#include <limits>
#include <stdexcept>

#include "ljt/error.hpp"

namespace ljt {

Address Address::from_hex(std::string_view text) {
    if (text.size() != 42 || text[0] != '0' || text[1] != 'x') {
        throw std::invalid_argument("address must be 0x followed by 40 hex digits");
    }
    const auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw std::invalid_argument("address must be lowercase hex");
    };
    std::array<std::uint8_t, 20> bytes{};
    for (std::size_t i = 0; i < 20; ++i) {
        bytes[i] = static_cast<std::uint8_t>(nibble(text[2 + 2 * i]) << 4 | nibble(text[3 + 2 * i]));
    }
    return Address(bytes);
}

std::string Address::to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(42);
    for (const auto b : bytes_) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

TokenAmount LedgerState::balance_of(const Address& a) const {
    const auto it = tokens_.find(a);
    return it == tokens_.end() ? TokenAmount{} : it->second;
}

NativeAmount LedgerState::native_balance_of(const Address& a) const {
    const auto it = native_.find(a);
    return it == native_.end() ? NativeAmount{} : it->second;
}

namespace {

template <typename Amount>
void debit(std::map<Address, Amount>& balances, const Address& a, std::uint64_t v) {
    if (v == 0) return;
    auto it = balances.find(a);
    it->second.value -= v;
    if (it->second.value == 0) balances.erase(it);
}

template <typename Amount>
void credit(std::map<Address, Amount>& balances, const Address& a, std::uint64_t v) {
    if (v == 0) return;
    balances[a].value += v;
}

}  // namespace

void LedgerState::transfer(const Address& from, const Address& to, TokenAmount amount) {
    const auto have = balance_of(from);
    if (have.value < amount.value) {
        throw Error(ErrorCode::InsufficientBalance, from.to_hex() + " holds " +
                                                        std::to_string(have.value) + " LJT, needs " +
                                                        std::to_string(amount.value));
    }
    if (from == to) return;
    // Cannot overflow: the recipient's balance plus amount is bounded by the supply.
    debit(tokens_, from, amount.value);
    credit(tokens_, to, amount.value);
}

void LedgerState::mint(const Address& to, TokenAmount amount) {
    if (amount.value > std::numeric_limits<std::uint64_t>::max() - total_supply_.value) {
        throw Error(ErrorCode::SupplyOverflow, "minting " + std::to_string(amount.value));
    }
    total_supply_.value += amount.value;
    credit(tokens_, to, amount.value);
}

void LedgerState::native_transfer(const Address& from, const Address& to, NativeAmount amount) {
    const auto have = native_balance_of(from);
    if (have.value < amount.value) {
        throw Error(ErrorCode::InsufficientNative, from.to_hex() + " holds " +
                                                       std::to_string(have.value) +
                                                       " base units, needs " +
                                                       std::to_string(amount.value));
    }
    if (from == to) return;
    if (native_balance_of(to).value > std::numeric_limits<std::uint64_t>::max() - amount.value) {
        throw Error(ErrorCode::NativeOverflow, "recipient balance overflow");
    }
    debit(native_, from, amount.value);
    credit(native_, to, amount.value);
}

void LedgerState::native_credit(const Address& to, NativeAmount amount) {
    if (native_balance_of(to).value > std::numeric_limits<std::uint64_t>::max() - amount.value) {
        throw Error(ErrorCode::NativeOverflow, "recipient balance overflow");
    }
    credit(native_, to, amount.value);
}

LedgerState LedgerState::restore(std::map<Address, TokenAmount> tokens,
                                 std::map<Address, NativeAmount> native, TokenAmount supply) {
    unsigned __int128 sum = 0;
    for (const auto& [a, v] : tokens) {
        if (v.value == 0) throw Error(ErrorCode::BadParams, "zero token balance stored");
        sum += v.value;
    }
    for (const auto& [a, v] : native) {
        if (v.value == 0) throw Error(ErrorCode::BadParams, "zero native balance stored");
    }
    if (sum != supply.value) throw Error(ErrorCode::BadParams, "balances do not sum to supply");
    LedgerState out;
    out.tokens_ = std::move(tokens);
    out.native_ = std::move(native);
    out.total_supply_ = supply;
    return out;
}

}  // namespace ljt
