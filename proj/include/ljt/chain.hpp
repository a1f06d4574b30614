#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ljt/contract.hpp"
#include "ljt/error.hpp"

namespace ljt {

using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(const Digest& d);
/// Strict "0x" + 64 lowercase hex digits; throws Error(ParseError).
Digest digest_from_hex(std::string_view text);
Digest sha256(std::string_view bytes);

// Transaction call variants, one per state-changing contract entry point.
struct MineTokenCall {
    std::vector<std::uint64_t> pos;  // validated when applied
    bool operator==(const MineTokenCall&) const = default;
};
struct GainAccessCall {
    std::uint64_t n = 0;
    bool operator==(const GainAccessCall&) const = default;
};
struct SetExchangeRateCall {
    ExchangeRate rate;
    bool operator==(const SetExchangeRateCall&) const = default;
};
struct BuyTokenCall {
    Address seller;
    NativeAmount value;
    bool operator==(const BuyTokenCall&) const = default;
};
struct TransferCall {
    Address to;
    TokenAmount amount;
    bool operator==(const TransferCall&) const = default;
};
struct FaucetNativeCall {
    NativeAmount value;
    bool operator==(const FaucetNativeCall&) const = default;
};

using Call = std::variant<MineTokenCall, GainAccessCall, SetExchangeRateCall, BuyTokenCall,
                          TransferCall, FaucetNativeCall>;

std::string_view call_name(const Call& call);

struct Transaction {
    Address caller;
    std::uint64_t nonce = 0;
    Call call;
    bool operator==(const Transaction&) const = default;
};

/// Outcome of an included transaction. Failed contract calls are still
/// included (and consume the nonce); `error` names the failure.
struct Receipt {
    std::uint64_t height = 0;
    std::size_t index = 0;
    Address caller;
    std::uint64_t nonce = 0;
    std::optional<ErrorCode> error;
    std::string message;
    std::optional<MineResult> mine;
    std::optional<TokenAmount> tokens_bought;

    bool ok() const noexcept { return !error.has_value(); }
    bool operator==(const Receipt&) const = default;
};

/// Full replicated state: contract, ledger and per-caller nonces. The
/// state root commits to all three.
struct ChainState {
    World world;
    std::map<Address, std::uint64_t> nonces;

    std::uint64_t next_nonce(const Address& a) const;
    bool operator==(const ChainState&) const = default;
};

struct GenesisConfig {
    ContractParams params;
    std::map<Address, NativeAmount> native_allocations;
    std::uint64_t timestamp = 0;

    ChainState initial_state() const;
    bool operator==(const GenesisConfig&) const = default;
};

struct Block {
    std::uint64_t height = 0;
    Digest prev_hash{};
    std::uint64_t timestamp = 0;
    std::vector<Transaction> txs;
    Digest state_root{};
    Digest hash{};  // recorded at sealing; verify_chain recomputes it

    /// SHA-256 of the canonical serialization of every field except `hash`.
    Digest compute_hash() const;
    bool operator==(const Block&) const = default;
};

Digest state_root(const ChainState& state);

/// Applies one transaction. Throws Error(BadNonce) without touching the
/// state when tx.nonce is not the caller's next nonce; otherwise the nonce
/// is consumed and contract failures are reported in the receipt.
Receipt apply_transaction(ChainState& state, const Transaction& tx, std::uint64_t height = 0,
                          std::size_t index = 0);

/// Single-writer chain: genesis block plus sealed blocks and derived receipts.
class Chain {
public:
    explicit Chain(GenesisConfig genesis);

    /// Rebuilds a chain by verified replay. Throws Error(CorruptLog) naming
    /// the first bad height.
    static Chain replay(GenesisConfig genesis, std::span<const Block> blocks);

    /// Applies `pending` in order and appends the resulting block. If any
    /// transaction has a wrong nonce nothing is applied and Error(BadNonce)
    /// identifies it.
    const Block& seal_block(const std::vector<Transaction>& pending, std::uint64_t timestamp);

    const GenesisConfig& genesis() const noexcept { return genesis_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    const Block& head() const noexcept { return blocks_.back(); }
    const ChainState& state() const noexcept { return state_; }
    /// Receipts of the block at `height`, in transaction order.
    const std::vector<Receipt>& receipts(std::uint64_t height) const { return receipts_.at(height); }

private:
    GenesisConfig genesis_;
    std::vector<Block> blocks_;
    std::vector<std::vector<Receipt>> receipts_;
    ChainState state_;
};

enum class VerifyFailure { BrokenLink, HashMismatch, StateRootMismatch, BadNonce, Malformed };

std::string_view to_string(VerifyFailure f) noexcept;

struct Verdict {
    bool ok = true;
    std::uint64_t height = 0;
    VerifyFailure reason = VerifyFailure::Malformed;
    std::string detail;

    explicit operator bool() const noexcept { return ok; }
};

/// Replays from genesis checking every link, block hash and state root.
/// Reports the first violation.
Verdict verify_chain(const GenesisConfig& genesis, std::span<const Block> blocks);

/// Same, starting from block-log lines; a line that does not decode or is
/// not in canonical form fails as Malformed at that height.
Verdict verify_log(const GenesisConfig& genesis, std::span<const std::string> lines);

class DivergenceError : public Error {
public:
    DivergenceError(std::size_t node, std::uint64_t height, const std::string& detail)
        : Error(ErrorCode::DivergenceDetected,
                "node " + std::to_string(node) + " at height " + std::to_string(height) + ": " +
                    detail),
          node_(node),
          height_(height) {}

    std::size_t node() const noexcept { return node_; }
    std::uint64_t height() const noexcept { return height_; }

private:
    std::size_t node_;
    std::uint64_t height_;
};

/// One replica of the replication harness. `delta_override` simulates a node
/// whose contract code applies a different improvement threshold than the
/// one recorded in its genesis state (fault injection).
struct ReplicaConfig {
    GenesisConfig genesis;
    std::optional<Ratio> delta_override;
};

/// Replays the chain on one isolated instance per replica, concurrently.
/// Each instance decodes its own copy of the serialized blocks. Returns the
/// final state of every node; throws DivergenceError at the first block
/// (lowest height, then lowest node) whose recomputed root differs from the
/// sealed one.
std::vector<ChainState> replicate(std::span<const Block> blocks,
                                  std::span<const ReplicaConfig> replicas);

std::vector<ChainState> replicate(std::span<const Block> blocks, const GenesisConfig& genesis,
                                  std::size_t k);

}  // namespace ljt
