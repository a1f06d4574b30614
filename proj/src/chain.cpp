#include "ljt/chain.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <future>
#include <optional>
#include <thread>

#include "ljt/serialization.hpp"

namespace ljt {

std::string to_hex(const Digest& d) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(66);
    for (const auto b : d) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

Digest digest_from_hex(std::string_view text) {
    if (text.size() != 66 || text[0] != '0' || text[1] != 'x') {
        throw Error(ErrorCode::ParseError, "digest must be 0x followed by 64 hex digits");
    }
    const auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw Error(ErrorCode::ParseError, "digest must be lowercase hex");
    };
    Digest d{};
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = static_cast<std::uint8_t>(nibble(text[2 + 2 * i]) << 4 | nibble(text[3 + 2 * i]));
    }
    return d;
}

Digest sha256(std::string_view bytes) {
    Digest d{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), d.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != d.size()) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    return d;
}

std::string_view call_name(const Call& call) {
    static constexpr std::string_view kNames[] = {"MineToken",   "GainAccess",  "SetExchangeRate",
                                                  "BuyToken",    "TransferLJT", "FaucetNative"};
    return kNames[call.index()];
}

std::uint64_t ChainState::next_nonce(const Address& a) const {
    const auto it = nonces.find(a);
    return it == nonces.end() ? 0 : it->second;
}

ChainState GenesisConfig::initial_state() const {
    ChainState state;
    state.world = genesis_world(params);
    for (const auto& [address, amount] : native_allocations) {
        state.world.ledger.native_credit(address, amount);
    }
    return state;
}

Digest Block::compute_hash() const { return sha256(canonical(encode_block_body(*this))); }

Digest state_root(const ChainState& state) { return sha256(canonical(encode(state))); }

namespace {

struct Dispatch {
    World& world;
    const Address& caller;
    Receipt& receipt;
    const Ratio* delta_override;

    void operator()(const MineTokenCall& c) const {
        const auto config = ClusterConfig::from_coords(c.pos);
        if (delta_override == nullptr) {
            receipt.mine = mine_token(world, caller, config);
            return;
        }
        auto& delta = world.contract.params.delta;
        const auto recorded = delta;
        delta = *delta_override;
        try {
            receipt.mine = mine_token(world, caller, config);
        } catch (...) {
            delta = recorded;
            throw;
        }
        delta = recorded;
    }
    void operator()(const GainAccessCall& c) const {
        gain_access(world, caller, static_cast<std::size_t>(std::min<std::uint64_t>(c.n, 1u << 20)));
    }
    void operator()(const SetExchangeRateCall& c) const { set_exchange_rate(world, caller, c.rate); }
    void operator()(const BuyTokenCall& c) const {
        receipt.tokens_bought = buy_token(world, caller, c.seller, c.value);
    }
    void operator()(const TransferCall& c) const { world.ledger.transfer(caller, c.to, c.amount); }
    void operator()(const FaucetNativeCall& c) const { world.ledger.native_credit(caller, c.value); }
};

Receipt apply_with_rules(ChainState& state, const Transaction& tx, std::uint64_t height,
                         std::size_t index, const Ratio* delta_override) {
    const auto expected = state.next_nonce(tx.caller);
    if (tx.nonce != expected) {
        throw Error(ErrorCode::BadNonce, tx.caller.to_hex() + " nonce " + std::to_string(tx.nonce) +
                                             ", expected " + std::to_string(expected));
    }
    Receipt receipt;
    receipt.height = height;
    receipt.index = index;
    receipt.caller = tx.caller;
    receipt.nonce = tx.nonce;
    state.nonces[tx.caller] = expected + 1;
    try {
        std::visit(Dispatch{state.world, tx.caller, receipt, delta_override}, tx.call);
    } catch (const Error& e) {
        // Contract operations validate before mutating, so the world is untouched.
        receipt.error = e.code();
        receipt.message = e.what();
        receipt.mine.reset();
        receipt.tokens_bought.reset();
    }
    return receipt;
}

}  // namespace

Receipt apply_transaction(ChainState& state, const Transaction& tx, std::uint64_t height,
                          std::size_t index) {
    return apply_with_rules(state, tx, height, index, nullptr);
}

namespace {

Block genesis_block(const GenesisConfig& genesis, const ChainState& state) {
    Block b;
    b.height = 0;
    b.timestamp = genesis.timestamp;
    b.state_root = state_root(state);
    b.hash = b.compute_hash();
    return b;
}

}  // namespace

Chain::Chain(GenesisConfig genesis) : genesis_(std::move(genesis)), state_(genesis_.initial_state()) {
    blocks_.push_back(genesis_block(genesis_, state_));
    receipts_.emplace_back();
}

const Block& Chain::seal_block(const std::vector<Transaction>& pending, std::uint64_t timestamp) {
    std::map<Address, std::uint64_t> counters;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        const auto& tx = pending[i];
        auto it = counters.find(tx.caller);
        if (it == counters.end()) it = counters.emplace(tx.caller, state_.next_nonce(tx.caller)).first;
        if (tx.nonce != it->second) {
            throw Error(ErrorCode::BadNonce, "pending transaction " + std::to_string(i) + " from " +
                                                 tx.caller.to_hex() + " has nonce " +
                                                 std::to_string(tx.nonce) + ", expected " +
                                                 std::to_string(it->second));
        }
        ++it->second;
    }

    Block b;
    b.height = blocks_.size();
    b.prev_hash = blocks_.back().hash;
    b.timestamp = timestamp;
    b.txs = pending;
    std::vector<Receipt> receipts;
    receipts.reserve(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) {
        receipts.push_back(apply_transaction(state_, pending[i], b.height, i));
    }
    b.state_root = state_root(state_);
    b.hash = b.compute_hash();
    blocks_.push_back(std::move(b));
    receipts_.push_back(std::move(receipts));
    return blocks_.back();
}

std::string_view to_string(VerifyFailure f) noexcept {
    switch (f) {
        case VerifyFailure::BrokenLink: return "BrokenLink";
        case VerifyFailure::HashMismatch: return "HashMismatch";
        case VerifyFailure::StateRootMismatch: return "StateRootMismatch";
        case VerifyFailure::BadNonce: return "BadNonce";
        case VerifyFailure::Malformed: return "Malformed";
    }
    return "Unknown";
}

namespace {

Verdict fail(std::uint64_t height, VerifyFailure reason, std::string detail) {
    return Verdict{false, height, reason, std::move(detail)};
}

// Replays blocks onto `state`, optionally collecting receipts.
Verdict replay_into(const GenesisConfig& genesis, std::span<const Block> blocks, ChainState& state,
                    std::vector<std::vector<Receipt>>* receipts,
                    const Ratio* delta_override = nullptr) {
    state = genesis.initial_state();
    Digest prev{};
    for (std::size_t h = 0; h < blocks.size(); ++h) {
        const auto& b = blocks[h];
        if (b.height != h) return fail(h, VerifyFailure::BrokenLink, "unexpected height");
        if (b.prev_hash != prev) return fail(h, VerifyFailure::BrokenLink, "prev_hash mismatch");
        if (b.compute_hash() != b.hash) {
            return fail(h, VerifyFailure::HashMismatch, "recorded hash does not match contents");
        }
        if (h == 0 && (!b.txs.empty() || b.timestamp != genesis.timestamp)) {
            return fail(0, VerifyFailure::StateRootMismatch, "genesis block does not match genesis");
        }
        std::vector<Receipt> block_receipts;
        for (std::size_t i = 0; i < b.txs.size(); ++i) {
            try {
                block_receipts.push_back(apply_with_rules(state, b.txs[i], h, i, delta_override));
            } catch (const Error& e) {
                return fail(h, VerifyFailure::BadNonce, e.what());
            }
        }
        if (state_root(state) != b.state_root) {
            return fail(h, VerifyFailure::StateRootMismatch, "replayed state differs");
        }
        if (receipts) receipts->push_back(std::move(block_receipts));
        prev = b.hash;
    }
    if (blocks.empty()) return fail(0, VerifyFailure::BrokenLink, "missing genesis block");
    return {};
}

}  // namespace

Chain Chain::replay(GenesisConfig genesis, std::span<const Block> blocks) {
    Chain chain(std::move(genesis));
    chain.receipts_.clear();
    const auto verdict = replay_into(chain.genesis_, blocks, chain.state_, &chain.receipts_);
    if (!verdict) {
        throw Error(ErrorCode::CorruptLog, "height " + std::to_string(verdict.height) + ": " +
                                               std::string(to_string(verdict.reason)) + " (" +
                                               verdict.detail + ")");
    }
    chain.blocks_.assign(blocks.begin(), blocks.end());
    return chain;
}

Verdict verify_chain(const GenesisConfig& genesis, std::span<const Block> blocks) {
    ChainState state;
    return replay_into(genesis, blocks, state, nullptr);
}

Verdict verify_log(const GenesisConfig& genesis, std::span<const std::string> lines) {
    std::vector<Block> blocks;
    blocks.reserve(lines.size());
    for (std::size_t h = 0; h < lines.size(); ++h) {
        try {
            blocks.push_back(block_from_line(lines[h]));
        } catch (const Error& e) {
            // A malformed line can never be verified, but an earlier block may
            // already be broken; report whichever comes first.
            const auto prefix = verify_chain(genesis, blocks);
            if (!prefix) return prefix;
            return fail(h, VerifyFailure::Malformed, e.what());
        }
    }
    return verify_chain(genesis, blocks);
}

std::vector<ChainState> replicate(std::span<const Block> blocks,
                                  std::span<const ReplicaConfig> replicas) {
    std::vector<std::string> lines;
    lines.reserve(blocks.size());
    for (const auto& b : blocks) lines.push_back(block_to_line(b));

    struct Outcome {
        ChainState state;
        std::optional<std::pair<std::uint64_t, std::string>> divergence;
    };
    const auto run_node = [&lines](ReplicaConfig replica) {
        Outcome out;
        // Private decoded copy; nothing mutable is shared between nodes.
        std::vector<Block> own;
        own.reserve(lines.size());
        for (const auto& line : lines) own.push_back(block_from_line(line));
        const Ratio* delta = replica.delta_override ? &*replica.delta_override : nullptr;
        const auto verdict = replay_into(replica.genesis, own, out.state, nullptr, delta);
        if (!verdict) {
            out.divergence.emplace(verdict.height,
                                   std::string(to_string(verdict.reason)) + ": " + verdict.detail);
        }
        return out;
    };

    std::vector<std::future<Outcome>> futures;
    futures.reserve(replicas.size());
    for (const auto& r : replicas) futures.push_back(std::async(std::launch::async, run_node, r));
    std::vector<Outcome> outcomes;
    outcomes.reserve(futures.size());
    for (auto& f : futures) outcomes.push_back(f.get());

    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].divergence) continue;
        if (!first || outcomes[i].divergence->first < outcomes[*first].divergence->first) first = i;
    }
    if (first) {
        const auto& [height, detail] = *outcomes[*first].divergence;
        throw DivergenceError(*first, height, detail);
    }
    std::vector<ChainState> states;
    states.reserve(outcomes.size());
    for (auto& o : outcomes) states.push_back(std::move(o.state));
    return states;
}

std::vector<ChainState> replicate(std::span<const Block> blocks, const GenesisConfig& genesis,
                                  std::size_t k) {
    const std::vector<ReplicaConfig> configs(k, ReplicaConfig{genesis, std::nullopt});
    return replicate(blocks, configs);
}

}  // namespace ljt
