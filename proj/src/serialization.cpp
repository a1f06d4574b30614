#include "ljt/serialization.hpp"

#include <limits>

namespace ljt {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) bad(std::string("expected object holding '") + key + "'");
    const auto it = j.find(key);
    if (it == j.end()) bad(std::string("missing field '") + key + "'");
    return *it;
}

std::uint64_t as_u64(const Json& j, const char* what) {
    if (!j.is_number_unsigned()) bad(std::string(what) + ": expected unsigned integer");
    return j.get<std::uint64_t>();
}

std::int64_t as_i64(const Json& j, const char* what) {
    if (j.is_number_unsigned()) {
        const auto v = j.get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
            bad(std::string(what) + ": integer out of range");
        }
        return static_cast<std::int64_t>(v);
    }
    if (!j.is_number_integer()) bad(std::string(what) + ": expected integer");
    return j.get<std::int64_t>();
}

bool as_bool(const Json& j, const char* what) {
    if (!j.is_boolean()) bad(std::string(what) + ": expected boolean");
    return j.get<bool>();
}

const std::string& as_string(const Json& j, const char* what) {
    if (!j.is_string()) bad(std::string(what) + ": expected string");
    return j.get_ref<const std::string&>();
}

const Json& as_array(const Json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + ": expected array");
    return j;
}

const Json& as_object(const Json& j, const char* what) {
    if (!j.is_object()) bad(std::string(what) + ": expected object");
    return j;
}

Address address_from_key(const std::string& key) {
    try {
        return Address::from_hex(key);
    } catch (const std::invalid_argument& e) {
        bad(std::string("bad address '") + key + "': " + e.what());
    }
}

std::vector<std::uint64_t> u64_array(const Json& j, const char* what) {
    std::vector<std::uint64_t> out;
    for (const auto& v : as_array(j, what)) out.push_back(as_u64(v, what));
    return out;
}

}  // namespace

std::string canonical(const Json& j) { return j.dump(); }

namespace {

bool has_float(const Json& j) {
    if (j.is_number_float()) return true;
    if (j.is_structured()) {
        for (const auto& v : j) {
            if (has_float(v)) return true;
        }
    }
    return false;
}

}  // namespace

Json parse_canonical(std::string_view text) {
    Json j;
    std::string round_trip;
    try {
        j = Json::parse(text);
        round_trip = j.dump();
    } catch (const nlohmann::json::exception& e) {
        bad(std::string("invalid JSON: ") + e.what());
    }
    if (round_trip != text) bad("JSON is not in canonical form");
    if (has_float(j)) bad("canonical JSON carries integers only");
    return j;
}

Json encode(const ClusterConfig& c) {
    Json out = Json::array();
    for (const auto v : c.coords()) out.push_back(v);
    return out;
}

Json encode(const ContractParams& p) {
    return Json{{"delta", {{"num", p.delta.num}, {"den", p.delta.den}}},
                {"rho", p.rho.value},
                {"owner", p.owner.to_hex()},
                {"owner_min_rate", p.owner_min_rate.tokens_per_coin},
                {"initial_owner_grant", p.initial_owner_grant.value}};
}

Json encode(const MineResult& r) {
    return Json{{"accepted", r.accepted},
                {"n", r.n},
                {"energy", r.energy.micro},
                {"previous_energy", r.previous_energy.micro},
                {"reward", r.reward.value}};
}

Json encode(const Call& call) {
    return std::visit(
        [](const auto& c) -> Json {
            using T = std::decay_t<decltype(c)>;
            Json out{{"type", std::string(call_name(Call{c}))}};
            if constexpr (std::is_same_v<T, MineTokenCall>) {
                out["pos"] = c.pos;
            } else if constexpr (std::is_same_v<T, GainAccessCall>) {
                out["n"] = c.n;
            } else if constexpr (std::is_same_v<T, SetExchangeRateCall>) {
                out["rate"] = c.rate.tokens_per_coin;
            } else if constexpr (std::is_same_v<T, BuyTokenCall>) {
                out["seller"] = c.seller.to_hex();
                out["value"] = c.value.value;
            } else if constexpr (std::is_same_v<T, TransferCall>) {
                out["to"] = c.to.to_hex();
                out["amount"] = c.amount.value;
            } else {
                out["value"] = c.value.value;
            }
            return out;
        },
        call);
}

Json encode(const Transaction& tx) {
    return Json{{"caller", tx.caller.to_hex()}, {"nonce", tx.nonce}, {"call", encode(tx.call)}};
}

Json encode(const Receipt& r) {
    Json out{{"height", r.height},   {"index", r.index},     {"caller", r.caller.to_hex()},
             {"nonce", r.nonce},     {"ok", r.ok()},         {"message", r.message}};
    if (r.error) out["error"] = std::string(to_string(*r.error));
    if (r.mine) out["mine"] = encode(*r.mine);
    if (r.tokens_bought) out["tokens_bought"] = r.tokens_bought->value;
    return out;
}

Json encode(const ChainState& s) {
    const auto& contract = s.world.contract;
    Json clusters = Json::array();
    for (const auto& [n, record] : contract.clusters) {
        clusters.push_back({{"n", n},
                            {"energy", record.energy.micro},
                            {"pos", encode(record.config)},
                            {"contributor", record.contributor.to_hex()}});
    }
    Json access = Json::object();
    for (const auto& [address, n] : contract.access) access[address.to_hex()].push_back(n);
    Json rates = Json::object();
    for (const auto& [address, rate] : contract.rates) rates[address.to_hex()] = rate.tokens_per_coin;

    Json tokens = Json::object();
    for (const auto& [address, v] : s.world.ledger.token_balances()) tokens[address.to_hex()] = v.value;
    Json native = Json::object();
    for (const auto& [address, v] : s.world.ledger.native_balances()) native[address.to_hex()] = v.value;
    Json nonces = Json::object();
    for (const auto& [address, v] : s.nonces) nonces[address.to_hex()] = v;

    return Json{{"contract",
                 {{"params", encode(contract.params)},
                  {"clusters", std::move(clusters)},
                  {"access", std::move(access)},
                  {"rates", std::move(rates)}}},
                {"ledger",
                 {{"tokens", std::move(tokens)},
                  {"native", std::move(native)},
                  {"supply", s.world.ledger.total_supply().value}}},
                {"nonces", std::move(nonces)}};
}

Json encode(const GenesisConfig& g) {
    Json alloc = Json::object();
    for (const auto& [address, v] : g.native_allocations) alloc[address.to_hex()] = v.value;
    return Json{{"params", encode(g.params)},
                {"native_allocations", std::move(alloc)},
                {"timestamp", g.timestamp}};
}

Json encode_block_body(const Block& b) {
    Json txs = Json::array();
    for (const auto& tx : b.txs) txs.push_back(encode(tx));
    return Json{{"height", b.height},
                {"prev_hash", to_hex(b.prev_hash)},
                {"timestamp", b.timestamp},
                {"txs", std::move(txs)},
                {"state_root", to_hex(b.state_root)}};
}

Json encode(const Block& b) {
    auto out = encode_block_body(b);
    out["hash"] = to_hex(b.hash);
    return out;
}

Address decode_address(const Json& j) { return address_from_key(as_string(j, "address")); }

ClusterConfig decode_cluster_config(const Json& j) {
    return ClusterConfig::from_coords(u64_array(j, "pos"));
}

ContractParams decode_params(const Json& j) {
    ContractParams p;
    const auto& delta = field(j, "delta");
    p.delta = {as_u64(field(delta, "num"), "delta.num"), as_u64(field(delta, "den"), "delta.den")};
    p.rho = {as_u64(field(j, "rho"), "rho")};
    p.owner = decode_address(field(j, "owner"));
    p.owner_min_rate = {as_u64(field(j, "owner_min_rate"), "owner_min_rate")};
    p.initial_owner_grant = {as_u64(field(j, "initial_owner_grant"), "initial_owner_grant")};
    return p;
}

MineResult decode_mine_result(const Json& j) {
    MineResult r;
    r.accepted = as_bool(field(j, "accepted"), "accepted");
    r.n = as_u64(field(j, "n"), "n");
    r.energy = {as_i64(field(j, "energy"), "energy")};
    r.previous_energy = {as_i64(field(j, "previous_energy"), "previous_energy")};
    r.reward = {as_u64(field(j, "reward"), "reward")};
    return r;
}

Call decode_call(const Json& j) {
    const auto& type = as_string(field(j, "type"), "type");
    if (type == "MineToken") return MineTokenCall{u64_array(field(j, "pos"), "pos")};
    if (type == "GainAccess") return GainAccessCall{as_u64(field(j, "n"), "n")};
    if (type == "SetExchangeRate") {
        return SetExchangeRateCall{{as_u64(field(j, "rate"), "rate")}};
    }
    if (type == "BuyToken") {
        return BuyTokenCall{decode_address(field(j, "seller")), {as_u64(field(j, "value"), "value")}};
    }
    if (type == "TransferLJT") {
        return TransferCall{decode_address(field(j, "to")), {as_u64(field(j, "amount"), "amount")}};
    }
    if (type == "FaucetNative") return FaucetNativeCall{{as_u64(field(j, "value"), "value")}};
    bad("unknown call type '" + type + "'");
}

Transaction decode_transaction(const Json& j) {
    return Transaction{decode_address(field(j, "caller")), as_u64(field(j, "nonce"), "nonce"),
                       decode_call(field(j, "call"))};
}

Receipt decode_receipt(const Json& j) {
    Receipt r;
    r.height = as_u64(field(j, "height"), "height");
    r.index = as_u64(field(j, "index"), "index");
    r.caller = decode_address(field(j, "caller"));
    r.nonce = as_u64(field(j, "nonce"), "nonce");
    r.message = as_string(field(j, "message"), "message");
    if (j.contains("error")) {
        try {
            r.error = error_code_from_string(as_string(j.at("error"), "error"));
        } catch (const std::invalid_argument& e) {
            bad(e.what());
        }
    }
    if (as_bool(field(j, "ok"), "ok") == r.error.has_value()) bad("ok flag contradicts error");
    if (j.contains("mine")) r.mine = decode_mine_result(j.at("mine"));
    if (j.contains("tokens_bought")) {
        r.tokens_bought = TokenAmount{as_u64(j.at("tokens_bought"), "tokens_bought")};
    }
    return r;
}

ChainState decode_state(const Json& j) {
    ChainState s;
    const auto& contract = field(j, "contract");
    s.world.contract.params = decode_params(field(contract, "params"));
    std::size_t expected_n = kMinParticles;
    for (const auto& entry : as_array(field(contract, "clusters"), "clusters")) {
        const auto n = as_u64(field(entry, "n"), "n");
        if (n != expected_n) bad("clusters must list N = 2..50 in order");
        auto config = decode_cluster_config(field(entry, "pos"));
        if (config.particle_count() != n) bad("cluster position count does not match N");
        s.world.contract.clusters.emplace(
            n, ClusterRecord{{as_i64(field(entry, "energy"), "energy")}, std::move(config),
                             decode_address(field(entry, "contributor"))});
        ++expected_n;
    }
    if (expected_n != kMaxParticles + 1) bad("clusters must list N = 2..50");
    for (const auto& [key, sizes] : as_object(field(contract, "access"), "access").items()) {
        const auto address = address_from_key(key);
        for (const auto& n : as_array(sizes, "access")) {
            s.world.contract.access.emplace(address, as_u64(n, "access"));
        }
    }
    for (const auto& [key, rate] : as_object(field(contract, "rates"), "rates").items()) {
        s.world.contract.rates.emplace(address_from_key(key), ExchangeRate{as_u64(rate, "rate")});
    }

    const auto& ledger = field(j, "ledger");
    std::map<Address, TokenAmount> tokens;
    for (const auto& [key, v] : as_object(field(ledger, "tokens"), "tokens").items()) {
        tokens.emplace(address_from_key(key), TokenAmount{as_u64(v, "balance")});
    }
    std::map<Address, NativeAmount> native;
    for (const auto& [key, v] : as_object(field(ledger, "native"), "native").items()) {
        native.emplace(address_from_key(key), NativeAmount{as_u64(v, "balance")});
    }
    s.world.ledger = LedgerState::restore(std::move(tokens), std::move(native),
                                          TokenAmount{as_u64(field(ledger, "supply"), "supply")});
    for (const auto& [key, v] : as_object(field(j, "nonces"), "nonces").items()) {
        s.nonces.emplace(address_from_key(key), as_u64(v, "nonce"));
    }
    return s;
}

GenesisConfig decode_genesis(const Json& j) {
    GenesisConfig g;
    g.params = decode_params(field(j, "params"));
    for (const auto& [key, v] :
         as_object(field(j, "native_allocations"), "native_allocations").items()) {
        g.native_allocations.emplace(address_from_key(key), NativeAmount{as_u64(v, "allocation")});
    }
    if (j.contains("timestamp")) g.timestamp = as_u64(j.at("timestamp"), "timestamp");
    return g;
}

Block decode_block(const Json& j) {
    Block b;
    b.height = as_u64(field(j, "height"), "height");
    b.prev_hash = digest_from_hex(as_string(field(j, "prev_hash"), "prev_hash"));
    b.timestamp = as_u64(field(j, "timestamp"), "timestamp");
    for (const auto& tx : as_array(field(j, "txs"), "txs")) b.txs.push_back(decode_transaction(tx));
    b.state_root = digest_from_hex(as_string(field(j, "state_root"), "state_root"));
    b.hash = digest_from_hex(as_string(field(j, "hash"), "hash"));
    return b;
}

std::string block_to_line(const Block& b) { return canonical(encode(b)); }

Block block_from_line(std::string_view line) {
    const auto j = parse_canonical(line);
    auto block = decode_block(j);
    if (block_to_line(block) != line) bad("block line carries unknown fields");
    return block;
}

}  // namespace ljt
