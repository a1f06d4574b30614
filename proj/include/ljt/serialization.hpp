#pragma once

// Canonical JSON forms of every hashed or persisted value.
//
// Canonical JSON here means: object keys sorted bytewise, no insignificant
// whitespace, integers in base 10, byte strings as 0x-prefixed lowercase hex,
// arrays in order. Maps keyed by address become objects (hex order equals
// byte order); maps keyed by cluster size become arrays in ascending N.
// nlohmann::json stores objects in a std::map, so dump() already emits this
// form as long as no floating-point values are stored.
//
// All decode_* functions are strict and throw Error(ParseError).

#include <json.hpp>
#include <string>
#include <string_view>

#include "ljt/chain.hpp"

namespace ljt {

using Json = nlohmann::json;

std::string canonical(const Json& j);

/// Parses text and requires that it is already in canonical form.
Json parse_canonical(std::string_view text);

Json encode(const ClusterConfig& c);
Json encode(const ContractParams& p);
Json encode(const MineResult& r);
Json encode(const Call& c);
Json encode(const Transaction& tx);
Json encode(const Receipt& r);
Json encode(const ChainState& s);
Json encode(const GenesisConfig& g);
Json encode(const Block& b);  // includes the recorded hash
Json encode_block_body(const Block& b);  // hash preimage

Address decode_address(const Json& j);
ClusterConfig decode_cluster_config(const Json& j);
ContractParams decode_params(const Json& j);
MineResult decode_mine_result(const Json& j);
Call decode_call(const Json& j);
Transaction decode_transaction(const Json& j);
Receipt decode_receipt(const Json& j);
ChainState decode_state(const Json& j);
GenesisConfig decode_genesis(const Json& j);
Block decode_block(const Json& j);

/// One line of the block log (no trailing newline).
std::string block_to_line(const Block& b);
Block block_from_line(std::string_view line);

}  // namespace ljt
