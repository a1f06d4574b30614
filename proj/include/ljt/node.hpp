#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ljt/chain.hpp"
#include "ljt/serialization.hpp"

namespace ljt {

struct NodeConfig {
    std::string host = "127.0.0.1";
    int port = 8545;                          // 0 binds an ephemeral port
    std::filesystem::path block_log = "ljt-blocks.jsonl";
    std::filesystem::path genesis = "genesis.json";
    std::optional<double> seal_interval;      // seconds; empty means seal on submit
    bool dev_faucet = false;
    std::size_t queue_capacity = 1024;
    std::vector<Address> dev_wallets;

    /// Reads the JSON config file. Relative paths inside it resolve against
    /// the file's directory.
    static NodeConfig load(const std::filesystem::path& path);
    static NodeConfig from_json(const Json& j, const std::filesystem::path& base_dir = {});
};

/// Block log: one canonical block per line. Rewritten through a temporary
/// file and rename, so a crash leaves either the old or the new log.
std::vector<std::string> read_log_lines(const std::filesystem::path& path);
void write_log_atomic(const std::filesystem::path& path, const std::vector<std::string>& lines);

GenesisConfig load_genesis(const std::filesystem::path& path);
void write_genesis(const std::filesystem::path& path, const GenesisConfig& genesis);

struct HttpRequest {
    std::string method;                      // "GET" or "POST"
    std::string path;
    std::map<std::string, std::string> query;
    std::optional<std::string> caller;       // X-Caller header
    std::string body;
};

struct HttpResponse {
    int status = 200;
    Json body;
};

/// A node: replays the block log at startup, serves the JSON endpoints and
/// serializes every state change through one sealing queue. Reads are served
/// from an immutable snapshot published after each seal.
class Node {
public:
    /// Loads the genesis file named in the config. Throws Error(CorruptLog)
    /// if the existing block log does not verify against it.
    explicit Node(NodeConfig config);
    Node(NodeConfig config, GenesisConfig genesis,
         std::function<std::uint64_t()> clock = {});
    ~Node();

    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    /// Transport-independent request handling (the HTTP server calls this).
    HttpResponse handle(const HttpRequest& request);

    /// Starts the HTTP server on a background thread; returns the bound port.
    int start();
    /// Serves on the calling thread until stop().
    void listen();
    void stop();

    std::uint64_t height() const;
    Digest current_state_root() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ljt
