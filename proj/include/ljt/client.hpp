#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "ljt/chain.hpp"
#include "ljt/serialization.hpp"

namespace ljt {

/// Transport failure talking to a node (connection refused, timeout, ...).
class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ApiResponse {
    int status = 0;
    Json body;
};

/// What the miner needs from a node.
class NodeClient {
public:
    virtual ~NodeClient() = default;

    /// Stored record for size n, or nullopt when `caller` may not read it.
    virtual std::optional<ClusterRecord> view_data(const Address& caller, std::size_t n) = 0;

    /// Submits a transaction as `caller` and returns its receipt, whether the
    /// contract call succeeded or not.
    virtual Receipt submit(const Address& caller, const Call& call) = 0;
};

/// JSON-over-HTTP client for the node endpoints.
class HttpNodeClient : public NodeClient {
public:
    explicit HttpNodeClient(std::string base_url,
                            std::chrono::milliseconds timeout = std::chrono::seconds(30));
    ~HttpNodeClient() override;

    ApiResponse get(const std::string& path, const std::optional<Address>& caller = {});
    ApiResponse post(const std::string& path, const Json& body,
                     const std::optional<Address>& caller = {});

    std::optional<ClusterRecord> view_data(const Address& caller, std::size_t n) override;
    Receipt submit(const Address& caller, const Call& call) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Node URL from LJT_NODE_URL, defaulting to http://127.0.0.1:8545.
std::string default_node_url();

}  // namespace ljt
