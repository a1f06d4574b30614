#include "ljt/client.hpp"

#include <httplib.h>

#include <cstdlib>

namespace ljt {

struct HttpNodeClient::Impl {
    explicit Impl(const std::string& url) : client(url) {}
    httplib::Client client;
};

HttpNodeClient::HttpNodeClient(std::string base_url, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(base_url)) {
    if (!impl_->client.is_valid()) throw NetworkError("invalid node URL: " + base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    impl_->client.set_connection_timeout(secs.count(), usecs.count());
    impl_->client.set_read_timeout(secs.count(), usecs.count());
    impl_->client.set_write_timeout(secs.count(), usecs.count());
}

HttpNodeClient::~HttpNodeClient() = default;

namespace {

httplib::Headers caller_headers(const std::optional<Address>& caller) {
    httplib::Headers headers;
    if (caller) headers.emplace("X-Caller", caller->to_hex());
    return headers;
}

ApiResponse to_response(const httplib::Result& res, const std::string& path) {
    if (!res) throw NetworkError(path + ": " + httplib::to_string(res.error()));
    ApiResponse out;
    out.status = res->status;
    out.body = Json::parse(res->body, nullptr, false);
    if (out.body.is_discarded()) out.body = Json{{"raw", res->body}};
    return out;
}

[[noreturn]] void throw_api_error(const ApiResponse& r) {
    const auto it = r.body.find("error");
    if (it != r.body.end() && it->is_string()) {
        const auto message = r.body.value("message", std::string{});
        try {
            throw Error(error_code_from_string(it->get<std::string>()), message);
        } catch (const std::invalid_argument&) {
            // not a contract error name
        }
    }
    throw std::runtime_error("node returned HTTP " + std::to_string(r.status) + ": " + r.body.dump());
}

}  // namespace

ApiResponse HttpNodeClient::get(const std::string& path, const std::optional<Address>& caller) {
    return to_response(impl_->client.Get(path, caller_headers(caller)), path);
}

ApiResponse HttpNodeClient::post(const std::string& path, const Json& body,
                                 const std::optional<Address>& caller) {
    return to_response(
        impl_->client.Post(path, caller_headers(caller), canonical(body), "application/json"), path);
}

std::optional<ClusterRecord> HttpNodeClient::view_data(const Address& caller, std::size_t n) {
    const auto r = get("/data/" + std::to_string(n), caller);
    if (r.status == 403) return std::nullopt;
    if (r.status != 200) throw_api_error(r);
    return ClusterRecord{{r.body.at("energy").get<std::int64_t>()},
                         decode_cluster_config(r.body.at("pos")),
                         decode_address(r.body.at("contributor"))};
}

Receipt HttpNodeClient::submit(const Address& caller, const Call& call) {
    const auto r = post("/tx", encode(call), caller);
    if ((r.status == 200 || r.status == 422) && r.body.contains("receipt")) {
        return decode_receipt(r.body.at("receipt"));
    }
    throw_api_error(r);
}

std::string default_node_url() {
    if (const char* env = std::getenv("LJT_NODE_URL"); env != nullptr && *env != '\0') return env;
    return "http://127.0.0.1:8545";
}

}  // namespace ljt
