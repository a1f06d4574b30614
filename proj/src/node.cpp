#include "ljt/node.hpp"

#include <fcntl.h>
#include <httplib.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <fstream>
#include <future>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include "ljt/error.hpp"

namespace ljt {

// --- configuration and files -------------------------------------------------

NodeConfig NodeConfig::from_json(const Json& j, const std::filesystem::path& base_dir) {
    NodeConfig cfg;
    const auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    if (j.contains("listen")) {
        const auto listen = j.at("listen").get<std::string>();
        const auto colon = listen.rfind(':');
        if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "listen must be host:port");
        cfg.host = listen.substr(0, colon);
        cfg.port = std::stoi(listen.substr(colon + 1));
    }
    if (j.contains("block_log")) cfg.block_log = resolve(j.at("block_log").get<std::string>());
    if (j.contains("genesis")) cfg.genesis = resolve(j.at("genesis").get<std::string>());
    if (j.contains("seal_interval")) {
        const auto& v = j.at("seal_interval");
        if (v.is_string()) {
            if (v.get<std::string>() != "on-submit") {
                throw Error(ErrorCode::ParseError, "seal_interval must be seconds or \"on-submit\"");
            }
        } else {
            const double secs = v.get<double>();
            if (!(secs > 0.0)) throw Error(ErrorCode::ParseError, "seal_interval must be positive");
            cfg.seal_interval = secs;
        }
    }
    if (j.contains("dev_faucet")) cfg.dev_faucet = j.at("dev_faucet").get<bool>();
    if (j.contains("queue_capacity")) cfg.queue_capacity = j.at("queue_capacity").get<std::size_t>();
    if (j.contains("dev_wallets")) {
        for (const auto& w : j.at("dev_wallets")) cfg.dev_wallets.push_back(decode_address(w));
    }
    return cfg;
}

NodeConfig NodeConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

std::vector<std::string> read_log_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path, std::ios::binary);
    if (!in) return lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

namespace {

void write_all(int fd, const std::string& data, const std::filesystem::path& path) {
    std::size_t off = 0;
    while (off < data.size()) {
        const auto n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error("write " + path.string() + ": " + std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
    auto tmp = path;
    tmp += ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) throw std::runtime_error("open " + tmp.string() + ": " + std::strerror(errno));
    try {
        write_all(fd, data, tmp);
        if (::fsync(fd) != 0) throw std::runtime_error("fsync " + tmp.string());
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    std::filesystem::rename(tmp, path);
    auto dir = path.parent_path();
    if (dir.empty()) dir = ".";
    if (const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY); dfd >= 0) {
        ::fsync(dfd);
        ::close(dfd);
    }
}

}  // namespace

void write_log_atomic(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    std::string data;
    for (const auto& line : lines) {
        data += line;
        data += '\n';
    }
    write_file_atomic(path, data);
}

GenesisConfig load_genesis(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open genesis file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto text = buf.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    auto genesis = decode_genesis(parse_canonical(text));
    genesis.params.validate();
    return genesis;
}

void write_genesis(const std::filesystem::path& path, const GenesisConfig& genesis) {
    write_file_atomic(path, canonical(encode(genesis)) + "\n");
}

// --- node ----------------------------------------------------------------------

namespace {

struct Snapshot {
    ChainState state;
    std::uint64_t height = 0;
    Digest hash{};
    Digest prev_hash{};
    Digest state_root{};
    std::uint64_t timestamp = 0;
};

struct SealOutcome {
    Receipt receipt;
    std::uint64_t height = 0;
    Digest hash{};
    Digest state_root{};
};

struct Pending {
    Transaction tx;
    std::promise<SealOutcome> promise;
};

std::uint64_t system_clock_seconds() {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::seconds>(
                                          std::chrono::system_clock::now().time_since_epoch())
                                          .count());
}

HttpResponse error_response(int status, std::string_view code, const std::string& message) {
    return {status, Json{{"error", std::string(code)}, {"message", message}}};
}

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::BadLength:
        case ErrorCode::CoordOutOfRange:
        case ErrorCode::NegativeCoordinate:
        case ErrorCode::CoincidentParticles:
        case ErrorCode::BadClusterSize:
        case ErrorCode::BadParams:
            return 400;
        case ErrorCode::AccessDenied:
            return 403;
        default:
            return 422;
    }
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    while (!path.empty()) {
        if (path.front() == '/') {
            path.remove_prefix(1);
            continue;
        }
        const auto slash = path.find('/');
        parts.push_back(path.substr(0, slash));
        if (slash == std::string_view::npos) break;
        path.remove_prefix(slash);
    }
    return parts;
}

std::uint64_t parse_uint(std::string_view text, const char* what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + std::string(text) + "'");
    }
    return v;
}

Address parse_address(std::string_view text) {
    try {
        return Address::from_hex(text);
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::ParseError, "bad address '" + std::string(text) + "': " + e.what());
    }
}

Json parse_body(const std::string& body) {
    try {
        return Json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("request body: ") + e.what());
    }
}

// MineToken and /calc-energy accept either fixed-point "pos" or position CSV.
std::vector<std::uint64_t> positions_from(const Json& body) {
    if (body.contains("csv")) {
        if (!body.at("csv").is_string()) throw Error(ErrorCode::ParseError, "csv must be a string");
        const auto config = parse_positions_csv(body.at("csv").get<std::string>());
        return {config.coords().begin(), config.coords().end()};
    }
    const auto call = decode_call(Json{{"type", "MineToken"}, {"pos", body.value("pos", Json())}});
    return std::get<MineTokenCall>(call).pos;
}

Json block_summary(std::uint64_t height, const Digest& hash, const Digest& root) {
    return Json{{"height", height}, {"hash", to_hex(hash)}, {"state_root", to_hex(root)}};
}

Chain open_chain(const NodeConfig& config, const GenesisConfig& genesis,
                 std::vector<std::string>& lines) {
    lines = read_log_lines(config.block_log);
    if (lines.empty()) {
        Chain chain(genesis);
        lines.push_back(block_to_line(chain.head()));
        write_log_atomic(config.block_log, lines);
        return chain;
    }
    const auto verdict = verify_log(genesis, lines);
    if (!verdict) {
        throw Error(ErrorCode::CorruptLog, "block log " + config.block_log.string() + " height " +
                                               std::to_string(verdict.height) + ": " +
                                               std::string(to_string(verdict.reason)) + " (" +
                                               verdict.detail + ")");
    }
    std::vector<Block> blocks;
    blocks.reserve(lines.size());
    for (const auto& line : lines) blocks.push_back(block_from_line(line));
    return Chain::replay(genesis, blocks);
}

}  // namespace

struct Node::Impl {
    Impl(NodeConfig cfg, GenesisConfig gen, std::function<std::uint64_t()> clk)
        : config(std::move(cfg)),
          genesis(std::move(gen)),
          clock(clk ? std::move(clk) : system_clock_seconds),
          chain(open_chain(config, genesis, lines)) {
        reserved_nonces = chain.state().nonces;
        publish();
        if (config.seal_interval) sealer = std::thread([this] { seal_loop(); });
    }

    ~Impl() { shutdown(); }

    void shutdown() {
        {
            std::lock_guard lock(queue_mutex);
            stopping = true;
        }
        queue_cv.notify_all();
        if (sealer.joinable()) sealer.join();
        server.stop();
        if (server_thread.joinable()) server_thread.join();
    }

    std::shared_ptr<const Snapshot> snapshot() const {
        std::lock_guard lock(snapshot_mutex);
        return current;
    }

    // Caller holds seal_mutex (or is the constructor).
    void publish() {
        auto snap = std::make_shared<Snapshot>();
        {
            std::shared_lock lock(chain_mutex);
            const auto& head = chain.head();
            snap->state = chain.state();
            snap->height = head.height;
            snap->hash = head.hash;
            snap->prev_hash = head.prev_hash;
            snap->state_root = head.state_root;
            snap->timestamp = head.timestamp;
        }
        std::lock_guard lock(snapshot_mutex);
        current = std::move(snap);
    }

    void seal_pending() {
        std::lock_guard seal_lock(seal_mutex);
        std::vector<Pending> batch;
        {
            std::lock_guard lock(queue_mutex);
            while (!queue.empty()) {
                batch.push_back(std::move(queue.front()));
                queue.pop_front();
            }
        }
        if (batch.empty()) return;
        std::vector<Transaction> txs;
        txs.reserve(batch.size());
        for (const auto& p : batch) txs.push_back(p.tx);

        try {
            std::vector<Receipt> receipts;
            Block block;
            {
                std::unique_lock lock(chain_mutex);
                block = chain.seal_block(txs, clock());
                receipts = chain.receipts(block.height);
            }
            lines.push_back(block_to_line(block));
            try {
                write_log_atomic(config.block_log, lines);
            } catch (...) {
                // Not durable: drop the block from memory as well.
                lines.pop_back();
                std::vector<Block> blocks;
                {
                    std::shared_lock lock(chain_mutex);
                    blocks.assign(chain.blocks().begin(), chain.blocks().end() - 1);
                }
                std::unique_lock lock(chain_mutex);
                chain = Chain::replay(genesis, blocks);
                throw;
            }
            publish();
            for (std::size_t i = 0; i < batch.size(); ++i) {
                batch[i].promise.set_value(
                    SealOutcome{receipts[i], block.height, block.hash, block.state_root});
            }
        } catch (...) {
            {
                std::lock_guard lock(queue_mutex);
                std::shared_lock chain_lock(chain_mutex);
                reserved_nonces = chain.state().nonces;
                for (const auto& p : queue) ++reserved_nonces[p.tx.caller];
            }
            for (auto& p : batch) p.promise.set_exception(std::current_exception());
        }
    }

    void seal_loop() {
        const auto interval = std::chrono::duration<double>(*config.seal_interval);
        std::unique_lock lock(queue_mutex);
        while (!stopping) {
            queue_cv.wait_for(lock, interval, [this] { return stopping; });
            lock.unlock();
            seal_pending();
            lock.lock();
        }
        // Submissions queued before shutdown still get their block.
        lock.unlock();
        seal_pending();
    }

    HttpResponse submit(const Address& caller, Call call) {
        std::future<SealOutcome> future;
        {
            std::lock_guard lock(queue_mutex);
            if (stopping) return error_response(503, "Unavailable", "node is shutting down");
            if (in_flight >= config.queue_capacity) {
                return error_response(503, "QueueFull", "transaction queue is full");
            }
            auto nonce = reserved_nonces.try_emplace(caller, 0).first;
            Pending p{Transaction{caller, nonce->second, std::move(call)}, {}};
            ++nonce->second;
            future = p.promise.get_future();
            queue.push_back(std::move(p));
            ++in_flight;
        }
        struct Release {
            Impl& impl;
            ~Release() {
                std::lock_guard lock(impl.queue_mutex);
                --impl.in_flight;
            }
        } release{*this};

        if (!config.seal_interval) seal_pending();
        const auto outcome = future.get();
        Json body{{"receipt", encode(outcome.receipt)},
                  {"block", block_summary(outcome.height, outcome.hash, outcome.state_root)}};
        if (outcome.receipt.error) {
            body["error"] = std::string(to_string(*outcome.receipt.error));
            body["message"] = outcome.receipt.message;
            return {422, std::move(body)};
        }
        return {200, std::move(body)};
    }

    Address require_caller(const HttpRequest& request) const {
        if (!request.caller) throw Error(ErrorCode::ParseError, "missing X-Caller header");
        return parse_address(*request.caller);
    }

    HttpResponse handle_get(const HttpRequest& request, const std::vector<std::string_view>& parts) {
        const auto snap = snapshot();
        const auto& world = snap->state.world;
        if (parts.size() == 2 && parts[0] == "balance") {
            const auto a = parse_address(parts[1]);
            return {200, Json{{"address", a.to_hex()}, {"balance", world.ledger.balance_of(a).value}}};
        }
        if (parts.size() == 2 && parts[0] == "native") {
            const auto a = parse_address(parts[1]);
            return {200, Json{{"address", a.to_hex()},
                              {"native", world.ledger.native_balance_of(a).value}}};
        }
        if (parts.size() == 2 && parts[0] == "access") {
            const auto a = parse_address(parts[1]);
            Json sizes = Json::array();
            for (auto it = world.contract.access.lower_bound({a, 0});
                 it != world.contract.access.end() && it->first == a; ++it) {
                sizes.push_back(it->second);
            }
            return {200, Json{{"address", a.to_hex()}, {"access", std::move(sizes)}}};
        }
        if (parts.size() == 2 && parts[0] == "rates") {
            const auto a = parse_address(parts[1]);
            return {200, Json{{"address", a.to_hex()},
                              {"rate", effective_rate(world, a).tokens_per_coin},
                              {"set", world.contract.rates.contains(a)}}};
        }
        if (parts.size() == 2 && parts[0] == "data") {
            const auto n = parse_uint(parts[1], "cluster size");
            const auto caller = require_caller(request);
            const auto& record =
                view_data(world, caller, static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 20)));
            return {200, Json{{"n", n},
                              {"energy", record.energy.micro},
                              {"pos", encode(record.config)},
                              {"contributor", record.contributor.to_hex()}}};
        }
        if (parts.size() == 2 && parts[0] == "top" && parts[1] == "balances") {
            Json entries = Json::array();
            for (const auto& [a, v] : view_top_balance(world)) {
                entries.push_back({{"address", a.to_hex()}, {"balance", v.value}});
            }
            return {200, Json{{"entries", std::move(entries)}}};
        }
        if (parts.size() == 2 && parts[0] == "top" && parts[1] == "rates") {
            Json entries = Json::array();
            for (const auto& [a, r] : view_top_rate(world)) {
                entries.push_back({{"address", a.to_hex()}, {"rate", r.tokens_per_coin}});
            }
            return {200, Json{{"entries", std::move(entries)}}};
        }
        if (parts.size() == 2 && parts[0] == "chain" && parts[1] == "head") {
            return {200, Json{{"height", snap->height},
                              {"hash", to_hex(snap->hash)},
                              {"prev_hash", to_hex(snap->prev_hash)},
                              {"state_root", to_hex(snap->state_root)},
                              {"timestamp", snap->timestamp}}};
        }
        if (parts.size() == 2 && parts[0] == "chain" && parts[1] == "blocks") {
            return blocks_response(request, snap->height);
        }
        if (parts.size() == 1 && parts[0] == "state-root") {
            return {200, Json{{"height", snap->height}, {"state_root", to_hex(snap->state_root)}}};
        }
        if (parts.size() == 2 && parts[0] == "dev" && parts[1] == "wallets" && config.dev_faucet) {
            std::set<Address> wallets(config.dev_wallets.begin(), config.dev_wallets.end());
            wallets.insert(genesis.params.owner);
            for (const auto& [a, v] : genesis.native_allocations) wallets.insert(a);
            Json list = Json::array();
            for (const auto& a : wallets) list.push_back(a.to_hex());
            return {200, Json{{"wallets", std::move(list)}}};
        }
        return error_response(404, "NotFound", "no such endpoint: " + request.path);
    }

    // Blocks up to the snapshot height only, so the response matches the snapshot.
    HttpResponse blocks_response(const HttpRequest& request, std::uint64_t head) {
        constexpr std::uint64_t kMaxBlocks = 1000;
        const auto from_it = request.query.find("from");
        const auto to_it = request.query.find("to");
        const std::uint64_t from = from_it == request.query.end() ? 0 : parse_uint(from_it->second, "from");
        std::uint64_t to = to_it == request.query.end() ? head : parse_uint(to_it->second, "to");
        if (from > head) return error_response(404, "NotFound", "no block at height " + std::to_string(from));
        if (to < from) return error_response(400, "ParseError", "to must not be below from");
        to = std::min({to, head, from + kMaxBlocks - 1});
        Json blocks = Json::array();
        std::shared_lock lock(chain_mutex);
        for (std::uint64_t h = from; h <= to; ++h) blocks.push_back(encode(chain.blocks()[h]));
        return {200, Json{{"blocks", std::move(blocks)}}};
    }

    HttpResponse handle_post(const HttpRequest& request, const std::vector<std::string_view>& parts) {
        if (parts.size() == 1 && parts[0] == "tx") {
            const auto caller = require_caller(request);
            const auto body = parse_body(request.body);
            if (body.is_object() && body.value("type", "") == "MineToken") {
                return submit(caller, MineTokenCall{positions_from(body)});
            }
            return submit(caller, decode_call(body));
        }
        if (parts.size() == 1 && parts[0] == "calc-energy") {
            const auto config = ClusterConfig::from_coords(positions_from(parse_body(request.body)));
            return {200, Json{{"n", config.particle_count()}, {"energy", calc_energy(config).micro}}};
        }
        if (parts.size() == 2 && parts[0] == "dev" && parts[1] == "faucet" && config.dev_faucet) {
            const auto caller = require_caller(request);
            const auto body = parse_body(request.body);
            return submit(caller, decode_call(Json{{"type", "FaucetNative"},
                                                   {"value", body.value("value", Json())}}));
        }
        return error_response(404, "NotFound", "no such endpoint: " + request.path);
    }

    HttpResponse handle(const HttpRequest& request) {
        try {
            const auto parts = split_path(request.path);
            if (request.method == "GET") return handle_get(request, parts);
            if (request.method == "POST") return handle_post(request, parts);
            return error_response(405, "MethodNotAllowed", request.method);
        } catch (const Error& e) {
            return error_response(status_for(e.code()), to_string(e.code()), e.what());
        } catch (const std::exception& e) {
            return error_response(500, "Internal", e.what());
        }
    }

    NodeConfig config;
    GenesisConfig genesis;
    std::function<std::uint64_t()> clock;
    std::vector<std::string> lines;
    Chain chain;
    mutable std::shared_mutex chain_mutex;
    std::mutex seal_mutex;

    mutable std::mutex snapshot_mutex;
    std::shared_ptr<const Snapshot> current;

    std::mutex queue_mutex;
    std::condition_variable queue_cv;
    std::deque<Pending> queue;
    std::map<Address, std::uint64_t> reserved_nonces;
    std::size_t in_flight = 0;
    bool stopping = false;
    std::thread sealer;

    httplib::Server server;
    std::thread server_thread;
};

Node::Node(NodeConfig config) : Node(config, load_genesis(config.genesis)) {}

Node::Node(NodeConfig config, GenesisConfig genesis, std::function<std::uint64_t()> clock)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(genesis), std::move(clock))) {
    auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
        HttpRequest request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [k, v] : req.params) request.query.emplace(k, v);
        if (req.has_header("X-Caller")) request.caller = req.get_header_value("X-Caller");
        request.body = req.body;
        const auto response = handle(request);
        res.status = response.status;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(canonical(response.body), "application/json");
    };
    auto& server = impl_->server;
    server.Get(".*", adapt);
    server.Post(".*", adapt);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Caller");
        res.status = 204;
    });
}

Node::~Node() = default;

HttpResponse Node::handle(const HttpRequest& request) { return impl_->handle(request); }

int Node::start() {
    auto& server = impl_->server;
    int port = impl_->config.port;
    if (port == 0) {
        port = server.bind_to_any_port(impl_->config.host);
    } else if (!server.bind_to_port(impl_->config.host, port)) {
        port = -1;
    }
    if (port < 0) {
        throw std::runtime_error("cannot bind " + impl_->config.host + ":" +
                                 std::to_string(impl_->config.port));
    }
    impl_->server_thread = std::thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();
    return port;
}

void Node::listen() {
    auto& server = impl_->server;
    if (!server.bind_to_port(impl_->config.host, impl_->config.port)) {
        throw std::runtime_error("cannot bind " + impl_->config.host + ":" +
                                 std::to_string(impl_->config.port));
    }
    server.listen_after_bind();
}

void Node::stop() { impl_->server.stop(); }

std::uint64_t Node::height() const { return impl_->snapshot()->height; }

Digest Node::current_state_root() const { return impl_->snapshot()->state_root; }

}  // namespace ljt
