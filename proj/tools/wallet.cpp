#include "wallet.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>

#include "ljt/node.hpp"
#include "ljt/serialization.hpp"

namespace ljt::tools {

std::filesystem::path wallet_path() {
    if (const char* env = std::getenv("LJT_WALLET_FILE"); env != nullptr && *env != '\0') return env;
    const char* home = std::getenv("HOME");
    return std::filesystem::path(home ? home : ".") / ".ljt" / "wallets.json";
}

std::vector<WalletEntry> load_wallets(const std::filesystem::path& path) {
    std::vector<WalletEntry> out;
    std::ifstream in(path);
    if (!in) return out;
    const auto j = Json::parse(in);
    for (const auto& w : j.at("wallets")) {
        out.push_back({w.at("name").get<std::string>(), decode_address(w.at("address"))});
    }
    return out;
}

void save_wallets(const std::filesystem::path& path, const std::vector<WalletEntry>& wallets) {
    Json list = Json::array();
    for (const auto& w : wallets) list.push_back({{"address", w.address.to_hex()}, {"name", w.name}});
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    out << Json{{"wallets", list}}.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

Address random_address() {
    std::random_device rd;
    std::array<std::uint8_t, 20> bytes{};
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rd());
    return Address(bytes);
}

Address resolve_address(const std::string& text) {
    if (text.rfind("0x", 0) == 0) return Address::from_hex(text);
    for (const auto& w : load_wallets(wallet_path())) {
        if (w.name == text) return w.address;
    }
    throw std::invalid_argument("unknown wallet '" + text + "'");
}

}  // namespace ljt::tools
