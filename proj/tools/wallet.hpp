#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ljt/token_ledger.hpp"

// Named addresses kept in a local JSON file. Identity is simulated through
// the X-Caller header, so a wallet holds no keys.
namespace ljt::tools {

struct WalletEntry {
    std::string name;
    Address address;
};

std::filesystem::path wallet_path();  // LJT_WALLET_FILE or ~/.ljt/wallets.json
std::vector<WalletEntry> load_wallets(const std::filesystem::path& path);
void save_wallets(const std::filesystem::path& path, const std::vector<WalletEntry>& wallets);
Address random_address();

/// Accepts a 0x address or a wallet name.
Address resolve_address(const std::string& text);

}  // namespace ljt::tools
