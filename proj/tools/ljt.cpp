#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ljt/client.hpp"
#include "ljt/node.hpp"
#include "ljt/serialization.hpp"
#include "wallet.hpp"

namespace {

using ljt::Json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Cluster positions from either --csv FILE or --pos "x,y,z,..." (micro-sigma integers).
Json positions_body(const std::string& csv_path, const std::vector<std::uint64_t>& pos) {
    if (!csv_path.empty()) return Json{{"csv", read_file(csv_path)}};
    return Json{{"pos", pos}};
}

int print_response(const ljt::ApiResponse& r) {
    std::cout << r.body.dump(2) << "\n";
    return r.status >= 200 && r.status < 300 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lennard-Jones token client"};
    app.require_subcommand(1);
    std::string node_url = ljt::default_node_url();

    // wallet
    auto* wallet = app.add_subcommand("wallet", "manage local named addresses");
    wallet->require_subcommand(1);
    auto* wallet_new = wallet->add_subcommand("new", "create a random address");
    std::string wallet_name;
    wallet_new->add_option("--name", wallet_name, "label (default: walletN)");
    auto* wallet_list = wallet->add_subcommand("list", "list addresses");

    // genesis
    auto* genesis = app.add_subcommand("genesis", "write a genesis file");
    std::string owner, out_path;
    std::vector<std::string> allocs;
    ljt::GenesisConfig gen;
    std::string delta = "3/100";
    genesis->add_option("--owner", owner, "contract owner (address or wallet name)")->required();
    genesis->add_option("--alloc", allocs, "ADDRESS=NATIVE initial native balance (repeatable)");
    genesis->add_option("--timestamp", gen.timestamp, "genesis timestamp");
    genesis->add_option("--delta", delta, "improvement threshold NUM/DEN");
    genesis->add_option("--rho", gen.params.rho.value, "mining reward");
    genesis->add_option("--owner-min-rate", gen.params.owner_min_rate.tokens_per_coin, "owner rate floor");
    genesis->add_option("--grant", gen.params.initial_owner_grant.value, "initial owner grant");
    genesis->add_option("--out", out_path, "output path")->required();

    // submit
    auto* submit = app.add_subcommand("submit", "submit a transaction");
    submit->require_subcommand(1);
    std::string from;
    submit->add_option("--node", node_url, "node URL");
    submit->add_option("--from", from, "caller (address or wallet name)")->required();
    std::string csv_path, target;
    std::vector<std::uint64_t> pos;
    std::uint64_t n = 0, value = 0;
    auto* s_mine = submit->add_subcommand("mine", "MineToken");
    auto* mine_csv = s_mine->add_option("--csv", csv_path, "positions CSV");
    s_mine->add_option("--pos", pos, "micro-sigma coordinates")->delimiter(',')->excludes(mine_csv);
    auto* s_access = submit->add_subcommand("access", "GainAccess");
    s_access->add_option("n", n, "cluster size")->required();
    auto* s_rate = submit->add_subcommand("rate", "SetExchangeRate");
    s_rate->add_option("rate", value, "LJT per coin")->required();
    auto* s_buy = submit->add_subcommand("buy", "BuyToken");
    s_buy->add_option("--seller", target, "seller")->required();
    s_buy->add_option("--value", value, "native units paid")->required();
    auto* s_transfer = submit->add_subcommand("transfer", "TransferLJT");
    s_transfer->add_option("--to", target, "recipient")->required();
    s_transfer->add_option("--amount", value, "LJT")->required();
    auto* s_faucet = submit->add_subcommand("faucet", "dev faucet");
    s_faucet->add_option("value", value, "native units")->required();

    // query
    auto* query = app.add_subcommand("query", "read-only queries");
    query->require_subcommand(1);
    query->add_option("--node", node_url, "node URL");
    std::string caller;
    query->add_option("--from", caller, "caller for /data (address or wallet name)");
    std::vector<CLI::App*> by_address;
    for (const char* name : {"balance", "native", "access", "rates"}) {
        auto* q = query->add_subcommand(name, std::string("GET /") + name + "/{addr}");
        q->add_option("address", target, "address or wallet name")->required();
        by_address.push_back(q);
    }
    auto* q_data = query->add_subcommand("data", "GET /data/{n}");
    q_data->add_option("n", n, "cluster size")->required();
    auto* q_top_bal = query->add_subcommand("top-balances", "GET /top/balances");
    auto* q_top_rate = query->add_subcommand("top-rates", "GET /top/rates");
    auto* q_head = query->add_subcommand("head", "GET /chain/head");
    auto* q_blocks = query->add_subcommand("blocks", "GET /chain/blocks");
    std::optional<std::uint64_t> from_h, to_h;
    q_blocks->add_option("--from-height", from_h);
    q_blocks->add_option("--to-height", to_h);
    auto* q_root = query->add_subcommand("state-root", "GET /state-root");
    auto* q_calc = query->add_subcommand("calc-energy", "POST /calc-energy");
    auto* calc_csv = q_calc->add_option("--csv", csv_path, "positions CSV");
    q_calc->add_option("--pos", pos, "micro-sigma coordinates")->delimiter(',')->excludes(calc_csv);

    // verify
    auto* verify = app.add_subcommand("verify", "verify a block log against a genesis file");
    std::string genesis_path, log_path;
    verify->add_option("--genesis", genesis_path)->required()->check(CLI::ExistingFile);
    verify->add_option("--log", log_path)->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (wallet_new->parsed()) {
            const auto path = ljt::tools::wallet_path();
            auto wallets = ljt::tools::load_wallets(path);
            if (wallet_name.empty()) wallet_name = "wallet" + std::to_string(wallets.size() + 1);
            for (const auto& w : wallets) {
                if (w.name == wallet_name) throw std::runtime_error("wallet '" + wallet_name + "' exists");
            }
            wallets.push_back({wallet_name, ljt::tools::random_address()});
            ljt::tools::save_wallets(path, wallets);
            std::cout << wallet_name << " " << wallets.back().address.to_hex() << "\n";
            return 0;
        }
        if (wallet_list->parsed()) {
            for (const auto& w : ljt::tools::load_wallets(ljt::tools::wallet_path())) {
                std::cout << w.name << " " << w.address.to_hex() << "\n";
            }
            return 0;
        }
        if (genesis->parsed()) {
            gen.params.owner = ljt::tools::resolve_address(owner);
            const auto slash = delta.find('/');
            if (slash == std::string::npos) throw std::runtime_error("--delta must be NUM/DEN");
            gen.params.delta = {std::stoull(delta.substr(0, slash)), std::stoull(delta.substr(slash + 1))};
            for (const auto& a : allocs) {
                const auto eq = a.find('=');
                if (eq == std::string::npos) throw std::runtime_error("--alloc must be ADDRESS=NATIVE");
                gen.native_allocations[ljt::tools::resolve_address(a.substr(0, eq))] =
                    ljt::NativeAmount{std::stoull(a.substr(eq + 1))};
            }
            gen.params.validate();
            ljt::write_genesis(out_path, gen);
            std::cout << "genesis state_root " << ljt::to_hex(ljt::state_root(gen.initial_state())) << "\n";
            return 0;
        }
        if (verify->parsed()) {
            const auto g = ljt::load_genesis(genesis_path);
            const auto lines = ljt::read_log_lines(log_path);
            const auto verdict = ljt::verify_log(g, lines);
            if (verdict) {
                std::cout << "ok " << lines.size() << " blocks\n";
                return 0;
            }
            std::cout << "FAIL height " << verdict.height << ": " << ljt::to_string(verdict.reason) << " ("
                      << verdict.detail << ")\n";
            return 1;
        }

        ljt::HttpNodeClient client(node_url);
        if (submit->parsed()) {
            const auto who = ljt::tools::resolve_address(from);
            if (s_faucet->parsed()) return print_response(client.post("/dev/faucet", Json{{"value", value}}, who));
            Json body;
            if (s_mine->parsed()) {
                body = positions_body(csv_path, pos);
                body["type"] = "MineToken";
            } else if (s_access->parsed()) {
                body = ljt::encode(ljt::Call{ljt::GainAccessCall{n}});
            } else if (s_rate->parsed()) {
                body = ljt::encode(ljt::Call{ljt::SetExchangeRateCall{{value}}});
            } else if (s_buy->parsed()) {
                body = ljt::encode(ljt::Call{
                    ljt::BuyTokenCall{ljt::tools::resolve_address(target), ljt::NativeAmount{value}}});
            } else {
                body = ljt::encode(ljt::Call{
                    ljt::TransferCall{ljt::tools::resolve_address(target), ljt::TokenAmount{value}}});
            }
            return print_response(client.post("/tx", body, who));
        }
        for (auto* q : by_address) {
            if (q->parsed()) {
                return print_response(client.get(
                    "/" + q->get_name() + "/" + ljt::tools::resolve_address(target).to_hex()));
            }
        }
        std::optional<ljt::Address> who;
        if (!caller.empty()) who = ljt::tools::resolve_address(caller);
        if (q_data->parsed()) return print_response(client.get("/data/" + std::to_string(n), who));
        if (q_top_bal->parsed()) return print_response(client.get("/top/balances"));
        if (q_top_rate->parsed()) return print_response(client.get("/top/rates"));
        if (q_head->parsed()) return print_response(client.get("/chain/head"));
        if (q_root->parsed()) return print_response(client.get("/state-root"));
        if (q_blocks->parsed()) {
            std::string path = "/chain/blocks?from=" + std::to_string(from_h.value_or(0));
            if (to_h) path += "&to=" + std::to_string(*to_h);
            return print_response(client.get(path));
        }
        if (q_calc->parsed()) return print_response(client.post("/calc-energy", positions_body(csv_path, pos)));
    } catch (const std::exception& e) {
        std::cerr << "ljt: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
