#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ljt/client.hpp"
#include "ljt/miner.hpp"
#include "ljt/serialization.hpp"
#include "wallet.hpp"

namespace {

ljt::Json encode_report(const ljt::MineReport& report) {
    ljt::Json outcomes = ljt::Json::array();
    for (const auto& o : report.outcomes) {
        ljt::Json j{{"n", o.n}, {"status", std::string(ljt::to_string(o.status))}, {"reward", o.reward.value}};
        if (o.stored_energy) j["stored_energy"] = o.stored_energy->micro;
        if (o.candidate_energy) j["candidate_energy"] = o.candidate_energy->micro;
        if (!o.message.empty()) j["message"] = o.message;
        outcomes.push_back(std::move(j));
    }
    return ljt::Json{{"accepted", report.accepted()},
                     {"outcomes", std::move(outcomes)},
                     {"total_reward", report.total_reward().value}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"basin-hopping miner"};
    std::string node_url = ljt::default_node_url();
    std::string address;
    std::string csv_dir;
    std::string delta = "3/100";
    ljt::MineLoopOptions options;
    app.add_option("--node", node_url, "node URL");
    app.add_option("--n-from", options.n_from, "smallest cluster size")->check(CLI::Range(2, 50));
    app.add_option("--n-to", options.n_to, "largest cluster size")->check(CLI::Range(2, 50));
    app.add_option("--hops", options.optimizer.hops, "basin-hopping steps per size");
    app.add_option("--seed", options.optimizer.seed, "PRNG seed (size n uses seed + n)");
    app.add_option("--step", options.optimizer.step, "perturbation half-width, sigma");
    app.add_option("--temp", options.optimizer.temperature, "Metropolis temperature, epsilon");
    app.add_option("--address", address, "miner address or wallet name (default: first wallet)");
    app.add_option("--csv-dir", csv_dir, "write nN.csv position files here");
    app.add_option("--delta", delta, "local improvement pre-check NUM/DEN");
    CLI11_PARSE(app, argc, argv);

    try {
        ljt::Address miner;
        if (!address.empty()) {
            miner = ljt::tools::resolve_address(address);
        } else {
            const auto wallets = ljt::tools::load_wallets(ljt::tools::wallet_path());
            if (wallets.empty()) throw std::runtime_error("no --address and no wallets; run `ljt wallet new`");
            miner = wallets.front().address;
        }
        const auto slash = delta.find('/');
        if (slash == std::string::npos) throw std::runtime_error("--delta must be NUM/DEN");
        options.delta = {std::stoull(delta.substr(0, slash)), std::stoull(delta.substr(slash + 1))};
        options.optimizer.validate();

        ljt::HttpNodeClient client(node_url);
        const auto report = ljt::mine_loop(client, miner, options);
        if (!csv_dir.empty()) {
            std::filesystem::create_directories(csv_dir);
            for (const auto& o : report.outcomes) {
                if (!o.config) continue;
                std::ofstream out(std::filesystem::path(csv_dir) / ("n" + std::to_string(o.n) + ".csv"));
                out << ljt::format_positions_csv(*o.config);
            }
        }
        std::cout << ljt::canonical(encode_report(report)) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "miner: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
