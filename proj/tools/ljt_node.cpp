#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "ljt/error.hpp"
#include "ljt/node.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Lennard-Jones token node"};
    std::string config_path;
    app.add_option("--config", config_path, "node config JSON")->required()->check(CLI::ExistingFile);
    CLI11_PARSE(app, argc, argv);

    // Handle SIGINT/SIGTERM synchronously on the main thread.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try {
        auto config = ljt::NodeConfig::load(config_path);
        ljt::Node node(config);
        const int port = node.start();
        std::cout << "ljt-node listening on " << config.host << ":" << port << " height "
                  << node.height() << std::endl;
        int sig = 0;
        sigwait(&signals, &sig);
        node.stop();
    } catch (const ljt::Error& e) {
        std::cerr << "ljt-node: " << e.what() << "\n";
        return e.code() == ljt::ErrorCode::CorruptLog ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "ljt-node: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
