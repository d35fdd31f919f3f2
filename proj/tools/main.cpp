#include "cli.hpp"

#include <graphtopo/parallel.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iostream>

namespace {

std::size_t threads_from_env()
{
    const char* env = std::getenv("GRAPHTOPO_THREADS");
    if (!env || !*env) return 0;
    const std::string text(env);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw graphtopo::ParamError("GRAPHTOPO_THREADS must be a nonnegative integer, got '" + text + "'");
    }
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace graphtopo;

    CLI::App app{"Network topology inference from nodal observations", "graphtopo"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();

    std::size_t threads = 0;
    std::string config;
    auto* threads_opt = app.add_option("--threads", threads,
                                       "Worker thread cap, 0 = hardware concurrency (default: $GRAPHTOPO_THREADS)")
                            ->check(CLI::NonNegativeNumber);
    app.add_option("--config", config, "JSON config file; command-line flags take precedence")
        ->check(CLI::ExistingFile);
    const auto commands = cli::register_commands(app);

    std::vector<std::string> names;
    for (const auto& c : commands) names.push_back(c.app->get_name());
    std::vector<std::string> args(argv + 1, argv + argc);

    try {
        args = cli::merge_config(args, names);
        std::reverse(args.begin(), args.end());
        app.parse(args);
        if (threads_opt->count() == 0) threads = threads_from_env();
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const auto parsed = app.get_subcommands();
        std::cerr << (parsed.empty() ? app.help() : parsed.front()->help());
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    if (threads > 0) set_thread_limit(threads);
    try {
        for (const auto& c : commands) {
            if (c.app->parsed()) c.run();
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
