#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "vqloc/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vqloc: visual query localization over region-token stores"};
    app.require_subcommand(1);
    vqloc::cli::add_synth(app);
    vqloc::cli::add_prepare(app);
    vqloc::cli::add_localize(app);
    vqloc::cli::add_evaluate(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const vqloc::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
