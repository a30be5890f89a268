#include <iostream>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "payattr/error.hpp"

int main(int argc, char** argv) {
  payattr::cli::Context ctx;
  CLI::App app{"payattr: latent attribute prediction from payment notes"};
  app.set_version_flag("--version", "payattr 0.1.0");
  app.add_option("--config", ctx.config_path, "JSON file overriding defaults, keyed by command");
  app.require_subcommand(1);
  payattr::cli::register_data_commands(app, ctx);
  payattr::cli::register_model_commands(app, ctx);
  payattr::cli::register_harvest_commands(app, ctx);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const payattr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
