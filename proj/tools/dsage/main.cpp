#include <iostream>

#include "common.hpp"

int main(int argc, char** argv) {
  using namespace dsage::cli;

  CLI::App app{"dsage: drought early-warning expert system"};
  app.require_subcommand(1);
  register_kb_commands(app);
  register_consult_command(app);
  register_serve_command(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return code(ExitStatus::usage);
  } catch (const Failure& f) {
    if (!f.message.empty()) std::cerr << "dsage: " << f.message << "\n";
    return code(f.status);
  }
  return code(ExitStatus::success);
}
