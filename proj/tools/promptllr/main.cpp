#include <iostream>

#include "promptllr/common.hpp"
#include "promptllr/error.hpp"
#include "promptllr/version.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitCompute = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace promptllr;
  CLI::App app{"Evidence-based LLR scores for choosing between linear probing and visual prompting"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  cli::Globals globals;
  app.add_option("--threads", globals.threads, "Worker threads for per-prompt fits (0 = auto, capped by LLR_THREADS)")
      ->check(CLI::NonNegativeNumber);

  cli::Runner run;
  for (auto reg : {&cli::register_score, &cli::register_rank, &cli::register_prompt, &cli::register_baseline,
                   &cli::register_mix_sweep, &cli::register_synth, &cli::register_inspect}) {
    reg(app, globals, run);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (run) run();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_validation_error(e.code()) ? kExitValidation : kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
}
