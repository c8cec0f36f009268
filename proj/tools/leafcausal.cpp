#include <chrono>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "leafcausal/parallel.hpp"
#include "leafcausal/scenario.hpp"

namespace lc = leafcausal;

namespace {

constexpr int kPass = 0, kClaimFailed = 2, kUsage = 3, kRuntime = 4;

int exit_code_for(lc::ErrorCode code) {
  switch (code) {
    case lc::ErrorCode::ParseError:
    case lc::ErrorCode::UnknownKey:
    case lc::ErrorCode::MissingKey: return kUsage;
    default: return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leafcausal: causal structure and diameter checks for Lorentzian foliations"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = "out";
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  app.add_option("--out", out_dir, "directory for reports and tables")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0: all)")->capture_default_str();
  app.add_option("--seed", seed, "overrides the scenario seed");

  std::string scenario_file;
  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario_file, "scenario file")->required();
  auto* catalog = app.add_subcommand("catalog", "list the registered examples");
  auto* version = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    lc::set_thread_count(threads);
    if (version->parsed()) {
      std::cout << "leafcausal " << lc::version() << "\n";
      return kPass;
    }
    if (catalog->parsed()) {
      for (const auto& id : lc::list_examples()) {
        const auto& ex = lc::get_example(id);
        std::cout << id << "  " << ex.description << "\n";
        for (const auto& c : ex.expected)
          std::cout << "    " << c.task << " " << c.key << " (" << lc::to_string(c.source) << ")\n";
      }
      return kPass;
    }
    if (run->parsed()) {
      lc::Scenario sc = lc::load_scenario(scenario_file);
      if (seed) sc.seed = *seed;
      auto t0 = std::chrono::steady_clock::now();
      lc::Report rep = lc::run(sc);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      auto stem = std::filesystem::path(scenario_file).stem().string();
      for (const auto& p : lc::emit(rep, out_dir, stem)) std::cout << "wrote " << p.string() << "\n";
      for (const auto& c : rep.claims) {
        const char* status = !c.value ? "skip" : c.passed ? "pass" : "FAIL";
        std::cout << status << "  " << c.claim.id << "  " << c.claim.key << " = "
                  << (c.value ? lc::format_number(*c.value) : std::string("-")) << "\n";
      }
      // timing stays out of the report so reports compare byte for byte
      std::cerr << "wall-clock " << lc::format_number(secs) << " s\n";
      return rep.all_passed() ? kPass : kClaimFailed;
    }
  } catch (const lc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
