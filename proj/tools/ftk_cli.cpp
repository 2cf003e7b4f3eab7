#include <CLI11.hpp>

#include <iostream>

#include "ftk/errors.hpp"
#include "ftk/harness.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

void add_common(CLI::App* cmd, ftk::RunConfig& c, std::string& engine) {
  cmd->add_option("--n", c.n, "image size in pixels")->capture_default_str();
  cmd->add_option("--W", c.W, "shift radius in wavelengths")->capture_default_str();
  cmd->add_option("--eps", c.eps, "FTK truncation tolerance")->capture_default_str();
  cmd->add_option("--engine", engine, "ftk, bft or bfr")->capture_default_str();
  cmd->add_option("--spacing", c.spacing, "half, quarter or a pitch in pixels")->capture_default_str();
  cmd->add_option("--ngamma", c.ngamma, "rotation count (0: 2Q)")->capture_default_str();
  cmd->add_option("--nim", c.nim, "number of images and templates")->capture_default_str();
  cmd->add_option("--seed", c.seed, "dataset seed")->capture_default_str();
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads")->capture_default_str();
  cmd->add_option("--plan-cache", c.plan_cache, "plan directory (default <out>/plans)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigid alignment of images against templates by factorized translation kernels"};
  app.require_subcommand(1);
  ftk::RunConfig config;
  std::string engine = "ftk";

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"gen", "generate templates, images and a manifest"},
      {"plan", "build or load the kernel factorization"},
      {"align", "align every image against every template"},
      {"bench", "time the engines over a range of shift disks"},
      {"accuracy", "error of the factorization and of bilinear interpolation"},
      {"svd-report", "write the singular values of the plan"},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), config, engine);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    config.engine = ftk::parse_engine(engine);
    config.validate();
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "gen") {
      ftk::cmd_gen(config, std::cout);
    } else if (cmd == "plan") {
      ftk::cmd_plan(config, std::cout);
    } else if (cmd == "align") {
      ftk::cmd_align(config, std::cout);
    } else if (cmd == "bench") {
      ftk::cmd_bench(config, std::cout);
    } else if (cmd == "accuracy") {
      ftk::cmd_accuracy(config, std::cout);
    } else {
      ftk::cmd_svd_report(config, std::cout);
    }
  } catch (const ftk::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const ftk::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ftk::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ftk::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return 0;
}
