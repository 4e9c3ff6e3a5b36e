// Command-line front end: qtorus <command> [<sub>] --fixture FILE [options]
#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "qtorus/qtorus.hpp"

namespace {

struct Options {
  std::string fixture;
  std::string output = "text";
  qtorus::Overrides over;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--fixture", o.fixture, "JSON fixture")->required();
  cmd->add_option("--radius", o.over.radius, "final truncation radius of the norm schedule");
  cmd->add_option("--tol", o.over.tol, "tolerance for inequality checks");
  cmd->add_option("--norm", o.over.norm, "norm on R^n: l1, l2 or linf");
  cmd->add_option("--seed", o.over.seed, "base random seed");
  cmd->add_option("--samples", o.over.samples, "number of random instances");
  cmd->add_option("--output", o.output, "text or structured")->check(CLI::IsMember({"text", "structured"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on quantum tori and their Hermitian modules"};
  app.require_subcommand(1);
  Options o;
  std::string task;

  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, const std::string& full) {
    CLI::App* cmd = parent->add_subcommand(name, help);
    add_common(cmd, o);
    cmd->callback([&task, full] { task = full; });
    return cmd;
  };
  auto group = [&](const std::string& name, const std::string& help) {
    CLI::App* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    return g;
  };

  leaf(group("algebra", "algebra invariants"), "check", "random invariant checks", "algebra check");
  leaf(&app, "norm", "certified C*-norm interval of an element", "norm");
  leaf(group("metric", "metric validation"), "validate", "check a metric and its positivity evidence", "metric validate");
  {
    CLI::App* g = group("connection", "Levi-Civita connection");
    leaf(g, "compute", "inverse metric and Christoffel symbols", "connection compute");
    leaf(g, "check", "torsion, self-adjointness and compatibility", "connection check");
  }
  {
    CLI::App* g = group("seminorm", "seminorm estimates");
    leaf(g, "L", "Lipschitz seminorm of an element", "seminorm L");
    leaf(g, "D", "module norm D of vectors", "seminorm D");
  }
  {
    CLI::App* g = group("inequality", "inequality checks");
    for (const char* name : {"G", "H", "leibniz", "lemma45"}) leaf(g, name, std::string("check ") + name, std::string("inequality ") + name);
  }
  {
    CLI::App* g = group("bridge", "modular bridges");
    for (const char* name : {"scaling", "report"}) {
      CLI::App* cmd = leaf(g, name, std::string("bridge ") + name, std::string("bridge ") + name);
      cmd->add_option("--r", o.over.r, "first scale");
      cmd->add_option("--s", o.over.s, "second scale");
      cmd->add_option("--anchors", o.over.anchors, "number of anchor pairs");
    }
  }
  {
    CLI::App* cmd = leaf(group("isometry", "quantum isometries"), "check", "scaling isometry check", "isometry check");
    cmd->add_option("--r", o.over.r, "first scale");
    cmd->add_option("--s", o.over.s, "second scale");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    qtorus::Fixture f = qtorus::load_fixture(o.fixture);
    qtorus::apply(f, o.over);
    const qtorus::RunResult res = qtorus::run_task(task, f);
    if (o.output == "structured") {
      std::cout << res.report.dump(2) << "\n";
    } else {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << res.text << "wall time: " << secs << " s\n";
    }
    return res.exit_code;
  } catch (const qtorus::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
