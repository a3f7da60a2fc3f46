#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "retrace/runner.hpp"
#include "retrace/server.hpp"
#include "retrace/sweep.hpp"
#include "retrace/terminal.hpp"

namespace {

using namespace retrace;

constexpr int kConfigExit = 4;

std::map<std::string, long> parse_sets(const std::vector<std::string>& items) {
  std::map<std::string, long> out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects name=value, got '" + item + "'", {});
    try {
      out[item.substr(0, eq)] = std::stol(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ValidationError("--set value must be an integer: '" + item + "'", {});
    }
  }
  return out;
}

std::map<std::string, double> parse_alphas(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("--alpha expects name=value, got '" + item + "'", {});
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ValidationError("--alpha value must be a number: '" + item + "'", {});
    }
  }
  return out;
}

InferenceBackend parse_backend(const std::string& name) {
  if (name == "ve") return InferenceBackend::kVariableElimination;
  if (name == "brute") return InferenceBackend::kBruteForce;
  throw ValidationError("unknown backend '" + name + "'", {});
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path, {});
  out << text;
}

struct RunOptions {
  std::string model, task, scenario, out, dot, backend = "ve";
  std::vector<std::string> sets, alphas;
  bool interactive = false, json = false, oracle = false;
  int retry_limit = 3;
};

int cmd_run(const RunOptions& o) {
  if (o.scenario.empty() && !o.interactive) throw ValidationError("give --scenario or --interactive", {});
  RunInputs in = load_run_inputs(o.model, o.task, o.interactive ? "" : o.scenario, parse_sets(o.sets),
                                 parse_alphas(o.alphas));
  ExecutorConfig config;
  config.retry_limit = o.retry_limit;
  config.backend = parse_backend(o.backend);
  config.verify_with_oracle = o.oracle;

  RunStatus status;
  TraceLog log;
  TraceNet net;
  if (o.interactive) {
    TerminalEnvironment env(std::cin, std::cerr);
    Session session(in.model, in.program, env, config);
    status = session.run();
    log = session.log();
    net = session.net();
  } else {
    RunResult r = run_scripted(in, config);
    status = r.status;
    log = r.log;
    net = r.net;
  }
  std::string text = o.json ? log.to_json().dump(2) + "\n" : log.text();
  if (o.out.empty())
    std::cout << text;
  else
    write_file(o.out, text);
  if (!o.dot.empty()) write_file(o.dot, to_dot(net));
  return exit_code(status);
}

struct SweepOptions {
  std::string model, task, scenario, out, backend = "ve", label = "RV";
  std::string param_a, param_b, grid_a = "0.01:0.49:10", grid_b = "0.01:0.49:10";
  std::vector<std::string> sets;
};

int cmd_sweep(const SweepOptions& o) {
  RunInputs in = load_run_inputs(o.model, o.task, o.scenario, parse_sets(o.sets));
  SweepSpec spec{o.param_a, o.param_b, parse_grid(o.grid_a), parse_grid(o.grid_b), o.label};
  ExecutorConfig config;
  config.backend = parse_backend(o.backend);
  std::string csv = to_csv(sweep(in, spec, config));
  if (o.out.empty())
    std::cout << csv;
  else
    write_file(o.out, csv);
  return 0;
}

struct ServeOptions {
  std::string model, task, address = "127.0.0.1", static_dir, backend = "ve";
  std::vector<std::string> sets, alphas;
  unsigned short port = 8080;
  bool once = false;
  int retry_limit = 3;
};

int cmd_serve(const ServeOptions& o) {
  RobotModel model = load_model(o.model);
  set_params(model, parse_alphas(o.alphas));
  TaskProgram program = load_task(o.task, parse_sets(o.sets));
  ServerOptions options;
  options.address = o.address;
  options.port = o.port;
  options.static_dir = o.static_dir;
  options.once = o.once;
  options.executor.retry_limit = o.retry_limit;
  options.executor.backend = parse_backend(o.backend);
  Server server(std::move(model), std::move(program), options);
  std::cerr << "retrace: serving on ws://" << o.address << ":" << server.port() << "/\n";
  return server.run();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Execute human-robot task programs and recover from failed interactions"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a task program against a scenario or a terminal");
  run_cmd->add_option("--model", run.model, "Robot model (.rmodel); defaults to the scenario's");
  run_cmd->add_option("--task", run.task, "Task program (.task); defaults to the scenario's");
  run_cmd->add_option("--scenario", run.scenario, "Scenario script (.scenario)");
  run_cmd->add_flag("--interactive", run.interactive, "Answer actions and prompts on the terminal");
  run_cmd->add_option("--set", run.sets, "Override a task constant, e.g. n=3");
  run_cmd->add_option("--alpha", run.alphas, "Override a model parameter, e.g. alpha_pickup=0.3");
  run_cmd->add_option("--out", run.out, "Write the trace log here instead of stdout");
  run_cmd->add_flag("--json", run.json, "Write the trace log as a JSON array");
  run_cmd->add_option("--dot", run.dot, "Write the final trace net as Graphviz DOT");
  run_cmd->add_option("--backend", run.backend, "Posterior inference: ve or brute");
  run_cmd->add_option("--retry-limit", run.retry_limit, "Recovery rounds per failure");
  run_cmd->add_flag("--check-oracle", run.oracle, "Cross-check recovery plans by exhaustive search");

  SweepOptions sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Classify outcomes over a grid of two parameters");
  sweep_cmd->add_option("--model", sw.model, "Robot model; defaults to the scenario's");
  sweep_cmd->add_option("--task", sw.task, "Task program; defaults to the scenario's");
  sweep_cmd->add_option("--scenario", sw.scenario, "Scenario script")->required();
  sweep_cmd->add_option("--param-a", sw.param_a, "First parameter, e.g. alpha_follow")->required();
  sweep_cmd->add_option("--param-b", sw.param_b, "Second parameter, e.g. alpha_escort")->required();
  sweep_cmd->add_option("--grid-a", sw.grid_a, "Values of the first parameter as lo:hi:n");
  sweep_cmd->add_option("--grid-b", sw.grid_b, "Values of the second parameter as lo:hi:n");
  sweep_cmd->add_option("--recovered-label", sw.label, "Class name for recovered runs (RV or RP)");
  sweep_cmd->add_option("--set", sw.sets, "Override a task constant, e.g. n=3");
  sweep_cmd->add_option("--backend", sw.backend, "Posterior inference: ve or brute");
  sweep_cmd->add_option("--out", sw.out, "Write the CSV here instead of stdout");

  ServeOptions sv;
  auto* serve_cmd = app.add_subcommand("serve", "Serve interactive sessions to a console over WebSocket");
  serve_cmd->add_option("--model", sv.model, "Robot model (.rmodel)")->required();
  serve_cmd->add_option("--task", sv.task, "Task program (.task)")->required();
  serve_cmd->add_option("--port", sv.port, "TCP port; 0 picks a free one");
  serve_cmd->add_option("--address", sv.address, "Address to bind");
  serve_cmd->add_option("--static", sv.static_dir, "Directory served over plain HTTP");
  serve_cmd->add_flag("--once", sv.once, "Exit with the first session's status");
  serve_cmd->add_option("--set", sv.sets, "Override a task constant, e.g. n=3");
  serve_cmd->add_option("--alpha", sv.alphas, "Override a model parameter");
  serve_cmd->add_option("--backend", sv.backend, "Posterior inference: ve or brute");
  serve_cmd->add_option("--retry-limit", sv.retry_limit, "Recovery rounds per failure");

  std::string print_path;
  auto* print_cmd = app.add_subcommand("print-model", "Parse a model and print it canonically");
  print_cmd->add_option("model", print_path, "Robot model (.rmodel)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sw);
    if (*serve_cmd) return cmd_serve(sv);
    if (*print_cmd) {
      std::cout << print_model(load_model(print_path));
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "retrace: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::logic_error& e) {
    std::cerr << "retrace: internal error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "retrace: " << e.what() << "\n";
    return kConfigExit;
  }
  return 0;
}
