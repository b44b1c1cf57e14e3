// touchsim command line: generate, validate, serve, bench.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "touchsim/bench.hpp"
#include "touchsim/dataset.hpp"
#include "touchsim/meshgen.hpp"
#include "touchsim/server.hpp"

namespace fs = std::filesystem;
using namespace touchsim;

namespace {

constexpr int kExitUsage = 2;

std::string default_data_dir() {
  const char* env = std::getenv("SENSENET_DATA");
  return env && *env ? env : "data/sensenet";
}

std::vector<ObjectClass> parse_classes(const std::string& list) {
  if (list == "all") {
    const auto all = all_classes();
    return {all.begin(), all.end()};
  }
  std::vector<ObjectClass> out;
  std::stringstream ss(list);
  for (std::string name; std::getline(ss, name, ',');) {
    if (!name.empty()) out.push_back(class_from_name(name));
  }
  if (out.empty()) throw std::invalid_argument("no classes given");
  return out;
}

int cmd_generate(const std::string& classes, std::size_t count, std::uint64_t seed, const std::string& out,
                 bool ascii) {
  Dataset ds = generate_dataset(parse_classes(classes), count, seed);
  const DatasetManifest m = write_dataset(ds, out, ascii ? StlFormat::kAscii : StlFormat::kBinary);
  std::cout << "wrote " << m.objects.size() << " objects to " << out << "\n";
  return 0;
}

int cmd_validate(const std::string& dir) {
  const auto checks = validate_dataset(dir);
  std::size_t bad = 0;
  for (const auto& c : checks) {
    if (c.ok()) continue;
    ++bad;
    std::cout << c.id << ":";
    for (const auto& p : c.problems) std::cout << " " << p << ";";
    std::cout << "\n";
  }
  std::cout << checks.size() - bad << "/" << checks.size() << " objects valid\n";
  return bad == 0 ? 0 : 1;
}

int cmd_serve(const std::string& dir, const std::string& host, std::uint16_t port) {
  // Route SIGINT/SIGTERM to a watcher thread instead of an async handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto dataset = std::make_shared<const Dataset>(load_dataset(dir));
  Server server(dataset, ServerOptions{host, port});
  std::cout << "listening on " << host << ":" << server.port() << " (" << dataset->objects.size()
            << " objects)" << std::endl;
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // run() only returns after stop(), which the watcher called.
  watcher.join();
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& dir, const std::string& out) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot read " + config_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(config_path + ": " + e.what());
  }
  const BenchmarkConfig config = j.get<BenchmarkConfig>();
  const Dataset dataset = load_dataset(dir);
  const BenchmarkResult result = run_benchmark(config, dataset);
  write_benchmark(result, out);
  const Metrics& m = result.metrics;
  std::cout << "accuracy " << m.accuracy << " over " << m.test_episodes << " test episodes; touch rate "
            << m.touch_rate << "\n";
  std::cout << "wrote " << (fs::path(out) / "report.json").string() << " and "
            << (fs::path(out) / "episodes.jsonl").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile simulation toolkit"};
  app.require_subcommand(1);

  std::string classes = "all";
  std::size_t count = 10;
  std::uint64_t seed = 0;
  std::string out;
  bool ascii = false;
  auto* gen = app.add_subcommand("generate", "Generate a procedural object dataset");
  gen->add_option("--classes", classes, "Comma-separated class names, or 'all'");
  gen->add_option("--count", count, "Objects per class")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "Dataset seed");
  gen->add_option("--out", out, "Output directory (default: $SENSENET_DATA)");
  gen->add_flag("--ascii", ascii, "Write ASCII STL instead of binary");

  std::string data;
  auto* val = app.add_subcommand("validate", "Check every mesh and the manifest");
  val->add_option("--data", data, "Dataset directory (default: $SENSENET_DATA)");

  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;
  auto* serve = app.add_subcommand("serve", "Run the JSON-lines environment server");
  serve->add_option("--data", data, "Dataset directory (default: $SENSENET_DATA)");
  serve->add_option("--host", host, "Address to bind");
  serve->add_option("--port", port, "TCP port (0 picks a free one)");

  std::string config_path;
  std::string bench_out = "bench_out";
  auto* bench = app.add_subcommand("bench", "Run the blind classification benchmark");
  bench->add_option("--config", config_path, "Benchmark config JSON")->required();
  bench->add_option("--data", data, "Dataset directory (default: $SENSENET_DATA)");
  bench->add_option("--out", bench_out, "Directory for report.json and episodes.jsonl");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (data.empty()) data = default_data_dir();
  try {
    if (*gen) return cmd_generate(classes, count, seed, out.empty() ? default_data_dir() : out, ascii);
    if (*val) return cmd_validate(data);
    if (*serve) return cmd_serve(data, host, port);
    if (*bench) return cmd_bench(config_path, data, bench_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
