#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "opaque/evaluation.hpp"
#include "opaque/record_proxy.hpp"
#include "opaque/server.hpp"
#include "opaque/synthetic.hpp"

namespace {

using namespace opaque;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

void install_signal_handlers() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
}

void wait_for_signal() {
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void add_scoring_flags(CLI::App* cmd, BuildOptions& build) {
  cmd->add_option("--threshold,-f", build.threshold, "consensus frequency threshold f")->capture_default_str();
  cmd->add_option("--match", build.scoring.match, "match score m")->capture_default_str();
  cmd->add_option("--mismatch", build.scoring.mismatch, "mismatch score d")->capture_default_str();
  cmd->add_option("--gap", build.scoring.gap, "gap score g")->capture_default_str();
  cmd->add_option("--wildcard", build.scoring.wildcard, "wildcard score x")->capture_default_str();
  cmd->add_option("--min-field-length", build.min_field_length, "shortest symmetric field")->capture_default_str();
  cmd->add_option("--threads", build.threads, "worker threads, 0 = all cores")->capture_default_str();
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
}

std::string render_report(const nlohmann::json& j, const std::string& table, const std::string& format) {
  if (format == "table") return table;
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opaque service emulation: record, build, serve and evaluate"};
  app.require_subcommand(1);

  // record
  std::string rec_listen, rec_target, rec_out, rec_framing = "one-per-connection";
  auto* record = app.add_subcommand("record", "proxy client traffic to a target and save the transactions");
  record->add_option("--listen", rec_listen, "address:port to accept clients on")->required();
  record->add_option("--target", rec_target, "address:port of the real service")->required();
  record->add_option("--out,-o", rec_out, "trace file written on shutdown")->required();
  record->add_option("--framing", rec_framing, "one-per-connection | idle[:ms] | length[:w] | delimiter[:hex]")
      ->capture_default_str();

  // build
  std::string build_trace, build_out;
  BuildOptions build;
  auto* build_cmd = app.add_subcommand("build", "derive a model from a trace");
  build_cmd->add_option("trace", build_trace, "trace file")->required();
  build_cmd->add_option("--clusters,-k", build.clusters, "number of operation types k")->required();
  build_cmd->add_option("--out,-o", build_out, "model file")->required();
  add_scoring_flags(build_cmd, build);

  // serve
  std::string serve_model, serve_listen, serve_framing = "idle";
  bool serve_quiet = false;
  auto* serve = app.add_subcommand("serve", "answer requests from a model");
  serve->add_option("model", serve_model, "model file")->required();
  serve->add_option("--listen", serve_listen, "address:port")->required();
  serve->add_option("--framing", serve_framing, "one-per-connection | idle[:ms] | length[:w] | delimiter[:hex]")
      ->capture_default_str();
  serve->add_flag("--quiet", serve_quiet, "no per-exchange log lines");

  // validate
  std::string val_trace, val_responder = "prototype", val_out, val_format = "json";
  CrossValidationOptions cv;
  auto* validate = app.add_subcommand("validate", "k-fold cross-validation of a responder");
  validate->add_option("trace", val_trace, "trace file")->required();
  validate->add_option("--responder", val_responder, "prototype | hash | whole-library")->capture_default_str();
  validate->add_option("--clusters,-k", cv.build.clusters, "number of operation types (prototype responder)");
  validate->add_option("--folds", cv.folds)->capture_default_str();
  validate->add_option("--repeats", cv.repeats)->capture_default_str();
  validate->add_option("--seed", cv.seed)->capture_default_str();
  validate->add_option("--format", val_format, "json | table")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  validate->add_option("--out,-o", val_out, "report file (default stdout)");
  add_scoring_flags(validate, cv.build);

  // bench
  std::string bench_trace, bench_model, bench_out, bench_format = "table";
  std::size_t bench_requests = 1000;
  std::size_t bench_warmup = 20;
  BuildOptions bench_build;
  auto* bench = app.add_subcommand("bench", "time the three responders on a trace");
  bench->add_option("trace", bench_trace, "trace file")->required();
  bench->add_option("--model", bench_model, "model file (else built with --clusters)");
  bench->add_option("--clusters,-k", bench_build.clusters, "number of operation types");
  bench->add_option("--requests", bench_requests, "timed responses per responder")->capture_default_str();
  bench->add_option("--warmup", bench_warmup)->capture_default_str();
  bench->add_option("--format", bench_format, "json | table")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  bench->add_option("--out,-o", bench_out, "report file (default stdout)");

  // gen
  std::string gen_preset, gen_spec, gen_out;
  std::size_t gen_n = 1000;
  std::uint64_t gen_seed = 1;
  bool gen_example = false;
  auto* gen = app.add_subcommand("gen", "write a synthetic trace");
  gen->add_option("--preset", gen_preset, "directory | confusion");
  gen->add_option("--spec", gen_spec, "protocol spec JSON file");
  gen->add_option("-n", gen_n, "transactions")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_flag("--example,--paper-example", gen_example, "the eight-row directory service example");
  gen->add_option("--out,-o", gen_out, "trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  install_signal_handlers();
  try {
    if (*record) {
      RecordOptions opts;
      opts.listen = Endpoint::parse(rec_listen);
      opts.target = Endpoint::parse(rec_target);
      opts.framing = FramingConfig::parse(rec_framing);
      opts.out = rec_out;
      opts.log = &std::cerr;
      RecordingProxy proxy(opts);
      proxy.start();
      std::cerr << "recording on port " << proxy.port() << " -> " << rec_target << "\n";
      wait_for_signal();
      proxy.stop();
      std::cerr << "saved " << proxy.library().size() << " transactions to " << rec_out << "\n";
    } else if (*build_cmd) {
      const auto library = load_library(build_trace);
      BuildDiagnostics diag;
      const auto model = build_model(library, build, {}, &diag);
      for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
      save_model(model, build_out);
      for (const auto& node : model.nodes) {
        std::cerr << "cluster " << node.cluster_id << ": " << node.members.size() << " members, centroid "
                  << node.centroid.index << ", prototype " << render_symbols(node.prototype.symbols) << "\n";
      }
    } else if (*serve) {
      auto model = std::make_shared<const OpaqueServiceModel>(load_model(serve_model));
      ServeOptions opts;
      opts.listen = Endpoint::parse(serve_listen);
      opts.framing = FramingConfig::parse(serve_framing);
      opts.log = serve_quiet ? nullptr : &std::cout;
      EmulatorServer server(model, opts);
      server.start();
      std::cerr << "serving " << model->nodes.size() << " clusters on port " << server.port() << " ("
                << opts.framing.describe() << ")\n";
      wait_for_signal();
      server.stop();
    } else if (*validate) {
      cv.responder = parse_responder(val_responder);
      if (cv.responder == ResponderKind::Prototype && cv.build.clusters == 0) {
        throw Error(ErrorCode::BadK, "--clusters is required for the prototype responder");
      }
      cv.threads = cv.build.threads;
      const auto report = cross_validate(load_library(val_trace), cv);
      write_text(render_report(report.to_json(), report.to_table(), val_format), val_out);
    } else if (*bench) {
      const auto library = load_library(bench_trace);
      OpaqueServiceModel model;
      if (!bench_model.empty()) {
        model = load_model(bench_model);
      } else if (bench_build.clusters > 0) {
        model = build_model(library, bench_build);
      } else {
        throw Error(ErrorCode::BadK, "bench needs --model or --clusters");
      }
      std::vector<ByteSequence> requests;
      for (std::size_t i = 0; i < bench_requests && library.size() > 0; ++i) {
        requests.push_back(library[i % library.size()].request);
      }
      const auto report = benchmark(library, model, requests, 1, bench_warmup);
      write_text(render_report(report.to_json(), report.to_table(), bench_format), bench_out);
    } else if (*gen) {
      LabeledLibrary lib;
      if (gen_example) {
        lib = directory_example_library();
      } else if (!gen_spec.empty()) {
        std::ifstream in(gen_spec);
        if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + gen_spec);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::UnknownSpec, gen_spec + ": " + e.what());
        }
        lib = synthetic_library(SyntheticProtocolSpec::from_json(j), gen_n, gen_seed);
      } else {
        lib = synthetic_library(preset_spec(gen_preset.empty() ? "directory" : gen_preset), gen_n, gen_seed);
      }
      save_library(lib.library, gen_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
