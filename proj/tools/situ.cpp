// Copyright 2026 The Situ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// situ: run, replay, bench and serve driver-awareness sessions.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>

#include "situ/situ.hpp"
#include "situ/stream_server.hpp"

namespace
{

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

/// Flags shared by `run` and `serve`. Every flag can also come from a
/// SITU_* environment variable.
void add_session_flags(CLI::App & app, situ::SessionConfig & cfg)
{
  app.add_option("-s,--scenario", cfg.scenario_path, "Scenario file")->required()->envname("SITU_SCENARIO");
  app.add_option("--tick-rate", cfg.tick_rate, "Tick rate in Hz (defaults to the scenario's)")
    ->envname("SITU_TICK_RATE");
  app.add_option("--seed", cfg.seed, "Override the scenario seed")->envname("SITU_SEED");

  app.add_option("--fixation-threshold", cfg.tracker.fixation_threshold, "Admission probability gate")
    ->envname("SITU_FIXATION_THRESHOLD")
    ->capture_default_str();
  app.add_option("--process-noise", cfg.tracker.process_noise, "Kalman process noise q")
    ->envname("SITU_PROCESS_NOISE")
    ->capture_default_str();
  app.add_option("--meas-noise-pos", cfg.tracker.meas_noise_pos, "Position measurement sigma (m)")
    ->envname("SITU_MEAS_NOISE_POS")
    ->capture_default_str();
  app.add_option("--meas-noise-vel", cfg.tracker.meas_noise_vel, "Velocity measurement sigma (m/s)")
    ->envname("SITU_MEAS_NOISE_VEL")
    ->capture_default_str();
  app.add_option("--eviction-ttl", cfg.tracker.eviction_ttl, "Forget objects not fixated for this long (s)")
    ->envname("SITU_EVICTION_TTL");

  app.add_option("--min-gap", cfg.locations.min_gap, "Smallest usable gap (m)")
    ->envname("SITU_MIN_GAP")
    ->capture_default_str();
  app.add_option("--sensor-range", cfg.locations.sensor_range, "Half-span bound around the ego (m)")
    ->envname("SITU_SENSOR_RANGE")
    ->capture_default_str();

  app.add_option("--w-rel", cfg.comparison.w_rel, "Relevance weight")->envname("SITU_W_REL")->capture_default_str();
  app.add_option("--w-mag", cfg.comparison.w_mag, "Magnitude weight")->envname("SITU_W_MAG")->capture_default_str();
  app.add_option("--w-stale", cfg.comparison.w_stale, "Staleness weight")
    ->envname("SITU_W_STALE")
    ->capture_default_str();
  app.add_option("--stale-cap", cfg.comparison.stale_cap, "Staleness saturation (s)")
    ->envname("SITU_STALE_CAP")
    ->capture_default_str();
  app.add_option("--pos-tolerance", cfg.comparison.pos_tolerance, "Position divergence tolerance (m)")
    ->envname("SITU_POS_TOLERANCE")
    ->capture_default_str();
  app.add_option("--relevance-range", cfg.comparison.relevance_range, "Full-relevance distance (m)")
    ->envname("SITU_RELEVANCE_RANGE")
    ->capture_default_str();
}

int cmd_run(const situ::SessionConfig & cfg)
{
  const auto result = situ::run_session(cfg);
  if (result.exit_code != 0) {
    std::cerr << "situ run: " << result.message << "\n";
    return result.exit_code;
  }
  std::cerr << "situ run: " << result.ticks << " ticks"
            << (cfg.trace_path.empty() ? "" : " written to " + cfg.trace_path) << "\n";
  return 0;
}

int cmd_replay(const std::string & path, const situ::ReplayFilters & filters)
{
  try {
    situ::replay(situ::read_trace_file(path), filters, std::cout);
  } catch (const situ::Error & e) {
    std::cerr << "situ replay: " << path << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_bench(const situ::BenchConfig & cfg, const std::string & report_path)
{
  const auto report = situ::bench(cfg);
  std::cout << report.table();
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << report.to_json().dump(2) << "\n";
    if (!out) {
      std::cerr << "situ bench: cannot write " << report_path << "\n";
      return 2;
    }
    std::cerr << "situ bench: report written to " << report_path << "\n";
  }
  return 0;
}

int cmd_serve(const situ::SessionConfig & cfg, const situ::StreamOptions & opts)
{
  try {
    situ::StreamServer server(situ::load_session_scenario(cfg), cfg, opts);
    server.start();
    std::cerr << "situ serve: listening on ws://" << opts.host << ":" << server.port() << "/\n";
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_interrupted) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
  } catch (const std::exception & e) {
    std::cerr << "situ serve: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Driver situation-awareness engine"};
  app.require_subcommand(1);

  situ::SessionConfig run_cfg;
  auto * run = app.add_subcommand("run", "Run a scenario headless and write a trace");
  add_session_flags(*run, run_cfg);
  run->add_option("-o,--trace", run_cfg.trace_path, "Trace output path")->envname("SITU_TRACE");
  run->add_flag("--record-latencies", run_cfg.record_latencies, "Store per-stage latencies in the trace");

  std::string trace_path;
  situ::ReplayFilters filters;
  auto * replay = app.add_subcommand("replay", "Render a stored trace");
  replay->add_option("trace", trace_path, "Trace file")->required();
  replay->add_option("--tick", filters.tick, "Show a single tick");
  replay->add_option("--object", filters.object, "Restrict to one object id");
  replay->add_flag("--events", filters.events, "List event occurrences only");

  situ::BenchConfig bench_cfg;
  std::string report_path;
  auto * bench = app.add_subcommand("bench", "Measure per-stage tick latency");
  bench->add_option("--vehicles", bench_cfg.vehicle_counts, "Vehicle counts to sweep")
    ->delimiter(',')
    ->capture_default_str();
  bench->add_option("--ticks", bench_cfg.ticks, "Ticks per run")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--tick-rate", bench_cfg.tick_rate, "Simulated tick rate (Hz)")->capture_default_str();
  bench->add_option("--seed", bench_cfg.seed, "Traffic seed")->capture_default_str();
  bench->add_option("--report", report_path, "Write the JSON report here")->envname("SITU_BENCH_REPORT");

  situ::SessionConfig serve_cfg;
  situ::StreamOptions stream_opts;
  bool scripted = false;
  auto * serve = app.add_subcommand("serve", "Run a live session over a websocket");
  add_session_flags(*serve, serve_cfg);
  serve->add_option("--host", stream_opts.host, "Bind address")->envname("SITU_HOST")->capture_default_str();
  serve->add_option("-p,--port", stream_opts.port, "Port (0 picks a free one)")
    ->envname("SITU_PORT")
    ->capture_default_str();
  serve->add_option("--time-scale", stream_opts.time_scale, "Wall-clock speed factor")->capture_default_str();
  serve->add_option("--static-dir", stream_opts.static_dir, "Serve a UI bundle from this directory")
    ->envname("SITU_STATIC_DIR");
  serve->add_flag("--scripted-gaze", scripted, "Use the scenario's gaze instead of live gaze messages");

  auto * domain = app.add_subcommand("domain", "Print the built-in domain definition");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return cmd_run(run_cfg);
  }
  if (*replay) {
    return cmd_replay(trace_path, filters);
  }
  if (*bench) {
    return cmd_bench(bench_cfg, report_path);
  }
  if (*serve) {
    serve_cfg.interactive = !scripted;
    serve_cfg.stream_port = stream_opts.port;
    return cmd_serve(serve_cfg, stream_opts);
  }
  if (*domain) {
    std::cout << situ::builtin_domain().dump();
  }
  return 0;
}
