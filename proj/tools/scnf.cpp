// Command-line front end: benchmarks, trace checking and replay.
//
// Exit codes: 0 success, 2 race detected, 1 error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "scnf/bench/workloads.hpp"
#include "scnf/common/error.hpp"
#include "scnf/layers/runner.hpp"
#include "scnf/model/checker.hpp"
#include "scnf/sim/config.hpp"
#include "scnf/trace/trace.hpp"

using namespace scnf;

namespace {

constexpr int kRace = 2;
constexpr int kFailure = 1;

struct SimFlags {
  std::string config;
  std::vector<std::string> overrides;

  void add(CLI::App* app) {
    app->add_option("--config", config, "calibration file (key = value)")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override one calibration key, key=value (repeatable)");
  }

  [[nodiscard]] sim::SimConfig resolve() const {
    auto kv = config.empty() ? sim::KeyValueConfig::parse("version = 1\n" + sim::SimConfig{}.to_text(), "<defaults>")
                             : sim::KeyValueConfig::load(config);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw Error(Errc::Config, "--set expects key=value, got '" + o + "'");
      kv.set(o.substr(0, eq), o.substr(eq + 1));
    }
    auto cfg = sim::SimConfig::from(kv);
    if (auto extra = kv.unused(); !extra.empty()) throw Error(Errc::Config, "unknown calibration key '" + extra[0] + "'");
    cfg.validate();
    return cfg;
  }
};

struct OutputFlags {
  std::string csv;
  std::string trace;
  std::string plot;
  bool append = false;

  void add(CLI::App* app) {
    app->add_option("--csv", csv, "CSV output path (default: stdout)");
    app->add_flag("--append", append, "append rows to an existing CSV instead of rewriting it");
    app->add_option("--trace", trace, "write the execution trace of a single run");
    app->add_option("--plot", plot, "write a gnuplot script for the CSV");
  }
};

struct Common {
  std::vector<std::string> models{"session"};
  std::vector<std::uint32_t> nodes{4};
  std::uint64_t seed = 1;
  SimFlags sim;
  OutputFlags out;
};

void emit(const Common& c, const std::vector<bench::BenchResult>& results, const std::string& title,
          const std::string& phase) {
  std::string text;
  bool header = true;
  if (c.out.append && !c.out.csv.empty()) {
    std::ifstream probe(c.out.csv);
    header = !probe.good() || probe.peek() == std::ifstream::traits_type::eof();
  }
  if (header) text += bench::csv_header();
  for (const auto& r : results) text += bench::csv_rows(r);
  if (c.out.csv.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out.csv, c.out.append ? std::ios::app : std::ios::trunc);
    if (!f) throw Error(Errc::InvalidArgument, "cannot write " + c.out.csv);
    f << text;
  }
  if (!c.out.trace.empty()) {
    if (results.size() != 1) throw Error(Errc::InvalidArgument, "--trace needs exactly one run (one model, one n)");
    trace::write_file(c.out.trace, results.front().trace);
  }
  if (!c.out.plot.empty()) {
    std::ofstream f(c.out.plot);
    if (!f) throw Error(Errc::InvalidArgument, "cannot write " + c.out.plot);
    f << bench::plot_script(c.out.csv.empty() ? "results.csv" : c.out.csv, title, phase);
  }
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--model", c.models, "consistency layer(s): posix, commit, session")->expected(1, -1);
  app->add_option("--n", c.nodes, "node count(s); several values run a sweep")->expected(1, -1);
  app->add_option("--seed", c.seed, "random seed");
  c.sim.add(app);
  c.out.add(app);
}

int run_check(const std::string& model_name, const std::string& path, const std::string& format) {
  const auto model = model::load_builtin_model(model_name);
  const auto t = trace::read_trace(path);
  const auto reports = model::check_properly_synchronized(t, model);
  std::cout << (format == "jsonl" ? model::format_report_jsonl(model, reports)
                                  : model::format_report_text(t, model, reports));
  return model::has_race(reports) ? kRace : 0;
}

int run_replay(const std::string& layer_name, const std::string& path, const std::string& out, bool show,
               const SimFlags& sim) {
  const auto kind = layers::parse_layer_kind(layer_name);
  const auto program = layers::program_from_trace(trace::read_file(path));
  const auto run = layers::run_program(program, kind, sim.resolve());
  std::cout << "processes " << program.processes.size() << ", statements " << program.op_count() << "\n";
  std::cout << "simulated time " << sim::to_seconds(run.end) << " s\n";
  std::cout << "reads " << run.outcome.reads.size() << "\n";
  for (const auto& [name, bytes] : run.outcome.files) std::cout << "file " << name << " " << bytes.size() << " bytes\n";
  if (show) std::cout << model::to_string(run.outcome) << "\n";
  if (!out.empty()) trace::write_file(out, run.trace);
  const auto m = model::load_builtin_model(layers::to_string(kind));
  const auto reports = model::check_properly_synchronized(trace::to_execution_trace(run.trace), m);
  if (model::has_race(reports)) {
    std::cout << model::format_report_text(trace::to_execution_trace(run.trace), m, reports);
    return kRace;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Storage consistency models: workload simulator, race checker and trace replay"};
  app.require_subcommand(1);

  auto* bench_cmd = app.add_subcommand("bench", "run a simulated workload and write CSV");
  bench_cmd->require_subcommand(1);

  // bench synthetic
  Common syn;
  std::string shape = "ccr";
  std::uint32_t p = 12, m_w = 10, m_r = 10;
  std::optional<std::uint32_t> n_w, n_r;
  std::uint64_t size = 8192;
  std::string write_pattern, read_pattern;
  auto* syn_cmd = bench_cmd->add_subcommand("synthetic", "N-to-1 write and read phases on one shared file");
  add_common(syn_cmd, syn);
  syn_cmd->add_option("--shape", shape, "cnw, snw, ccr, csr or custom");
  syn_cmd->add_option("--p", p, "processes per node");
  syn_cmd->add_option("--nw", n_w, "writer nodes (custom shape)");
  syn_cmd->add_option("--nr", n_r, "reader nodes (custom shape)");
  syn_cmd->add_option("--mw", m_w, "writes per writer process");
  syn_cmd->add_option("--mr", m_r, "reads per reader process");
  syn_cmd->add_option("--size", size, "access size in bytes");
  syn_cmd->add_option("--write-pattern", write_pattern, "contiguous, strided or random");
  syn_cmd->add_option("--read-pattern", read_pattern, "contiguous, strided or random");

  // bench scr
  Common scr;
  bench::ScrConfig scr_cfg;
  auto* scr_cmd = bench_cmd->add_subcommand("scr", "partner checkpoint/restart of a particle code");
  add_common(scr_cmd, scr);
  scr_cmd->add_option("--p", scr_cfg.p, "processes per node");
  scr_cmd->add_option("--particles", scr_cfg.particles_per_rank, "particles per rank");
  scr_cmd->add_option("--value-size", scr_cfg.value_size, "bytes per particle value");
  scr_cmd->add_option("--arrays", scr_cfg.arrays, "arrays per checkpoint");

  // bench dl
  Common dl;
  bench::DlConfig dl_cfg;
  std::string scaling = "strong";
  std::optional<std::uint32_t> batch;
  auto* dl_cmd = bench_cmd->add_subcommand("dl", "random sample reads of a preloaded training set");
  add_common(dl_cmd, dl);
  dl_cmd->add_option("--p", dl_cfg.p, "processes per node");
  dl_cmd->add_option("--sample-size", dl_cfg.sample_size, "bytes per sample");
  dl_cmd->add_option("--scaling", scaling, "strong or weak");
  dl_cmd->add_option("--batch", batch, "global mini-batch (strong, default 1024) or per-process samples (weak, "
                                       "default 32)");
  dl_cmd->add_option("--iterations", dl_cfg.iterations, "iterations per epoch");
  dl_cmd->add_option("--epochs", dl_cfg.epochs, "epochs");

  // check
  std::string check_model, check_trace, check_format = "text";
  auto* check_cmd = app.add_subcommand("check", "judge a trace for storage races under a model");
  check_cmd->add_option("--model", check_model, "posix, commit, commit-relaxed, session or mpiio")->required();
  check_cmd->add_option("--trace", check_trace, "trace file")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--format", check_format, "text or jsonl")->check(CLI::IsMember({"text", "jsonl"}));

  // replay
  std::string replay_layer = "commit", replay_trace, replay_out;
  SimFlags replay_sim;
  bool replay_show = false;
  auto* replay_cmd = app.add_subcommand("replay", "re-execute a recorded trace on a consistency layer");
  replay_cmd->add_option("--model", replay_layer, "posix, commit or session");
  replay_cmd->add_option("--trace", replay_trace, "trace file")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--out", replay_out, "write the new run's trace");
  replay_cmd->add_flag("--show-outcome", replay_show, "print every read's bytes and the final file contents");
  replay_sim.add(replay_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kFailure;
  }

  try {
    if (*check_cmd) return run_check(check_model, check_trace, check_format);
    if (*replay_cmd) return run_replay(replay_layer, replay_trace, replay_out, replay_show, replay_sim);

    std::vector<bench::BenchResult> results;
    if (*syn_cmd) {
      const auto cfg = syn.sim.resolve();
      for (const auto& m : syn.models) {
        for (auto n : syn.nodes) {
          bench::WorkloadConfig w;
          if (shape == "custom") {
            w.n_w = n_w.value_or(n / 2);
            w.n_r = n_r.value_or(n - w.n_w);
          } else {
            w = bench::shape_config(bench::parse_shape(shape), n, p, size, layers::LayerKind::Commit);
          }
          w.p = p;
          w.s = size;
          w.m_w = m_w;
          w.m_r = m_r;
          w.model = layers::parse_layer_kind(m);
          w.seed = syn.seed;
          w.record_trace = !syn.out.trace.empty();
          if (!write_pattern.empty()) w.write_pattern = bench::parse_pattern(write_pattern);
          if (!read_pattern.empty()) w.read_pattern = bench::parse_pattern(read_pattern);
          results.push_back(bench::run_synthetic(w, cfg));
        }
      }
      const bool reads = !results.empty() && results.front().phases.size() > 1;
      emit(syn, results, "synthetic-" + shape, reads ? "read" : "write");
    } else if (*scr_cmd) {
      const auto cfg = scr.sim.resolve();
      for (const auto& m : scr.models) {
        for (auto n : scr.nodes) {
          auto c = scr_cfg;
          c.n = n;
          c.model = layers::parse_layer_kind(m);
          c.seed = scr.seed;
          c.record_trace = !scr.out.trace.empty();
          results.push_back(bench::run_scr(c, cfg));
        }
      }
      emit(scr, results, "scr-restart", "restart");
    } else if (*dl_cmd) {
      const auto cfg = dl.sim.resolve();
      for (const auto& m : dl.models) {
        for (auto n : dl.nodes) {
          auto c = dl_cfg;
          c.n = n;
          c.scaling = bench::parse_scaling(scaling);
          c.batch = batch.value_or(c.scaling == bench::Scaling::Strong ? 1024 : 32);
          c.model = layers::parse_layer_kind(m);
          c.seed = dl.seed;
          c.record_trace = !dl.out.trace.empty();
          results.push_back(bench::run_dl(c, cfg));
        }
      }
      emit(dl, results, "dl-" + scaling, "epoch0");
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
