#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "conflictfuzz/brute_force_oracle.hpp"
#include "conflictfuzz/campaign.hpp"
#include "conflictfuzz/config.hpp"
#include "conflictfuzz/fileio.hpp"
#include "conflictfuzz/ledger.hpp"
#include "conflictfuzz/report.hpp"
#include "conflictfuzz/trace_io.hpp"

namespace conflictfuzz::cli {

namespace fs = std::filesystem;

namespace {

/// Creates `dir` and proves it accepts files.
bool ensure_writable(const fs::path& dir, std::ostream& err) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    err << "error: cannot create output directory '" << dir.string() << "'\n";
    return false;
  }
  try {
    write_file_atomic(dir / ".write_probe", "");
    fs::remove(dir / ".write_probe", ec);
  } catch (const OutputError&) {
    err << "error: output directory '" << dir.string() << "' is not writable\n";
    return false;
  }
  return true;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
            std::optional<std::string> variant, std::ostream& out, std::ostream& err) {
  CampaignConfig cfg;
  try {
    cfg = load_config(config_path);
    if (seed) cfg.ga.rng_seed = *seed;
    if (variant) {
      try {
        cfg.variant = parse_variant(*variant);
      } catch (const std::invalid_argument&) {
        throw ConfigError("variant", "invalid value '" + *variant + "' for 'variant'");
      }
    }
  } catch (const ConfigError& e) {
    err << "config error";
    if (!e.key().empty()) err << " [" << e.key() << "]";
    err << ": " << e.what() << "\n";
    return kConfigError;
  }

  const fs::path dir(out_dir);
  if (!ensure_writable(dir, err) || !ensure_writable(dir / "archive", err)) return kOutputNotWritable;

  try {
    const CampaignResult result = run_campaign(cfg, workers_from_env());
    write_file_atomic(dir / "config.json", config_to_document(cfg));
    write_file_atomic(dir / "ledger.jsonl", ledger_to_jsonl(result.ledger));
    for (const auto& entry : result.archive) write_archive_entry(dir / "archive", entry);
    const CampaignMetrics m = write_report(dir, result.ledger);
    out << summary_text(m);
  } catch (const OutputError& e) {
    err << "error: " << e.what() << "\n";
    return kOutputNotWritable;
  }
  return kOk;
}

int cmd_replay(const std::string& entry, const std::optional<std::string>& frames_dir, std::ostream& out,
               std::ostream& err) {
  ReplayOutcome outcome;
  try {
    outcome = replay_archive_entry(entry);
  } catch (const TraceFormatError& e) {
    err << "malformed trace: " << e.what() << "\n";
    return kMalformedTrace;
  } catch (const GenomeError& e) {
    err << "malformed genome: " << e.what() << "\n";
    return kMalformedTrace;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kMalformedTrace;
  }
  if (frames_dir) {
    if (!ensure_writable(*frames_dir, err)) return kOutputNotWritable;
    const int n = write_frames(*frames_dir, outcome.environment.build_graph(), outcome.trace);
    out << "wrote " << n << " frames to " << *frames_dir << "\n";
  }
  if (!outcome.reproduced) {
    err << "replay diverged: " << outcome.detail << "\n";
    return kReplayDivergence;
  }
  out << "replay ok: " << outcome.detail << "\n";
  return kOk;
}

int cmd_report(const std::string& ledger_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  std::vector<CampaignEvent> ledger;
  try {
    ledger = read_ledger(ledger_path);
  } catch (const LedgerError& e) {
    err << "malformed ledger: " << e.what() << "\n";
    return kMalformedLedger;
  } catch (const std::runtime_error& e) {
    err << "malformed ledger: line 0: " << e.what() << "\n";
    return kMalformedLedger;
  }
  if (!ensure_writable(out_dir, err)) return kOutputNotWritable;
  try {
    out << summary_text(write_report(out_dir, ledger));
  } catch (const OutputError& e) {
    err << "error: " << e.what() << "\n";
    return kOutputNotWritable;
  }
  return kOk;
}

int cmd_oracle(const std::string& trace_path, double t_c, double t_s, std::ostream& out, std::ostream& err) {
  TraceDocument doc;
  try {
    doc = read_trace(trace_path);
  } catch (const TraceFormatError& e) {
    err << "malformed trace: " << e.what() << "\n";
    return kMalformedTrace;
  }
  if (!(t_c > 0.0) || t_c > t_s) {
    err << "config error [t_c]: t_c must be positive and not exceed t_s\n";
    return kConfigError;
  }
  ConflictParams params;
  params.t_c = t_c;
  params.t_s = t_s;
  out << format_oracle_listing(brute_force_conflicts(doc.trace, params));
  return kOk;
}

}  // namespace

int workers_from_env() {
  if (const char* v = std::getenv("CONFLICT_FUZZ_WORKERS")) {
    try {
      const int n = std::stoi(v);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage conflict-guided scenario fuzzer for driving controllers", "conflictfuzz"};
  app.require_subcommand(1);

  std::string config_path, out_dir, entry, ledger_path, report_out, trace_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant, frames_dir;
  double t_c = 3.0, t_s = 15.0;

  auto* run_cmd = app.add_subcommand("run", "Run a campaign from a config file");
  run_cmd->add_option("--config", config_path, "Campaign config (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--seed", seed, "Override rng_seed");
  run_cmd->add_option("--variant", variant, "Override variant: full | collision_only | collision_only_random");

  auto* replay_cmd = app.add_subcommand("replay", "Re-simulate an archived collision and verify it recurs");
  replay_cmd->add_option("--entry", entry, "Archive entry (genome file, trace file or stem)")->required();
  replay_cmd->add_option("--svg-frames", frames_dir, "Write one SVG frame per second into this directory");

  auto* report_cmd = app.add_subcommand("report", "Regenerate CSV and SVG reports from a ledger");
  report_cmd->add_option("--ledger", ledger_path, "ledger.jsonl")->required();
  report_cmd->add_option("--out", report_out, "Output directory")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force conflict listing for a trace");
  oracle_cmd->add_option("--trace", trace_path, "Trace file (JSONL)")->required();
  oracle_cmd->add_option("--tc", t_c, "Conflict time limit t_c (s)");
  oracle_cmd->add_option("--ts", t_s, "Spatial conflict time limit t_s (s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, out_dir, seed, variant, out, err);
    if (*replay_cmd) return cmd_replay(entry, frames_dir, out, err);
    if (*report_cmd) return cmd_report(ledger_path, report_out, out, err);
    if (*oracle_cmd) return cmd_oracle(trace_path, t_c, t_s, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace conflictfuzz::cli
