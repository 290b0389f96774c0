#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "conflictfuzz/conflict.hpp"

namespace conflictfuzz {

/// Malformed ledger content; `line()` is 1-based.
class LedgerError : public std::runtime_error {
 public:
  LedgerError(std::size_t line, const std::string& what)
      : std::runtime_error("ledger line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class Stage { Conflict, Collision, Restart };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view text);

struct LedgerConflict {
  ConflictType ctype = ConflictType::MP;
  ConflictClass klass = ConflictClass::Conflict;
  double delta_t = 0.0;
  double t_event = 0.0;
  Arriver first_arriver = Arriver::EV;
  int npc_id = 0;
  bool operator==(const LedgerConflict&) const = default;
};

struct LedgerCollision {
  int npc_id = 0;
  std::string type_key;
  bool ev_fault = true;
  bool operator==(const LedgerCollision&) const = default;
};

/// Scenario passed from conflict search to collision search.
struct Handoff {
  std::string scenario_id;
  int n_conflicts = 0;
  bool operator==(const Handoff&) const = default;
};

/// One simulation, as logged.
struct CampaignEvent {
  int step = 0;
  Stage stage = Stage::Conflict;
  std::string scenario_id;
  std::vector<std::string> parent_ids;
  std::optional<int> generation;
  int n_conflicts = 0;
  int n_spatial = 0;
  double fitness_conflict = 0.0;
  double fitness_collision = 0.0;
  std::optional<LedgerCollision> collision;
  std::uint64_t rng_child_seed = 0;
  std::vector<LedgerConflict> conflicts;
  std::vector<Handoff> handoffs;  // handoffs decided right after this simulation
  bool failed = false;

  bool operator==(const CampaignEvent&) const = default;
};

std::string to_json_line(const CampaignEvent& e);
CampaignEvent parse_event(std::string_view line, std::size_t line_no = 1);

std::string ledger_to_jsonl(const std::vector<CampaignEvent>& events);
/// Blank lines are skipped; anything else that fails to parse throws LedgerError.
std::vector<CampaignEvent> ledger_from_jsonl(std::string_view text);
std::vector<CampaignEvent> read_ledger(const std::filesystem::path& path);

}  // namespace conflictfuzz
