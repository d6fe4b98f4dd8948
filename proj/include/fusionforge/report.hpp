#pragma once

#include <map>

#include "fusionforge/fusion.hpp"

namespace ff {

// Report assembly: one JSON document per CLI run, schema fusionforge-report/1.
// Group caches are one JSON file per group, schema fusionforge-cache/1, with
// elements in normal-form digit lists. Fusion systems serialize under
// fusionforge-fusion/1. All output is deterministic for a fixed config.

struct RunInfo {
  std::string command;
  u32 p = 0, m = 0;
  bool m_all_odd = false;
  std::string suites;   // echo of the selection
  std::string system;   // fusion selection
  u64 sample = 0, seed = 0;
  std::string out_path, cache_dir;
};

struct SuiteRun {
  std::string suite;
  CheckList checks;
  u64 ms = 0;
  std::string note;  // e.g. sampling or guard-skip annotations
};

std::string render_report(const RunInfo& info, const std::vector<SuiteRun>& suites);

// Writes <dir>/<name>-p<p>-m<m>.json files for every built group plus the
// distinguished subgroups of K; returns the file names written.
std::vector<std::string> write_group_caches(const std::string& dir, const GroupSet& gs);

// Reads the caches back and compares element lists and generators against the
// in-memory tables.
CheckList verify_cache_roundtrip(const std::string& dir, const GroupSet& gs);

std::string fusion_to_json(const FusionSystem& F, u32 m);

// Filesystem helper shared by the CLI: create the directory (best effort) and
// write the whole file.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ff
