#include "tmpfc/app/batch.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "tmpfc/error.hpp"

namespace tmpfc::app {

namespace fs = std::filesystem;

std::vector<fs::path> find_manifests(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no manifests found in " + dir.string());
  std::sort(out.begin(), out.end());
  return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

// One slot per input, filled by whichever worker handles it.
struct Slot {
  std::string case_id;
  std::optional<ReportRow> row;
  std::optional<GateDecision> gate;
  std::optional<BatchFailure> failure;
  bool processed = false;
};

std::string safe_name(const std::string& id) {
  std::string s = id;
  for (char& c : s)
    if (c == '/' || c == '\\' || c == ':') c = '_';
  return s;
}

BatchResult collect(std::vector<Slot>& slots) {
  std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.case_id < b.case_id; });
  BatchResult out;
  for (auto& s : slots) {
    if (s.row) out.rows.push_back(std::move(*s.row));
    if (s.gate) out.gated.push_back(std::move(*s.gate));
    if (s.failure) out.failures.push_back(std::move(*s.failure));
    if (s.processed) ++out.processed;
  }
  return out;
}

void fail(Slot& slot, ErrorCode code, const std::string& message) {
  slot.row = error_row(slot.case_id, code);
  slot.failure = BatchFailure{slot.case_id, std::string(to_string(code)), message};
}

}  // namespace

std::string BatchResult::csv() const {
  std::string s = csv_header() + "\n";
  for (const auto& r : rows) s += to_csv_line(r) + "\n";
  return s;
}

std::string BatchResult::summary_json() const {
  using nlohmann::ordered_json;
  std::map<std::string, std::size_t> by_verdict, by_band;
  for (const auto& r : rows) {
    ++by_verdict[r.qc_verdict];
    if (r.band) ++by_band[std::string(to_string(*r.band))];
  }
  ordered_json doc;
  doc["cases"] = rows.size();
  doc["succeeded"] = succeeded();
  doc["processed"] = processed;
  doc["gate_excluded"] = gated.size();
  doc["errors"] = failures.size();
  doc["by_verdict"] = by_verdict;
  doc["by_band"] = by_band;
  ordered_json excluded = ordered_json::array();
  for (const auto& g : gated) excluded.push_back({{"case_id", g.case_id}, {"reason", g.reason}});
  doc["excluded"] = std::move(excluded);
  ordered_json failed = ordered_json::array();
  for (const auto& f : failures) failed.push_back({{"case_id", f.case_id}, {"error", f.code}, {"message", f.message}});
  doc["failed"] = std::move(failed);
  return doc.dump(2) + "\n";
}

BatchResult run_batch(const std::vector<fs::path>& manifest_paths,
                      const std::optional<std::vector<DetectionRecord>>& detections, const RunConfig& config,
                      const std::optional<BatchOutputs>& outputs) {
  const std::size_t n = manifest_paths.size();
  std::vector<Slot> slots(n);
  std::vector<std::optional<Manifest>> manifests(n);

  // Manifests are small; parse serially so duplicate detection is ordered.
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < n; ++i) {
    slots[i].case_id = manifest_paths[i].stem().string();
    try {
      manifests[i] = load_manifest(manifest_paths[i]);
      slots[i].case_id = manifests[i]->case_id;
    } catch (const Error& e) {
      fail(slots[i], e.code(), e.what());
      continue;
    }
    if (!seen.emplace(slots[i].case_id, i).second) {
      fail(slots[i], ErrorCode::DuplicateCase,
           "case id also used by " + manifest_paths[seen[slots[i].case_id]].filename().string());
      manifests[i].reset();
    }
  }

  if (outputs) {
    fs::create_directories(outputs->dir / "cases");
    if (outputs->plots) fs::create_directories(outputs->dir / "plots");
  }

  parallel_for(n, config.jobs, [&](std::size_t i) {
    Slot& slot = slots[i];
    if (!manifests[i]) return;
    const Manifest& m = *manifests[i];
    if (detections) {
      GateDecision g = gate_route(m.case_id, *detections);
      if (g.route == Route::ExcludeObstructive) {
        slot.row = gate_row(m, g);
        slot.gate = std::move(g);
        return;
      }
    }
    try {
      CaseOutcome outcome = run_case(m, config);
      slot.row = make_row(outcome);
      slot.processed = true;
      if (outputs) {
        const std::string name = safe_name(m.case_id);
        write_atomic(outputs->dir / "cases" / (name + ".json"), case_json(outcome));
        if (outputs->plots) write_atomic(outputs->dir / "plots" / (name + ".svg"), curve_svg(outcome));
      }
    } catch (const Error& e) {
      slot.processed = false;
      fail(slot, e.code(), e.what());
    } catch (const std::exception& e) {
      slot.processed = false;
      fail(slot, ErrorCode::IoError, e.what());
    }
  });

  BatchResult result = collect(slots);
  if (outputs) {
    write_atomic(outputs->dir / "results.csv", result.csv());
    write_atomic(outputs->dir / "summary.json", result.summary_json());
  }
  return result;
}

BatchResult run_batch(const std::vector<MaskSequence>& sequences, const RunConfig& config) {
  std::vector<Slot> slots(sequences.size());
  parallel_for(sequences.size(), config.jobs, [&](std::size_t i) {
    Slot& slot = slots[i];
    slot.case_id = sequences[i].manifest.case_id;
    try {
      slot.row = make_row(run_case(sequences[i], config));
      slot.processed = true;
    } catch (const Error& e) {
      fail(slot, e.code(), e.what());
    }
  });
  return collect(slots);
}

}  // namespace tmpfc::app
