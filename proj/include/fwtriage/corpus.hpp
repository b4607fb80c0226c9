#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fwtriage/digest.hpp"
#include "fwtriage/image.hpp"
#include "fwtriage/timestamp.hpp"

namespace fwtriage {

enum class Outcome { success, failure };

enum class FailureType {
  none,
  clip_misalignment,
  no_chip_detected,
  bad_rdid,
  intermittent_contact,
  unstable_detection,
  corrupt_dump,
  no_serial_output,
  other,
};

std::string_view to_string(Outcome v);
std::string_view to_string(FailureType v);
Outcome parse_outcome(std::string_view name);
FailureType parse_failure_type(std::string_view name);

struct AttemptRecord {
  std::string device_model;
  Interface interface = Interface::spi;
  Fixture fixture = Fixture::none;
  Outcome outcome = Outcome::success;
  FailureType failure_type = FailureType::none;
  std::string notes;
  Timestamp recorded_at{};

  friend bool operator==(const AttemptRecord&, const AttemptRecord&) = default;
};

struct DumpRecord {
  Digest digest;
  std::string device_model;
  Interface interface = Interface::spi;
  Fixture fixture = Fixture::none;
  bool canonical = false;
  std::string verdict_summary;
  std::string file_reference;

  friend bool operator==(const DumpRecord&, const DumpRecord&) = default;
};

/// Throws record_validation_error when outcome and failure_type disagree or
/// the model is empty.
void check_invariants(const AttemptRecord& r);

std::string attempt_to_json(const AttemptRecord& r);
AttemptRecord attempt_from_json(std::string_view line);
std::string dump_to_json(const DumpRecord& r);
DumpRecord dump_from_json(std::string_view line);

struct CellKey {
  std::string device_model;
  Interface interface = Interface::spi;
  Fixture fixture = Fixture::none;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct SuccessRate {
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::optional<double> rate;  // nullopt when attempts == 0
};

enum class HashAgreement { yes, no, not_applicable };
std::string_view to_string(HashAgreement v);

struct SummaryRow {
  CellKey cell;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::optional<double> rate;
  HashAgreement hashes_identical = HashAgreement::not_applicable;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

using CorpusSummary = std::vector<SummaryRow>;

/// "~63%" style whole-percent rendering (half away from zero); "n/a" if undefined.
std::string render_rate(std::optional<double> rate);

/// Directory-backed ledger: attempts.jsonl (append-only) and dumps.jsonl.
/// Single writer; callers serialize concurrent writes.
class CorpusStore {
 public:
  static constexpr std::string_view attempts_file = "attempts.jsonl";
  static constexpr std::string_view dumps_file = "dumps.jsonl";

  /// Creates the directory if needed and loads both ledgers.
  explicit CorpusStore(std::filesystem::path dir);

  const std::filesystem::path& directory() const { return dir_; }

  void record_attempt(const AttemptRecord& record);
  /// Throws conflict_error for a second canonical record of one model.
  void register_dump(const DumpRecord& record);
  /// Clears the canonical flag of the model's canonical dump, if any.
  /// Returns whether a record was demoted.
  bool demote_canonical(std::string_view device_model);

  const std::vector<AttemptRecord>& attempts() const { return attempts_; }
  const std::vector<DumpRecord>& dumps() const { return dumps_; }
  std::vector<AttemptRecord> attempts_for(const CellKey& cell) const;
  std::optional<DumpRecord> canonical_dump(std::string_view device_model) const;

  SuccessRate success_rate(const CellKey& cell) const;
  CorpusSummary summarize() const;
  std::map<FailureType, std::uint64_t> failure_histogram() const;
  std::map<FailureType, std::uint64_t> failure_histogram(const CellKey& cell) const;

 private:
  void rewrite_dumps() const;

  std::filesystem::path dir_;
  std::vector<AttemptRecord> attempts_;
  std::vector<DumpRecord> dumps_;
};

/// Columns: device_model,interface_fixture,attempts,successes,rate,hashes_identical
std::string summary_to_csv(const CorpusSummary& summary);
std::string summary_to_table(const CorpusSummary& summary);
std::string cell_label(const CellKey& cell);

}  // namespace fwtriage
