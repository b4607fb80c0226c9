#include "fwtriage/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <stdexcept>

#include "fwtriage/errors.hpp"

namespace fwtriage {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<FailureType, std::string_view>, 9> failure_names{{
    {FailureType::none, "NONE"},
    {FailureType::clip_misalignment, "CLIP_MISALIGNMENT"},
    {FailureType::no_chip_detected, "NO_CHIP_DETECTED"},
    {FailureType::bad_rdid, "BAD_RDID"},
    {FailureType::intermittent_contact, "INTERMITTENT_CONTACT"},
    {FailureType::unstable_detection, "UNSTABLE_DETECTION"},
    {FailureType::corrupt_dump, "CORRUPT_DUMP"},
    {FailureType::no_serial_output, "NO_SERIAL_OUTPUT"},
    {FailureType::other, "OTHER"},
}};

std::string upper(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return u;
}

bool in_cell(const CellKey& cell, std::string_view model, Interface iface, Fixture fixture) {
  return cell.device_model == model && cell.interface == iface && cell.fixture == fixture;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  if (!fs::exists(path)) return lines;
  std::ifstream in(path);
  if (!in) throw persistence_error("cannot read " + path.string());
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (in.bad()) throw persistence_error("read failure on " + path.string());
  return lines;
}

void append_line(const fs::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw persistence_error("cannot open " + path.string() + " for append");
  out << line << '\n';
  out.flush();
  if (!out) throw persistence_error("write failure on " + path.string());
}

}  // namespace

std::string_view to_string(Outcome v) { return v == Outcome::success ? "SUCCESS" : "FAILURE"; }

std::string_view to_string(FailureType v) {
  for (const auto& [value, text] : failure_names) {
    if (value == v) return text;
  }
  return "?";
}

Outcome parse_outcome(std::string_view name) {
  const auto u = upper(name);
  if (u == "SUCCESS") return Outcome::success;
  if (u == "FAILURE") return Outcome::failure;
  throw std::invalid_argument("unknown outcome '" + std::string(name) + "'");
}

FailureType parse_failure_type(std::string_view name) {
  const auto u = upper(name);
  for (const auto& [value, text] : failure_names) {
    if (text == u) return value;
  }
  throw std::invalid_argument("unknown failure type '" + std::string(name) + "'");
}

std::string_view to_string(HashAgreement v) {
  switch (v) {
    case HashAgreement::yes: return "YES";
    case HashAgreement::no: return "NO";
    case HashAgreement::not_applicable: return "N/A";
  }
  return "?";
}

void check_invariants(const AttemptRecord& r) {
  if (r.device_model.empty()) throw record_validation_error("attempt without device model");
  if (r.outcome == Outcome::success && r.failure_type != FailureType::none) {
    throw record_validation_error("successful attempt cannot carry failure type " +
                                  std::string(to_string(r.failure_type)));
  }
  if (r.outcome == Outcome::failure && r.failure_type == FailureType::none) {
    throw record_validation_error("failed attempt needs a failure type");
  }
}

std::string attempt_to_json(const AttemptRecord& r) {
  nlohmann::ordered_json j;
  j["device_model"] = r.device_model;
  j["interface"] = to_string(r.interface);
  j["fixture"] = to_string(r.fixture);
  j["outcome"] = to_string(r.outcome);
  j["failure_type"] = to_string(r.failure_type);
  j["notes"] = r.notes;
  j["recorded_at"] = format_iso8601(r.recorded_at);
  return j.dump();
}

AttemptRecord attempt_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    AttemptRecord r;
    r.device_model = j.at("device_model").get<std::string>();
    r.interface = parse_interface(j.at("interface").get<std::string>());
    r.fixture = parse_fixture(j.at("fixture").get<std::string>());
    r.outcome = parse_outcome(j.at("outcome").get<std::string>());
    r.failure_type = parse_failure_type(j.at("failure_type").get<std::string>());
    r.notes = j.value("notes", "");
    r.recorded_at = parse_iso8601(j.at("recorded_at").get<std::string>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed attempt record: ") + e.what());
  }
}

std::string dump_to_json(const DumpRecord& r) {
  nlohmann::ordered_json j;
  j["digest"] = r.digest.hex();
  j["device_model"] = r.device_model;
  j["interface"] = to_string(r.interface);
  j["fixture"] = to_string(r.fixture);
  j["canonical"] = r.canonical;
  j["verdict_summary"] = r.verdict_summary;
  j["file_reference"] = r.file_reference;
  return j.dump();
}

DumpRecord dump_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    DumpRecord r;
    r.digest = Digest::from_hex(j.at("digest").get<std::string>());
    r.device_model = j.at("device_model").get<std::string>();
    r.interface = parse_interface(j.at("interface").get<std::string>());
    r.fixture = parse_fixture(j.at("fixture").get<std::string>());
    r.canonical = j.at("canonical").get<bool>();
    r.verdict_summary = j.value("verdict_summary", "");
    r.file_reference = j.value("file_reference", "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed dump record: ") + e.what());
  }
}

std::string render_rate(std::optional<double> rate) {
  if (!rate) return "n/a";
  return "~" + std::to_string(static_cast<long long>(std::round(*rate * 100.0))) + "%";
}

std::string cell_label(const CellKey& cell) {
  return std::string(to_string(cell.interface)) + "/" + std::string(to_string(cell.fixture));
}

CorpusStore::CorpusStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw persistence_error("cannot use store directory " + dir_.string());
  }
  std::size_t n = 0;
  for (const auto& line : read_lines(dir_ / attempts_file)) {
    ++n;
    try {
      auto r = attempt_from_json(line);
      check_invariants(r);
      attempts_.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw persistence_error(std::string(attempts_file) + " line " + std::to_string(n) + ": " +
                              e.what());
    }
  }
  n = 0;
  for (const auto& line : read_lines(dir_ / dumps_file)) {
    ++n;
    try {
      dumps_.push_back(dump_from_json(line));
    } catch (const std::exception& e) {
      throw persistence_error(std::string(dumps_file) + " line " + std::to_string(n) + ": " +
                              e.what());
    }
  }
}

void CorpusStore::record_attempt(const AttemptRecord& record) {
  check_invariants(record);
  append_line(dir_ / attempts_file, attempt_to_json(record));
  attempts_.push_back(record);
}

void CorpusStore::register_dump(const DumpRecord& record) {
  if (record.device_model.empty()) throw record_validation_error("dump without device model");
  if (record.canonical) {
    if (auto existing = canonical_dump(record.device_model)) {
      throw conflict_error("device " + record.device_model + " already has canonical dump " +
                           existing->digest.hex() + "; demote it first");
    }
  }
  append_line(dir_ / dumps_file, dump_to_json(record));
  dumps_.push_back(record);
}

bool CorpusStore::demote_canonical(std::string_view device_model) {
  auto it = std::find_if(dumps_.begin(), dumps_.end(), [&](const DumpRecord& d) {
    return d.canonical && d.device_model == device_model;
  });
  if (it == dumps_.end()) return false;
  it->canonical = false;
  rewrite_dumps();
  return true;
}

void CorpusStore::rewrite_dumps() const {
  const fs::path target = dir_ / dumps_file;
  const fs::path tmp = dir_ / (std::string(dumps_file) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw persistence_error("cannot write " + tmp.string());
    for (const auto& d : dumps_) out << dump_to_json(d) << '\n';
    out.flush();
    if (!out) throw persistence_error("write failure on " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw persistence_error("cannot replace " + target.string() + ": " + ec.message());
}

std::vector<AttemptRecord> CorpusStore::attempts_for(const CellKey& cell) const {
  std::vector<AttemptRecord> out;
  for (const auto& a : attempts_) {
    if (in_cell(cell, a.device_model, a.interface, a.fixture)) out.push_back(a);
  }
  return out;
}

std::optional<DumpRecord> CorpusStore::canonical_dump(std::string_view device_model) const {
  for (const auto& d : dumps_) {
    if (d.canonical && d.device_model == device_model) return d;
  }
  return std::nullopt;
}

SuccessRate CorpusStore::success_rate(const CellKey& cell) const {
  SuccessRate r;
  for (const auto& a : attempts_) {
    if (!in_cell(cell, a.device_model, a.interface, a.fixture)) continue;
    ++r.attempts;
    if (a.outcome == Outcome::success) ++r.successes;
  }
  if (r.attempts > 0) r.rate = static_cast<double>(r.successes) / static_cast<double>(r.attempts);
  return r;
}

CorpusSummary CorpusStore::summarize() const {
  std::set<CellKey> cells;
  for (const auto& a : attempts_) cells.insert({a.device_model, a.interface, a.fixture});
  for (const auto& d : dumps_) cells.insert({d.device_model, d.interface, d.fixture});

  CorpusSummary summary;
  for (const auto& cell : cells) {
    const auto rate = success_rate(cell);
    SummaryRow row{cell, rate.attempts, rate.successes, rate.rate, HashAgreement::not_applicable};
    std::vector<Digest> digests;
    for (const auto& d : dumps_) {
      if (in_cell(cell, d.device_model, d.interface, d.fixture)) digests.push_back(d.digest);
    }
    if (digests.size() >= 2) {
      const bool same = std::all_of(digests.begin(), digests.end(),
                                    [&](const Digest& d) { return d == digests.front(); });
      row.hashes_identical = same ? HashAgreement::yes : HashAgreement::no;
    }
    summary.push_back(std::move(row));
  }
  return summary;
}

std::map<FailureType, std::uint64_t> CorpusStore::failure_histogram() const {
  std::map<FailureType, std::uint64_t> h;
  for (const auto& a : attempts_) {
    if (a.outcome == Outcome::failure) ++h[a.failure_type];
  }
  return h;
}

std::map<FailureType, std::uint64_t> CorpusStore::failure_histogram(const CellKey& cell) const {
  std::map<FailureType, std::uint64_t> h;
  for (const auto& a : attempts_) {
    if (a.outcome == Outcome::failure && in_cell(cell, a.device_model, a.interface, a.fixture)) {
      ++h[a.failure_type];
    }
  }
  return h;
}

std::string summary_to_csv(const CorpusSummary& summary) {
  std::string out = "device_model,interface_fixture,attempts,successes,rate,hashes_identical\n";
  for (const auto& row : summary) {
    std::string rate;
    if (row.rate) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", *row.rate);
      rate = buf;
    }
    out += row.cell.device_model + "," + cell_label(row.cell) + "," +
           std::to_string(row.attempts) + "," + std::to_string(row.successes) + "," + rate + "," +
           std::string(to_string(row.hashes_identical)) + "\n";
  }
  return out;
}

std::string summary_to_table(const CorpusSummary& summary) {
  std::string out = "MODEL      INTERFACE         ATTEMPTS  SUCCESS  RATE   HASHES IDENTICAL\n";
  for (const auto& row : summary) {
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-17s %8llu %8llu  %-6s %s\n",
                  row.cell.device_model.c_str(), cell_label(row.cell).c_str(),
                  static_cast<unsigned long long>(row.attempts),
                  static_cast<unsigned long long>(row.successes), render_rate(row.rate).c_str(),
                  std::string(to_string(row.hashes_identical)).c_str());
    out += line;
  }
  return out;
}

}  // namespace fwtriage
