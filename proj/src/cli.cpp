#include "fwtriage/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <ostream>

#include "fwtriage/consistency.hpp"
#include "fwtriage/corpus.hpp"
#include "fwtriage/entropy.hpp"
#include "fwtriage/errors.hpp"
#include "fwtriage/image.hpp"
#include "fwtriage/signatures.hpp"
#include "fwtriage/synth.hpp"
#include "fwtriage/validation.hpp"

namespace fwtriage::cli {

namespace fs = std::filesystem;

namespace {

/// Bad input from the operator: reported and mapped to the usage exit code.
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_size(const std::string& text) {
  std::size_t pos = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == 0) throw usage_error("size '" + text + "' does not start with a number");
  const std::uint64_t value = std::stoull(text.substr(0, pos));
  std::string unit = text.substr(pos);
  unit.erase(std::remove(unit.begin(), unit.end(), ' '), unit.end());
  std::transform(unit.begin(), unit.end(), unit.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (unit.empty() || unit == "b") return value;
  if (unit == "kib") return value << 10;
  if (unit == "mib") return value << 20;
  if (unit == "gib") return value << 30;
  throw usage_error("size '" + text + "' has an unknown unit (use bytes, KiB or MiB)");
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(v));
  return buf;
}

AcquisitionMetadata metadata_for(const std::string& model) {
  AcquisitionMetadata m;
  m.device_model = model.empty() ? "unspecified" : model;
  return m;
}

FirmwareImage open_image(const std::string& path, std::optional<std::uint64_t> capacity,
                         const std::string& model) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw usage_error(path + ": no such file");
  const std::uint64_t size = fs::file_size(path, ec);
  if (ec) throw usage_error(path + ": " + ec.message());
  try {
    return load_image(path, capacity.value_or(std::max<std::uint64_t>(1, size)),
                      metadata_for(model));
  } catch (const ingestion_error& e) {
    throw usage_error(path + ": " + e.what());
  }
}

EntropyProfile profile_or_usage(const FirmwareImage& image, const ProfileOptions& opts,
                                const std::string& path) {
  try {
    return profile(image, opts);
  } catch (const insufficient_data_error& e) {
    throw usage_error(path + ": " + e.what());
  }
}

std::string profile_table(const EntropyProfile& p) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line,
                "windows %zu x %zu bytes, mean %.3f, std %.3f, low %.1f%%, high %.1f%%\n",
                p.window_count(), p.window_size, p.mean, p.std, 100.0 * p.low_fraction,
                100.0 * p.high_fraction);
  out += line;
  out += "OFFSET      ENTROPY  BAND\n";
  for (std::size_t i = 0; i < p.window_count(); ++i) {
    std::snprintf(line, sizeof line, "%-11s %7.4f  %s\n", hex(p.window_offsets[i]).c_str(),
                  p.window_entropies[i], std::string(to_string(p.band_at(i))).c_str());
    out += line;
  }
  return out;
}

std::string region_table(const RegionMap& map) {
  std::string out;
  for (const auto& r : map.regions) {
    char line[96];
    std::snprintf(line, sizeof line, "%-10s - %-10s %-4s", hex(r.start).c_str(),
                  hex(r.end).c_str(), std::string(to_string(r.band)).c_str());
    out += line;
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
      out += (i == 0 ? "  " : ", ") + std::string(to_string(r.labels[i]));
    }
    out += "\n";
  }
  return out;
}

fs::path store_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(store_env); env != nullptr && *env != '\0') return env;
  throw usage_error(std::string("no corpus store given (use --store or set ") + store_env + ")");
}

template <typename F>
auto parse_enum(F parse, const std::string& text) {
  try {
    return parse(text);
  } catch (const std::invalid_argument& e) {
    throw usage_error(e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Firmware dump triage: entropy, signatures, validation, corpus", "fwtriage"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fwtriage 0.3.0");

  int code = exit_code::ok;

  // entropy
  std::string entropy_file, entropy_format = "table";
  std::size_t entropy_window = default_window_size;
  auto* entropy_cmd = app.add_subcommand("entropy", "Sliding-window entropy profile");
  entropy_cmd->add_option("file", entropy_file, "Dump file")->required();
  entropy_cmd->add_option("--window", entropy_window, "Window size in bytes")
      ->check(CLI::PositiveNumber);
  entropy_cmd->add_option("--format", entropy_format)
      ->check(CLI::IsMember({"table", "csv", "json"}));

  // scan
  std::string scan_file, scan_format = "table";
  bool scan_no_crc = false;
  auto* scan_cmd = app.add_subcommand("scan", "Structural signature scan");
  scan_cmd->add_option("file", scan_file, "Dump file")->required();
  scan_cmd->add_option("--format", scan_format)->check(CLI::IsMember({"table", "jsonl"}));
  scan_cmd->add_flag("--no-jffs2-crc", scan_no_crc, "Accept JFFS2 nodes without a header CRC check");

  // validate
  std::vector<std::string> validate_files;
  std::string validate_capacity, validate_model, validate_format = "text";
  std::size_t validate_window = default_window_size;
  auto* validate_cmd = app.add_subcommand("validate", "Three-tier dump validation");
  validate_cmd->add_option("files", validate_files, "Repeated reads of one device")->required();
  validate_cmd->add_option("--capacity", validate_capacity, "Flash capacity (bytes, KiB, MiB)")
      ->required();
  validate_cmd->add_option("--model", validate_model, "Device model")->required();
  validate_cmd->add_option("--window", validate_window)->check(CLI::PositiveNumber);
  validate_cmd->add_option("--format", validate_format)->check(CLI::IsMember({"text", "json"}));

  // compare
  std::string compare_a, compare_b, compare_format = "text";
  auto* compare_cmd = app.add_subcommand("compare", "Byte and signature consistency of two reads");
  compare_cmd->add_option("a", compare_a)->required();
  compare_cmd->add_option("b", compare_b)->required();
  compare_cmd->add_option("--format", compare_format)->check(CLI::IsMember({"text", "json"}));

  // map
  std::string map_file, map_format = "text";
  std::size_t map_width = 64, map_window = default_window_size;
  auto* map_cmd = app.add_subcommand("map", "Entropy band bar with signature labels");
  map_cmd->add_option("file", map_file)->required();
  map_cmd->add_option("--width", map_width, "Characters in the bar")->check(CLI::PositiveNumber);
  map_cmd->add_option("--window", map_window)->check(CLI::PositiveNumber);
  map_cmd->add_option("--format", map_format)->check(CLI::IsMember({"text", "json"}));

  // corpus
  std::string store_flag;
  auto* corpus_cmd = app.add_subcommand("corpus", "Acquisition ledger");
  corpus_cmd->add_option("--store", store_flag, "Store directory (default: $FWTRIAGE_STORE)");
  corpus_cmd->require_subcommand(1);

  std::string att_model, att_interface = "SPI", att_fixture = "NONE", att_outcome,
                         att_failure = "NONE", att_notes, att_at;
  auto* attempt_cmd = corpus_cmd->add_subcommand("attempt", "Record an acquisition attempt");
  attempt_cmd->add_option("--model", att_model)->required();
  attempt_cmd->add_option("--interface", att_interface);
  attempt_cmd->add_option("--fixture", att_fixture);
  attempt_cmd->add_option("--outcome", att_outcome, "SUCCESS or FAILURE")->required();
  attempt_cmd->add_option("--failure-type", att_failure);
  attempt_cmd->add_option("--notes", att_notes);
  attempt_cmd->add_option("--at", att_at, "ISO-8601 time (default: now)");

  std::string dump_file, dump_digest, dump_model, dump_interface = "SPI", dump_fixture = "NONE",
                                                  dump_verdict, dump_reference;
  bool dump_canonical = false;
  auto* dump_cmd = corpus_cmd->add_subcommand("dump", "Register a dump by file or digest");
  auto* dump_file_opt = dump_cmd->add_option("file", dump_file);
  auto* dump_digest_opt = dump_cmd->add_option("--digest", dump_digest, "SHA-256 hex");
  dump_file_opt->excludes(dump_digest_opt);
  dump_cmd->add_option("--model", dump_model)->required();
  dump_cmd->add_option("--interface", dump_interface);
  dump_cmd->add_option("--fixture", dump_fixture);
  dump_cmd->add_flag("--canonical", dump_canonical);
  dump_cmd->add_option("--verdict", dump_verdict, "Verdict summary to store with the record");
  dump_cmd->add_option("--reference", dump_reference, "File reference (default: the file path)");

  std::string demote_model;
  auto* demote_cmd = corpus_cmd->add_subcommand("demote", "Clear a model's canonical flag");
  demote_cmd->add_option("--model", demote_model)->required();

  std::string summary_format = "table";
  auto* summary_cmd = corpus_cmd->add_subcommand("summary", "Success rates per device and fixture");
  summary_cmd->add_option("--format", summary_format)->check(CLI::IsMember({"table", "csv"}));

  std::string fail_model, fail_interface, fail_fixture, fail_format = "table";
  auto* failures_cmd = corpus_cmd->add_subcommand("failures", "Failure-type histogram");
  failures_cmd->add_option("--model", fail_model);
  failures_cmd->add_option("--interface", fail_interface);
  failures_cmd->add_option("--fixture", fail_fixture);
  failures_cmd->add_option("--format", fail_format)->check(CLI::IsMember({"table", "json"}));

  // synth
  std::string synth_kind, synth_out, synth_manifest, synth_size = "8MiB";
  std::uint64_t synth_seed = 1, synth_noise = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic fixture");
  synth_cmd->add_option("kind", synth_kind)
      ->required()
      ->check(CLI::IsMember({"dense", "sparse", "erased"}));
  synth_cmd->add_option("--seed", synth_seed);
  synth_cmd->add_option("--out", synth_out)->required();
  synth_cmd->add_option("--manifest", synth_manifest, "Manifest path (default: <out>.json)");
  synth_cmd->add_option("--size", synth_size, "Erased image size");
  synth_cmd->add_option("--noise-windows", synth_noise, "Erased image noise windows");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "fwtriage: " << e.what() << "\n";
    return exit_code::usage;
  }

  try {
    if (entropy_cmd->parsed()) {
      const auto image = open_image(entropy_file, std::nullopt, "");
      ProfileOptions opts;
      opts.window_size = entropy_window;
      const auto p = profile_or_usage(image, opts, entropy_file);
      if (entropy_format == "csv") {
        out << emit_profile(p, ProfileFormat::csv);
      } else if (entropy_format == "json") {
        out << emit_profile(p, ProfileFormat::json);
      } else {
        out << profile_table(p);
      }
    } else if (scan_cmd->parsed()) {
      const auto image = open_image(scan_file, std::nullopt, "");
      ScanOptions opts;
      opts.jffs2_verify_crc = !scan_no_crc;
      const auto result = scan(image, SignatureCatalog::standard(opts));
      out << (scan_format == "jsonl" ? hits_to_jsonl(result.hits) : hits_to_table(result.hits));
    } else if (validate_cmd->parsed()) {
      const std::uint64_t capacity = parse_size(validate_capacity);
      if (capacity == 0) throw usage_error("capacity must be positive");
      std::vector<FirmwareImage> images;
      for (const auto& f : validate_files) images.push_back(open_image(f, capacity, validate_model));
      ProfileOptions opts;
      opts.window_size = validate_window;
      const auto verdict = validate(images, opts);
      out << (validate_format == "json" ? verdict_to_json(verdict) + "\n"
                                        : verdict_to_text(verdict));
      code = verdict.overall == OverallStatus::validated ? exit_code::ok : exit_code::incomplete;
    } else if (compare_cmd->parsed()) {
      const auto a = open_image(compare_a, std::nullopt, "");
      const auto b = open_image(compare_b, std::nullopt, "");
      const auto report = compare(a, b);
      if (compare_format == "json") {
        out << report_to_json(report) << "\n";
      } else {
        out << report_summary(report) << "\n";
        if (!report.digest_equal) {
          out << "sizes " << a.size() << " / " << b.size() << ", signature maps "
              << (report.signature_map_equal ? "equal" : "differ") << "\n";
          for (const auto& d : report.signature_deltas) {
            out << "  " << hex(d.offset) << " " << to_string(d.format) << " only in "
                << (d.present_in == Side::a ? compare_a : compare_b) << "\n";
          }
        }
      }
      code = report.consistent() ? exit_code::ok : exit_code::divergent;
    } else if (map_cmd->parsed()) {
      const auto image = open_image(map_file, std::nullopt, "");
      ProfileOptions opts;
      opts.window_size = map_window;
      const auto p = profile_or_usage(image, opts, map_file);
      const auto regions = layout_map(p, scan(image));
      if (map_format == "json") {
        out << region_map_to_json(regions) << "\n";
      } else {
        const std::size_t per_char = (p.window_count() + map_width - 1) / map_width;
        out << "|" << render_region_bar(p, per_char) << "|\n";
        out << "'.' low  '-' mid  '#' high; " << per_char << " window(s) per character\n";
        out << region_table(regions);
      }
    } else if (corpus_cmd->parsed()) {
      CorpusStore store(store_dir(store_flag));
      if (attempt_cmd->parsed()) {
        AttemptRecord r;
        r.device_model = att_model;
        r.interface = parse_enum(parse_interface, att_interface);
        r.fixture = parse_enum(parse_fixture, att_fixture);
        r.outcome = parse_enum(parse_outcome, att_outcome);
        r.failure_type = parse_enum(parse_failure_type, att_failure);
        r.notes = att_notes;
        r.recorded_at = att_at.empty() ? now_utc() : parse_enum(parse_iso8601, att_at);
        try {
          store.record_attempt(r);
        } catch (const record_validation_error& e) {
          throw usage_error(e.what());
        }
        out << attempt_to_json(r) << "\n";
      } else if (dump_cmd->parsed()) {
        DumpRecord r;
        if (!dump_file.empty()) {
          r.digest = open_image(dump_file, std::nullopt, dump_model).digest();
          r.file_reference = dump_file;
        } else if (!dump_digest.empty()) {
          r.digest = parse_enum(Digest::from_hex, dump_digest);
        } else {
          throw usage_error("corpus dump needs a file or --digest");
        }
        if (!dump_reference.empty()) r.file_reference = dump_reference;
        r.device_model = dump_model;
        r.interface = parse_enum(parse_interface, dump_interface);
        r.fixture = parse_enum(parse_fixture, dump_fixture);
        r.canonical = dump_canonical;
        r.verdict_summary = dump_verdict;
        try {
          store.register_dump(r);
        } catch (const conflict_error& e) {
          throw usage_error(e.what());
        }
        out << dump_to_json(r) << "\n";
      } else if (demote_cmd->parsed()) {
        const bool demoted = store.demote_canonical(demote_model);
        out << (demoted ? "demoted canonical dump of " : "no canonical dump for ") << demote_model
            << "\n";
      } else if (summary_cmd->parsed()) {
        const auto summary = store.summarize();
        out << (summary_format == "csv" ? summary_to_csv(summary) : summary_to_table(summary));
      } else if (failures_cmd->parsed()) {
        std::map<FailureType, std::uint64_t> hist;
        const bool filtered = !fail_model.empty();
        if (filtered) {
          if (fail_interface.empty() || fail_fixture.empty()) {
            throw usage_error("--model needs --interface and --fixture to select a cell");
          }
          hist = store.failure_histogram(CellKey{fail_model,
                                                 parse_enum(parse_interface, fail_interface),
                                                 parse_enum(parse_fixture, fail_fixture)});
        } else {
          hist = store.failure_histogram();
        }
        if (fail_format == "json") {
          nlohmann::ordered_json j = nlohmann::ordered_json::object();
          for (const auto& [type, count] : hist) j[std::string(to_string(type))] = count;
          out << j.dump() << "\n";
        } else {
          out << "FAILURE TYPE           COUNT\n";
          for (const auto& [type, count] : hist) {
            char line[64];
            std::snprintf(line, sizeof line, "%-22s %5llu\n",
                          std::string(to_string(type)).c_str(),
                          static_cast<unsigned long long>(count));
            out << line;
          }
        }
      }
    } else if (synth_cmd->parsed()) {
      FixturePlan plan;
      AcquisitionMetadata meta;
      meta.notes = "synthetic";
      if (synth_kind == "dense") {
        plan = dense_plan(synth_seed);
        meta.device_model = "HS175D";
      } else if (synth_kind == "sparse") {
        plan = sparse_plan(synth_seed);
        meta.device_model = "HS720";
      } else {
        try {
          plan = erased_plan(parse_size(synth_size), synth_noise, synth_seed);
        } catch (const std::invalid_argument& e) {
          throw usage_error(e.what());
        }
        meta.device_model = "HS360S";
      }
      const auto dump = synthesize(plan, meta);
      const fs::path manifest = synth_manifest.empty() ? fs::path(synth_out + ".json")
                                                       : fs::path(synth_manifest);
      {
        std::ofstream f(synth_out, std::ios::binary | std::ios::trunc);
        const auto bytes = dump.image.bytes();
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
        if (!f) throw usage_error("cannot write " + synth_out);
      }
      {
        std::ofstream f(manifest, std::ios::trunc);
        f << manifest_to_json(dump, "synth " + synth_kind) << "\n";
        if (!f) throw usage_error("cannot write " + manifest.string());
      }
      out << synth_out << ": " << dump.image.size() << " bytes, sha256 "
          << dump.image.digest().hex() << ", " << dump.expected_hits.size()
          << " planted signatures\n";
    }
  } catch (const usage_error& e) {
    err << "fwtriage: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::invalid_argument& e) {
    err << "fwtriage: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "fwtriage: internal error: " << e.what() << "\n";
    return exit_code::internal;
  }
  return code;
}

}  // namespace fwtriage::cli
