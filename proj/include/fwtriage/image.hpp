#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fwtriage/digest.hpp"
#include "fwtriage/timestamp.hpp"

namespace fwtriage {

enum class Interface { spi, swd, uart, other };
enum class Fixture { alligator, hook, direct, none };
enum class PowerSource { bench, battery, programmer, unknown };

std::string_view to_string(Interface v);
std::string_view to_string(Fixture v);
std::string_view to_string(PowerSource v);

// Case-insensitive; throw std::invalid_argument on unknown names.
Interface parse_interface(std::string_view name);
Fixture parse_fixture(std::string_view name);
PowerSource parse_power_source(std::string_view name);

struct AcquisitionMetadata {
  std::string device_model;
  Interface interface = Interface::spi;
  Fixture fixture = Fixture::none;
  PowerSource power_source = PowerSource::unknown;
  Timestamp captured_at{};
  std::string notes;

  friend bool operator==(const AcquisitionMetadata&, const AcquisitionMetadata&) = default;
};

/// Sidecar record, field names as in the corpus store schema.
std::string metadata_to_json(const AcquisitionMetadata& meta);
AcquisitionMetadata metadata_from_json(std::string_view text);

/// Images at or below this size are held in memory; larger files are mapped.
inline constexpr std::uint64_t resident_limit = 64ull << 20;

/// Backing storage for an image payload. Never mutated once built.
class ByteStore {
 public:
  virtual ~ByteStore() = default;
  virtual std::span<const std::uint8_t> bytes() const = 0;
};

/// Immutable dump payload plus acquisition context. Copies share the payload.
class FirmwareImage {
 public:
  /// Throws std::invalid_argument when declared_capacity is 0 or the model is empty.
  FirmwareImage(std::vector<std::uint8_t> payload, std::uint64_t declared_capacity,
                AcquisitionMetadata metadata);
  FirmwareImage(std::shared_ptr<const ByteStore> store, std::uint64_t declared_capacity,
                AcquisitionMetadata metadata);

  std::span<const std::uint8_t> bytes() const { return store_->bytes(); }
  std::uint64_t size() const { return bytes().size(); }
  std::uint64_t declared_capacity() const { return declared_capacity_; }
  const Digest& digest() const { return digest_; }
  const AcquisitionMetadata& metadata() const { return metadata_; }

  /// Same payload, different acquisition context.
  FirmwareImage with_metadata(AcquisitionMetadata metadata) const;

 private:
  std::shared_ptr<const ByteStore> store_;
  std::uint64_t declared_capacity_;
  Digest digest_;
  AcquisitionMetadata metadata_;
};

/// Reads `source` to its end. Length mismatches against the declared capacity
/// are accepted here; tier-1 validation judges them.
FirmwareImage ingest_image(std::istream& source, std::uint64_t declared_capacity,
                           AcquisitionMetadata metadata);

FirmwareImage ingest_image(std::span<const std::uint8_t> source, std::uint64_t declared_capacity,
                           AcquisitionMetadata metadata);

/// Loads a dump file; files larger than resident_limit are memory-mapped.
FirmwareImage load_image(const std::filesystem::path& path, std::uint64_t declared_capacity,
                         AcquisitionMetadata metadata);

bool verify_digest(const FirmwareImage& image, const Digest& expected);

}  // namespace fwtriage
