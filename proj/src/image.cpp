#include "fwtriage/image.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <istream>
#include <json.hpp>
#include <stdexcept>
#include <utility>

#include "fwtriage/errors.hpp"

namespace fwtriage {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view name, const std::array<std::pair<E, std::string_view>, N>& table,
             std::string_view what) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const auto& [value, text] : table) {
    if (text == upper) return value;
  }
  throw std::invalid_argument("unknown " + std::string(what) + " '" + std::string(name) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E v, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [value, text] : table) {
    if (value == v) return text;
  }
  return "?";
}

constexpr std::array<std::pair<Interface, std::string_view>, 4> interface_names{{
    {Interface::spi, "SPI"},
    {Interface::swd, "SWD"},
    {Interface::uart, "UART"},
    {Interface::other, "OTHER"},
}};

constexpr std::array<std::pair<Fixture, std::string_view>, 4> fixture_names{{
    {Fixture::alligator, "ALLIGATOR"},
    {Fixture::hook, "HOOK"},
    {Fixture::direct, "DIRECT"},
    {Fixture::none, "NONE"},
}};

constexpr std::array<std::pair<PowerSource, std::string_view>, 4> power_names{{
    {PowerSource::bench, "BENCH"},
    {PowerSource::battery, "BATTERY"},
    {PowerSource::programmer, "PROGRAMMER"},
    {PowerSource::unknown, "UNKNOWN"},
}};

class VectorStore final : public ByteStore {
 public:
  explicit VectorStore(std::vector<std::uint8_t> data) : data_(std::move(data)) {}
  std::span<const std::uint8_t> bytes() const override { return data_; }

 private:
  std::vector<std::uint8_t> data_;
};

class MappedStore final : public ByteStore {
 public:
  explicit MappedStore(const std::filesystem::path& path) {
    const int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) {
      throw ingestion_error("cannot open " + path.string() + ": " + std::strerror(errno));
    }
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
      ::close(fd);
      throw ingestion_error("cannot stat " + path.string() + ": " + std::strerror(errno));
    }
    size_ = static_cast<std::size_t>(st.st_size);
    if (size_ > 0) {
      void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd, 0);
      if (p == MAP_FAILED) {
        ::close(fd);
        throw ingestion_error("cannot map " + path.string() + ": " + std::strerror(errno));
      }
      data_ = static_cast<const std::uint8_t*>(p);
    }
    ::close(fd);
  }
  ~MappedStore() override {
    if (data_ != nullptr) ::munmap(const_cast<std::uint8_t*>(data_), size_);
  }
  MappedStore(const MappedStore&) = delete;
  MappedStore& operator=(const MappedStore&) = delete;

  std::span<const std::uint8_t> bytes() const override { return {data_, size_}; }

 private:
  const std::uint8_t* data_ = nullptr;
  std::size_t size_ = 0;
};

void check_arguments(std::uint64_t declared_capacity, const AcquisitionMetadata& metadata) {
  if (declared_capacity == 0) throw std::invalid_argument("declared capacity must be non-zero");
  if (metadata.device_model.empty()) throw std::invalid_argument("device model must be non-empty");
}

}  // namespace

std::string_view to_string(Interface v) { return enum_name(v, interface_names); }
std::string_view to_string(Fixture v) { return enum_name(v, fixture_names); }
std::string_view to_string(PowerSource v) { return enum_name(v, power_names); }

Interface parse_interface(std::string_view name) {
  return parse_enum(name, interface_names, "interface");
}
Fixture parse_fixture(std::string_view name) { return parse_enum(name, fixture_names, "fixture"); }
PowerSource parse_power_source(std::string_view name) {
  return parse_enum(name, power_names, "power source");
}

std::string metadata_to_json(const AcquisitionMetadata& meta) {
  nlohmann::ordered_json j;
  j["device_model"] = meta.device_model;
  j["interface"] = to_string(meta.interface);
  j["fixture"] = to_string(meta.fixture);
  j["power_source"] = to_string(meta.power_source);
  j["captured_at"] = format_iso8601(meta.captured_at);
  j["notes"] = meta.notes;
  return j.dump();
}

AcquisitionMetadata metadata_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("metadata is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("device_model")) {
    throw std::invalid_argument("metadata record needs a device_model");
  }
  AcquisitionMetadata m;
  m.device_model = j.at("device_model").get<std::string>();
  if (m.device_model.empty()) throw std::invalid_argument("device model must be non-empty");
  if (j.contains("interface")) m.interface = parse_interface(j["interface"].get<std::string>());
  if (j.contains("fixture")) m.fixture = parse_fixture(j["fixture"].get<std::string>());
  if (j.contains("power_source")) {
    m.power_source = parse_power_source(j["power_source"].get<std::string>());
  }
  if (j.contains("captured_at")) m.captured_at = parse_iso8601(j["captured_at"].get<std::string>());
  if (j.contains("notes")) m.notes = j["notes"].get<std::string>();
  return m;
}

FirmwareImage::FirmwareImage(std::vector<std::uint8_t> payload, std::uint64_t declared_capacity,
                             AcquisitionMetadata metadata)
    : FirmwareImage(std::make_shared<VectorStore>(std::move(payload)), declared_capacity,
                    std::move(metadata)) {}

FirmwareImage::FirmwareImage(std::shared_ptr<const ByteStore> store,
                             std::uint64_t declared_capacity, AcquisitionMetadata metadata)
    : store_(std::move(store)),
      declared_capacity_(declared_capacity),
      metadata_(std::move(metadata)) {
  if (!store_) throw std::invalid_argument("image payload store is null");
  check_arguments(declared_capacity_, metadata_);
  digest_ = sha256(store_->bytes());
}

FirmwareImage FirmwareImage::with_metadata(AcquisitionMetadata metadata) const {
  check_arguments(declared_capacity_, metadata);
  FirmwareImage copy = *this;
  copy.metadata_ = std::move(metadata);
  return copy;
}

FirmwareImage ingest_image(std::istream& source, std::uint64_t declared_capacity,
                           AcquisitionMetadata metadata) {
  check_arguments(declared_capacity, metadata);
  std::vector<std::uint8_t> payload;
  std::array<char, 1 << 16> chunk{};
  while (source) {
    source.read(chunk.data(), chunk.size());
    const auto got = source.gcount();
    payload.insert(payload.end(), chunk.begin(), chunk.begin() + got);
  }
  if (source.bad() || !source.eof()) throw ingestion_error("source stream could not be read to end");
  return FirmwareImage(std::move(payload), declared_capacity, std::move(metadata));
}

FirmwareImage ingest_image(std::span<const std::uint8_t> source, std::uint64_t declared_capacity,
                           AcquisitionMetadata metadata) {
  return FirmwareImage(std::vector<std::uint8_t>(source.begin(), source.end()), declared_capacity,
                       std::move(metadata));
}

FirmwareImage load_image(const std::filesystem::path& path, std::uint64_t declared_capacity,
                         AcquisitionMetadata metadata) {
  check_arguments(declared_capacity, metadata);
  std::error_code ec;
  const auto status = std::filesystem::status(path, ec);
  if (ec || !std::filesystem::is_regular_file(status)) {
    throw ingestion_error("not a readable file: " + path.string());
  }
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw ingestion_error("cannot size " + path.string() + ": " + ec.message());
  if (size > resident_limit) {
    return FirmwareImage(std::make_shared<MappedStore>(path), declared_capacity,
                         std::move(metadata));
  }
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) throw ingestion_error("cannot open " + path.string() + ": " + std::strerror(errno));
  std::vector<std::uint8_t> payload(size);
  std::size_t done = 0;
  while (done < payload.size()) {
    const auto n = ::read(fd, payload.data() + done, payload.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      ::close(fd);
      throw ingestion_error("short read on " + path.string());
    }
    done += static_cast<std::size_t>(n);
  }
  ::close(fd);
  return FirmwareImage(std::move(payload), declared_capacity, std::move(metadata));
}

bool verify_digest(const FirmwareImage& image, const Digest& expected) {
  return sha256(image.bytes()) == expected;
}

}  // namespace fwtriage
