// Thin Python surface over the core library: load or synthesize images,
// profile, scan, validate, compare.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fwtriage/consistency.hpp"
#include "fwtriage/corpus.hpp"
#include "fwtriage/entropy.hpp"
#include "fwtriage/errors.hpp"
#include "fwtriage/image.hpp"
#include "fwtriage/signatures.hpp"
#include "fwtriage/synth.hpp"
#include "fwtriage/validation.hpp"

namespace py = pybind11;
using namespace fwtriage;

namespace {

AcquisitionMetadata meta_for(const std::string& model) {
  AcquisitionMetadata m;
  m.device_model = model;
  return m;
}

FirmwareImage from_bytes(const py::bytes& data, std::uint64_t capacity, const std::string& model) {
  const std::string_view view = data;
  std::vector<std::uint8_t> payload(view.begin(), view.end());
  if (capacity == 0) capacity = std::max<std::uint64_t>(1, payload.size());
  return FirmwareImage(std::move(payload), capacity, meta_for(model));
}

py::dict fields_to_dict(const HeaderFields& fields) {
  py::dict d;
  for (const auto& [k, v] : fields) {
    std::visit([&](const auto& x) { d[py::str(k)] = x; }, v);
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_fwtriage, m) {
  m.doc() = "Firmware dump triage core";

  py::register_exception<ingestion_error>(m, "IngestionError", PyExc_OSError);
  py::register_exception<insufficient_data_error>(m, "InsufficientDataError", PyExc_ValueError);
  py::register_exception<conflict_error>(m, "ConflictError", PyExc_RuntimeError);
  py::register_exception<record_validation_error>(m, "RecordValidationError", PyExc_ValueError);
  py::register_exception<persistence_error>(m, "PersistenceError", PyExc_OSError);

  py::class_<FirmwareImage>(m, "FirmwareImage")
      .def_property_readonly("size", &FirmwareImage::size)
      .def_property_readonly("declared_capacity", &FirmwareImage::declared_capacity)
      .def_property_readonly("sha256", [](const FirmwareImage& i) { return i.digest().hex(); })
      .def_property_readonly("device_model",
                             [](const FirmwareImage& i) { return i.metadata().device_model; })
      .def("to_bytes", [](const FirmwareImage& i) {
        const auto b = i.bytes();
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      });

  m.def("image_from_bytes", &from_bytes, py::arg("data"), py::arg("capacity") = 0,
        py::arg("model") = "unspecified",
        "Wrap a bytes payload; capacity 0 means the payload length.");
  m.def(
      "load_image",
      [](const std::filesystem::path& path, std::uint64_t capacity, const std::string& model) {
        if (capacity == 0) {
          std::error_code ec;
          capacity = std::max<std::uint64_t>(1, std::filesystem::file_size(path, ec));
        }
        return load_image(path, capacity, meta_for(model));
      },
      py::arg("path"), py::arg("capacity") = 0, py::arg("model") = "unspecified");

  m.def("dense_image", &make_dense_image, py::arg("seed") = 1);
  m.def("sparse_image", &make_sparse_image, py::arg("seed") = 1);
  m.def("erased_image", &make_erased_image, py::arg("size"), py::arg("noise_windows") = 0,
        py::arg("seed") = 1);

  py::class_<EntropyProfile>(m, "EntropyProfile")
      .def_readonly("window_size", &EntropyProfile::window_size)
      .def_readonly("window_entropies", &EntropyProfile::window_entropies)
      .def_readonly("window_offsets", &EntropyProfile::window_offsets)
      .def_readonly("mean", &EntropyProfile::mean)
      .def_readonly("std", &EntropyProfile::std)
      .def_readonly("low_fraction", &EntropyProfile::low_fraction)
      .def_readonly("high_fraction", &EntropyProfile::high_fraction)
      .def_readonly("dropped_bytes", &EntropyProfile::dropped_bytes)
      .def("to_json", [](const EntropyProfile& p) { return emit_profile(p, ProfileFormat::json); });

  m.def("window_entropy", [](const py::bytes& data) {
    const std::string_view v = data;
    return window_entropy(std::span(reinterpret_cast<const std::uint8_t*>(v.data()), v.size()));
  });
  m.def(
      "profile",
      [](const FirmwareImage& image, std::size_t window_size) {
        ProfileOptions o;
        o.window_size = window_size;
        return profile(image, o);
      },
      py::arg("image"), py::arg("window_size") = default_window_size);

  py::class_<SignatureHit>(m, "SignatureHit")
      .def_readonly("offset", &SignatureHit::offset)
      .def_property_readonly("format",
                             [](const SignatureHit& h) { return std::string(to_string(h.format)); })
      .def_property_readonly(
          "format_class", [](const SignatureHit& h) { return std::string(to_string(h.format_class)); })
      .def_property_readonly("fields", [](const SignatureHit& h) { return fields_to_dict(h.fields); })
      .def_readonly("description", &SignatureHit::description)
      .def("__repr__", [](const SignatureHit& h) {
        return "<SignatureHit " + std::string(to_string(h.format)) + " @" +
               std::to_string(h.offset) + ">";
      });

  m.def(
      "scan",
      [](const FirmwareImage& image, bool verify_jffs2_crc) {
        ScanOptions o;
        o.jffs2_verify_crc = verify_jffs2_crc;
        return scan(image, SignatureCatalog::standard(o)).hits;
      },
      py::arg("image"), py::arg("verify_jffs2_crc") = true);

  m.def(
      "validate",
      [](const std::vector<FirmwareImage>& images, std::size_t window_size) {
        ProfileOptions o;
        o.window_size = window_size;
        return py::module_::import("json").attr("loads")(verdict_to_json(validate(images, o)));
      },
      py::arg("images"), py::arg("window_size") = default_window_size,
      "Three-tier verdict as a dict.");

  m.def("compare", [](const FirmwareImage& a, const FirmwareImage& b) {
    return py::module_::import("json").attr("loads")(report_to_json(compare(a, b)));
  });

  m.def("render_rate", &render_rate);
}
