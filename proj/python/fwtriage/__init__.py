"""Firmware dump triage: entropy profiles, signature scans and dump validation."""

from ._fwtriage import (
    ConflictError,
    EntropyProfile,
    FirmwareImage,
    IngestionError,
    InsufficientDataError,
    PersistenceError,
    RecordValidationError,
    SignatureHit,
    compare,
    dense_image,
    erased_image,
    image_from_bytes,
    load_image,
    profile,
    render_rate,
    scan,
    sparse_image,
    validate,
    window_entropy,
)

__version__ = "0.3.0"

__all__ = [
    "ConflictError",
    "EntropyProfile",
    "FirmwareImage",
    "IngestionError",
    "InsufficientDataError",
    "PersistenceError",
    "RecordValidationError",
    "SignatureHit",
    "compare",
    "dense_image",
    "erased_image",
    "image_from_bytes",
    "load_image",
    "profile",
    "render_rate",
    "scan",
    "sparse_image",
    "validate",
    "window_entropy",
]
