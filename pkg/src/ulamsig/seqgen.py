"""Ulam-type sequence generation and sequence file I/O.

The generator appends the smallest integer with exactly one representation
as a sum of two distinct earlier terms.  The sieve behind it is word-packed
(see ``backend``) and handles 10^7-term runs; results are deterministic and
SequenceData is immutable-by-convention after construction.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import backend
from .errors import DataFormatError

FAMILIES = ("ulam", "stern", "macmahon", "lagarias", "synthetic")

_BIN_MAGIC = b"USEQ"
_BIN_VERSION = 1


@dataclass(frozen=True)
class SequenceSpec:
    """Recipe for a sequence: family, initial values, and generation caps."""

    family: str
    init: tuple[int, int] | None = None
    count: int | None = None
    limit: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "ulam":
            if self.init is None:
                raise ValueError("family 'ulam' requires initial values")
            a, b = self.init
            if not (1 <= a < b):
                raise ValueError(
                    f"initial values must satisfy 1 <= a < b, got ({a}, {b})"
                )
            if b >= 1 << 48:
                raise ValueError("initial values must be below 2^48")
        elif self.init is not None:
            raise ValueError(f"family {self.family!r} takes no initial values")
        if self.count is None and self.limit is None:
            raise ValueError("at least one of count/limit must be set")
        if self.count is not None and self.count < 2:
            raise ValueError(f"count must be >= 2, got {self.count}")
        if self.limit is not None and self.limit < 1:
            raise ValueError(f"limit must be >= 1, got {self.limit}")


@dataclass
class SequenceData:
    """Materialized terms plus generation metadata.

    ``generated_up_to`` is the largest integer examined by the generator, so
    membership below it is decided and densities are well-defined.  Terms are
    strictly increasing for every family except stern.
    """

    spec: SequenceSpec | None
    terms: np.ndarray
    generated_up_to: int
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.terms = np.ascontiguousarray(self.terms, dtype=np.uint64)
        if not self._validate:
            return
        if self.terms.size == 0:
            raise ValueError("a sequence must contain at least one term")
        family = self.spec.family if self.spec is not None else None
        if family != "stern":
            if self.terms.size > 1 and not (np.diff(self.terms.astype(np.int64)) > 0).all():
                raise ValueError("terms must be strictly increasing")
            if int(self.terms[-1]) > self.generated_up_to:
                raise ValueError("terms exceed generated_up_to")
        if family == "ulam" and self.spec.init is not None:
            if tuple(int(t) for t in self.terms[:2]) != self.spec.init:
                raise ValueError("terms do not start with the initial values")

    def __len__(self):
        return int(self.terms.size)


def ulam_terms(spec: SequenceSpec, *, memory_cap: int | None = None) -> SequenceData:
    """Generate the unique greedy Ulam-type sequence for ``spec``.

    Generation stops at whichever of spec.count / spec.limit is hit first.
    Raises MemoryBudgetError when the sieve would exceed ``memory_cap``
    (default from ULAMSIG_MEMORY_CAP, 4 GiB).
    """
    if spec.family != "ulam":
        raise ValueError(f"ulam_terms handles family 'ulam', not {spec.family!r}")
    cap = backend.DEFAULT_MEMORY_CAP if memory_cap is None else int(memory_cap)
    terms, gup = backend.ulam_sieve(
        spec.init[0], spec.init[1], spec.count or 0, spec.limit or 0, cap
    )
    return SequenceData(spec=spec, terms=terms, generated_up_to=gup)


def density(data: SequenceData, limit: int) -> float:
    """(#terms <= limit) / limit.  Requires generated_up_to >= limit."""
    if limit < 1:
        raise ValueError(f"limit must be positive, got {limit}")
    if data.generated_up_to < limit:
        raise ValueError(
            f"density up to {limit} needs generated_up_to >= {limit}, "
            f"have {data.generated_up_to}"
        )
    count = int(np.searchsorted(data.terms, np.uint64(limit), side="right"))
    return count / limit


# ---------------------------------------------------------------------------
# sequence file formats
# ---------------------------------------------------------------------------

def write_terms(data: SequenceData, path) -> None:
    """Write a sequence file; '.bin' selects the binary cache format."""
    path = Path(path)
    if path.suffix == ".bin":
        payload = _to_binary(data)
    else:
        payload = _to_text(data)
    path.write_bytes(payload)


def _to_text(data: SequenceData) -> bytes:
    lines = []
    if data.spec is not None:
        lines.append(f"# family: {data.spec.family}")
        if data.spec.init is not None:
            lines.append(f"# init: {data.spec.init[0]},{data.spec.init[1]}")
        lines.append(f"# count: {len(data)}")
    lines.extend(str(int(t)) for t in data.terms)
    return ("\n".join(lines) + "\n").encode()


def _to_binary(data: SequenceData) -> bytes:
    head = _BIN_MAGIC + bytes([_BIN_VERSION]) + struct.pack("<Q", len(data))
    body = data.terms.astype("<u8").tobytes()
    return head + body


def read_terms(path) -> SequenceData:
    """Read a sequence file written by write_terms (text or binary)."""
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] == _BIN_MAGIC:
        return _from_binary(raw, str(path))
    return _from_text(raw, str(path))


def _from_binary(raw: bytes, name: str) -> SequenceData:
    if len(raw) < 13:
        raise DataFormatError(f"{name}: truncated binary sequence file")
    if raw[4] != _BIN_VERSION:
        raise DataFormatError(f"{name}: unsupported binary version {raw[4]}")
    (count,) = struct.unpack_from("<Q", raw, 5)
    body = raw[13:]
    if len(body) != 8 * count:
        raise DataFormatError(
            f"{name}: expected {8 * count} payload bytes, found {len(body)}"
        )
    terms = np.frombuffer(body, dtype="<u8").astype(np.uint64)
    gup = int(terms.max()) if count else 0
    return SequenceData(spec=None, terms=terms, generated_up_to=gup, _validate=False)


def _from_text(raw: bytes, name: str) -> SequenceData:
    meta = {}
    values = []
    for lineno, line in enumerate(raw.decode().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, val = body.partition(":")
                meta[key.strip()] = val.strip()
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise DataFormatError(f"{name}:{lineno}: not an integer: {line!r}") from None
    if not values:
        raise DataFormatError(f"{name}: no terms found")
    family = meta.get("family")
    # the text format requires strictly increasing terms; stern is the one
    # declared family that is exempt
    if family != "stern":
        for i in range(1, len(values)):
            if values[i] <= values[i - 1]:
                raise DataFormatError(
                    f"{name}: terms not strictly increasing at position {i}"
                )
    spec = None
    if family in FAMILIES:
        init = None
        if "init" in meta:
            a, _, b = meta["init"].partition(",")
            init = (int(a), int(b))
        try:
            spec = SequenceSpec(family=family, init=init, count=max(2, len(values)))
        except ValueError:
            spec = None
    terms = np.array(values, dtype=np.uint64)
    gup = int(max(values))
    return SequenceData(spec=spec, terms=terms, generated_up_to=gup, _validate=False)


def as_terms(seq) -> np.ndarray:
    """Accept SequenceData or an array-like; return a uint64 term array."""
    if isinstance(seq, SequenceData):
        return seq.terms
    return np.ascontiguousarray(seq, dtype=np.uint64)
