"""Fourier analysis of real-valued functions on the Boolean cube.

Conventions used throughout the package:

* A point ``b`` of the cube is stored as an ``n``-bit integer mask. Variable
  ``b_1`` lives in bit 0 (least significant), ``b_2`` in bit 1, and so on.
* Printed masks put ``b_1`` leftmost, so ``BitVector.from_string("100")`` is
  the vector with only ``b_1`` set (mask ``0b001``).
* Fourier coefficients are normalised on the analysis side::

      ghat(s) = 2**-n * sum_b g(b) * (-1)**(s.b),     g(b) = sum_s ghat(s) * (-1)**(s.b)
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

MAX_BITS = 24
ZERO_TOL = 1e-12

__all__ = [
    "BitVector",
    "FunctionTable",
    "FourierSpectrum",
    "parity_chi",
    "inner_product",
    "wht_forward",
    "wht_inverse",
    "fwht",
    "degree",
    "junta_support",
    "random_low_degree",
    "popcount",
    "g3_spectrum",
    "g6_spectrum",
]


def popcount(x: int) -> int:
    return bin(x).count("1")


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_BITS:
        raise ValueError(f"number of bits must be in [1, {MAX_BITS}], got {n}")


def mask_to_string(mask: int, n: int) -> str:
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(n))


def string_to_mask(text: str) -> int:
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"not a bit string: {text!r}")
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


@dataclass(frozen=True, order=True)
class BitVector:
    """An element of {0,1}^n stored as an integer mask (b_1 in bit 0)."""

    n: int
    mask: int

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask} does not fit in {self.n} bits")

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Parse a bit string with ``b_1`` leftmost, e.g. ``"101"``."""
        return cls(len(text.strip()), string_to_mask(text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        bits = [int(v) for v in bits]
        if any(v not in (0, 1) for v in bits):
            raise ValueError("bits must be 0 or 1")
        return cls(len(bits), sum(v << i for i, v in enumerate(bits)))

    @classmethod
    def all(cls, n: int) -> list["BitVector"]:
        """Every point of the cube in mask order."""
        _check_n(n)
        return [cls(n, k) for k in range(1 << n)]

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.mask >> i) & 1 for i in range(self.n))

    @property
    def weight(self) -> int:
        return popcount(self.mask)

    def __getitem__(self, i: int) -> int:
        # zero-based position: self[0] is b_1
        return self.bits[i]

    def __len__(self) -> int:
        return self.n

    def __xor__(self, other: "BitVector") -> "BitVector":
        _same_length(self, other)
        return BitVector(self.n, self.mask ^ other.mask)

    def dot(self, other: "BitVector") -> int:
        """Inner product over GF(2)."""
        _same_length(self, other)
        return popcount(self.mask & other.mask) & 1

    def support(self) -> frozenset[int]:
        """1-based indices of set variables."""
        return frozenset(i + 1 for i in range(self.n) if (self.mask >> i) & 1)

    def __str__(self) -> str:
        return mask_to_string(self.mask, self.n)


def _same_length(a, b) -> None:
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} != {b.n}")


def parity_chi(s: BitVector, b: BitVector) -> int:
    """Parity character chi_s(b) = (-1)**(s.b)."""
    return -1 if s.dot(b) else 1


@dataclass(frozen=True)
class FunctionTable:
    """Values of g: {0,1}^n -> R, indexed by input mask."""

    n: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_n(self.n)
        values = np.array(self.values, dtype=float)
        if values.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, n: int, fn) -> "FunctionTable":
        return cls(n, [fn(b) for b in BitVector.all(n)])

    def __call__(self, b: BitVector | int) -> float:
        if isinstance(b, BitVector):
            _same_length(self, b)
            b = b.mask
        return float(self.values[b])

    def to_csv(self) -> str:
        return _rows_to_csv(
            (mask_to_string(k, self.n), v) for k, v in enumerate(self.values)
        )

    @classmethod
    def from_csv(cls, text: str) -> "FunctionTable":
        rows = _csv_rows(text)
        n = len(rows[0][0])
        values = np.zeros(1 << n)
        seen = set()
        for key, value in rows:
            mask = string_to_mask(key)
            if len(key) != n:
                raise ValueError(f"inconsistent mask length in row {key!r}")
            seen.add(mask)
            values[mask] = value
        if len(seen) != 1 << n:
            raise ValueError(f"table needs all {1 << n} inputs, got {len(seen)}")
        return cls(n, values)


class FourierSpectrum(Mapping[int, float]):
    """Sparse Fourier coefficients ``mask -> ghat(mask)``.

    Coefficients with magnitude at or below ``ZERO_TOL`` are dropped on
    construction. Acts as a read-only mapping keyed by integer masks; use
    :meth:`coeff` to query with a :class:`BitVector` or a bit string.
    """

    def __init__(self, n: int, coeffs: Mapping[int | str | BitVector, float] | None = None):
        _check_n(n)
        self.n = n
        clean: dict[int, float] = {}
        for key, value in (coeffs or {}).items():
            mask = self._key(key)
            value = float(value)
            if not np.isfinite(value):
                raise ValueError(f"non-finite coefficient at {mask_to_string(mask, n)}")
            if abs(value) > ZERO_TOL:
                clean[mask] = clean.get(mask, 0.0) + value
        self._coeffs = {k: v for k, v in sorted(clean.items()) if abs(v) > ZERO_TOL}

    def _key(self, key) -> int:
        if isinstance(key, BitVector):
            if key.n != self.n:
                raise ValueError(f"key length {key.n} != {self.n}")
            return key.mask
        if isinstance(key, str):
            if len(key) != self.n:
                raise ValueError(f"key {key!r} does not have length {self.n}")
            return string_to_mask(key)
        key = int(key)
        if not 0 <= key < (1 << self.n):
            raise ValueError(f"mask {key} does not fit in {self.n} bits")
        return key

    def __getitem__(self, mask: int) -> float:
        return self._coeffs[mask]

    def __iter__(self):
        return iter(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def coeff(self, key) -> float:
        return self._coeffs.get(self._key(key), 0.0)

    def dense(self) -> np.ndarray:
        out = np.zeros(1 << self.n)
        for k, v in self._coeffs.items():
            out[k] = v
        return out

    def scaled(self, factor: float) -> "FourierSpectrum":
        return FourierSpectrum(self.n, {k: factor * v for k, v in self._coeffs.items()})

    def allclose(self, other: "FourierSpectrum", atol: float = 1e-9) -> bool:
        if other.n != self.n:
            return False
        keys = set(self) | set(other)
        return all(abs(self.coeff(k) - other.coeff(k)) <= atol for k in keys)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FourierSpectrum)
            and other.n == self.n
            and other._coeffs == self._coeffs
        )

    def __repr__(self) -> str:
        body = ", ".join(
            f"{mask_to_string(k, self.n)}: {v:.6g}" for k, v in self._coeffs.items()
        )
        return f"FourierSpectrum(n={self.n}, {{{body}}})"

    def to_csv(self) -> str:
        return _rows_to_csv((mask_to_string(k, self.n), v) for k, v in self._coeffs.items())

    @classmethod
    def from_csv(cls, text: str) -> "FourierSpectrum":
        rows = _csv_rows(text)
        if not rows:
            raise ValueError("empty spectrum CSV; cannot infer n")
        n = len(rows[0][0])
        return cls(n, {key: value for key, value in rows})


def _rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["mask_binary", "value"])
    for key, value in rows:
        writer.writerow([key, f"{float(value):.17g}"])
    return buf.getvalue()


def _csv_rows(text: str) -> list[tuple[str, float]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["mask_binary", "value"]:
        raise ValueError("expected header 'mask_binary,value'")
    return [(row[0].strip(), float(row[1])) for row in reader if row]


def inner_product(f: FunctionTable, g: FunctionTable) -> float:
    """Uniform-measure inner product 2**-n * sum_b f(b) g(b)."""
    _same_length(f, g)
    return float(np.dot(f.values, g.values) / (1 << f.n))


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard butterfly along the last axis.

    The last axis must have power-of-two length. Returns a new array.
    """
    a = np.array(values, dtype=float, copy=True)
    size = a.shape[-1]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        a = a.reshape(lead + (size // (2 * h), 2, h))
        x = a[..., 0, :].copy()
        y = a[..., 1, :]
        a[..., 0, :] += y
        a[..., 1, :] = x - y
        h *= 2
    return a.reshape(lead + (size,))


def wht_forward(f: FunctionTable) -> FourierSpectrum:
    coeffs = fwht(f.values) / (1 << f.n)
    return FourierSpectrum(f.n, {int(k): coeffs[k] for k in np.flatnonzero(np.abs(coeffs) > ZERO_TOL)})


def wht_inverse(spec: FourierSpectrum) -> FunctionTable:
    return FunctionTable(spec.n, fwht(spec.dense()))


def degree(spec: FourierSpectrum) -> int:
    return max((popcount(k) for k in spec), default=0)


def junta_support(spec: FourierSpectrum) -> frozenset[int]:
    """1-based variable indices appearing in some nonzero coefficient."""
    union = 0
    for k in spec:
        union |= k
    return BitVector(spec.n, union).support()


def random_low_degree(n: int, d: int, count_terms: int, seed: int) -> FourierSpectrum:
    """Random spectrum with ``count_terms`` distinct keys of weight <= d.

    Coefficients are uniform on [-1, 1]; fixed ``seed`` gives a fixed result.
    """
    _check_n(n)
    if not 0 <= d <= n:
        raise ValueError(f"degree {d} outside [0, {n}]")
    candidates = [k for k in range(1 << n) if popcount(k) <= d]
    if not 0 <= count_terms <= len(candidates):
        raise ValueError(
            f"cannot draw {count_terms} terms from {len(candidates)} masks of weight <= {d}"
        )
    rng = np.random.default_rng(seed)
    keys = rng.choice(len(candidates), size=count_terms, replace=False)
    values = rng.uniform(-1.0, 1.0, size=count_terms)
    return FourierSpectrum(n, {candidates[int(i)]: v for i, v in zip(keys, values)})


def g3_spectrum(a1: float = 0.5, a2: float = -0.1, a3: float = 0.25) -> FourierSpectrum:
    """g3(b) = a1 (-1)^b1 + a2 (-1)^b2 + a3 (-1)^b3."""
    return FourierSpectrum(3, {"100": a1, "010": a2, "001": a3})


def g6_spectrum(
    d1: float = -0.2, d2: float = -0.2, d3: float = 0.1, d4: float = 0.1
) -> FourierSpectrum:
    """g6(b) = d1 (-1)^(b1+b4) + d2 (-1)^(b1+b5) + d3 (-1)^(b2+b4) + d4 (-1)^(b2+b5)."""
    return FourierSpectrum(
        6, {"100100": d1, "100010": d2, "010100": d3, "010010": d4}
    )
