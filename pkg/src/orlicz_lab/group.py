"""Signals on Z_N^d and the Fourier transform normalized by 1/N^d.

Sites are addressed by a single integer in row-major mixed radix, so
``x = (x_1, ..., x_d)`` maps to ``sum_i x_i N^(d-i)``; this is numpy's C order
for an array of shape ``(N,) * d``.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import fft as sp_fft

from .errors import InvalidInputError

SIZE_CAP = 2 ** 20


@dataclass(frozen=True)
class GroupDims:
    N: int
    d: int = 1
    size: int = field(init=False)

    def __post_init__(self):
        if self.N < 2 or self.d < 1:
            raise InvalidInputError("need N >= 2 and d >= 1")
        size = self.N ** self.d
        if size > SIZE_CAP:
            raise InvalidInputError(f"group of size {size} exceeds the cap {SIZE_CAP}")
        object.__setattr__(self, "size", size)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    def coords(self) -> np.ndarray:
        """``(size, d)`` array of coordinates in index order."""
        return np.array(np.unravel_index(np.arange(self.size), self.shape)).T

    def encode(self, point) -> int:
        return int(np.ravel_multi_index(tuple(int(c) % self.N for c in point), self.shape))


@dataclass(frozen=True, eq=False)
class Signal:
    dims: GroupDims
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        if v.size != self.dims.size:
            raise InvalidInputError(f"expected {self.dims.size} values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("signal has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __add__(self, other: "Signal") -> "Signal":
        return Signal(self.dims, self.values + other.values)

    def __sub__(self, other: "Signal") -> "Signal":
        return Signal(self.dims, self.values - other.values)

    def scale(self, c: complex) -> "Signal":
        return Signal(self.dims, c * self.values)

    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def restrict(self, sites: "SiteSet") -> "Signal":
        """Zero outside ``sites`` (multiplication by the indicator)."""
        v = np.zeros(self.dims.size, dtype=complex)
        idx = sites.array
        v[idx] = self.values[idx]
        return Signal(self.dims, v)


@dataclass(frozen=True, eq=False)
class SiteSet:
    dims: GroupDims
    members: tuple[int, ...]

    def __post_init__(self):
        m = sorted(set(int(i) for i in self.members))
        if m and (m[0] < 0 or m[-1] >= self.dims.size):
            raise InvalidInputError("site index out of range")
        object.__setattr__(self, "members", tuple(m))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, i) -> bool:
        return int(i) in set(self.members)

    def __eq__(self, other) -> bool:
        return isinstance(other, SiteSet) and self.dims == other.dims and self.members == other.members

    def __hash__(self):
        return hash((self.dims, self.members))

    @property
    def array(self) -> np.ndarray:
        return np.fromiter(self.members, dtype=np.int64, count=len(self.members))

    def complement(self) -> "SiteSet":
        mask = np.ones(self.dims.size, dtype=bool)
        mask[self.array] = False
        return SiteSet(self.dims, tuple(np.flatnonzero(mask).tolist()))

    def indicator(self) -> np.ndarray:
        v = np.zeros(self.dims.size)
        v[self.array] = 1.0
        return v

    @classmethod
    def full(cls, dims: GroupDims) -> "SiteSet":
        return cls(dims, tuple(range(dims.size)))

    @classmethod
    def from_mask(cls, dims: GroupDims, mask) -> "SiteSet":
        return cls(dims, tuple(np.flatnonzero(np.asarray(mask).ravel()).tolist()))


# ---------------------------------------------------------------------------
# transforms

def _twiddle(N: int, sign: int) -> np.ndarray:
    k = np.arange(N)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / N)


def _separable(values: np.ndarray, dims: GroupDims, sign: int) -> np.ndarray:
    W = _twiddle(dims.N, sign)
    a = values.reshape(dims.shape)
    for axis in range(dims.d):
        a = np.moveaxis(np.tensordot(W, np.moveaxis(a, axis, 0), axes=(1, 0)), 0, axis)
    return a.ravel()


def dft(f: Signal, method: str = "fft") -> Signal:
    """``fhat(m) = N^-d sum_x f(x) exp(-2 pi i x.m / N)``.

    ``method="separable"`` applies an explicit twiddle matrix along each axis;
    the default uses a library FFT, which evaluates the same sums.
    """
    dims = f.dims
    if method == "fft":
        return Signal(dims, dft_batch(f.values[None, :], dims)[0])
    if method == "separable":
        return Signal(dims, _separable(f.values, dims, -1) / dims.size)
    raise InvalidInputError(f"unknown transform method {method!r}")


def idft(fhat: Signal, method: str = "fft") -> Signal:
    """``f(x) = sum_m fhat(m) exp(2 pi i x.m / N)``."""
    dims = fhat.dims
    if method == "fft":
        return Signal(dims, idft_batch(fhat.values[None, :], dims)[0])
    if method == "separable":
        return Signal(dims, _separable(fhat.values, dims, 1))
    raise InvalidInputError(f"unknown transform method {method!r}")


def _batch_axes(values: np.ndarray, dims: GroupDims) -> tuple[np.ndarray, tuple[int, ...]]:
    values = np.asarray(values)
    if values.ndim != 2 or values.shape[1] != dims.size:
        raise InvalidInputError(f"expected shape (k, {dims.size}), got {values.shape}")
    return values.reshape((values.shape[0],) + dims.shape), tuple(range(1, dims.d + 1))


def dft_batch(values: np.ndarray, dims: GroupDims) -> np.ndarray:
    """Forward transform of each row of a ``(k, N^d)`` array."""
    grid, axes = _batch_axes(values, dims)
    return sp_fft.fftn(grid, axes=axes).reshape(grid.shape[0], -1) / dims.size


def idft_batch(values: np.ndarray, dims: GroupDims) -> np.ndarray:
    """Inverse transform of each row of a ``(k, N^d)`` array."""
    grid, axes = _batch_axes(values, dims)
    return sp_fft.ifftn(grid, axes=axes).reshape(grid.shape[0], -1) * dims.size


def support(f: Signal, tol: float = 0.0) -> SiteSet:
    """Sites where ``|f| > tol * max|f|``; ``tol=0`` keeps every nonzero entry."""
    a = f.abs()
    if a.size == 0 or a.max() == 0:
        return SiteSet(f.dims, ())
    return SiteSet.from_mask(f.dims, a > tol * a.max())


# ---------------------------------------------------------------------------
# constructors

def complex_normal(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)


def make_signal(kind: str, dims: GroupDims, *, x0: int = 0, sites: SiteSet | None = None,
                seed=None, rng: np.random.Generator | None = None) -> Signal:
    """Build ``delta``, ``indicator``, ``gaussian`` or ``spectral`` signals.

    ``gaussian`` draws i.i.d. standard complex normals on ``sites``; ``spectral``
    draws them as Fourier coefficients on ``sites`` so the transform vanishes
    elsewhere.
    """
    v = np.zeros(dims.size, dtype=complex)
    if kind == "delta":
        v[int(x0)] = 1.0
        return Signal(dims, v)
    if sites is None:
        raise InvalidInputError(f"{kind} signal needs a site set")
    if kind == "indicator":
        return Signal(dims, sites.indicator())
    if len(sites) == 0:
        raise InvalidInputError(f"{kind} signal needs a nonempty site set")
    if rng is None:
        rng = np.random.default_rng(seed)
    coeffs = complex_normal(rng, len(sites))
    v[sites.array] = coeffs
    if kind == "gaussian":
        return Signal(dims, v)
    if kind == "spectral":
        return idft(Signal(dims, v))
    raise InvalidInputError(f"unknown signal kind {kind!r}")


def translate(f: Signal, a) -> Signal:
    """``x -> f(x - a)``."""
    shift = tuple(int(c) for c in np.broadcast_to(a, (f.dims.d,)))
    return Signal(f.dims, np.roll(f.values.reshape(f.dims.shape), shift, axis=tuple(range(f.dims.d))))


def character(dims: GroupDims, m) -> np.ndarray:
    """Values of ``x -> exp(2 pi i x.m / N)``."""
    m = np.broadcast_to(np.asarray(m), (dims.d,))
    phase = (dims.coords() @ m) % dims.N
    return np.exp(2j * np.pi * phase / dims.N)


# ---------------------------------------------------------------------------
# I/O

def write_csv(f: Signal, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["# N", f.dims.N, "d", f.dims.d])
        w.writerow(["index", "re", "im"])
        for i, z in enumerate(f.values):
            w.writerow([i, repr(float(z.real)), repr(float(z.imag))])


def read_csv(path, dims: GroupDims | None = None) -> Signal:
    """Read ``index,re,im`` rows; missing indices are zero."""
    rows = list(csv.reader(open(path, newline="")))
    if rows and rows[0] and rows[0][0].startswith("#"):
        head = rows.pop(0)
        dims = dims or GroupDims(int(head[1]), int(head[3]))
    if dims is None:
        raise InvalidInputError("CSV has no N/d header; pass dims")
    v = np.zeros(dims.size, dtype=complex)
    for r in rows:
        if not r or r[0] == "index":
            continue
        v[int(r[0])] = complex(float(r[1]), float(r[2]) if len(r) > 2 else 0.0)
    return Signal(dims, v)


def write_binary(f: Signal, path) -> None:
    """Header of two little-endian int64 (N, d), then (re, im) float64 pairs."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<qq", f.dims.N, f.dims.d))
        pairs = np.empty(2 * f.dims.size, dtype="<f8")
        pairs[0::2], pairs[1::2] = f.values.real, f.values.imag
        fh.write(pairs.tobytes())


def read_binary(path) -> Signal:
    data = Path(path).read_bytes()
    N, d = struct.unpack("<qq", data[:16])
    pairs = np.frombuffer(data[16:], dtype="<f8")
    return Signal(GroupDims(N, d), pairs[0::2] + 1j * pairs[1::2])


def read_sites(path, dims: GroupDims) -> SiteSet:
    """Site list: one integer index per line (commas also accepted)."""
    text = Path(path).read_text().replace(",", "\n").split()
    return SiteSet(dims, tuple(int(t) for t in text if t.strip() and not t.startswith("#")))
