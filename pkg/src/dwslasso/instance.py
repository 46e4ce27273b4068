"""Seeded problem generation and the CSI1 on-disk instance format.

A generated instance consists of a sensing matrix with orthonormal rows, a
noisy observation of a random sign-valued sparse signal, and the regularizer
recorded at generation time.  Everything is a pure function of the seed.

CSI1 layout (all little-endian)::

    bytes 0..3    magic b"CSI1"
    u32           version (1; also pins the RNG layout, see dwslasso.rng)
    u64 u64 u64   k, n, s
    f64 f64       eta, eta_alpha
    u64           seed
    u8            has_z flag
    f64[k*n]      matrix entries, row-major
    f64[k]        observation b
    f64[n]        true signal z (present iff has_z)
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, NumericalError
from .rng import Stream

__all__ = [
    "GeneratorConfig",
    "Instance",
    "generate",
    "write_instance",
    "read_instance",
    "ORTHO_TOL",
]

_MAGIC = b"CSI1"
_VERSION = 1

# Row-orthonormality guarantee of generated matrices, max |A A^T - I|.
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of the random instance family.

    The observation count is either explicit (``k``) or derived from the
    multiplier ``c`` as ``ceil(c * s * ln(n/s))``; giving both is an error.
    """

    n: int
    s: int
    k: int | None = None
    c: float | None = None
    eta_alpha: float = 0.1
    noise_sigma2: float = 1e-4
    seed: int = 0
    normalize_b: bool = False

    def __post_init__(self):
        if self.k is not None and self.c is not None:
            raise ValueError("give either k or c, not both")
        if not 0 < self.eta_alpha < 1:
            raise ValueError("eta_alpha must lie in (0, 1)")
        if self.noise_sigma2 < 0:
            raise ValueError("noise_sigma2 must be nonnegative")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        k = self.resolved_k
        if not 0 < self.s < k:
            raise ValueError(f"need 0 < s < k, got s={self.s}, k={k}")
        if k > self.n:
            raise ValueError(
                f"k={k} exceeds n={self.n}: cannot orthonormalize k rows in n columns"
            )

    @property
    def resolved_k(self) -> int:
        if self.k is not None:
            return int(self.k)
        c = 2.0 if self.c is None else float(self.c)
        return math.ceil(c * self.s * math.log(self.n / self.s))


@dataclass(frozen=True)
class Instance:
    """A concrete problem: matrix, observation, regularizer, optional truth."""

    a: np.ndarray              # (k, n) column-major, orthonormal rows
    b: np.ndarray              # (k,)
    eta: float
    z_true: np.ndarray | None  # (n,) or None
    seed: int
    s: int
    eta_alpha: float

    @property
    def k(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def generate(cfg: GeneratorConfig) -> Instance:
    """Generate the instance determined by ``cfg``.

    Matrix entries are sampled IID standard normal and the rows are
    orthonormalized (QR with the sign convention that makes it equivalent to
    Gram-Schmidt).  The signal places +-1 spikes on ``s`` coordinates drawn
    without replacement; the observation adds Gaussian noise; the regularizer
    is ``eta_alpha * ||A^T b||_inf`` of the generated observation.
    """
    k, n, s = cfg.resolved_k, cfg.n, cfg.s
    st = None
    a = None
    for attempt in range(4):
        st = Stream(cfg.seed, substream=attempt)
        raw = st.normals(k * n).reshape(k, n)
        q, r = np.linalg.qr(raw.T, mode="reduced")
        d = np.sign(np.diag(r))
        d[d == 0.0] = 1.0
        cand = np.asfortranarray((q * d).T)
        gram_err = np.abs(cand @ cand.T - np.eye(k)).max()
        if gram_err <= ORTHO_TOL:
            a = cand
            break
    if a is None:
        raise NumericalError(
            "row orthonormalization failed after 4 attempts "
            f"(last Gram error {gram_err:.3e})"
        )

    idx = st.choose(n, s)
    z = np.zeros(n)
    z[idx] = st.signs(s)
    noise = st.normals(k) * math.sqrt(cfg.noise_sigma2)
    b = a @ z + noise
    eta = cfg.eta_alpha * float(np.abs(a.T @ b).max())
    if eta <= 0.0:
        raise NumericalError("degenerate instance: A^T b vanishes")

    if cfg.normalize_b:
        scale = 1.0 / float(np.linalg.norm(b))
        b = b * scale
        z = z * scale
        eta = eta * scale

    return Instance(
        a=_freeze(a),
        b=_freeze(b),
        eta=eta,
        z_true=_freeze(z),
        seed=int(cfg.seed),
        s=s,
        eta_alpha=cfg.eta_alpha,
    )


def write_instance(path, inst: Instance) -> None:
    """Serialize ``inst`` to ``path`` in the CSI1 format (bit-exact)."""
    k, n = inst.a.shape
    has_z = inst.z_true is not None
    parts = [
        _MAGIC,
        struct.pack("<I", _VERSION),
        struct.pack("<QQQ", k, n, inst.s),
        struct.pack("<dd", inst.eta, inst.eta_alpha),
        struct.pack("<Q", inst.seed),
        struct.pack("<B", 1 if has_z else 0),
        np.ascontiguousarray(inst.a, dtype="<f8").tobytes(),
        np.ascontiguousarray(inst.b, dtype="<f8").tobytes(),
    ]
    if has_z:
        parts.append(np.ascontiguousarray(inst.z_true, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_instance(path) -> Instance:
    """Parse a CSI1 file; raises :class:`FormatError` with the failing offset."""
    data = Path(path).read_bytes()
    pos = 0

    def take(nbytes: int, what: str) -> bytes:
        nonlocal pos
        if pos + nbytes > len(data):
            raise FormatError(f"truncated {what}", pos)
        chunk = data[pos:pos + nbytes]
        pos += nbytes
        return chunk

    if len(data) < 4:
        raise FormatError("truncated header", 0)
    magic = take(4, "header")
    if magic != _MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {_MAGIC!r}", 0)
    (version,) = struct.unpack("<I", take(4, "header"))
    if version != _VERSION:
        raise FormatError(f"unsupported version {version}", 4)
    k, n, s = struct.unpack("<QQQ", take(24, "header"))
    eta, eta_alpha = struct.unpack("<dd", take(16, "header"))
    (seed,) = struct.unpack("<Q", take(8, "header"))
    (has_z,) = struct.unpack("<B", take(1, "header"))
    if k == 0 or n == 0 or k > n:
        raise FormatError(f"inconsistent dimensions k={k}, n={n}", 8)

    a_flat = np.frombuffer(take(8 * k * n, "matrix payload"), dtype="<f8")
    a = np.asfortranarray(a_flat.reshape(k, n).astype(np.float64, copy=False))
    b = np.frombuffer(take(8 * k, "observation payload"), dtype="<f8").astype(
        np.float64, copy=True
    )
    z = None
    if has_z:
        z = np.frombuffer(take(8 * n, "signal payload"), dtype="<f8").astype(
            np.float64, copy=True
        )
    if pos != len(data):
        raise FormatError(f"trailing {len(data) - pos} bytes", pos)

    return Instance(
        a=_freeze(a),
        b=_freeze(b),
        eta=float(eta),
        z_true=_freeze(z) if z is not None else None,
        seed=int(seed),
        s=int(s),
        eta_alpha=float(eta_alpha),
    )
