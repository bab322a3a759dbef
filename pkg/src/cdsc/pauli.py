"""Binary-symplectic Pauli operators and single-qubit Clifford deformations.

Qubit ``q`` is stored in bit ``q`` of two Python integers, one for the X
component and one for the Z component, so products are XORs and weights are
popcounts.  Phases are never tracked.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

LETTERS = "IXZY"  # indexed by x | (z << 1)
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True)
class PauliOp:
    """An ``n``-qubit Pauli operator up to phase.

    Parameters
    ----------
    n : int
        Number of qubits.
    x, z : int
        Bit masks; bit ``q`` set in ``x`` (``z``) means qubit ``q`` carries an
        X (Z) component.  Both set is a Y.
    """

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        full = _mask(self.n)
        if self.x & ~full or self.z & ~full:
            raise ValueError(f"bit masks exceed {self.n} qubits")

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOp":
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for n={n}")
        xb, zb = _LETTER_BITS[letter.upper()]
        return cls(n, xb << qubit, zb << qubit)

    @classmethod
    def from_string(cls, text: str) -> "PauliOp":
        """Parse the row-major letter encoding, e.g. ``"IXZY"``."""
        x = z = 0
        for q, ch in enumerate(text.strip().upper()):
            try:
                xb, zb = _LETTER_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(len(text.strip()), x, z)

    @classmethod
    def from_arrays(cls, x_bits: Sequence[int], z_bits: Sequence[int]) -> "PauliOp":
        x_bits = np.asarray(x_bits, dtype=np.uint8)
        z_bits = np.asarray(z_bits, dtype=np.uint8)
        if x_bits.shape != z_bits.shape or x_bits.ndim != 1:
            raise ValueError("x and z bit vectors must be 1-d and equal length")
        return cls(len(x_bits), _pack(x_bits), _pack(z_bits))

    @classmethod
    def from_support(cls, n: int, qubits: Iterable[int], letter: str) -> "PauliOp":
        xb, zb = _LETTER_BITS[letter.upper()]
        m = 0
        for q in qubits:
            m |= 1 << q
        return cls(n, m if xb else 0, m if zb else 0)

    def __str__(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def __repr__(self) -> str:
        return f"PauliOp({str(self)!r})"

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return multiply(self, other)

    def letter(self, qubit: int) -> str:
        return LETTERS[((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)]

    @property
    def x_bits(self) -> np.ndarray:
        return _unpack(self.x, self.n)

    @property
    def z_bits(self) -> np.ndarray:
        return _unpack(self.z, self.n)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0


def _pack(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def _unpack(mask: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    raw = np.frombuffer(mask.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n]


def _check_len(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"length mismatch: {a} vs {b}")


def commutes(p: PauliOp, q: PauliOp) -> bool:
    """True iff the symplectic product of ``p`` and ``q`` is even."""
    _check_len(p.n, q.n)
    return ((p.x & q.z) ^ (p.z & q.x)).bit_count() % 2 == 0


def multiply(p: PauliOp, q: PauliOp) -> PauliOp:
    _check_len(p.n, q.n)
    return PauliOp(p.n, p.x ^ q.x, p.z ^ q.z)


def weight_decomposition(p: PauliOp) -> tuple[int, int, int]:
    """Return ``(n_X, n_Y, n_Z)``."""
    y = p.x & p.z
    return (p.x & ~y).bit_count(), y.bit_count(), (p.z & ~y).bit_count()


class Deformation(enum.IntEnum):
    """Single-qubit Clifford deformation, acting on Pauli letters by conjugation.

    ``SWAP_XZ`` is the Hadamard, ``SWAP_YZ`` is H·sqrt(Z)·H.  Each is an
    involution on {X, Y, Z}.
    """

    ID = 0
    SWAP_XZ = 1
    SWAP_YZ = 2

    @property
    def code(self) -> str:
        return "IHY"[self]

    @classmethod
    def from_code(cls, ch: str) -> "Deformation":
        try:
            return cls("IHY".index(ch.upper()))
        except ValueError:
            raise ValueError(f"invalid deformation letter {ch!r}; expected I, H or Y") from None

    def apply(self, letter: str) -> str:
        """Image of a single Pauli letter."""
        if self is Deformation.SWAP_XZ:
            return {"X": "Z", "Z": "X"}.get(letter, letter)
        if self is Deformation.SWAP_YZ:
            return {"Y": "Z", "Z": "Y"}.get(letter, letter)
        return letter


@dataclass(frozen=True)
class DeformationPattern:
    """Per-qubit deformations, row-major over the lattice."""

    kinds: tuple[Deformation, ...]

    def __post_init__(self):
        object.__setattr__(self, "kinds", tuple(Deformation(k) for k in self.kinds))

    @classmethod
    def identity(cls, n: int) -> "DeformationPattern":
        return cls((Deformation.ID,) * n)

    @classmethod
    def from_string(cls, text: str) -> "DeformationPattern":
        """Parse a string over {I, H, Y}; whitespace and newlines are ignored."""
        return cls(tuple(Deformation.from_code(ch) for ch in text if not ch.isspace()))

    @classmethod
    def from_array(cls, arr) -> "DeformationPattern":
        return cls(tuple(Deformation(int(v)) for v in np.asarray(arr).ravel()))

    def __len__(self) -> int:
        return len(self.kinds)

    def __str__(self) -> str:
        return "".join(k.code for k in self.kinds)

    @property
    def n(self) -> int:
        return len(self.kinds)

    def as_array(self) -> np.ndarray:
        return np.fromiter((int(k) for k in self.kinds), dtype=np.uint8, count=self.n)

    @property
    def h_mask(self) -> int:
        return _pack((self.as_array() == Deformation.SWAP_XZ).astype(np.uint8))

    @property
    def y_mask(self) -> int:
        return _pack((self.as_array() == Deformation.SWAP_YZ).astype(np.uint8))

    def fractions(self) -> tuple[float, float]:
        """Observed ``(pi_xz, pi_yz)``."""
        a = self.as_array()
        return float(np.mean(a == 1)), float(np.mean(a == 2))

    def to_grid(self, L: int) -> str:
        """Text with one row of letters per lattice row."""
        s = str(self)
        if len(s) != L * L:
            raise ValueError(f"pattern has {len(s)} qubits, not {L}x{L}")
        return "\n".join(s[r * L:(r + 1) * L] for r in range(L))


def permute_masks(x: int, z: int, h: int, y: int) -> tuple[int, int]:
    """Letter permutation on raw masks: X<->Z where ``h``, Y<->Z where ``y``."""
    ident = ~(h | y)
    nx = (x & ident) | (z & h) | ((x ^ z) & y)
    nz = (z & ident) | (x & h) | (z & y)
    return nx, nz


def permute_pauli(pattern: DeformationPattern, p: PauliOp) -> PauliOp:
    """Conjugate ``p`` qubit-wise by ``pattern``."""
    _check_len(pattern.n, p.n)
    nx, nz = permute_masks(p.x, p.z, pattern.h_mask, pattern.y_mask)
    return PauliOp(p.n, nx, nz)


def permute_bits(kinds: np.ndarray, x: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Array version of :func:`permute_pauli`; broadcasts over leading axes."""
    h = kinds == Deformation.SWAP_XZ
    y = kinds == Deformation.SWAP_YZ
    ident = ~(h | y)
    nx = np.where(ident, x, np.where(h, z, x ^ z))
    nz = np.where(h, x, z)
    return nx.astype(np.uint8), nz.astype(np.uint8)
