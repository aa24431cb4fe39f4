"""Pure states on n qubits and entanglement across bipartitions.

Basis index bit ``i`` holds the value of qubit ``i`` (qubit 0 is the least
significant bit). Reduced spectra come from the singular values of the
amplitude array reshaped to ``dim(A) x dim(B)``; the reduced density matrix is
never formed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InvalidArgument, InvalidState

NORM_TOL = 1e-12
# squared singular values below this are treated as exact zeros
SPECTRUM_FLOOR = 1e-14


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes)
        if amps.ndim != 1 or amps.shape[0] != 1 << self.n_qubits:
            raise InvalidState(
                f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidState(f"state not normalized: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes)
        if not np.iscomplexobj(amps):
            amps = amps.astype(np.float64)
        dim = amps.shape[0]
        n = dim.bit_length() - 1
        if dim == 0 or 1 << n != dim:
            raise InvalidState(f"length {dim} is not a power of two")
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise InvalidState("cannot normalize the zero vector")
            amps = amps / norm
        return cls(n, amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def uniform(cls, n_qubits: int) -> "StateVector":
        dim = 1 << n_qubits
        return cls(n_qubits, np.full(dim, dim ** -0.5))

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits


@dataclass(frozen=True)
class BiPartition:
    """Subsystem A is the set of qubits whose bit is set in ``mask_a``."""

    n_qubits: int
    mask_a: int

    def __post_init__(self):
        full = (1 << self.n_qubits) - 1
        if self.n_qubits < 2:
            raise InvalidArgument("a bipartition needs at least two qubits")
        if not 0 < self.mask_a < full:
            raise InvalidArgument(
                f"mask {self.mask_a:#x} must leave both sides non-empty for n={self.n_qubits}")

    @classmethod
    def from_qubits(cls, n_qubits: int, qubits) -> "BiPartition":
        mask = 0
        for q in qubits:
            if not 0 <= q < n_qubits:
                raise InvalidArgument(f"qubit {q} out of range for n={n_qubits}")
            mask |= 1 << q
        return cls(n_qubits, mask)

    @classmethod
    def half(cls, n_qubits: int) -> "BiPartition":
        """The first ``n // 2`` qubits versus the rest."""
        return cls(n_qubits, (1 << (n_qubits // 2)) - 1)

    @property
    def qubits_a(self) -> list[int]:
        return [q for q in range(self.n_qubits) if self.mask_a >> q & 1]

    @property
    def qubits_b(self) -> list[int]:
        return [q for q in range(self.n_qubits) if not self.mask_a >> q & 1]

    def complement(self) -> "BiPartition":
        return BiPartition(self.n_qubits, ((1 << self.n_qubits) - 1) ^ self.mask_a)

    def canonical(self) -> "BiPartition":
        """Representative with qubit 0 in A; entropy is unchanged."""
        return self if self.mask_a & 1 else self.complement()


@dataclass(frozen=True)
class EntanglementReport:
    spectrum: np.ndarray
    entropy_bits: float
    schmidt_rank: int


def all_bipartitions(n_qubits: int) -> list[BiPartition]:
    """Every unordered split of ``n_qubits``, each once (qubit 0 always in A)."""
    full = (1 << n_qubits) - 1
    return [BiPartition(n_qubits, m) for m in range(1, full, 2)]


def sample_bipartitions(n_qubits: int, count: int, seed: int) -> list[BiPartition]:
    """Distinct canonical bipartitions drawn with a seeded generator.

    Falls back to the full enumeration when ``count`` covers it.
    """
    total = (1 << (n_qubits - 1)) - 1
    if count >= total:
        return all_bipartitions(n_qubits)
    rng = np.random.default_rng(seed)
    # odd masks in [1, 2^n - 1) are exactly the canonical ones
    picks = rng.choice(total, size=count, replace=False)
    return [BiPartition(n_qubits, 2 * int(p) + 1) for p in sorted(picks)]


def equal_bipartitions(n_qubits: int) -> list[BiPartition]:
    """All canonical splits with ``n // 2`` qubits in A."""
    h = n_qubits // 2
    seen = set()
    out = []
    for qs in combinations(range(n_qubits), h):
        p = BiPartition.from_qubits(n_qubits, qs).canonical()
        if p.mask_a not in seen:
            seen.add(p.mask_a)
            out.append(p)
    return out


def _check(state: StateVector, part: BiPartition):
    if not isinstance(state, StateVector):
        raise InvalidState("expected a StateVector")
    if part.n_qubits != state.n_qubits:
        raise InvalidArgument(
            f"partition is for {part.n_qubits} qubits, state has {state.n_qubits}")


def amplitude_matrix(state: StateVector, part: BiPartition) -> np.ndarray:
    """Amplitudes reshaped to rows indexed by A and columns indexed by B."""
    _check(state, part)
    n = state.n_qubits
    a_qubits = part.qubits_a
    b_qubits = part.qubits_b
    # C-order tensor axis j carries qubit n-1-j
    axes = [n - 1 - q for q in reversed(a_qubits)] + [n - 1 - q for q in reversed(b_qubits)]
    psi = state.amplitudes.reshape((2,) * n).transpose(axes)
    return psi.reshape(1 << len(a_qubits), 1 << len(b_qubits))


def reduced_spectrum(state: StateVector, part: BiPartition) -> np.ndarray:
    """Eigenvalues of rho_A in descending order, clamped at zero."""
    m = amplitude_matrix(state, part)
    sv = np.linalg.svd(m, compute_uv=False)
    lam = sv * sv
    lam[lam < SPECTRUM_FLOOR] = 0.0
    return lam


def _entropy_of(lam: np.ndarray) -> float:
    p = lam[lam > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def entropy(state: StateVector, part: BiPartition) -> float:
    """Von Neumann entropy of rho_A in bits."""
    return _entropy_of(reduced_spectrum(state, part))


def schmidt_rank(state: StateVector, part: BiPartition, tol: float = 1e-10) -> int:
    if not 0 < tol < 1:
        raise InvalidArgument("tol must lie in (0, 1)")
    return int(np.count_nonzero(reduced_spectrum(state, part) > tol))


def entanglement_report(state: StateVector, part: BiPartition,
                        tol: float = 1e-10) -> EntanglementReport:
    lam = reduced_spectrum(state, part)
    return EntanglementReport(lam, _entropy_of(lam), int(np.count_nonzero(lam > tol)))


def partition_extremes(state: StateVector, partitions):
    """Minimum and maximum entropy over ``partitions``.

    Returns ``((min_entropy, min_part), (max_entropy, max_part))``. Ties keep
    the first partition in list order.
    """
    partitions = list(partitions)
    if not partitions:
        raise InvalidArgument("need at least one partition")
    lo = hi = None
    for p in partitions:
        e = entropy(state, p)
        if lo is None or e < lo[0]:
            lo = (e, p)
        if hi is None or e > hi[0]:
            hi = (e, p)
    return lo, hi

