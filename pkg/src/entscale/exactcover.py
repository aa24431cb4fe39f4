"""Exact Cover instances and the interpolated adiabatic Hamiltonian.

A clause over qubits ``(i, j, ...)`` is satisfied when exactly one of its bits
is 1. The problem Hamiltonian is diagonal in the computational basis and
counts violated clauses; the driver is a transverse field weighted by how many
clauses touch each qubit:

    H(s) = (1 - s) * sum_i d_i/2 (1 - X_i) + s * H_p

Everything here works on the diagonal and the degree vector; the dense 2^n x 2^n
matrix is only built on request (``dense``) for small systems.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument, ResourceLimit
from .statevec import StateVector

MAX_ENUM_QUBITS = 24
# above this the sparse transverse operator costs more memory than it saves time
SPARSE_MAX_QUBITS = 20
DEFAULT_RESTART_CAP = 100_000


@dataclass(frozen=True)
class Clause:
    qubit_indices: tuple

    def __post_init__(self):
        idx = tuple(sorted(int(q) for q in self.qubit_indices))
        if len(set(idx)) != len(idx):
            raise InvalidArgument(f"clause has repeated qubits: {self.qubit_indices}")
        if len(idx) not in (3, 4):
            raise InvalidArgument(f"clause arity must be 3 or 4, got {len(idx)}")
        if idx[0] < 0:
            raise InvalidArgument(f"negative qubit index in {idx}")
        object.__setattr__(self, "qubit_indices", idx)

    @property
    def k(self) -> int:
        return len(self.qubit_indices)


@dataclass(frozen=True)
class ExactCoverInstance:
    n_qubits: int
    k: int
    clauses: tuple
    satisfying_assignment: str
    seed: int | None = None

    def __post_init__(self):
        clauses = tuple(c if isinstance(c, Clause) else Clause(tuple(c)) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.n_qubits < self.k:
            raise InvalidArgument(f"need n >= k, got n={self.n_qubits}, k={self.k}")
        for c in clauses:
            if c.k != self.k:
                raise InvalidArgument(f"clause {c.qubit_indices} does not have arity {self.k}")
            if c.qubit_indices[-1] >= self.n_qubits:
                raise InvalidArgument(f"clause {c.qubit_indices} out of range for n={self.n_qubits}")
        a = self.satisfying_assignment
        if len(a) != self.n_qubits or set(a) - {"0", "1"}:
            raise InvalidArgument(f"assignment must be an {self.n_qubits}-bit string")
        bits = assignment_bits(a)
        if not all(clause_satisfied(bits, c) for c in clauses):
            raise InvalidArgument("stored assignment violates a clause")

    @property
    def assignment_index(self) -> int:
        """Basis index of the satisfying assignment (qubit 0 = LSB)."""
        return sum(1 << i for i, ch in enumerate(self.satisfying_assignment) if ch == "1")

    def clause_lists(self) -> list[list[int]]:
        return [list(c.qubit_indices) for c in self.clauses]


def assignment_bits(assignment: str) -> tuple:
    """Bitstring written qubit 0 first -> tuple of ints."""
    return tuple(int(ch) for ch in assignment)


def clause_satisfied(assignment, clause: Clause) -> bool:
    """True iff exactly one of the clause's bits is set.

    ``assignment`` is indexable by qubit (tuple/list of 0/1 or a bitstring).
    """
    try:
        total = sum(int(assignment[q]) for q in clause.qubit_indices)
    except IndexError:
        raise InvalidArgument(
            f"clause {clause.qubit_indices} indexes past assignment of length {len(assignment)}") from None
    return total == 1


def _basis_bits(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def _clause_ok(bits: np.ndarray, clause) -> np.ndarray:
    return bits[:, list(clause)].sum(axis=1) == 1


def _enum_guard(n: int):
    if n > MAX_ENUM_QUBITS:
        raise ResourceLimit(f"enumeration over 2^{n} assignments exceeds the {MAX_ENUM_QUBITS}-qubit guard")


def count_satisfying(clauses, n: int) -> int:
    """Brute-force count of assignments satisfying every clause."""
    _enum_guard(n)
    clauses = [c.qubit_indices if isinstance(c, Clause) else tuple(c) for c in clauses]
    for c in clauses:
        if max(c) >= n or min(c) < 0:
            raise InvalidArgument(f"clause {c} out of range for n={n}")
    if not clauses:
        return 1 << n
    bits = _basis_bits(n)
    ok = np.ones(1 << n, dtype=bool)
    for c in clauses:
        ok &= _clause_ok(bits, c)
    return int(ok.sum())


def generate_instance(n: int, k: int = 3, seed: int = 0,
                      restart_cap: int = DEFAULT_RESTART_CAP) -> ExactCoverInstance:
    """Random instance with a unique satisfying assignment.

    Distinct k-subsets are appended uniformly at random until exactly one
    assignment survives; if none survive, or no unused subset remains, all
    clauses are dropped and the build starts over.
    """
    if k not in (3, 4):
        raise InvalidArgument(f"k must be 3 or 4, got {k}")
    if n < k:
        raise InvalidArgument(f"need n >= k, got n={n}, k={k}")
    _enum_guard(n)
    rng = np.random.default_rng(seed)
    bits = _basis_bits(n)
    n_subsets = comb(n, k)
    for _ in range(restart_cap):
        clauses = []
        used = set()
        ok = np.ones(1 << n, dtype=bool)
        count = 1 << n
        while count > 1 and len(used) < n_subsets:
            c = tuple(sorted(int(q) for q in rng.choice(n, size=k, replace=False)))
            if c in used:
                continue
            used.add(c)
            clauses.append(c)
            ok &= _clause_ok(bits, c)
            count = int(ok.sum())
        if count == 1:
            index = int(np.flatnonzero(ok)[0])
            assignment = "".join(str(index >> i & 1) for i in range(n))
            return ExactCoverInstance(n, k, tuple(clauses), assignment, seed)
    raise ResourceLimit(f"no unique-assignment instance for n={n}, k={k} after {restart_cap} restarts")


def problem_diagonal(instance: ExactCoverInstance) -> np.ndarray:
    """Number of violated clauses for every basis state."""
    n = instance.n_qubits
    _enum_guard(n)
    dtype = np.uint8 if len(instance.clauses) < 256 else np.uint16
    bits = _basis_bits(n)
    diag = np.zeros(1 << n, dtype=dtype)
    for c in instance.clauses:
        diag += ~_clause_ok(bits, c.qubit_indices)
    return diag


def degrees(instance: ExactCoverInstance) -> np.ndarray:
    """Clause-membership count for each qubit."""
    d = np.zeros(instance.n_qubits, dtype=np.int64)
    for c in instance.clauses:
        d[list(c.qubit_indices)] += 1
    return d


@dataclass
class InterpolatedHamiltonian:
    """H(s) held as its problem diagonal plus per-qubit field weights.

    ``matvec`` is the matrix-free kernel. ``fast_matvec`` does the same
    product through a cached sparse copy of the transverse field, which
    copies made with ``at`` share.
    """

    n_qubits: int
    problem_diagonal: np.ndarray = field(repr=False)
    degrees: np.ndarray
    s: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.s <= 1.0:
            raise InvalidArgument(f"s must lie in [0, 1], got {self.s}")
        if len(self.problem_diagonal) != 1 << self.n_qubits:
            raise InvalidArgument("problem diagonal length does not match n_qubits")
        if len(self.degrees) != self.n_qubits:
            raise InvalidArgument("degree vector length does not match n_qubits")
        self._diag = None

    @classmethod
    def from_instance(cls, instance: ExactCoverInstance, s: float,
                      diag: np.ndarray | None = None) -> "InterpolatedHamiltonian":
        if diag is None:
            diag = problem_diagonal(instance)
        return cls(instance.n_qubits, diag, degrees(instance), float(s))

    def at(self, s: float) -> "InterpolatedHamiltonian":
        """Same instance at another parameter value (shares diagonal and cache)."""
        return InterpolatedHamiltonian(self.n_qubits, self.problem_diagonal, self.degrees,
                                       float(s), self._cache)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def diagonal(self) -> np.ndarray:
        if self._diag is None:
            s = self.s
            self._diag = s * self.problem_diagonal.astype(np.float64) + (1 - s) * 0.5 * float(self.degrees.sum())
        return self._diag

    def _check(self, v):
        if v.shape != (self.dim,):
            raise InvalidArgument(f"vector has shape {v.shape}, expected ({self.dim},)")

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """H(s) @ v in O(n 2^n) without forming any matrix."""
        self._check(v)
        out = self.diagonal() * v
        c = -0.5 * (1 - self.s)
        if c:
            for i, d in enumerate(self.degrees):
                if d:
                    view = out.reshape(-1, 2, 1 << i)
                    view += (c * d) * v.reshape(-1, 2, 1 << i)[:, ::-1, :]
        return out

    def transverse(self):
        """Sparse -sum_i d_i/2 X_i, built once per instance."""
        op = self._cache.get("transverse")
        if op is None:
            n, dim = self.n_qubits, self.dim
            idx = np.arange(dim, dtype=np.int32)
            active = [i for i in range(n) if self.degrees[i]]
            rows = np.tile(idx, len(active))
            cols = np.concatenate([idx ^ (1 << i) for i in active])
            vals = np.concatenate([np.full(dim, -0.5 * self.degrees[i]) for i in active])
            op = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
            self._cache["transverse"] = op
        return op

    def fast_matvec(self, v: np.ndarray) -> np.ndarray:
        if self.n_qubits > SPARSE_MAX_QUBITS:
            return self.matvec(v)
        self._check(v)
        out = self.diagonal() * v
        if self.s < 1.0:
            out += (1 - self.s) * (self.transverse() @ v)
        return out

    def driver_matvec(self, v: np.ndarray) -> np.ndarray:
        """H_0 @ v."""
        return self.at(0.0).matvec(v)

    def problem_matvec(self, v: np.ndarray) -> np.ndarray:
        """H_p @ v."""
        self._check(v)
        return self.problem_diagonal * v

    def dense(self) -> np.ndarray:
        """Explicit matrix; only sensible for small n."""
        if self.n_qubits > 14:
            raise ResourceLimit(f"dense H(s) for n={self.n_qubits} is too large")
        dim = self.dim
        h = np.diag(self.diagonal())
        idx = np.arange(dim)
        c = -0.5 * (1 - self.s)
        for i, d in enumerate(self.degrees):
            if d:
                h[idx, idx ^ (1 << i)] += c * d
        return h


def apply_hamiltonian(h: InterpolatedHamiltonian, v: StateVector) -> np.ndarray:
    """H(s) applied to a state. Returns the raw (unnormalized) vector."""
    if v.n_qubits != h.n_qubits:
        raise InvalidArgument(f"state has {v.n_qubits} qubits, Hamiltonian has {h.n_qubits}")
    return h.matvec(v.amplitudes)


# --- instance files -------------------------------------------------------

def instance_to_dict(instance: ExactCoverInstance) -> dict:
    return {
        "n": instance.n_qubits,
        "k": instance.k,
        "clauses": instance.clause_lists(),
        "assignment": instance.satisfying_assignment,
        "seed": instance.seed,
    }


def instance_from_dict(data: dict) -> ExactCoverInstance:
    try:
        return ExactCoverInstance(int(data["n"]), int(data["k"]),
                                  tuple(tuple(c) for c in data["clauses"]),
                                  str(data["assignment"]), data.get("seed"))
    except KeyError as exc:
        raise InvalidArgument(f"instance file missing field {exc}") from None


def dumps_instance(instance: ExactCoverInstance) -> str:
    return json.dumps(instance_to_dict(instance), separators=(", ", ": ")) + "\n"


def save_instance(instance: ExactCoverInstance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_instance(instance))


def load_instance(path) -> ExactCoverInstance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))
