"""Lowest eigenpairs of H(s), parameter sweeps and critical-point location."""
from __future__ import annotations

import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import statevec
from .errors import ConvergenceFailure, InvalidArgument, ResourceLimit
from .exactcover import ExactCoverInstance, InterpolatedHamiltonian
from .krylov import lowest_eigenpairs
from .statevec import BiPartition, StateVector

MAX_QUBITS = 24
# up to this size the dense eigensolver is cheaper than Lanczos
DENSE_MAX_QUBITS = 7
DEGENERACY_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-6


@dataclass(frozen=True)
class EigenPairs:
    e0: float
    e1: float
    ground: StateVector
    excited: StateVector
    degenerate: bool
    residuals: tuple
    method: str

    @property
    def gap(self) -> float:
        return self.e1 - self.e0


def _fix_sign(v: np.ndarray, total: bool) -> np.ndarray:
    # ground state: make the amplitude sum positive; otherwise the largest entry
    ref = v.sum() if total else v[np.argmax(np.abs(v))]
    return -v if ref < 0 else v


def lowest_two(h: InterpolatedHamiltonian, tol: float = 1e-10, seed: int = 0,
               method: str = "auto") -> EigenPairs:
    """Two smallest eigenvalues of H(s) with their eigenvectors.

    ``method`` is ``"dense"``, ``"lanczos"`` or ``"auto"`` (dense for
    n <= DENSE_MAX_QUBITS). The ground vector is sign-fixed so its amplitudes
    sum to a positive number.
    """
    n = h.n_qubits
    if n > MAX_QUBITS:
        raise ResourceLimit(f"n={n} exceeds the {MAX_QUBITS}-qubit limit")
    if method == "auto":
        method = "dense" if n <= DENSE_MAX_QUBITS else "lanczos"
    if method == "dense":
        vals, vecs = scipy.linalg.eigh(h.dense(), subset_by_index=[0, 1])
    elif method == "lanczos":
        res = lowest_eigenpairs(h.fast_matvec, h.dim, k=2, tol=tol, seed=seed)
        vals, vecs = res.eigenvalues, res.eigenvectors
    else:
        raise InvalidArgument(f"unknown eigensolver method {method!r}")

    g = _fix_sign(vecs[:, 0] / np.linalg.norm(vecs[:, 0]), total=True)
    x = _fix_sign(vecs[:, 1] / np.linalg.norm(vecs[:, 1]), total=False)
    e0, e1 = float(vals[0]), float(vals[1])
    residuals = tuple(float(np.linalg.norm(h.fast_matvec(u) - e * u)) for e, u in ((e0, g), (e1, x)))
    for e, r in zip((e0, e1), residuals):
        if r > tol * max(1.0, abs(e)):
            raise ConvergenceFailure(f"eigenpair residual {r:.3e} above tolerance at s={h.s}",
                                     residual=r)
    return EigenPairs(e0, e1, StateVector(n, g), StateVector(n, x),
                      e1 - e0 < DEGENERACY_TOL, residuals, method)


def h10(ground: StateVector, excited: StateVector, h: InterpolatedHamiltonian) -> float:
    """|<E1| (H_p - H_0) |E0>|, the s-derivative of H(s) between the two levels."""
    if ground.n_qubits != excited.n_qubits or ground.n_qubits != h.n_qubits:
        raise InvalidArgument("state and Hamiltonian sizes differ")
    u, v = excited.amplitudes, ground.amplitudes
    overlap = abs(np.vdot(u, v))
    if overlap > ORTHOGONALITY_TOL:
        raise InvalidArgument(f"states are not orthogonal (|<E1|E0>| = {overlap:.3e})")
    dh = h.problem_matvec(v) - h.driver_matvec(v)
    return float(abs(np.vdot(u, dh)))


@dataclass(frozen=True)
class SweepRecord:
    s: float
    e0: float
    e1: float
    gap: float
    entropy_bits: float
    h10_abs: float
    degenerate: bool = False


@dataclass
class SweepProfile:
    instance_id: str
    n_qubits: int
    s_grid: np.ndarray
    records: list = field(repr=False)

    @property
    def gaps(self) -> np.ndarray:
        return np.array([r.gap for r in self.records])

    @property
    def entropies(self) -> np.ndarray:
        return np.array([r.entropy_bits for r in self.records])

    @property
    def min_gap(self) -> float:
        return float(self.gaps.min())

    @property
    def max_entropy(self) -> float:
        return float(self.entropies.max())

    @property
    def s_min_gap(self) -> float:
        return critical_points(self)[0]

    @property
    def s_max_entropy(self) -> float:
        return critical_points(self)[1]

    def adiabatic_ratio(self) -> float:
        """max_s |H10| / g_min^2 over the grid."""
        return max(r.h10_abs for r in self.records) / self.min_gap ** 2

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("s,e0,e1,gap,entropy,h10\n")
        for r in self.records:
            # shortest round-trip repr, so tables re-aggregate bit for bit
            buf.write(",".join(repr(float(x)) for x in (r.s, r.e0, r.e1, r.gap, r.entropy_bits, r.h10_abs)))
            buf.write("\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, n_qubits: int, instance_id: str = "") -> "SweepProfile":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "s,e0,e1,gap,entropy,h10":
            raise InvalidArgument("not a sweep table")
        records = []
        for ln in lines[1:]:
            s, e0, e1, gap, ent, h = (float(x) for x in ln.split(","))
            records.append(SweepRecord(s, e0, e1, gap, ent, h, gap < DEGENERACY_TOL))
        return cls(instance_id, n_qubits, np.array([r.s for r in records]), records)


def s_grid(step: float = 0.01) -> np.ndarray:
    """Uniform grid on [0, 1] with the given step (must divide 1)."""
    count = round(1.0 / step)
    if count < 1 or abs(count * step - 1.0) > 1e-9:
        raise InvalidArgument(f"step {step} does not divide [0, 1] evenly")
    return np.round(np.linspace(0.0, 1.0, count + 1), 12)


def _check_grid(grid: np.ndarray):
    if grid.ndim != 1 or len(grid) < 2:
        raise InvalidArgument("need at least two grid points")
    if grid[0] < 0 or grid[-1] > 1:
        raise InvalidArgument("grid must lie in [0, 1]")
    d = np.diff(grid)
    if np.any(d <= 0) or np.ptp(d) > 1e-9:
        raise InvalidArgument("grid must be ascending with a uniform step")


def sweep(instance: ExactCoverInstance, grid=None, part: BiPartition | None = None,
          tol: float = 1e-10, seed: int = 0, method: str = "auto",
          instance_id: str | None = None) -> SweepProfile:
    """Solve H(s) at every grid point and record energies, entropy and H10."""
    grid = s_grid() if grid is None else np.asarray(grid, dtype=float)
    _check_grid(grid)
    part = BiPartition.half(instance.n_qubits) if part is None else part
    if part.n_qubits != instance.n_qubits:
        raise InvalidArgument("partition size does not match the instance")
    base = InterpolatedHamiltonian.from_instance(instance, 0.0)
    records = []
    for s in grid:
        h = base.at(float(s))
        pair = lowest_two(h, tol=tol, seed=seed, method=method)
        records.append(SweepRecord(
            s=float(s), e0=pair.e0, e1=pair.e1, gap=pair.gap,
            entropy_bits=statevec.entropy(pair.ground, part),
            h10_abs=h10(pair.ground, pair.excited, h),
            degenerate=pair.degenerate))
    if instance_id is None:
        instance_id = f"n{instance.n_qubits}k{instance.k}s{instance.seed}"
    return SweepProfile(instance_id, instance.n_qubits, grid, records)


def critical_points(profile: SweepProfile) -> tuple[float, float]:
    """Grid positions of the minimum gap and maximum entropy.

    Exact ties resolve to the smaller s.
    """
    grid = np.asarray(profile.s_grid)
    return float(grid[int(np.argmin(profile.gaps))]), float(grid[int(np.argmax(profile.entropies))])


def _sweep_job(args):
    instance, grid, mask, tol, seed, method = args
    part = None if mask is None else BiPartition(instance.n_qubits, mask)
    return sweep(instance, grid, part, tol=tol, seed=seed, method=method)


def sweep_many(instances, grid=None, mask: int | None = None, tol: float = 1e-10,
               seed: int = 0, method: str = "auto", workers: int | None = None) -> list:
    """Sweep each instance; results come back in input order.

    ``mask`` of None means the half split for each instance.
    """
    grid = s_grid() if grid is None else np.asarray(grid, dtype=float)
    jobs = [(inst, grid, mask, tol, seed, method) for inst in instances]
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        return [_sweep_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_job, jobs))
