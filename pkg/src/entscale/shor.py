"""Order finding and the entangled register state before the Fourier transform.

After modular exponentiation the two registers hold

    |psi> = 2^(-k/2) sum_{q < 2^k} |q>|a^q mod N>

The source register (k qubits) occupies the high bits of the basis index and
the target register (ceil(log2 N) qubits) the low bits. Tracing out the source
leaves weight ``#{q < 2^k : q = p mod r} / 2^k`` on each of the r distinct
values a^p mod N, so the Schmidt rank across the register cut is the order r.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import statevec
from .errors import InvalidArgument, NotCoprime, ResourceLimit
from .statevec import BiPartition, EntanglementReport, StateVector

MAX_ORDER_MODULUS = 1 << 20
MAX_STATE_QUBITS = 26


def order(a: int, N: int) -> int:
    """Smallest r >= 1 with a^r = 1 (mod N), by repeated multiplication."""
    if N < 3 or N % 2 == 0:
        raise InvalidArgument(f"N must be odd and >= 3, got {N}")
    if N > MAX_ORDER_MODULUS:
        raise ResourceLimit(f"N={N} exceeds the brute-force order limit {MAX_ORDER_MODULUS}")
    if not 1 < a < N:
        raise InvalidArgument(f"need 1 < a < N, got a={a}, N={N}")
    g = math.gcd(a, N)
    if g != 1:
        raise NotCoprime(a, N, g)
    x, r = a, 1
    while x != 1:
        x = x * a % N
        r += 1
    return r


def factors_from_order(a: int, N: int):
    """Factors gcd(a^(r/2) -+ 1, N), or None when r is odd or a^(r/2) = -1."""
    r = order(a, N)
    if r % 2:
        return None
    half = pow(a, r // 2, N)
    if half == N - 1:
        return None
    p, q = math.gcd(half - 1, N), math.gcd(half + 1, N)
    if p in (1, N) or q in (1, N):
        return None
    return p, q


def carmichael(N: int) -> int:
    """Carmichael function lambda(N) from the prime factorization of N."""
    if N < 1:
        raise InvalidArgument("N must be positive")
    result = 1
    m = N
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if p == 2:
                lam = 1 if e == 1 else 2 if e == 2 else 2 ** (e - 2)
            else:
                lam = (p - 1) * p ** (e - 1)
            result = math.lcm(result, lam)
        p += 1
    if m > 1:
        result = math.lcm(result, m - 1)
    return result


@dataclass(frozen=True)
class ShorCase:
    N: int
    a: int
    r: int
    k: int
    n_target: int

    @classmethod
    def build(cls, N: int, a: int, k: int | None = None) -> "ShorCase":
        """Case for (N, a); ``k`` defaults to the smallest width with 2^k >= N^2."""
        # a = 1 is excluded from order finding but gives the product-state case
        r = 1 if a == 1 else order(a, N)
        if k is None:
            k = source_width(N)
        elif 1 << k < N * N:
            raise InvalidArgument(f"2^{k} is below N^2 = {N * N}")
        return cls(N, a, r, k, target_width(N))

    @property
    def n_qubits(self) -> int:
        return self.k + self.n_target

    def partition(self) -> BiPartition:
        """Target register (low bits) versus source register."""
        return BiPartition(self.n_qubits, (1 << self.n_target) - 1)


def source_width(N: int) -> int:
    return (N * N - 1).bit_length()


def target_width(N: int) -> int:
    return (N - 1).bit_length()


def pre_qft_state(case: ShorCase) -> StateVector:
    if case.n_qubits > MAX_STATE_QUBITS:
        raise ResourceLimit(f"{case.n_qubits} qubits exceeds the {MAX_STATE_QUBITS}-qubit state limit")
    size = 1 << case.k
    q = np.arange(size, dtype=np.int64)
    values = np.empty(size, dtype=np.int64)
    x = 1
    for i in range(size):
        values[i] = x
        x = x * case.a % case.N
    amps = np.zeros(1 << case.n_qubits)
    amps[(q << case.n_target) | values] = size ** -0.5
    return StateVector(case.n_qubits, amps)


def residue_weights(case: ShorCase) -> np.ndarray:
    """Exact target-register spectrum: residue-class counts over 2^k, descending."""
    size = 1 << case.k
    counts = np.array([(size - p + case.r - 1) // case.r for p in range(case.r)], dtype=np.int64)
    return np.sort(counts)[::-1] / size


def target_spectrum(case: ShorCase) -> EntanglementReport:
    """Reduced spectrum of the target register computed from the full state."""
    return statevec.entanglement_report(pre_qft_state(case), case.partition())


def exact_entropy(case: ShorCase) -> float:
    w = residue_weights(case)
    return float(-np.sum(w * np.log2(w)))


def entropy_prediction(case: ShorCase) -> tuple[float, float]:
    """(log2 r, exact residue-class entropy)."""
    return math.log2(case.r), exact_entropy(case)


def coprime_bases(N: int) -> list[int]:
    return [a for a in range(2, N) if math.gcd(a, N) == 1]


def case_report(case: ShorCase, report: EntanglementReport | None = None) -> dict:
    report = report or target_spectrum(case)
    factors = factors_from_order(case.a, case.N) if case.a > 1 else None
    return {
        "N": case.N,
        "a": case.a,
        "r": case.r,
        "k": case.k,
        "rank": report.schmidt_rank,
        "entropy": report.entropy_bits,
        "entropy_prediction": math.log2(case.r),
        "factors": list(factors) if factors else None,
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report) + "\n"
