"""Closed-form ground state and half-cut entanglement of adiabatic Grover search.

The Hamiltonian is

    H(s) = (1 - s)(I - |u><u|) + s (I - |x0><x0|)

with |u> the uniform superposition over N = 2^n states and x0 the marked
state. Its ground state has amplitude ``a = alpha * b`` on x0 and ``b`` on
every other basis state, and the reduced density matrix of any n/2 qubits has
rank two.

Every quantity below is evaluated through a rearrangement that avoids
subtracting nearly equal numbers, so the chain stays accurate at s = 0.5 for
large n where the textbook expressions cancel:

* ``E = 2 s (1-s)(1 - 1/N) / (1 + sqrt(D))``, with
  ``D = (1-2s)^2 + 4 s (1-s) / N``;
* ``alpha = (1 - E) / (1 - s - E)``, equal at the eigenvalue to
  ``(N-1) / (N-1 - N E / (1-s))``;
* ``lambda_+ lambda_- = (M-1)(AC - B^2) = ((M-1)(alpha-1) / Q)^2`` with
  ``M = 2^(n/2)`` and ``Q = alpha^2 + N - 1``.

Only at s = 1 does ``alpha`` diverge; there the state is |x0> itself.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, ResourceLimit
from .statevec import StateVector

MAX_ANALYTIC_QUBITS = 500
MAX_STATE_QUBITS = 20
LN2 = math.log(2.0)


@dataclass(frozen=True)
class GroverPoint:
    n_qubits: int
    s: float
    e_minus: float
    alpha: float
    b: float
    A: float
    B: float
    C: float
    lambda_plus: float
    lambda_minus: float
    entropy_bits: float
    at_pole: bool = False


def _check_s(s: float):
    if not 0.0 <= s <= 1.0:
        raise InvalidArgument(f"s must lie in [0, 1], got {s}")


def _check_n(n: int, even: bool):
    if n < 2 if even else n < 1:
        raise InvalidArgument(f"need n >= 2, got {n}")
    if even and n % 2:
        raise InvalidArgument(f"the half-cut formulas need even n, got {n}")
    if n > MAX_ANALYTIC_QUBITS:
        raise ResourceLimit(f"n={n} exceeds the {MAX_ANALYTIC_QUBITS}-qubit analytic limit")


def _discriminant(n: int, s: float) -> float:
    return (1.0 - 2.0 * s) ** 2 + 4.0 * s * (1.0 - s) * 2.0 ** -n


def ground_energy(n: int, s: float) -> float:
    """Ground energy E_-(s) = (1 - sqrt(D)) / 2."""
    _check_n(n, even=False)
    _check_s(s)
    d = _discriminant(n, s)
    return 2.0 * s * (1.0 - s) * (1.0 - 2.0 ** -n) / (1.0 + math.sqrt(d))


def _gap_to_pole(n: int, s: float, d: float) -> float:
    # 1 - s - E_-, without cancellation on either side of s = 1/2
    root = math.sqrt(d)
    if s < 0.5:
        return 0.5 * ((1.0 - 2.0 * s) + root)
    return 2.0 * s * (1.0 - s) * 2.0 ** -n / (root + 2.0 * s - 1.0)


def alpha(n: int, s: float) -> float:
    """Amplitude ratio a/b of the marked state; infinite at s = 1."""
    _check_n(n, even=False)
    _check_s(s)
    if s == 1.0:
        return math.inf
    d = _discriminant(n, s)
    e = 2.0 * s * (1.0 - s) * (1.0 - 2.0 ** -n) / (1.0 + math.sqrt(d))
    return (1.0 - e) / _gap_to_pole(n, s, d)


def alpha_textbook(n: int, s: float) -> float:
    """alpha from (N-1) / (N-1 - N E/(1-s)); loses digits near s = 1/2 for large n."""
    N = 2.0 ** n
    e = 0.5 * (1.0 - math.sqrt(_discriminant(n, s)))
    return (N - 1.0) / (N - 1.0 - N * e / (1.0 - s))


def _binary_entropy(lam_minus: float) -> float:
    if lam_minus <= 0.0:
        return 0.0
    lam_plus = 1.0 - lam_minus
    return (-lam_minus * math.log(lam_minus) - lam_plus * math.log1p(-lam_minus)) / LN2


def point(n: int, s: float) -> GroverPoint:
    """Full analytic chain at one (n, s)."""
    _check_n(n, even=True)
    _check_s(s)
    e = ground_energy(n, s)
    if s == 1.0:
        return GroverPoint(n, s, e, math.inf, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, at_pole=True)
    a = alpha(n, s)
    N = 2.0 ** n
    M = 2.0 ** (n // 2)
    # divide everything by scale to keep alpha^2 and N in range together
    scale = max(a, M) ** 2
    q = (a * a + (N - 1.0)) / scale
    A = ((a * a + (M - 1.0)) / scale) / q
    B = ((a + (M - 1.0)) / scale) / q
    C = (M / scale) / q
    b = 1.0 / math.sqrt(q * scale)
    root_p = ((M - 1.0) * (a - 1.0) / scale) / q
    p = root_p * root_p
    one_minus_4p = (((a - M + 1.0) ** 2 + 4.0 * (M - 1.0)) / scale) \
        * ((a * a + (N - 1.0) + 2.0 * (M - 1.0) * (a - 1.0)) / scale) / (q * q)
    disc = math.sqrt(max(one_minus_4p, 0.0))
    lam_minus = 2.0 * p / (1.0 + disc)
    lam_plus = 1.0 - lam_minus
    return GroverPoint(n, s, e, a, b, A, B, C, lam_plus, lam_minus, _binary_entropy(lam_minus))


def entropy_curve(n: int, grid) -> np.ndarray:
    """Half-cut entropy at each s in ``grid``."""
    return np.array([point(n, float(s)).entropy_bits for s in grid])


def asymptotic_entropy(n: int, coefficient: float = 4.0 / LN2) -> float:
    """Large-n saturation law 1 - coefficient * 2^(-n/2) at s = 1/2.

    The default coefficient is the commonly quoted 4/ln 2. The exact chain in
    ``point`` approaches 1 - (2/ln 2) 2^(-n/2), because lambda_-+ tends to
    1/2 -+ 2^(-n/4) and the binary entropy near 1/2 loses (2/ln 2) delta^2.
    """
    _check_n(n, even=True)
    return 1.0 - coefficient * 2.0 ** (-n / 2)


def numeric_state(n: int, s: float, marked: int = 0) -> StateVector:
    """Materialized ground state a|marked> + b * sum_{x != marked} |x>."""
    if n > MAX_STATE_QUBITS:
        raise ResourceLimit(f"n={n} exceeds the {MAX_STATE_QUBITS}-qubit state limit")
    _check_n(n, even=False)
    _check_s(s)
    dim = 1 << n
    if not 0 <= marked < dim:
        raise InvalidArgument(f"marked state {marked} out of range")
    if s == 1.0:
        return StateVector.basis(n, marked)
    a = alpha(n, s)
    b = 1.0 / math.sqrt(dim - 1.0 + a * a)
    amps = np.full(dim, b)
    amps[marked] = a * b
    # renormalize away the last ulp so the state passes the norm check at large n
    amps /= np.linalg.norm(amps)
    return StateVector(n, amps)


def hamiltonian_matvec(n: int, s: float, marked: int = 0):
    """Matrix-free H(s) for independent numerical checks."""
    dim = 1 << n

    def apply(v):
        out = v - (1.0 - s) * (v.sum() / dim)
        out[marked] -= s * v[marked]
        return out
    return apply


def curve_csv(n: int, grid) -> str:
    buf = io.StringIO()
    buf.write("s,e_minus,lambda_plus,lambda_minus,entropy\n")
    for s in grid:
        p = point(n, float(s))
        buf.write(",".join(f"{x:.12g}" for x in (p.s, p.e_minus, p.lambda_plus, p.lambda_minus, p.entropy_bits)))
        buf.write("\n")
    return buf.getvalue()


def saturation_csv(ns) -> str:
    buf = io.StringIO()
    buf.write("n,entropy_at_half,asymptote\n")
    for n in ns:
        buf.write(f"{n},{point(n, 0.5).entropy_bits:.12g},{asymptotic_entropy(n):.12g}\n")
    return buf.getvalue()
