"""Exact count distributions and the approximation bounds used by the rounding.

Distributions over the integers are held as a :class:`CountPmf`: a dense mass
vector plus the integer at which it starts. Everything else in the package
(expected utilities, rounding diagnostics, bound checks) is built on these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PMF_NEG_SLACK = 1e-15
PMF_SUM_TOL = 1e-12
TP_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class CountPmf:
    """Mass function on ``offset, offset + 1, ..., offset + len(mass) - 1``.

    ``tail`` is the probability mass that was truncated away (only nonzero for
    Poisson-type distributions).
    """

    mass: np.ndarray
    offset: int = 0
    tail: float = 0.0

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != 1 or mass.size == 0:
            raise ValueError("mass must be a non-empty 1-d array")
        if np.any(mass < -PMF_NEG_SLACK) or not np.all(np.isfinite(mass)):
            raise ValueError("mass has negative or non-finite entries")
        mass = np.clip(mass, 0.0, None)
        total = mass.sum() + self.tail
        if abs(total - 1.0) > PMF_SUM_TOL:
            raise ValueError(f"mass sums to {total!r}, not 1")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.mass.size)

    def __len__(self) -> int:
        return self.mass.size

    def __getitem__(self, value: int) -> float:
        idx = value - self.offset
        if 0 <= idx < self.mass.size:
            return float(self.mass[idx])
        return 0.0

    def mean(self) -> float:
        return float(self.support @ self.mass)

    def var(self) -> float:
        mu = self.mean()
        return float(((self.support - mu) ** 2) @ self.mass)


@dataclass(frozen=True)
class TranslatedPoissonParams:
    mu: float
    sigma2: float = field()

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")

    @property
    def shift(self) -> int:
        return math.floor(self.mu - self.sigma2)

    @property
    def rate(self) -> float:
        d = self.mu - self.sigma2
        return self.sigma2 + (d - math.floor(d))


def _check_probs(probs: Sequence[float]) -> np.ndarray:
    p = np.asarray(probs, dtype=float).reshape(-1)
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    return p


def pb_mass(p: np.ndarray) -> np.ndarray:
    mass = np.zeros(p.size + 1)
    mass[0] = 1.0
    for t, pi in enumerate(p, start=1):
        # in-place convolution with (1 - pi, pi) on the first t + 1 cells
        mass[1 : t + 1] = mass[1 : t + 1] * (1.0 - pi) + mass[:t] * pi
        mass[0] *= 1.0 - pi
    return mass


def poisson_binomial(probs: Sequence[float]) -> CountPmf:
    """PMF of a sum of independent Bernoullis with the given means."""
    return CountPmf(pb_mass(_check_probs(probs)))


def poisson_binomial_without(probs: Sequence[float], j: int) -> CountPmf:
    """PMF of the sum with coordinate ``j`` left out, recomputed from scratch.

    Deconvolving the full PMF would divide by ``1 - p_j`` and is unstable as
    ``p_j -> 1``.
    """
    p = _check_probs(probs)
    if not 0 <= j < p.size:
        raise IndexError(f"index {j} out of range for {p.size} probabilities")
    return CountPmf(pb_mass(np.delete(p, j)))


def leave_one_out_masses(probs: Sequence[float]) -> np.ndarray:
    """Row ``j`` is the mass vector of the sum excluding ``j`` (length n)."""
    p = _check_probs(probs)
    n = p.size
    out = np.zeros((n, max(n, 1)))
    for j in range(n):
        out[j] = pb_mass(np.delete(p, j))
    return out


def tv_distance(P: CountPmf, Q: CountPmf) -> float:
    """Half the L1 distance, supports aligned on the integers.

    Truncated tails count as disjoint mass, so the result is an upper bound
    that is exact when both tails are zero.
    """
    lo = min(P.offset, Q.offset)
    hi = max(P.offset + len(P), Q.offset + len(Q))
    a = np.zeros(hi - lo)
    b = np.zeros(hi - lo)
    a[P.offset - lo : P.offset - lo + len(P)] = P.mass
    b[Q.offset - lo : Q.offset - lo + len(Q)] = Q.mass
    d = 0.5 * (np.abs(a - b).sum() + P.tail + Q.tail)
    return float(min(max(d, 0.0), 1.0))


def binomial_pmf(m: int, q: float) -> CountPmf:
    if m < 0:
        raise ValueError("m must be nonnegative")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    mass = np.zeros(m + 1)
    if q == 0.0 or q == 1.0:
        mass[int(q) * m] = 1.0
        return CountPmf(mass)
    lg = [math.lgamma(j + 1) for j in range(m + 1)]
    for j in range(m + 1):
        mass[j] = math.exp(lg[m] - lg[j] - lg[m - j] + j * math.log(q) + (m - j) * math.log1p(-q))
    mass /= mass.sum()
    return CountPmf(mass)


def _poisson_mass(lam: float, cap: int) -> np.ndarray:
    """Poisson(lam) on 0..cap by ratio recurrence out of the mode."""
    mass = np.zeros(cap + 1)
    mode = min(int(math.floor(lam)), cap)
    mass[mode] = math.exp(mode * math.log(lam) - lam - math.lgamma(mode + 1)) if lam > 0 else float(mode == 0)
    for k in range(mode + 1, cap + 1):
        mass[k] = mass[k - 1] * lam / k
    for k in range(mode, 0, -1):
        mass[k - 1] = mass[k] * k / lam
    return mass


def default_support_cap(params: TranslatedPoissonParams) -> int:
    lam = params.rate
    return params.shift + int(math.ceil(lam + 14.0 * math.sqrt(lam) + 40.0))


def translated_poisson_pmf(params: TranslatedPoissonParams, support_cap: int | None = None) -> CountPmf:
    """TP(mu, sigma2): Poisson(sigma2 + frac(mu - sigma2)) moved by floor(mu - sigma2).

    ``support_cap`` is the largest integer kept. Mass on negative integers is
    kept, not dropped.
    """
    if support_cap is None:
        support_cap = default_support_cap(params)
    shift, lam = params.shift, params.rate
    top = support_cap - shift
    if top < 0:
        raise ValueError("support_cap lies below the start of the support")
    mass = _poisson_mass(lam, top)
    tail = max(0.0, 1.0 - float(mass.sum()))
    if tail > TP_TAIL_TOL:
        raise ValueError(f"support_cap {support_cap} leaves tail mass {tail:.3e}")
    mass = mass / mass.sum() * (1.0 - tail)
    return CountPmf(mass, offset=shift, tail=tail)


def rollin_bound(probs: Sequence[float]) -> float:
    """(sqrt(sum p^3 (1-p)) + 2) / sum p (1-p): TV bound to the matching TP."""
    p = _check_probs(probs)
    var = float(np.sum(p * (1 - p)))
    if var <= 0:
        raise ValueError("zero variance: every probability is 0 or 1")
    return (math.sqrt(float(np.sum(p**3 * (1 - p)))) + 2.0) / var


def tp_params_of(probs: Sequence[float]) -> TranslatedPoissonParams:
    p = _check_probs(probs)
    return TranslatedPoissonParams(float(p.sum()), float(np.sum(p * (1 - p))))


def tp_distance_bound(a: TranslatedPoissonParams, b: TranslatedPoissonParams) -> float:
    """TV bound between two translated Poisson laws.

    Both denominators use the smaller of the two variances, which dominates the
    one-sided form and makes the argument order irrelevant.
    """
    if a.shift > b.shift:
        a, b = b, a
    s2 = min(a.sigma2, b.sigma2)
    return abs(a.mu - b.mu) / math.sqrt(s2) + (abs(a.sigma2 - b.sigma2) + 1.0) / s2
