"""Constructive rounding of a mixed profile to one of the two searchable shapes.

A profile ``p`` is first cleaned of tiny and near-one probabilities
(:func:`stage1`), then the remaining mixers are either replaced by a common
binomial fit on the ``1/(kn)`` grid (many mixers) or snapped one by one to the
``1/k**2`` grid (fewer than ``k**3`` mixers). :func:`round_profile` runs both
steps and measures every distance and inequality the construction relies on.

Sums that decide counts (``floor(k * S)``, ``ceil(mu**2 / lambda2)``, grid
indices) are taken in exact rational arithmetic over the input floats, so the
branch taken never depends on summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .dist import (
    TranslatedPoissonParams,
    poisson_binomial,
    poisson_binomial_without,
    rollin_bound,
    tp_distance_bound,
    translated_poisson_pmf,
    tv_distance,
)

CHECK_SLACK = 1e-9

Check = tuple  # (lhs, rhs, passed)


@dataclass(frozen=True)
class RoundingParams:
    k: int

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 2:
            raise ValueError(f"k must be an integer >= 2, got {self.k!r}")


@dataclass(frozen=True)
class UniformStructure:
    """Players in ``shared_set`` mix with the common ``q = ell / grid``; ``ones`` play 1."""

    shared_set: tuple[int, ...]
    q: float
    ell: int
    grid: int
    ones: tuple[int, ...]

    kind = "uniform"

    def profile(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[list(self.ones)] = 1.0
        out[list(self.shared_set)] = self.q
        return out


@dataclass(frozen=True)
class SparseStructure:
    """``grid_counts[i]`` lists the players mixing with probability ``i / k**2``."""

    grid_counts: dict
    k: int
    ones: tuple[int, ...]

    kind = "sparse"

    @property
    def mixed(self) -> tuple[int, ...]:
        return tuple(sorted(j for idx in self.grid_counts.values() for j in idx))

    def profile(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[list(self.ones)] = 1.0
        for i, players in self.grid_counts.items():
            out[list(players)] = i / self.k**2
        return out


CandidateStructure = Union[UniformStructure, SparseStructure]


@dataclass
class RoundingReport:
    p_prime: np.ndarray
    q_profile: np.ndarray
    structure: CandidateStructure
    tv_full: float
    tv_leave_one_out: np.ndarray
    lemma_checks: dict = field(default_factory=dict)
    clamped: bool = False

    @property
    def max_tv_leave_one_out(self) -> float:
        return float(self.tv_leave_one_out.max(initial=0.0))

    @property
    def all_checks_pass(self) -> bool:
        return all(c[2] for c in self.lemma_checks.values())


def _check(lhs: float, rhs: float, op: str = "<=") -> Check:
    lhs, rhs = float(lhs), float(rhs)
    ok = lhs <= rhs + CHECK_SLACK if op == "<=" else lhs >= rhs - CHECK_SLACK
    return (lhs, rhs, ok)


def _fsum(xs) -> Fraction:
    return sum((Fraction(float(x)) for x in xs), Fraction(0))


def _profile(p: Sequence[float]) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    return arr


def _k_of(params) -> int:
    return params.k if isinstance(params, RoundingParams) else RoundingParams(int(params)).k


def low_high_sets(p: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    lo = 1.0 / k
    low = np.flatnonzero((p > 0) & (p < lo))
    high = np.flatnonzero((p > 1 - lo) & (p < 1))
    return low, high


def stage1(p: Sequence[float], params) -> np.ndarray:
    """Push entries of (0, 1/k) to {0, 1/k} and of (1-1/k, 1) to {1-1/k, 1}.

    Within each block the lowest indices get the interior value; how many do
    is ``floor(k * block mass)``, measured from 0 for the low block and from 1
    for the high block.
    """
    k = _k_of(params)
    p = _profile(p)
    out = p.copy()
    low, high = low_high_sets(p, k)
    if low.size:
        m = math.floor(k * _fsum(p[low]))
        out[low] = 0.0
        out[low[:m]] = 1.0 / k
    if high.size:
        m = math.floor(k * sum((1 - Fraction(float(x)) for x in p[high]), Fraction(0)))
        out[high] = 1.0
        out[high[:m]] = 1.0 - 1.0 / k
    return out


def _binomial_fit_exact(p_mixed: np.ndarray, k: int, n: int):
    mu = _fsum(p_mixed)
    lam2 = sum((Fraction(float(x)) ** 2 for x in p_mixed), Fraction(0))
    m_prime = math.ceil(mu * mu / lam2)
    ell = min(max(math.floor(k * n * mu / m_prime), 0), k * n)
    return m_prime, ell


def binomial_fit(p_prime_mixed: Sequence[float], k: int, n: int) -> tuple[int, float]:
    """Size ``m'`` and grid probability ``q`` of the binomial that replaces the mixers.

    ``m' = ceil(mu**2 / lambda2)`` and ``q = floor(k n mu / m') / (k n)`` where
    ``mu`` and ``lambda2`` are the first and second power sums.
    """
    p = _profile(p_prime_mixed)
    if p.size < k**3:
        raise ValueError(f"{p.size} mixers is below k^3 = {k**3}; use sparse_round")
    if n < p.size:
        raise ValueError("grid size n must be at least the number of mixers")
    m_prime, ell = _binomial_fit_exact(p, k, n)
    return m_prime, ell / (k * n)


def _sparse_grid_indices(p: np.ndarray, k: int) -> tuple[list[int], bool]:
    k2 = k * k
    idx, prev, prefix = [], 0, Fraction(0)
    for x in p:
        prefix += Fraction(float(x))
        # nearest grid point to the running sum, ties to the lower one
        cur = math.ceil(prefix * k2 - Fraction(1, 2))
        idx.append(cur - prev)
        prev = cur
    clamped = any(i < 1 or i > k2 - 1 for i in idx)
    return [min(max(i, 1), k2 - 1) for i in idx], clamped


def sparse_round(p_prime_mixed: Sequence[float], k: int) -> np.ndarray:
    """Snap each mixer to a multiple of 1/k**2 while tracking the running sum.

    Every prefix sum stays within ``1/(2k**2)`` of the original, so the total
    moves by at most that and each entry by strictly less than ``1/k**2``.
    """
    p = _profile(p_prime_mixed)
    if p.size >= k**3:
        raise ValueError(f"{p.size} mixers reaches k^3 = {k**3}; use binomial_fit")
    idx, _ = _sparse_grid_indices(p, k)
    return np.array(idx, dtype=float) / (k * k)


def fit_moment_checks(mu, mu_p, sigma2, sigma2_p, k, m) -> dict:
    """Moment inequalities satisfied by a binomial fit of ``m >= k**3`` mixers."""
    return {
        "mean_gap": _check(abs(mu - mu_p), 1 / k),
        "variance_gap": _check(abs(sigma2_p - sigma2), 1 + 3 / k),
        "mean_floor": _check(mu, k**2, ">="),
        "variance_floor": _check(sigma2, k**2 * (1 - 1 / k), ">="),
    }


def _mixed_set(p_prime: np.ndarray) -> np.ndarray:
    return np.flatnonzero((p_prime != 0) & (p_prime != 1))


def loo_moment_checks(p_prime: Sequence[float], q: Sequence[float], j: int, k: int) -> dict:
    """The fit's moment inequalities with mixer ``j`` removed from both sides."""
    p_prime, q = _profile(p_prime), _profile(q)
    M = _mixed_set(p_prime)
    if j not in set(M.tolist()):
        raise ValueError(f"player {j} is not a mixer of p'")
    pm, qm = p_prime[M], q[M]
    mu, mu_p = pm.sum(), qm.sum()
    s2, s2_p = np.sum(pm * (1 - pm)), np.sum(qm * (1 - qm))
    mu_j, mu_p_j = mu - p_prime[j], mu_p - q[j]
    s2_j = s2 - p_prime[j] * (1 - p_prime[j])
    s2_p_j = s2_p - q[j] * (1 - q[j])
    return {
        "loo_mean_gap": _check(abs(mu_j - mu_p_j), 1 + 1 / k),
        "loo_variance_gap": _check(abs(s2_p_j - s2_j), 1.25 + 3 / k),
        "loo_mean_floor": _check(mu_j, k**2 - 1, ">="),
        "loo_variance_floor": _check(s2_j, k**2 * (1 - 1 / k) - 0.25, ">="),
    }


def _tp_of(p: np.ndarray) -> TranslatedPoissonParams:
    return TranslatedPoissonParams(float(p.sum()), float(np.sum(p * (1 - p))))


def _uniform_chain_checks(pm: np.ndarray, qm: np.ndarray) -> dict:
    """Triangle chain through translated Poisson laws, every link measured exactly."""
    a, b = _tp_of(pm), _tp_of(qm)
    tp_a, tp_b = translated_poisson_pmf(a), translated_poisson_pmf(b)
    pz, py = poisson_binomial(pm), poisson_binomial(qm)
    rb_z, rb_y, tpb = rollin_bound(pm), rollin_bound(qm), tp_distance_bound(a, b)
    return {
        "tp_fit_before": _check(tv_distance(pz, tp_a), rb_z),
        "tp_fit_after": _check(tv_distance(py, tp_b), rb_y),
        "tp_pair": _check(tv_distance(tp_a, tp_b), tpb),
        "tv_chain": _check(tv_distance(pz, py), rb_z + rb_y + tpb),
    }


def _block_checks(name: str, p: np.ndarray, pp: np.ndarray, block: np.ndarray, k: int) -> dict:
    if block.size == 0:
        return {}
    a, b = p[block], pp[block]
    checks = {
        f"{name}_sum": _check(abs(a.sum() - b.sum()), 1 / k),
        f"{name}_tv": _check(tv_distance(poisson_binomial(a), poisson_binomial(b)), 3 / k),
    }
    loo_sum = max(abs((a.sum() - a[t]) - (b.sum() - b[t])) for t in range(a.size))
    loo_tv = max(
        tv_distance(poisson_binomial_without(a, t), poisson_binomial_without(b, t)) for t in range(a.size)
    )
    checks[f"{name}_loo_sum"] = _check(loo_sum, 2 / k)
    checks[f"{name}_loo_tv"] = _check(loo_tv, 6 / k)
    return checks


def _worst(checks_per_j: list[dict]) -> dict:
    """Per inequality, keep the j with the least slack."""
    out = {}
    for checks in checks_per_j:
        for key, (lhs, rhs, ok) in checks.items():
            slack = rhs - lhs if key.endswith("gap") else lhs - rhs
            if key not in out or slack < out[key][1]:
                out[key] = ((lhs, rhs, ok), slack)
    return {key: v[0] for key, v in out.items()}


def round_profile(p: Sequence[float], params, n_for_grid: int | None = None) -> RoundingReport:
    """Stage 1, then the uniform or sparse rounding, with full diagnostics."""
    k = _k_of(params)
    p = _profile(p)
    n = p.size
    n_grid = n if n_for_grid is None else n_for_grid
    if n_grid < n:
        raise ValueError("n_for_grid must be at least the profile length")

    pp = stage1(p, k)
    M = _mixed_set(pp)
    ones = tuple(np.flatnonzero(pp == 1).tolist())
    q = pp.copy()
    checks = {}
    low, high = low_high_sets(p, k)
    checks.update(_block_checks("low_block", p, pp, low, k))
    checks.update(_block_checks("high_block", p, pp, high, k))
    clamped = False

    if M.size >= k**3:
        m_prime, ell = _binomial_fit_exact(pp[M], k, n_grid)
        qv = ell / (k * n_grid)
        shared = M[:m_prime]
        q[M] = 0.0
        q[shared] = qv
        structure = UniformStructure(tuple(shared.tolist()), qv, ell, k * n_grid, ones)
        pm, qm = pp[M], q[M]
        checks.update(
            fit_moment_checks(
                pm.sum(), qm.sum(), np.sum(pm * (1 - pm)), np.sum(qm * (1 - qm)), k, M.size
            )
        )
        checks["fit_size"] = _check(m_prime, M.size)
        checks.update(_worst([loo_moment_checks(pp, q, int(j), k) for j in M]))
        checks.update(_uniform_chain_checks(pm, qm))
    else:
        idx, clamped = _sparse_grid_indices(pp[M], k)
        q[M] = np.array(idx, dtype=float) / (k * k)
        groups: dict[int, list[int]] = {}
        for j, i in zip(M.tolist(), idx):
            groups.setdefault(i, []).append(j)
        structure = SparseStructure({i: tuple(v) for i, v in sorted(groups.items())}, k, ones)
        if M.size:
            checks["sparse_sum"] = _check(abs(pp[M].sum() - q[M].sum()), 1 / (2 * k * k))
            checks["sparse_entry"] = _check(np.max(np.abs(pp[M] - q[M])), 1 / (k * k))

    tv_full = tv_distance(poisson_binomial(p), poisson_binomial(q))
    loo = np.array(
        [tv_distance(poisson_binomial_without(p, j), poisson_binomial_without(q, j)) for j in range(n)]
    )
    return RoundingReport(pp, q, structure, tv_full, loo, checks, clamped)
