"""Two-strategy anonymous games: representation, text format, generators."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

FORMAT_HEADER = "anon-game v1"
GENERATOR_KINDS = ("random", "dominant", "coordination", "anticoordination")


class GameFormatError(ValueError):
    """Malformed game text."""


class GameDomainError(ValueError):
    """Well-formed text describing an invalid game."""


@dataclass(frozen=True, eq=False)
class AnonymousGame:
    """``payoff[i, s, m]``: player i's payoff for strategy s+1 when m others play 2."""

    payoff: np.ndarray

    def __post_init__(self):
        u = np.array(self.payoff, dtype=float)
        if u.ndim != 3 or u.shape[1] != 2 or u.shape[0] < 1 or u.shape[2] != u.shape[0]:
            raise GameDomainError(f"payoff table must have shape (n, 2, n), got {u.shape}")
        if not np.all(np.isfinite(u)):
            raise GameDomainError("payoffs must be finite")
        if u.min() < 0.0 or u.max() > 1.0:
            raise GameDomainError("payoffs must lie in [0, 1]; normalize first")
        u.setflags(write=False)
        object.__setattr__(self, "payoff", u)

    @property
    def n(self) -> int:
        return self.payoff.shape[0]

    @property
    def u1(self) -> np.ndarray:
        return self.payoff[:, 0, :]

    @property
    def u2(self) -> np.ndarray:
        return self.payoff[:, 1, :]

    def __eq__(self, other):
        if not isinstance(other, AnonymousGame):
            return NotImplemented
        return np.array_equal(self.payoff, other.payoff)

    def __hash__(self):
        return hash(self.payoff.tobytes())


def normalize_table(payoff) -> np.ndarray:
    """One global affine map onto [0, 1]; a constant table maps to all zeros."""
    u = np.asarray(payoff, dtype=float)
    if not np.all(np.isfinite(u)):
        raise GameDomainError("payoffs must be finite")
    lo, hi = u.min(), u.max()
    if hi == lo:
        return np.zeros_like(u)
    return (u - lo) / (hi - lo)


def normalize(game: AnonymousGame) -> AnonymousGame:
    return AnonymousGame(normalize_table(game.payoff))


def _parse_row(tokens: list[str], n: int, lineno: int) -> list[float]:
    if len(tokens) != n:
        raise GameDomainError(f"line {lineno}: expected {n} payoffs, got {len(tokens)}")
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise GameFormatError(f"line {lineno}: {exc}") from None


def load_game(text: str, normalize: bool | None = None) -> AnonymousGame:
    """Parse the ``anon-game v1`` text format.

    ``normalize`` overrides the file's ``normalize`` line when given.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body.split()))
    if not lines or lines[0][1] != FORMAT_HEADER.split():
        raise GameFormatError(f"first line must be '{FORMAT_HEADER}'")
    pos = 1
    if pos >= len(lines) or lines[pos][1][0] != "players" or len(lines[pos][1]) != 2:
        raise GameFormatError("expected 'players <n>' after the header")
    try:
        n = int(lines[pos][1][1])
    except ValueError:
        raise GameFormatError(f"line {lines[pos][0]}: bad player count") from None
    if n < 1:
        raise GameDomainError("player count must be positive")
    pos += 1

    file_norm = False
    if pos < len(lines) and lines[pos][1][0] == "normalize":
        flag = lines[pos][1][1:]
        if flag not in (["on"], ["off"]):
            raise GameFormatError(f"line {lines[pos][0]}: normalize takes 'on' or 'off'")
        file_norm = flag == ["on"]
        pos += 1
    do_norm = file_norm if normalize is None else normalize

    rows = lines[pos:]
    if len(rows) != 2 * n:
        raise GameDomainError(f"expected {2 * n} payoff lines, got {len(rows)}")
    table = np.zeros((n, 2, n))
    for i in range(n):
        for s, key in enumerate(("u1", "u2")):
            lineno, toks = rows[2 * i + s]
            if toks[0] != key:
                raise GameFormatError(f"line {lineno}: expected '{key}', got '{toks[0]}'")
            table[i, s] = _parse_row(toks[1:], n, lineno)

    if not np.all(np.isfinite(table)):
        raise GameDomainError("payoffs must be finite")
    if do_norm:
        table = normalize_table(table)
    elif table.min() < 0.0 or table.max() > 1.0:
        raise GameDomainError("payoff outside [0, 1] and normalization is off")
    return AnonymousGame(table)


def save_game(game: AnonymousGame) -> str:
    out = [FORMAT_HEADER, f"players {game.n}"]
    for i in range(game.n):
        for s, key in enumerate(("u1", "u2")):
            out.append(key + " " + " ".join(repr(float(x)) for x in game.payoff[i, s]))
    return "\n".join(out) + "\n"


def read_game(path, normalize: bool | None = None) -> AnonymousGame:
    return load_game(Path(path).read_text(encoding="utf-8"), normalize=normalize)


def write_game(game: AnonymousGame, path) -> None:
    Path(path).write_text(save_game(game), encoding="utf-8")


def generate(kind: str, n: int, seed: int = 0) -> AnonymousGame:
    """Deterministic game families used as solver stress tests."""
    if kind not in GENERATOR_KINDS:
        raise ValueError(f"unknown generator kind {kind!r}; choose from {GENERATOR_KINDS}")
    if n < 1:
        raise ValueError("n must be at least 1")
    table = np.zeros((n, 2, n))
    m = np.arange(n)
    # fraction of opponents playing strategy 2
    frac2 = m / max(n - 1, 1)
    if kind == "random":
        table = np.random.default_rng(seed).random((n, 2, n))
    elif kind == "dominant":
        table[:, 1, :] = 1.0
    elif kind == "coordination":
        table[:, 0, :] = 1.0 - frac2
        table[:, 1, :] = frac2
    else:
        table[:, 0, :] = frac2
        table[:, 1, :] = 1.0 - frac2
    return AnonymousGame(table)

