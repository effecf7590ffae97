import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def two_player(u1_p1, u2_p1, u1_p2, u2_p2):
    from anoneq.game import AnonymousGame

    return AnonymousGame(np.array([[u1_p1, u2_p1], [u1_p2, u2_p2]], dtype=float))


@pytest.fixture
def sparse_only_game():
    """Unique equilibrium has the two players mixing at 1/2 and 1/4.

    Player 0 is indifferent only when player 1 plays 2 with probability 1/4,
    player 1 only when player 0 plays 2 with probability 1/2, and no pure
    profile is an equilibrium.
    """
    return two_player([1 / 3, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0])


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.SUMMARY:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(acceptance.SUMMARY, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)
