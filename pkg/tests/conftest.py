import pytest

from sgpn import catalog
from sgpn.game import solve_ne
from sgpn.reachability import reduce_to_attack_defend


@pytest.fixture
def replay():
    return catalog.load("replay-defense")


@pytest.fixture
def replay_ne(replay):
    return solve_ne(replay.rewards)


@pytest.fixture
def reduced_replay(replay):
    return reduce_to_attack_defend(replay.net)
