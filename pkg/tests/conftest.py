import pytest

from reachavoid.worked_examples import dispersal_3v2, evader_win_3v3, pursuer_win_3v3


@pytest.fixture
def ex2():
    return pursuer_win_3v3()


@pytest.fixture
def ex3():
    return evader_win_3v3()


@pytest.fixture
def ex4():
    return dispersal_3v2()
