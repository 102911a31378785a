import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fiberscope import FlagComplex, build_typeA


@pytest.fixture(scope="session")
def hexagon():
    return FlagComplex.from_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])


@pytest.fixture(scope="session")
def path2():
    return FlagComplex.from_graph(3, [(0, 1), (1, 2)])


@pytest.fixture(scope="session")
def triangle():
    return FlagComplex.from_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture(scope="session")
def square():
    return FlagComplex.from_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture(scope="session")
def b22():
    return build_typeA(2, 2)


@pytest.fixture(scope="session")
def b23():
    return build_typeA(2, 3)


@pytest.fixture(scope="session")
def b25():
    return build_typeA(2, 5)


@pytest.fixture(scope="session")
def b32():
    return build_typeA(3, 2)


@pytest.fixture(scope="session")
def heawood(b22):
    return b22.complex
