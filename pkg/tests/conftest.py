import pytest

from semitic_morpho import load_builtin


@pytest.fixture(scope="session")
def builtin():
    return load_builtin()


@pytest.fixture(scope="session")
def grammar(builtin):
    return builtin[0]


@pytest.fixture(scope="session")
def lexicon(builtin):
    return builtin[1]


@pytest.fixture(scope="session")
def verb_table(builtin):
    return builtin[2]
