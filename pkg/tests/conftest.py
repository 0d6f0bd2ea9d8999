import pytest

import morsespec as ms


@pytest.fixture(scope="session")
def cfg57():
    return ms.make_group_config([5, 7])


@pytest.fixture(scope="session")
def ctx57(cfg57):
    return ms.build_context(cfg57)


@pytest.fixture(scope="session")
def cfg5711():
    return ms.make_group_config([5, 7, 11])


@pytest.fixture(scope="session")
def ctx5711(cfg5711):
    return ms.build_context(cfg5711)


@pytest.fixture(scope="session")
def theorem_cfg():
    return ms.make_group_config(ms.theorem_primes(3), ms.THEOREM_GRADE)


@pytest.fixture(scope="session")
def theorem_ctx(theorem_cfg):
    return ms.build_context(theorem_cfg)


@pytest.fixture(scope="session")
def cfg29():
    return ms.make_group_config([29])


@pytest.fixture(scope="session")
def ctx29(cfg29):
    return ms.build_context(cfg29)
