from __future__ import annotations

import pytest

from frameground.kbio import load_knowledge_base
from frameground.session import Policy, close_session, open_session

from helpers import JACOB_KB, MOTORS_KB


@pytest.fixture
def jacob_store():
    return load_knowledge_base(JACOB_KB)


@pytest.fixture
def motors_store():
    return load_knowledge_base(MOTORS_KB)


@pytest.fixture
def jacob_session():
    session = open_session(JACOB_KB)
    yield session
    close_session(session)


@pytest.fixture
def motors_session():
    session = open_session(MOTORS_KB)
    yield session
    close_session(session)


@pytest.fixture
def motors_auto_session():
    session = open_session(MOTORS_KB, policy=Policy.AUTO_FIRST)
    yield session
    close_session(session)
