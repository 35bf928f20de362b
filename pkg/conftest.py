"""Shared fixtures: golden input files and small representation builders
"""
from pathlib import Path

import numpy as np
import pytest

from input_parser import parse_document
from presentation import FreeWord, Presentation
from rep import GroupSpec, Representation


DATA = Path(__file__).parent / 'data'

I2 = np.eye(2, dtype=complex)
I_SIGMA_1 = np.array([[0, 1j], [1j, 0]])
I_SIGMA_2 = np.array([[0, 1], [-1, 0]], dtype=complex)
I_SIGMA_3 = np.array([[1j, 0], [0, -1j]])


def load(name: str):
    return parse_document((DATA / name).read_text(encoding='utf-8'))


def klein(images, kind='SL') -> Representation:
    p = Presentation(('x1', 'x2'), (FreeWord(((0, 2), (1, 2))),))
    return Representation(p, GroupSpec(kind, 2), tuple(images))


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def klein_simple():
    return load('klein_simple.txt').representation()


@pytest.fixture
def klein_h2():
    return load('klein_h2.txt').representation()


@pytest.fixture
def klein_trivial():
    return load('klein_trivial.txt').representation()


@pytest.fixture
def quaternion_genus2():
    return load('quaternion_genus2.txt').representation()


@pytest.fixture
def psl_crosscaps3():
    return load('psl_crosscaps3.txt').representation()


@pytest.fixture
def unipotent():
    return load('unipotent_free.txt').representation()


@pytest.fixture
def crosscaps4_family():
    return load('crosscaps4_family.txt').family()
