import numpy as np
import pytest
from scipy.integrate import quad

from szego.rational import hardy_from_terms, simple_pole


def quad_line(fn, limit=400):
    """Integral over the real line via the tangent substitution."""
    def g(th):
        x = np.tan(th)
        return fn(x) / np.cos(th) ** 2
    re = quad(lambda th: g(th).real, -np.pi / 2, np.pi / 2, limit=limit)[0]
    im = quad(lambda th: g(th).imag, -np.pi / 2, np.pi / 2, limit=limit)[0]
    return re + 1j * im


def quad_inner(f, h, limit=400):
    """Quadrature twin of the residue inner product (tests only)."""
    return quad_line(lambda x: f.evaluate(x) * np.conj(h.evaluate(x)), limit)


@pytest.fixture
def soliton_symbol():
    return simple_pole(1.0, -1j)


@pytest.fixture
def double_eig_symbol():
    # 2/(x+i) - 4/(x+2i): the squared Hankel operator has eigenvalue 1/9 twice
    return hardy_from_terms([(-1j, [2.0]), (-2j, [-4.0])])


@pytest.fixture
def generic_m2():
    return hardy_from_terms([(-1j, [1.0]), (0.8 - 0.7j, [0.5 + 0.3j])])
