"""Quadratic forms Q_a = Q_{a_1} + ... + Q_{a_n} with Q_a(x, y) = a x^2 + x y + y^2."""

import numpy as np

from . import gf4


class FormSpec(tuple):
    """Coefficient vector (a_1, ..., a_n) over GF(4)."""

    def __new__(cls, coeffs):
        coeffs = tuple(int(c) for c in coeffs)
        if any(not 0 <= c < 4 for c in coeffs):
            raise ValueError(f"bad GF(4) coefficients {coeffs}")
        return super().__new__(cls, coeffs)

    @classmethod
    def parse(cls, s):
        return cls(gf4.parse_vector(s))

    def __str__(self):
        return gf4.format_vector(self)

    @property
    def sign(self):
        return form_sign(self)

    @property
    def trace(self):
        return tuple(gf4.trace(a) for a in self)


def eval_form(ctx, a, g):
    """Q_a at element index/indices g; independent of the twist vector."""
    if len(a) != ctx.n:
        raise ValueError(f"form has {len(a)} coefficients, group has {ctx.n} blocks")
    scalar = np.ndim(g) == 0
    x, y = ctx.coords(g)
    out = np.zeros(np.shape(g), dtype=np.int64)
    for i, alpha in enumerate(a):
        xi, yi = x[i], y[i]
        out ^= gf4.MUL_TABLE[alpha, gf4.SQUARE[xi]] ^ gf4.MUL_TABLE[xi, yi] ^ gf4.SQUARE[yi]
    return int(out) if scalar else out


def form_values(ctx, a):
    """Q_a over all of G_e in index order (cached per (ctx, a))."""
    key = (ctx.e, tuple(a))
    hit = _VALUE_CACHE.get(key)
    if hit is None:
        hit = eval_form(ctx, a, ctx.all)
        hit.setflags(write=False)
        _VALUE_CACHE[key] = hit
    return hit


_VALUE_CACHE = {}


def form_sign(a):
    s = 1
    for alpha in a:
        if gf4.trace(alpha):
            s = -s
    return s


def level_set(ctx, a, value):
    """Indices of {g : Q_a(g) = value}, with zero removed for value 0."""
    idx = np.flatnonzero(form_values(ctx, a) == value).astype(np.int64)
    if value == 0:
        idx = idx[idx != 0]
    return idx


def expected_level_size(n, s, value):
    if value == 0:
        return (4 ** (n - 1) + s) * (4 ** n - s)
    return 4 ** (n - 1) * (4 ** n - s)
