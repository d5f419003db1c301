"""Small shared helpers: p-norms, conjugate exponents, deterministic RNG streams."""

from __future__ import annotations

import math
import zlib

import numpy as np

# Relative singular-value threshold used everywhere a rank or nullity is needed.
RANK_RTOL = 1e-8

# Absolute slack for comparisons of the form  |F'| >= (1 - eps) * |F|  so that
# decimal eps values behave as written instead of as binary approximations.
COUNT_TOL = 1e-9


def lp_norm(x, p: float) -> float:
    """The coordinate lp norm of a flat array (max norm for p = inf)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(np.abs(x)))
    if p == 1:
        return float(np.sum(np.abs(x)))
    if p == 2:
        return float(np.linalg.norm(x))
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


def conjugate_exponent(p: float) -> float:
    """Holder conjugate: 1 <-> inf, otherwise p / (p - 1)."""
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def check_exponent(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent p must lie in [1, inf], got {p}")
    return p


def rng_for(seed: int, *tags) -> np.random.Generator:
    """A generator whose stream depends only on (seed, tags).

    Tags may be strings or integers; strings are hashed with crc32 so the
    derivation is stable across processes and platforms.
    """
    words = [int(seed) & 0xFFFFFFFF]
    for t in tags:
        if isinstance(t, str):
            words.append(zlib.crc32(t.encode("utf8")))
        else:
            words.append(int(t) & 0xFFFFFFFF)
    return np.random.default_rng(np.random.SeedSequence(words))


def format_p(p: float) -> str:
    """Exponent as a stable token for reports: '2.0', '1.5', 'inf'."""
    return "inf" if math.isinf(p) else repr(float(p))


def parse_p(text) -> float:
    if isinstance(text, (int, float)):
        return check_exponent(float(text))
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "oo"):
        return math.inf
    return check_exponent(float(t))
