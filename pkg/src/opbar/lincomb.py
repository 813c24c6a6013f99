"""Linear combinations as {key: coefficient} dicts over an exact ring."""

from __future__ import annotations


def add_into(ring, acc: dict, key, coeff):
    if ring.is_zero(coeff):
        return
    cur = acc.get(key)
    if cur is None:
        acc[key] = coeff
        return
    s = ring.add(cur, coeff)
    if ring.is_zero(s):
        del acc[key]
    else:
        acc[key] = s


def combine(ring, *terms) -> dict:
    acc = {}
    for t in terms:
        for k, v in t.items():
            add_into(ring, acc, k, v)
    return acc


def scaled(ring, lc: dict, coeff) -> dict:
    if ring.is_zero(coeff):
        return {}
    out = {}
    for k, v in lc.items():
        w = ring.mul(coeff, v)
        if not ring.is_zero(w):
            out[k] = w
    return out


def scaled_int(ring, lc: dict, n: int) -> dict:
    return scaled(ring, lc, ring.from_int(n))


def bilinear(ring, fn, lc1: dict, lc2: dict) -> dict:
    """Extend fn(key1, key2) -> dict bilinearly."""
    acc = {}
    for k1, c1 in lc1.items():
        for k2, c2 in lc2.items():
            c = ring.mul(c1, c2)
            if ring.is_zero(c):
                continue
            for k, v in fn(k1, k2).items():
                add_into(ring, acc, k, ring.mul(c, v))
    return acc


def linear(ring, fn, lc: dict) -> dict:
    acc = {}
    for k1, c1 in lc.items():
        for k, v in fn(k1).items():
            add_into(ring, acc, k, ring.mul(c1, v))
    return acc


def eq(ring, a: dict, b: dict) -> bool:
    keys = set(a) | set(b)
    for k in keys:
        if not ring.eq(a.get(k, ring.zero), b.get(k, ring.zero)):
            return False
    return True
