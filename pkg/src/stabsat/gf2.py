"""Small GF(2) and symplectic linear algebra helpers on numpy bool arrays.

Symplectic vectors are laid out as ``[x_0 .. x_{n-1}, z_0 .. z_{n-1}]``.
"""

from __future__ import annotations

import numpy as np


def _i(a):
    return np.asarray(a, dtype=np.int64)


def matmul(a, b) -> np.ndarray:
    return (_i(a) @ _i(b)) % 2 == 1


def rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = np.array(m, dtype=bool, copy=True)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.nonzero(m[r:, c])[0]
        if len(hit) == 0:
            continue
        p = r + hit[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        others = np.nonzero(m[:, c])[0]
        others = others[others != r]
        if len(others):
            m[others] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return len(rref(m)[1])


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Solve ``a @ x = b`` over GF(2); ``b`` may have several columns.

    Returns one solution (free variables set to 0) or None when inconsistent.
    """
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    k, d = a.shape
    if k == 0:
        x = np.zeros((d, b.shape[1]), dtype=bool)
        return x[:, 0] if vec else x
    aug, piv = rref(np.hstack([a, b]))
    x = np.zeros((d, b.shape[1]), dtype=bool)
    for r, c in enumerate(piv):
        if c >= d:
            return None
        x[c] = aug[r, d:]
    return x[:, 0] if vec else x


def symplectic_form(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of ``omega(a_i, b_j)`` for row-vector stacks ``a`` and ``b``."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    n = a.shape[1] // 2
    return ((_i(a[:, :n]) @ _i(b[:, n:]).T + _i(a[:, n:]) @ _i(b[:, :n]).T) % 2) == 1


def omega(u: np.ndarray, v: np.ndarray) -> int:
    n = len(u) // 2
    return int((np.count_nonzero(u[:n] & v[n:]) + np.count_nonzero(u[n:] & v[:n])) % 2)


def swap_halves(m: np.ndarray) -> np.ndarray:
    n = m.shape[-1] // 2
    return np.concatenate([m[..., n:], m[..., :n]], axis=-1)


def complete_symplectic_basis(n: int, z_fixed: dict, x_fixed: dict) -> tuple[np.ndarray, np.ndarray]:
    """Extend prescribed images to a full symplectic basis.

    ``z_fixed`` maps slot -> vector for Z images, ``x_fixed`` slot -> vector for
    X images (its keys must be a subset of ``z_fixed``).  The fixed vectors must
    already satisfy the symplectic relations among themselves.  Returns
    ``(X, Z)`` arrays of shape ``(n, 2n)``.
    """
    X = np.zeros((n, 2 * n), dtype=bool)
    Z = np.zeros((n, 2 * n), dtype=bool)
    have = np.zeros(n, dtype=bool)
    for s, v in z_fixed.items():
        Z[s] = v
    for s, v in x_fixed.items():
        X[s] = v
        have[s] = True
    zs = sorted(z_fixed)
    xs = sorted(x_fixed)
    iso = [s for s in zs if s not in x_fixed]
    if iso:
        # w . J v = omega(v, w): constraint rows are the fixed vectors with halves swapped
        rows = swap_halves(np.vstack([Z[zs]] + ([X[xs]] if xs else [])))
        rhs = np.zeros((len(rows), len(iso)), dtype=bool)
        for c, s in enumerate(iso):
            rhs[zs.index(s), c] = True
        sol = solve(rows, rhs)
        if sol is None:
            raise ValueError("prescribed vectors are not independent")
        for c, s in enumerate(iso):
            X[s] = sol[:, c]
        for a, s in enumerate(iso):
            for s2 in iso[:a]:
                if omega(X[s], X[s2]):
                    X[s] ^= Z[s2]
            have[s] = True
    free = [s for s in range(n) if s not in z_fixed]
    if free:
        pool = np.eye(2 * n, dtype=bool)
        done = np.nonzero(have)[0]
        if len(done):
            # project away the span of the existing hyperbolic pairs
            a = symplectic_form(pool, Z[done])
            b = symplectic_form(pool, X[done])
            pool = pool ^ matmul(a, X[done]) ^ matmul(b, Z[done])
        for s in free:
            nz = np.nonzero(pool.any(axis=1))[0]
            u = pool[nz[0]]
            w = symplectic_form(pool, u[None, :])[:, 0]
            v = pool[np.nonzero(w)[0][0]]
            X[s] = u
            Z[s] = v
            pool = pool ^ np.outer(symplectic_form(pool, v[None, :])[:, 0], u) ^ np.outer(w, v)
    return X, Z
