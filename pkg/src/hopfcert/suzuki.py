"""Streaming census of Sz(q) for sizes where dense enumeration does not fit.

Elements are produced in Bruhat form, B and U tau B with B = U T, and are
never stored as matrices: only packed keys (five bits per entry for q = 32)
are kept for the uniqueness check.  Values of Ind_U^G(1) are obtained by
streaming over G and counting g with g u g^-1 in U.  A matrix of Sz(q) lies
in U exactly when it is lower unitriangular, since that intersection is a
2-subgroup containing the Sylow subgroup U.

At q = 8 the same code is compared with the closure-built group.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .field import FiniteField, field_create
from .groups import (GroupError, InvariantViolation, expected_order, parse_prime_power, sz_t, sz_tau,
                     sz_theta, sz_u)

__all__ = ["SzCensus", "sz_parts", "sz_elements_chunks", "sz_census", "sz_chi_at"]


def _check_q(q: int) -> FiniteField:
    p, m = parse_prime_power(q)
    if p != 2 or m % 2 == 0 or m < 3:
        raise GroupError("Sz requires q = 2^(2n+1) with n >= 1")
    return field_create(p, m)


class _Mul4:
    """4x4 products over GF(2^m): XOR sums of table lookups."""

    def __init__(self, F: FiniteField):
        self.q = F.q
        self.flat = np.ascontiguousarray(F.mul.astype(np.uint8).ravel())

    def __call__(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A, B = np.broadcast_arrays(A, B)
        out = np.zeros(A.shape, dtype=np.uint8)
        q = self.q
        for k in range(4):
            a = A[..., :, k, None].astype(np.int32)
            b = B[..., None, k, :].astype(np.int32)
            out ^= self.flat[a * q + b]
        return out


@lru_cache(maxsize=4)
def sz_parts(q: int):
    """U (as q^2 matrices), T (q-1 matrices) and tau, all uint8."""
    F = _check_q(q)
    U = np.array([sz_u(F, a, b) for a in range(q) for b in range(q)], dtype=np.uint8)
    T = np.array([sz_t(F, k) for k in range(1, q)], dtype=np.uint8)
    return F, U, T, sz_tau().astype(np.uint8)


def sz_elements_chunks(q: int):
    """Yield all of Sz(q) in chunks of shape (n, 4, 4): first B, then u tau B per u."""
    F, U, T, tau = sz_parts(q)
    mul = _Mul4(F)
    B = mul(U[:, None], T[None, :]).reshape(-1, 4, 4)
    yield B
    for u in U:
        yield mul(mul(u, tau)[None], B)


def _pack(chunk: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Two uint64 words holding the 16 entries, 8 per word."""
    bits = (q - 1).bit_length()
    flat = chunk.reshape(-1, 16).astype(np.uint64)
    hi = np.zeros(len(flat), dtype=np.uint64)
    lo = np.zeros(len(flat), dtype=np.uint64)
    for c in range(8):
        hi = (hi << np.uint64(bits)) | flat[:, c]
        lo = (lo << np.uint64(bits)) | flat[:, 8 + c]
    return hi, lo


def _lower_unitriangular(M: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(4, 1)
    diag = (M[..., np.arange(4), np.arange(4)] == 1).all(axis=-1)
    upper = (M[..., iu[0], iu[1]] == 0).all(axis=-1)
    return diag & upper


def _inverse_parts(F: FiniteField, U: np.ndarray, T: np.ndarray):
    """Inverses of u(a, b) and t_kappa in the same orderings as sz_parts."""
    q = F.q
    Uinv = np.empty_like(U)
    i = 0
    for a in range(q):
        ata = int(F.mul[a, sz_theta(F, a)])
        for b in range(q):
            # u(a,b) u(a,b') = u(0, a theta(a) + b + b'), so b' = a theta(a) + b
            Uinv[i] = sz_u(F, a, int(F.add[ata, b]))
            i += 1
    Tinv = np.array([sz_t(F, int(F.inv[k])) for k in range(1, q)], dtype=np.uint8)
    return Uinv, Tinv


@lru_cache(maxsize=4)
def _block_parts(q: int):
    F, U, T, tau = sz_parts(q)
    Uinv, Tinv = _inverse_parts(F, U, T)
    mul = _Mul4(F)
    ut = mul(U[:, None], T[None, :]).reshape(-1, 4, 4)
    ut_inv = mul(Tinv[None, :], Uinv[:, None]).reshape(-1, 4, 4)
    return U, Uinv, tau, mul, ut, ut_inv


def _count_block(args) -> int:
    """#{g in the block : g x g^-1 in U} for one block of the Bruhat listing."""
    q, x, which = args
    U, Uinv, tau, mul, ut, ut_inv = _block_parts(q)
    x = np.asarray(x, dtype=np.uint8)
    # g = u t (which = -1) or g = u_w tau u t; g^-1 = t^-1 u^-1 (tau u_w^-1)
    if which < 0:
        g, g_inv = ut, ut_inv
    else:
        left = mul(U[which], tau)
        right = mul(tau, Uinv[which])  # tau^-1 = tau
        g = mul(left[None], ut)
        g_inv = mul(ut_inv, right[None])
    conj = mul(mul(g, x[None]), g_inv)
    return int(_lower_unitriangular(conj).sum())


def sz_chi_at(q: int, x: np.ndarray, workers: int = 1) -> int:
    """Ind_U^G(1) at the matrix x of Sz(q), by streaming over G."""
    blocks = [(q, np.asarray(x, dtype=np.uint8), w) for w in range(-1, q * q)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            counts = list(ex.map(_count_block, blocks, chunksize=16))
    else:
        counts = [_count_block(b) for b in blocks]
    total = sum(counts)
    if total % (q * q):
        raise InvariantViolation("induced-character count not divisible by |U|")
    return total // (q * q)


@dataclass
class SzCensus:
    q: int
    order: int
    expected_order: int
    distinct: bool
    closure_samples: int
    closure_ok: bool
    chi: dict

    def to_json(self) -> dict:
        return {"q": self.q, "order": self.order, "expected_order": self.expected_order,
                "distinct": self.distinct, "closure_samples": self.closure_samples,
                "closure_ok": self.closure_ok, "chi": dict(sorted(self.chi.items()))}


def _sorted_keys(q: int):
    his, los = [], []
    for chunk in sz_elements_chunks(q):
        h, l = _pack(chunk, q)
        his.append(h)
        los.append(l)
    hi, lo = np.concatenate(his), np.concatenate(los)
    del his, los
    order = np.lexsort((lo, hi))
    hi, lo = hi[order], lo[order]
    del order
    return hi, lo


def _contains(hi: np.ndarray, lo: np.ndarray, qh: np.ndarray, ql: np.ndarray) -> np.ndarray:
    left = np.searchsorted(hi, qh, side="left")
    right = np.searchsorted(hi, qh, side="right")
    out = np.zeros(len(qh), dtype=bool)
    for i in range(len(qh)):
        seg = lo[left[i]:right[i]]
        j = np.searchsorted(seg, ql[i])
        out[i] = j < len(seg) and seg[j] == ql[i]
    return out


def sz_census(q: int, workers: int = 1, samples: int = 2000, seed: int = 0,
              chi_points=((0, 1), (1, 0), (1, 1))) -> SzCensus:
    """Enumerate Sz(q) by keys, check distinctness and closure, and evaluate chi."""
    F, U, T, tau = sz_parts(q)
    hi, lo = _sorted_keys(q)
    n = len(hi)
    distinct = bool(n < 2 or np.all((hi[1:] != hi[:-1]) | (lo[1:] != lo[:-1])))
    # closure sampling: products of random listed elements are listed
    rng = np.random.default_rng(seed)
    mul = _Mul4(F)
    B = mul(U[:, None], T[None, :]).reshape(-1, 4, 4)

    def random_elements(k):
        out = np.empty((k, 4, 4), dtype=np.uint8)
        for i in range(k):
            b = B[rng.integers(len(B))]
            if rng.integers(q * q + 1):
                b = mul(mul(U[rng.integers(len(U))], tau), b)
            out[i] = b
        return out

    x, y = random_elements(samples), random_elements(samples)
    qh, ql = _pack(mul(x, y), q)
    closure_ok = bool(_contains(hi, lo, qh, ql).all())
    del hi, lo
    chi = {"1": expected_order("Sz", q) // (q * q)}
    for a, b in chi_points:
        chi[f"u({a},{b})"] = sz_chi_at(q, sz_u(F, a, b), workers)
    return SzCensus(q, n, expected_order("Sz", q), distinct, samples, closure_ok, chi)
