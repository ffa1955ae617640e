""" Small numerical helpers shared by the backends: Hermitian square roots, Haar sampling, eigenvalue clustering
and real vectorization of Hermitian matrix stacks """
import numpy as np
import scipy.linalg
from einops import rearrange
from opt_einsum import contract


def hermitize(M):
    M = np.asarray(M, dtype=complex)
    return (M + M.conj().T) / 2


def hermiticity_residual(M):
    M = np.asarray(M, dtype=complex)
    return float(np.linalg.norm(M - M.conj().T))


def eig_apply(A, fn):
    """fn applied to the spectrum of a Hermitian matrix: V fn(w) V*"""
    w, V = scipy.linalg.eigh(hermitize(A))
    return hermitize(contract("ik,k,jk->ij", V, fn(w), V.conj()))


# Eigenvalues at or below this count as exact zeros inside square roots
SQRT_FLOOR = 1e-12


def psd_sqrt(A):
    return eig_apply(A, lambda w: np.sqrt(np.where(w > SQRT_FLOOR, w, 0.0)))


def projector(v):
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def haar_unitary(rng, d):
    """QR of a complex Ginibre matrix with the phases of R's diagonal pushed into Q"""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = scipy.linalg.qr(Z)
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases[None, :]


def phase_normalize(v, threshold):
    """Fix the global phase so that the first component above `threshold` is real positive"""
    v = np.asarray(v, dtype=complex)
    idx = np.flatnonzero(np.abs(v) > threshold)
    if len(idx) == 0:
        return v
    z = v[idx[0]]
    return v * (np.conj(z) / np.abs(z))


def cluster_values(values, gap):
    """Single-linkage clustering of real values: consecutive sorted values closer than `gap` share a cluster.

    Returns (representatives, groups) in descending order of representative, where each representative is the
    mean of its cluster and each group lists the indices into `values`.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return np.zeros(0), []
    order = np.argsort(-values, kind="stable")
    groups = [[order[0]]]
    for prev, cur in zip(order[:-1], order[1:]):
        if values[prev] - values[cur] > gap:
            groups.append([cur])
        else:
            groups[-1].append(cur)
    groups = [np.array(sorted(g)) for g in groups]
    representatives = np.array([values[g].mean() for g in groups])
    return representatives, groups


def vectorize(stack):
    """(k, d, d) complex stack -> (2 d^2, k) real matrix; Frobenius inner products are preserved for Hermitian input"""
    stack = np.asarray(stack, dtype=complex)
    if stack.ndim == 2:
        stack = stack[None]
    return rearrange(np.stack([stack.real, stack.imag], axis=1), "k c i j -> (c i j) k")


def devectorize(vecs, d):
    parts = rearrange(np.asarray(vecs, dtype=float), "(c i j) k -> k c i j", c=2, i=d, j=d)
    return parts[:, 0] + 1j * parts[:, 1]


def orthonormal_span(stack, rank_tol):
    """Orthonormal (Frobenius) basis of the real span of a stack of Hermitian matrices"""
    stack = np.asarray(stack, dtype=complex)
    if stack.ndim == 2:
        stack = stack[None]
    d = stack.shape[-1]
    if stack.shape[0] == 0:
        return np.zeros((0, d, d), dtype=complex)
    basis = scipy.linalg.orth(vectorize(stack), rcond=rank_tol)
    return np.array([hermitize(X) for X in devectorize(basis, d)]).reshape(-1, d, d)


def block_offsets(sizes):
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    return [slice(int(lo), int(hi)) for lo, hi in zip(offsets[:-1], offsets[1:])]


def leading_index(Z, tol):
    """First diagonal position where a nonzero projection has weight above tol"""
    return int(np.flatnonzero(np.real(np.diag(Z)) > tol)[0])
