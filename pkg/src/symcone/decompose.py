"""Recovering a cone's irreducible decomposition from structure constants.

A Euclidean Jordan algebra handed over as a structure-constant tensor in
an arbitrary orthonormal basis (for instance after ``scramble``) splits
into minimal ideals, which correspond one-to-one to the irreducible
summands of its cone of squares.  The splitting algorithm is the
standard one for matrix algebras: compute the symmetric commutant
{ M = M^T : M L(b_i) = L(b_i) M for all i } by solving the linear
system, draw a random element of it, and read the ideals off its
eigenspaces.  A random draw separates the ideals with probability one;
degenerate draws are retried with fresh coefficients.

``identify_barrier_weights`` then recovers the block weights of a
barrier oracle by a log-linear fit along rays through the block
identities, which also demonstrates that the decomposition of a barrier
into blockwise terms is basis-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import Algebra, CustomAlgebra, Element

__all__ = [
    "Block",
    "DecompositionResult",
    "StructureTensor",
    "identify_barrier_weights",
    "scramble",
    "split_irreducible",
    "structure_constants",
]


@dataclass
class StructureTensor:
    """A product tensor T with (x o y)_k = sum_ij T[i, j, k] x_i y_j.

    The basis is assumed orthonormal for the trace form, so the inner
    product of tensor coordinates is the plain dot product.  When the
    tensor was derived from a source algebra, ``basis`` holds the
    orthonormal basis as columns of raw source coordinates, which makes
    round trips between the two coordinate systems one matmul.
    """

    tensor: np.ndarray
    basis: np.ndarray | None = None
    source: Algebra | None = None
    _algebra: CustomAlgebra | None = field(default=None, repr=False)

    def __post_init__(self):
        self.tensor = np.asarray(self.tensor, dtype=float)
        # CustomAlgebra validates commutativity, trace-form associativity
        # and the existence of an identity
        self._algebra = CustomAlgebra(self.tensor)

    @property
    def dim(self) -> int:
        return self.tensor.shape[0]

    @property
    def algebra(self) -> CustomAlgebra:
        return self._algebra

    @property
    def identity(self) -> np.ndarray:
        return self.algebra._identity_coords()

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.algebra._product(np.asarray(a, float), np.asarray(b, float))

    def tensor_coords(self, x: Element) -> np.ndarray:
        """Tensor-basis coordinates of a source-algebra element."""
        if self.basis is None or self.source is None:
            raise ValueError("tensor carries no source basis")
        w = self.source.metric_weights
        return self.basis.T @ (w * x.coords)

    def source_element(self, coords: np.ndarray) -> Element:
        """Source-algebra element for tensor-basis coordinates."""
        if self.basis is None or self.source is None:
            raise ValueError("tensor carries no source basis")
        return Element(self.source, self.basis @ np.asarray(coords, float))


@dataclass
class Block:
    """One recovered minimal ideal: an orthonormal basis of the
    subspace plus its dimension, rank and best-effort family guess."""

    basis: np.ndarray
    dim: int
    rank: int
    family: str


@dataclass
class DecompositionResult:
    blocks: list[Block]
    residual: float

    def signature(self) -> list[tuple[int, int]]:
        """Sorted (dim, rank) multiset; invariant under re-coordinatization."""
        return sorted((b.dim, b.rank) for b in self.blocks)


def structure_constants(algebra: Algebra) -> StructureTensor:
    """The algebra's product tensor in a trace-orthonormal basis.

    The canonical orthonormal basis rescales each raw coordinate
    direction by 1/sqrt(metric weight); for the orthant and PSD
    families that is the raw basis itself.
    """
    n = algebra.dim
    w = algebra.metric_weights
    B = np.diag(1.0 / np.sqrt(w))
    T = np.empty((n, n, n))
    for i in range(n):
        for j in range(i, n):
            p = algebra._product(B[:, i], B[:, j])
            row = (w * p) @ B
            T[i, j, :] = row
            T[j, i, :] = row
    return StructureTensor(tensor=T, basis=B, source=algebra)


def _random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(A)
    return Q * np.sign(np.diag(R))


def scramble(T: StructureTensor, seed: int = 0) -> StructureTensor:
    """Re-coordinatize by a random orthogonal change of basis.

    The trace form stays the dot product, so the result is a valid
    structure tensor for the same algebra.
    """
    n = T.dim
    S = _random_orthogonal(n, np.random.default_rng(seed))
    scrambled = np.einsum("abc,ai,bj,ck->ijk", T.tensor, S, S, S, optimize=True)
    basis = None if T.basis is None else T.basis @ S
    return StructureTensor(tensor=scrambled, basis=basis, source=T.source)


def _symmetric_basis(n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(i, n):
            S = np.zeros((n, n))
            if i == j:
                S[i, i] = 1.0
            else:
                S[i, j] = S[j, i] = 1.0 / math.sqrt(2.0)
            out.append(S)
    return out


def _symmetric_commutant(T: StructureTensor, tol: float) -> list[np.ndarray]:
    """Basis of {M symmetric : M L(b_i) = L(b_i) M for all i}."""
    n = T.dim
    L_ops = [T.tensor[i].T for i in range(n)]
    sym = _symmetric_basis(n)
    C = np.empty((n * n * n, len(sym)))
    for a, S in enumerate(sym):
        C[:, a] = np.concatenate([(S @ L - L @ S).ravel() for L in L_ops])
    _, svals, Vt = np.linalg.svd(C, full_matrices=True)
    svals = np.concatenate([svals, np.zeros(len(sym) - svals.size)])
    null = svals < tol * svals[0]
    m = int(null.sum())
    if m < 1:
        raise RuntimeError("commutant solve found no null directions")
    # the nullspace must be cleanly separated from the rest of the spectrum
    if m < len(sym):
        border = svals[len(sym) - m - 1]
        floor = max(svals[len(sym) - m:].max(), 1e-300)
        if border < 1e3 * floor:
            raise RuntimeError(
                "commutant solve is rank-deficient beyond tolerance: no "
                "clear spectral gap between null and non-null directions")
    return [sum(v * S for v, S in zip(Vt[len(sym) - m + a], sym))
            for a in range(m)]


def _cluster(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Split sorted positions into clusters at gaps larger than ``gap``."""
    order = np.argsort(values)
    groups = [[order[0]]]
    for prev, cur in zip(order[:-1], order[1:]):
        if values[cur] - values[prev] > gap:
            groups.append([])
        groups[-1].append(cur)
    return [np.array(g) for g in groups]


def _block_rank(T: StructureTensor, basis: np.ndarray,
                rng: np.random.Generator) -> int:
    """Rank of the ideal spanned by ``basis`` (orthonormal columns).

    Counts the distinct eigenvalues of a random block element's
    multiplication operator restricted to the block; a rank-r element
    has the r(r+1)/2 pairwise means of its eigenvalues there.  The
    count is cross-checked against the trace of the block identity.
    """
    z = basis @ rng.standard_normal(basis.shape[1])
    Lz = np.einsum("ijk,i->kj", T.tensor, z)
    A = basis.T @ Lz @ basis
    lam = np.linalg.eigvalsh(0.5 * (A + A.T))
    scale = max(1.0, float(np.abs(lam).max()))
    distinct = 1 + int(np.sum(np.diff(lam) > 1e-6 * scale))
    r_spec = (math.isqrt(8 * distinct + 1) - 1) // 2
    if r_spec * (r_spec + 1) != 2 * distinct:
        raise RuntimeError("eigenvalue count of a block element does not "
                           "match any Jordan rank")
    e_blk = basis @ (basis.T @ T.identity)
    r_tr = float(np.dot(e_blk, T.identity))
    if abs(r_tr - r_spec) > 1e-4:
        raise RuntimeError(
            f"block rank mismatch: spectral count {r_spec}, identity trace "
            f"{r_tr:.6f}")
    return r_spec


def _guess_family(dim: int, rank: int) -> str:
    if rank == 1:
        return "rank-1"
    if rank == 2:
        return "lorentz"
    if dim == rank * (rank + 1) // 2:
        return "sympsd"
    return "unknown"


def split_irreducible(T: StructureTensor, tol: float = 1e-8, seed: int = 0,
                      retry_budget: int = 8) -> DecompositionResult:
    """Recover the minimal ideals of the algebra behind ``T``.

    The (dim, rank) multiset of the result is independent of the basis
    the tensor was presented in.  Eigen-gap failures of the random
    commutant draw are retried up to ``retry_budget`` times.
    """
    n = T.dim
    rng = np.random.default_rng(seed)
    commutant = _symmetric_commutant(T, tol=1e-10)
    m = len(commutant)
    clusters = None
    for _ in range(retry_budget):
        M = sum(c * S for c, S in zip(rng.standard_normal(m), commutant))
        M = 0.5 * (M + M.T)
        lam, V = np.linalg.eigh(M)
        scale = max(float(np.abs(lam).max()), 1e-300)
        groups = _cluster(lam, gap=1e-6 * scale)
        if len(groups) == m:
            clusters = [V[:, g] for g in groups]
            break
    if clusters is None:
        raise RuntimeError(
            f"no commutant draw separated the {m} ideals within "
            f"{retry_budget} retries")

    # safety net: merge clusters transitively until closed under the product
    parent = list(range(len(clusters)))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    leak_tol = 10.0 * tol
    merged = True
    while merged:
        merged = False
        reps = sorted({find(i) for i in range(len(clusters))})
        for ii, p in enumerate(reps):
            for q in reps[ii + 1:]:
                Bp = np.column_stack([clusters[i] for i in range(len(clusters))
                                      if find(i) == p])
                Bq = np.column_stack([clusters[i] for i in range(len(clusters))
                                      if find(i) == q])
                leak = 0.0
                for a in Bp.T:
                    for b in Bp.T:
                        leak = max(leak, float(np.linalg.norm(
                            Bq.T @ T.product(a, b))))
                if leak > leak_tol:
                    parent[find(q)] = find(p)
                    merged = True

    bases = []
    for p in sorted({find(i) for i in range(len(clusters))}):
        cols = np.column_stack([clusters[i] for i in range(len(clusters))
                                if find(i) == p])
        Q, _ = np.linalg.qr(cols)
        bases.append(Q)

    blocks = []
    closure = 0.0
    for B in bases:
        others = [C for C in bases if C is not B]
        for a in B.T:
            for b in B.T:
                prod = T.product(a, b)
                for C in others:
                    closure = max(closure, float(np.linalg.norm(C.T @ prod)))
        rank = _block_rank(T, B, rng)
        blocks.append(Block(basis=B, dim=B.shape[1], rank=rank,
                            family=_guess_family(B.shape[1], rank)))
    blocks.sort(key=lambda b: (-b.dim, -b.rank))

    union = np.column_stack([b.basis for b in blocks])
    orth = float(np.linalg.norm(union.T @ union - np.eye(n)))
    return DecompositionResult(blocks=blocks, residual=max(orth, closure))


def identify_barrier_weights(oracle: Callable[[np.ndarray], float],
                             decomposition: DecompositionResult,
                             T: StructureTensor) -> tuple[float, np.ndarray]:
    """Recover (c0, c_1..c_m) of a barrier oracle on the cone of ``T``.

    The oracle maps tensor-basis coordinates to barrier values.  Along
    x(t) = e + (t - 1) f_i, with f_i the identity of block i, the value
    is F(e) - c_i r_i ln t, so a least-squares fit of five log-spaced
    samples against ln t yields c_i; c0 is F(e) because every block
    identity has unit determinant.
    """
    e = T.identity
    ts = np.geomspace(0.5, 2.0, 5)
    log_ts = np.log(ts)
    c0 = float(oracle(e))
    if not np.isfinite(c0):
        raise ValueError("oracle returned a non-finite value at the identity")
    weights = []
    for blk in decomposition.blocks:
        f_i = blk.basis @ (blk.basis.T @ e)
        vals = np.array([oracle(e + (t - 1.0) * f_i) for t in ts])
        if not np.all(np.isfinite(vals)):
            raise ValueError("oracle returned a non-finite value on a "
                             "block-identity ray")
        slope = np.polyfit(log_ts, vals, 1)[0]
        weights.append(-slope / blk.rank)
    return c0, np.array(weights)
