"""Euclidean Jordan algebra arithmetic for symmetric cones.

Supported families: the nonnegative orthant, Lorentz (second-order)
cones, real symmetric positive-semidefinite matrices, finite direct
sums of these, and custom algebras given by a structure-constant
tensor.  Elements are plain coordinate vectors in a fixed basis:

* ``Orthant(n)``      -- R^n with the componentwise product.
* ``Lorentz(n)``      -- R^(n+1) with coordinates (tau, xbar); rank 2.
* ``SymPSD(k)``       -- symmetric k x k matrices stored as the scaled
  upper triangle (off-diagonals multiplied by sqrt(2)) so the trace
  inner product is the Euclidean dot product of coordinates.
* ``DirectSum``       -- concatenated coordinates of the summands.
* ``CustomAlgebra``   -- product given by structure constants in a
  basis that is orthonormal for the trace form.

The inner product used throughout is the trace form
``<x, y> = tr(x o y)``.  In the coordinates above this is the plain dot
product except on Lorentz blocks, where it is twice the dot product
(the rank-2 trace of ``x o y`` is ``2 * x . y``).  Every algebra exposes
``metric_weights`` so that callers can stay metric-correct; ``inner``
applies the weights for you.

All values are immutable after construction and all operations are pure
functions of their inputs, so the module is safe to use from multiple
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Algebra",
    "AlgebraMismatchError",
    "CustomAlgebra",
    "DirectSum",
    "DomainError",
    "Element",
    "LinearOperator",
    "Lorentz",
    "Membership",
    "Orthant",
    "SpectralDecomposition",
    "SymPSD",
    "determinant",
    "inner",
    "inverse",
    "jordan_product",
    "membership",
    "mult_operator",
    "quadratic_representation",
    "scale_power",
    "spectral_decompose",
    "sqrt",
    "trace",
]


class AlgebraMismatchError(ValueError):
    """Elements (or operators) of different algebras were combined."""


class DomainError(ValueError):
    """An operation was applied outside its mathematical domain."""


class Membership(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


# ---------------------------------------------------------------------------
# algebras


class Algebra:
    """A Euclidean Jordan algebra in a fixed coordinate basis.

    Subclasses provide the product, the identity element, the spectral
    decomposition and (optionally) fast paths for the multiplication
    operator.  ``dim`` is the carrier dimension, ``rank`` the Jordan
    rank (the number of eigenvalues of any element).
    """

    dim: int
    rank: int

    # family hooks ---------------------------------------------------------
    def _product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _identity_coords(self) -> np.ndarray:
        raise NotImplementedError

    def _spectral(self, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (eigenvalues descending, frame rows) for ``coords``."""
        raise NotImplementedError

    def _mult_matrix(self, coords: np.ndarray) -> np.ndarray:
        # generic: one product per basis vector; families override when a
        # closed form is cheaper
        cols = [self._product(coords, e) for e in np.eye(self.dim)]
        return np.column_stack(cols)

    # shared API ------------------------------------------------------------
    @property
    def metric_weights(self) -> np.ndarray:
        """Diagonal weights w with <x, y> = sum(w * x * y) (trace form)."""
        return np.ones(self.dim)

    @property
    def basis_labels(self) -> list[str]:
        return [f"x{i}" for i in range(self.dim)]

    def element(self, coords) -> "Element":
        return Element(self, coords)

    def identity(self) -> "Element":
        return Element(self, self._identity_coords())

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.dot(self.metric_weights * a, b))

    def leaves(self) -> list[tuple["Algebra", int]]:
        """Flattened (leaf algebra, coordinate offset) pairs."""
        return [(self, 0)]

    def random_interior(self, rng: np.random.Generator,
                        eig_range: tuple[float, float] = (0.5, 2.0)) -> "Element":
        """Random interior point: random Jordan frame, uniform eigenvalues."""
        probe = Element(self, rng.standard_normal(self.dim))
        dec = spectral_decompose(probe)
        lam = rng.uniform(eig_range[0], eig_range[1], size=self.rank)
        coords = np.zeros(self.dim)
        for lam_i, e_i in zip(lam, dec.frame):
            coords += lam_i * e_i.coords
        return Element(self, coords)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)


class Orthant(Algebra):
    """The nonnegative orthant R^n_+; rank n, componentwise product."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("orthant dimension must be >= 1")
        self.n = n
        self.dim = n
        self.rank = n

    def _product(self, a, b):
        return a * b

    def _identity_coords(self):
        return np.ones(self.n)

    def _mult_matrix(self, coords):
        return np.diag(coords)

    def _spectral(self, coords):
        order = np.argsort(-coords, kind="stable")
        return coords[order], np.eye(self.n)[order]

    def __repr__(self):
        return f"Orthant({self.n})"

    def __eq__(self, other):
        return isinstance(other, Orthant) and other.n == self.n

    def __hash__(self):
        return hash(("orthant", self.n))


class Lorentz(Algebra):
    """The Lorentz cone {(tau, xbar) : tau >= ||xbar||} in R^(n+1).

    ``Lorentz(n)`` has carrier dimension n+1 and rank 2; the product is
    ``(a, abar) o (b, bbar) = (a b + abar . bbar, a bbar + b abar)`` and
    the eigenvalues of (tau, xbar) are ``tau +- ||xbar||``.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("Lorentz parameter must be >= 1")
        self.n = n
        self.dim = n + 1
        self.rank = 2

    @property
    def metric_weights(self):
        # tr(x o y) = 2 * x . y on a rank-2 block
        return np.full(self.dim, 2.0)

    @property
    def basis_labels(self):
        return ["tau"] + [f"q{i}" for i in range(self.n)]

    def _product(self, a, b):
        out = np.empty(self.dim)
        out[0] = a @ b
        out[1:] = a[0] * b[1:] + b[0] * a[1:]
        return out

    def _identity_coords(self):
        e = np.zeros(self.dim)
        e[0] = 1.0
        return e

    def _mult_matrix(self, coords):
        L = coords[0] * np.eye(self.dim)
        L[0, :] = coords
        L[:, 0] = coords
        return L

    def _spectral(self, coords):
        tau, xbar = coords[0], coords[1:]
        nx = float(np.linalg.norm(xbar))
        if nx < 1e-300:
            v = np.zeros(self.n)
            v[0] = 1.0  # fixed direction keeps the frame reproducible
        else:
            v = xbar / nx
        f1 = 0.5 * np.concatenate(([1.0], v))
        f2 = 0.5 * np.concatenate(([1.0], -v))
        return np.array([tau + nx, tau - nx]), np.vstack([f1, f2])

    def __repr__(self):
        return f"Lorentz({self.n})"

    def __eq__(self, other):
        return isinstance(other, Lorentz) and other.n == self.n

    def __hash__(self):
        return hash(("lorentz", self.n))


class SymPSD(Algebra):
    """Real symmetric k x k matrices with product (AB + BA)/2; rank k.

    Coordinates are the scaled upper triangle in row-major order: the k
    diagonal entries and off-diagonals interleave as (0,0), (0,1), ...,
    (1,1), ..., with off-diagonal entries multiplied by sqrt(2).  With
    this convention ``<X, Y> = tr(X Y)`` equals the dot product of
    coordinate vectors.
    """

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("matrix order must be >= 1")
        self.k = k
        self.dim = k * (k + 1) // 2
        self.rank = k
        self._rows, self._cols = np.triu_indices(k)
        self._offdiag = self._rows != self._cols

    @property
    def basis_labels(self):
        return [f"S{i}{j}" for i, j in zip(self._rows, self._cols)]

    def mat(self, coords: np.ndarray) -> np.ndarray:
        """Reassemble the symmetric matrix from its coordinate vector."""
        vals = np.asarray(coords, dtype=float).copy()
        vals[self._offdiag] /= math.sqrt(2.0)
        M = np.zeros((self.k, self.k))
        M[self._rows, self._cols] = vals
        M[self._cols, self._rows] = vals
        return M

    def vec(self, M: np.ndarray) -> np.ndarray:
        """Coordinate vector of a symmetric matrix (inverse of ``mat``)."""
        vals = M[self._rows, self._cols].astype(float).copy()
        vals[self._offdiag] *= math.sqrt(2.0)
        return vals

    def _product(self, a, b):
        A, B = self.mat(a), self.mat(b)
        return self.vec(0.5 * (A @ B + B @ A))

    def _identity_coords(self):
        return self.vec(np.eye(self.k))

    def _spectral(self, coords):
        lam, V = np.linalg.eigh(self.mat(coords))
        frame = np.vstack([self.vec(np.outer(v, v)) for v in V.T[::-1]])
        return lam[::-1], frame

    def __repr__(self):
        return f"SymPSD({self.k})"

    def __eq__(self, other):
        return isinstance(other, SymPSD) and other.k == self.k

    def __hash__(self):
        return hash(("sympsd", self.k))


class DirectSum(Algebra):
    """Direct sum of algebras; all operations act blockwise."""

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("direct sum needs at least one summand")
        self.parts = parts
        self.dim = sum(p.dim for p in parts)
        self.rank = sum(p.rank for p in parts)
        self._slices = []
        off = 0
        for p in parts:
            self._slices.append(slice(off, off + p.dim))
            off += p.dim

    @property
    def metric_weights(self):
        return np.concatenate([p.metric_weights for p in self.parts])

    @property
    def basis_labels(self):
        out = []
        for i, p in enumerate(self.parts):
            out.extend(f"b{i}.{lab}" for lab in p.basis_labels)
        return out

    def slices(self) -> list[slice]:
        return list(self._slices)

    def leaves(self):
        out = []
        for part, sl in zip(self.parts, self._slices):
            for leaf, off in part.leaves():
                out.append((leaf, sl.start + off))
        return out

    def _product(self, a, b):
        out = np.empty(self.dim)
        for p, sl in zip(self.parts, self._slices):
            out[sl] = p._product(a[sl], b[sl])
        return out

    def _identity_coords(self):
        return np.concatenate([p._identity_coords() for p in self.parts])

    def _mult_matrix(self, coords):
        L = np.zeros((self.dim, self.dim))
        for p, sl in zip(self.parts, self._slices):
            L[sl, sl] = p._mult_matrix(coords[sl])
        return L

    def _spectral(self, coords):
        vals, rows = [], []
        for p, sl in zip(self.parts, self._slices):
            v, f = p._spectral(coords[sl])
            vals.append(v)
            block = np.zeros((len(v), self.dim))
            block[:, sl] = f
            rows.append(block)
        vals = np.concatenate(vals)
        rows = np.vstack(rows)
        order = np.argsort(-vals, kind="stable")
        return vals[order], rows[order]

    def __repr__(self):
        return "DirectSum(%s)" % ", ".join(repr(p) for p in self.parts)

    def __eq__(self, other):
        return (isinstance(other, DirectSum) and len(other.parts) == len(self.parts)
                and all(a == b for a, b in zip(self.parts, other.parts)))

    def __hash__(self):
        return hash(("sum", tuple(hash(p) for p in self.parts)))


class CustomAlgebra(Algebra):
    """An algebra given by its structure constants T[i, j, k].

    The product is ``(x o y)_k = sum_ij T[i, j, k] x_i y_j`` and the
    basis is assumed orthonormal for the trace form, which makes the
    inner product the plain dot product.  Construction validates
    commutativity (symmetry of T in its first two indices), trace-form
    associativity (symmetry in the last two) and the existence of an
    identity element.

    Spectral decompositions are computed generically: the distinct
    eigenvalues come from the multiplication operator restricted to the
    associative subalgebra generated by the element, the corresponding
    idempotents from Lagrange interpolation, and non-primitive
    idempotents are refined recursively on their Peirce 1-space.
    """

    def __init__(self, tensor: np.ndarray, tol: float = 1e-9):
        T = np.asarray(tensor, dtype=float)
        if T.ndim != 3 or len(set(T.shape)) != 1:
            raise ValueError("structure tensor must have shape (n, n, n)")
        scale = max(1.0, float(np.abs(T).max()))
        if np.abs(T - T.transpose(1, 0, 2)).max() > tol * scale:
            raise ValueError("structure tensor is not commutative")
        if np.abs(T - T.transpose(0, 2, 1)).max() > tol * scale:
            raise ValueError("trace form is not associative for this tensor")
        self.tensor = T
        self.dim = T.shape[0]
        # identity: solve e o b_j = b_j for all j
        A = T.reshape(self.dim, self.dim * self.dim).T
        rhs = np.eye(self.dim).reshape(-1)
        e, res, _, _ = np.linalg.lstsq(A, rhs, rcond=None)
        if np.linalg.norm(A @ e - rhs) > 1e-7 * self.dim:
            raise ValueError("structure tensor admits no identity element")
        self._id = e
        r = float(np.dot(e, e))  # tr(e) = <e, e> = rank
        if abs(r - round(r)) > 1e-6 or round(r) < 1:
            raise ValueError("trace of the identity is not a positive integer")
        self.rank = int(round(r))

    @property
    def basis_labels(self):
        return [f"c{i}" for i in range(self.dim)]

    def _product(self, a, b):
        return np.einsum("ijk,i,j->k", self.tensor, a, b)

    def _identity_coords(self):
        return self._id.copy()

    def _mult_matrix(self, coords):
        return np.einsum("ijk,i->kj", self.tensor, coords)

    def _spectral(self, coords):
        vals, frame = _primitive_frame(self._product, self._id, coords)
        order = np.argsort(-np.asarray(vals), kind="stable")
        return np.asarray(vals)[order], np.vstack(frame)[order]

    def __repr__(self):
        return f"CustomAlgebra(dim={self.dim}, rank={self.rank})"

    def __eq__(self, other):
        return (isinstance(other, CustomAlgebra)
                and other.tensor.shape == self.tensor.shape
                and np.array_equal(other.tensor, self.tensor))

    def __hash__(self):
        return hash(("custom", self.tensor.shape[0]))


def _distinct_spectrum(prod, ident, x, tol=1e-9):
    """Distinct eigenvalues and Lagrange projectors of ``x``.

    Works inside the associative subalgebra generated by ``x``: the
    multiplication operator restricted to that subalgebra has exactly
    the distinct eigenvalues of ``x``, and the spectral idempotents are
    polynomials in ``x``.
    """
    n = ident.size
    scale = max(1.0, float(np.linalg.norm(x)))
    # orthonormal basis of span{e, x, x^2, ...}
    basis = []
    power = ident.copy()
    for _ in range(n + 1):
        v = power.copy()
        for b in basis:
            v -= (v @ b) * b
        nv = np.linalg.norm(v)
        if nv <= tol * scale:
            break
        basis.append(v / nv)
        power = prod(x, power)
    Q = np.column_stack(basis)
    # restriction of L(x); symmetric because the basis is orthonormal
    LQ = np.column_stack([prod(x, q) for q in basis])
    A = Q.T @ LQ
    lam = np.linalg.eigvalsh(0.5 * (A + A.T))
    # cluster near-identical eigenvalues
    distinct = []
    for v in lam:
        if not distinct or abs(v - distinct[-1]) > 1e-7 * (1.0 + abs(v)):
            distinct.append(float(v))
        else:
            distinct[-1] = 0.5 * (distinct[-1] + v)
    projs = []
    for i, li in enumerate(distinct):
        p = ident.copy()
        for j, lj in enumerate(distinct):
            if j != i:
                p = (prod(x, p) - lj * p) / (li - lj)
        projs.append(p)
    return distinct, projs


def _primitive_frame(prod, ident, x, _depth=0):
    """Full spectral data of ``x``: eigenvalues with multiplicity and a
    frame of primitive idempotents, refined recursively where needed."""
    if _depth > 12:
        raise DomainError("spectral refinement failed to terminate")
    vals, frame = [], []
    distinct, projs = _distinct_spectrum(prod, ident, x)
    for lam, p in zip(distinct, projs):
        mult = float(np.dot(p, ident))  # tr(p) in orthonormal coords
        m = int(round(mult))
        if abs(mult - m) > 1e-5 or m < 1:
            raise DomainError("idempotent trace is not a positive integer")
        if m == 1:
            vals.append(lam)
            frame.append(p)
            continue
        # split p on its Peirce 1-space, spanned by eigenvectors of L(p)
        # with eigenvalue 1 (the Peirce spectrum is {0, 1/2, 1})
        n = ident.size
        Lp = np.column_stack([prod(p, e) for e in np.eye(n)])
        w, V = np.linalg.eigh(0.5 * (Lp + Lp.T))
        Q = V[:, np.abs(w - 1.0) < 0.25]
        sub_prod = lambda a, b, Q=Q: Q.T @ prod(Q @ a, Q @ b)
        sub_id = Q.T @ p
        rng = np.random.default_rng(0x5EED + _depth)
        for _ in range(8):
            z = rng.standard_normal(Q.shape[1])
            try:
                sub_vals, sub_frame = _primitive_frame(sub_prod, sub_id, z,
                                                       _depth + 1)
            except DomainError:
                continue
            if len(sub_vals) == m:
                break
        else:
            raise DomainError("could not refine a degenerate idempotent")
        for f in sub_frame:
            vals.append(lam)
            frame.append(Q @ f)
    return vals, frame


# ---------------------------------------------------------------------------
# elements and operators


@dataclass
class Element:
    """A point of an algebra's carrier space, in the fixed basis."""

    algebra: Algebra
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.shape != (self.algebra.dim,):
            raise AlgebraMismatchError(
                f"coordinate vector of length {self.coords.size} does not "
                f"match {self.algebra!r} (dim {self.algebra.dim})")

    def copy(self) -> "Element":
        return Element(self.algebra, self.coords.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def __add__(self, other: "Element") -> "Element":
        _same_algebra(self, other)
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other: "Element") -> "Element":
        _same_algebra(self, other)
        return Element(self.algebra, self.coords - other.coords)

    def __mul__(self, t: float) -> "Element":
        return Element(self.algebra, self.coords * float(t))

    __rmul__ = __mul__

    def __neg__(self) -> "Element":
        return Element(self.algebra, -self.coords)

    def __repr__(self):
        return f"Element({self.algebra!r}, {np.array2string(self.coords, precision=6)})"


@dataclass
class LinearOperator:
    """A dense linear map on an algebra's coordinates.

    Multiplication operators, quadratic representations, Hessians and
    automorphisms are all carried as instances of this class; they
    compose with ``@`` and apply to elements by calling.
    """

    algebra: Algebra
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        n = self.algebra.dim
        if self.matrix.shape != (n, n):
            raise AlgebraMismatchError(
                f"operator shape {self.matrix.shape} does not match dim {n}")

    @classmethod
    def identity(cls, algebra: Algebra) -> "LinearOperator":
        return cls(algebra, np.eye(algebra.dim))

    def __call__(self, x: Element) -> Element:
        if x.algebra != self.algebra:
            raise AlgebraMismatchError("operator and element algebras differ")
        return Element(self.algebra, self.matrix @ x.coords)

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        if other.algebra != self.algebra:
            raise AlgebraMismatchError("operator algebras differ")
        return LinearOperator(self.algebra, self.matrix @ other.matrix)

    def inv(self) -> "LinearOperator":
        return LinearOperator(self.algebra, np.linalg.inv(self.matrix))

    def adjoint(self) -> "LinearOperator":
        """Adjoint with respect to the trace inner product."""
        w = self.algebra.metric_weights
        return LinearOperator(self.algebra, (self.matrix * w).T / w[:, None])

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


@dataclass
class SpectralDecomposition:
    """Eigenvalues (descending) plus an orthogonal frame of primitive
    idempotents e_1, ..., e_r with x = sum_i lambda_i e_i."""

    eigenvalues: np.ndarray
    frame: list[Element]

    def reconstruct(self) -> Element:
        alg = self.frame[0].algebra
        coords = np.zeros(alg.dim)
        for lam, e in zip(self.eigenvalues, self.frame):
            coords += lam * e.coords
        return Element(alg, coords)


def _same_algebra(a: Element, b: Element) -> None:
    if a.algebra != b.algebra:
        raise AlgebraMismatchError("elements belong to different algebras")


# ---------------------------------------------------------------------------
# operations


def jordan_product(a: Element, b: Element) -> Element:
    """The commutative bilinear product a o b."""
    _same_algebra(a, b)
    return Element(a.algebra, a.algebra._product(a.coords, b.coords))


def inner(a: Element, b: Element) -> float:
    """Trace inner product <a, b> = tr(a o b)."""
    _same_algebra(a, b)
    return a.algebra.inner(a.coords, b.coords)


def mult_operator(x: Element) -> LinearOperator:
    """The multiplication operator L(x): y -> x o y."""
    return LinearOperator(x.algebra, x.algebra._mult_matrix(x.coords))


def quadratic_representation(x: Element) -> LinearOperator:
    """The quadratic representation P(x) = 2 L(x)^2 - L(x o x).

    P(e) is the identity; for interior x, P(x) is a cone automorphism
    and equals the inverse Hessian of -ln det at x under the trace
    inner product.
    """
    alg = x.algebra
    L = alg._mult_matrix(x.coords)
    Lsq = alg._mult_matrix(alg._product(x.coords, x.coords))
    return LinearOperator(alg, 2.0 * (L @ L) - Lsq)


def spectral_decompose(x: Element) -> SpectralDecomposition:
    """Eigenvalues (sorted descending) and a frame of primitive
    idempotents reconstructing x.

    Deterministic for a fixed input; with repeated eigenvalues the
    frame is the one produced by the underlying symmetric eigensolver
    (callers may rely on frame validity, not on frame uniqueness).
    """
    vals, rows = x.algebra._spectral(x.coords)
    frame = [Element(x.algebra, r) for r in rows]
    return SpectralDecomposition(np.asarray(vals, dtype=float), frame)


def eigenvalues(x: Element) -> np.ndarray:
    """Spectral eigenvalues of x, sorted descending."""
    vals, _ = x.algebra._spectral(x.coords)
    return np.asarray(vals, dtype=float)


def determinant(x: Element) -> float:
    """Jordan determinant: the product of the eigenvalues."""
    alg = x.algebra
    if isinstance(alg, Orthant):
        return float(np.prod(x.coords))
    if isinstance(alg, Lorentz):
        return float(x.coords[0] ** 2 - np.dot(x.coords[1:], x.coords[1:]))
    if isinstance(alg, SymPSD):
        return float(np.linalg.det(alg.mat(x.coords)))
    if isinstance(alg, DirectSum):
        return float(np.prod([
            determinant(Element(p, x.coords[sl]))
            for p, sl in zip(alg.parts, alg.slices())]))
    return float(np.prod(eigenvalues(x)))


def trace(x: Element) -> float:
    """Jordan trace: the sum of the eigenvalues, equal to <x, e>."""
    return inner(x, x.algebra.identity())


def _spectral_map(x: Element, f, guard) -> Element:
    dec = spectral_decompose(x)
    guard(dec.eigenvalues)
    coords = np.zeros(x.algebra.dim)
    for lam, e in zip(dec.eigenvalues, dec.frame):
        coords += f(lam) * e.coords
    return Element(x.algebra, coords)


def inverse(x: Element) -> Element:
    """Jordan inverse via spectral calculus; x o x^-1 = e."""
    def guard(lam):
        if np.abs(lam).min() <= 1e-14 * max(1.0, np.abs(lam).max()):
            raise DomainError("element is singular, no Jordan inverse")
    return _spectral_map(x, lambda t: 1.0 / t, guard)


def sqrt(x: Element) -> Element:
    """Jordan square root; requires all eigenvalues >= 0."""
    def guard(lam):
        if lam.min() < -1e-10 * max(1.0, np.abs(lam).max()):
            raise DomainError("negative eigenvalue, no Jordan square root")
    return _spectral_map(x, lambda t: math.sqrt(max(t, 0.0)), guard)


def scale_power(x: Element, t: float) -> Element:
    """Spectral power x^t; requires an interior (positive) element."""
    def guard(lam):
        if lam.min() <= 0.0:
            raise DomainError("spectral power needs strictly positive eigenvalues")
    return _spectral_map(x, lambda v: v ** t, guard)


def membership(x: Element, tol: float = 1e-9) -> Membership:
    """Classify x against the cone: Interior iff min eigenvalue > tol,
    Exterior iff min eigenvalue < -tol, Boundary otherwise."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    lam_min = float(eigenvalues(x).min())
    if lam_min > tol:
        return Membership.INTERIOR
    if lam_min < -tol:
        return Membership.EXTERIOR
    return Membership.BOUNDARY
