"""Generalized Gell-Mann basis of su(d) and its structure constants.

Generators are ordered as the symmetric off-diagonal family, then the
antisymmetric off-diagonal family, then the diagonal family. Every generator
is normalised so that ``Tr(s_a s_b) = 2 delta_ab``.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations

import numpy as np

ZERO_FLOOR = 1e-13


@dataclass(frozen=True, eq=False)
class SuBasis:
    """The ``d**2 - 1`` traceless Hermitian generators of su(d).

    Attributes
    ----------
    dim : int
        Hilbert-space dimension ``d``.
    generators : ndarray, shape (d**2 - 1, d, d)
        Complex generator matrices, read-only.
    """

    dim: int
    generators: np.ndarray

    def __post_init__(self):
        gens = np.array(self.generators, dtype=np.complex128)
        m = self.dim * self.dim - 1
        if gens.shape != (m, self.dim, self.dim):
            raise ValueError(
                f"expected {m} generators of shape ({self.dim}, {self.dim}), got {gens.shape}"
            )
        if not np.all(np.isfinite(gens)):
            raise ValueError("generators must be finite")
        gens.setflags(write=False)
        object.__setattr__(self, "generators", gens)

    @property
    def size(self):
        """Number of generators, ``d**2 - 1``."""
        return self.generators.shape[0]

    def __len__(self):
        return self.size

    def __getitem__(self, a):
        return self.generators[a]


def generate_su_basis(d):
    """Return the generalized Gell-Mann basis of su(d).

    >>> basis = generate_su_basis(2)
    >>> basis.generators[2].real.astype(int).tolist()
    [[1, 0], [0, -1]]
    """
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    d = int(d)
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    gens = []
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = g[k, j] = 1.0
        gens.append(g)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = -1j
        g[k, j] = 1j
        gens.append(g)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        gens.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1)))).astype(np.complex128))
    return SuBasis(d, np.array(gens))


def _perm_parity(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """Sparse symmetric ``d_abc`` and antisymmetric ``f_abc`` tensors.

    Values are stored once per sorted index triple ``a <= b <= c`` (0-based);
    lookups for any ordering resolve the permutation sign of ``f``.
    """

    dim: int
    entries: dict = field(repr=False)

    @property
    def size(self):
        return self.dim * self.dim - 1

    def d(self, a, b, c):
        key = tuple(sorted((a, b, c)))
        return self.entries.get(key, (0.0, 0.0))[0]

    def f(self, a, b, c):
        idx = (a, b, c)
        order = sorted(range(3), key=lambda i: idx[i])
        key = tuple(idx[i] for i in order)
        val = self.entries.get(key, (0.0, 0.0))[1]
        return _perm_parity(order) * val if val else 0.0

    def items(self):
        """Iterate ``((a, b, c), d_abc, f_abc)`` over stored sorted triples."""
        for key in sorted(self.entries):
            dv, fv = self.entries[key]
            yield key, dv, fv

    @cached_property
    def _d_coo(self):
        rows, vals = [], []
        for key, (dv, _) in self.entries.items():
            if dv == 0.0:
                continue
            for p in set(permutations(key)):
                rows.append(p)
                vals.append(dv)
        idx = np.array(rows, dtype=np.intp).reshape(-1, 3)
        return idx[:, 0], idx[:, 1], idx[:, 2], np.array(vals, dtype=float)

    def dense_d(self):
        """Dense ``(m, m, m)`` array of ``d_abc``."""
        a, b, c, v = self._d_coo
        out = np.zeros((self.size,) * 3)
        out[a, b, c] = v
        return out

    def dense_f(self):
        """Dense ``(m, m, m)`` array of ``f_abc``."""
        out = np.zeros((self.size,) * 3)
        for key, (_, fv) in self.entries.items():
            if fv == 0.0:
                continue
            for order in permutations(range(3)):
                p = tuple(key[i] for i in order)
                out[p] = _perm_parity(order) * fv
        return out

    def contract_d(self, x, y):
        """Return ``sum_bc d_abc x_b y_c`` as a length-m vector."""
        a, b, c, v = self._d_coo
        out = np.zeros(self.size)
        np.add.at(out, a, v * x[b] * y[c])
        return out


def structure_constants(basis, floor=ZERO_FLOOR):
    """Compute ``d_abc`` and ``f_abc`` from ``Tr(s_a s_b s_c) = 2 d_abc + 2i f_abc``.

    Entries with magnitude below ``floor`` are stored as exact zeros.
    """
    g = basis.generators
    m, d = g.shape[0], basis.dim
    prod = np.einsum("aij,bjk->abik", g, g).reshape(m * m, d * d)
    # Tr(P s_c) = sum_ik P_ik (s_c)_ki
    third = g.transpose(0, 2, 1).reshape(m, d * d)
    trip = (prod @ third.T).reshape(m, m, m) / 2.0
    dvals = np.where(np.abs(trip.real) < floor, 0.0, trip.real)
    fvals = np.where(np.abs(trip.imag) < floor, 0.0, trip.imag)
    entries = {}
    for a in range(m):
        for b in range(a, m):
            for c in range(b, m):
                dv, fv = float(dvals[a, b, c]), float(fvals[a, b, c])
                if dv != 0.0 or fv != 0.0:
                    entries[(a, b, c)] = (dv, fv)
    return StructureConstants(d, entries)


@dataclass(frozen=True)
class BasisReport:
    """Maximum residuals of the su(d) algebra relations."""

    commutator: float
    anticommutator: float
    gram: float
    gram_argmax: tuple
    tol: float

    @property
    def passed(self):
        return max(self.commutator, self.anticommutator, self.gram) <= self.tol


def verify_basis_relations(basis, sc, tol=1e-10):
    """Check the commutator, anticommutator and trace-orthogonality identities.

    Residuals are Frobenius norms for the matrix identities and absolute
    deviations for the Gram entries ``Tr(s_a s_b) - 2 delta_ab``.
    """
    if basis.dim != sc.dim:
        raise ValueError(f"basis has dim {basis.dim} but constants have dim {sc.dim}")
    g = basis.generators
    m, d = g.shape[0], basis.dim
    f = sc.dense_f()
    dd = sc.dense_d()
    ab = np.einsum("aij,bjk->abik", g, g)
    ba = ab.transpose(1, 0, 2, 3)
    comm = ab - ba - 2j * np.einsum("abc,cij->abij", f, g)
    eye = np.eye(d)
    anti = (
        ab + ba
        - (4.0 / d) * np.einsum("ab,ij->abij", np.eye(m), eye)
        - 2.0 * np.einsum("abc,cij->abij", dd, g)
    )
    gram = np.einsum("abii->ab", ab).real - 2.0 * np.eye(m)
    gram_abs = np.abs(gram)
    arg = np.unravel_index(np.argmax(gram_abs), gram_abs.shape)
    return BasisReport(
        commutator=float(np.sqrt((np.abs(comm) ** 2).sum(axis=(2, 3))).max()),
        anticommutator=float(np.sqrt((np.abs(anti) ** 2).sum(axis=(2, 3))).max()),
        gram=float(gram_abs.max()),
        gram_argmax=(int(arg[0]), int(arg[1])),
        tol=tol,
    )
