"""Density matrices, Bloch vectors and the purity/direction decomposition."""

from dataclasses import dataclass

import numpy as np

from . import kernels

TOL_PSD = 1e-10
ZERO_NORM = 1e-14


class NotAStateError(ValueError):
    """Raised when a matrix or vector fails the density-matrix conditions."""


def radii(d):
    """Outradius and inradius of the Bloch-vector set in dimension ``d``."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return np.sqrt((d - 1) / (2.0 * d)), 1.0 / np.sqrt(2.0 * d * (d - 1))


def direction_norm(d):
    """Fixed norm of a directional vector, equal to the outradius."""
    return np.sqrt((d - 1) / (2.0 * d))


def _coords(b, basis):
    b = np.asarray(b, dtype=float)
    if b.shape != (basis.size,):
        raise ValueError(f"Bloch vector for d={basis.dim} needs {basis.size} coordinates, got {b.shape}")
    return b


def density_from_bloch(b, basis):
    """Return ``I/d + sum_a b_a s_a``. Positivity is not checked."""
    b = _coords(b, basis)
    return np.eye(basis.dim) / basis.dim + np.tensordot(b, basis.generators, axes=1)


def bloch_from_density(rho, basis, tol=1e-12):
    """Return ``b_a = Tr(rho s_a) / 2``."""
    rho = np.asarray(rho, dtype=np.complex128)
    d = basis.dim
    if rho.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix, got {rho.shape}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise NotAStateError(f"trace is {tr.real:.3g}, not 1")
    # Tr(rho s_a) = sum_ij rho_ij (s_a)_ji
    return np.einsum("ij,aji->a", rho, basis.generators).real / 2.0


def check_density_matrix(rho, tol_psd=TOL_PSD, tol=1e-12):
    """Validate Hermiticity, unit trace and positivity; return the matrix.

    Raises
    ------
    NotAStateError
        If any density-matrix condition fails.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NotAStateError(f"density matrix must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise NotAStateError("density matrix has non-finite entries")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > tol:
        raise NotAStateError(f"not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise NotAStateError(f"trace is {tr:.15g}, not 1")
    lam = float(kernels.eigvalsh(rho)[0])
    if lam < -tol_psd:
        raise NotAStateError(f"not positive semidefinite (min eigenvalue {lam:.3g})")
    return rho


@dataclass(frozen=True, eq=False)
class BlochVector:
    """A Bloch vector certified to describe a state.

    Use :meth:`certify` to construct one; it checks positivity of the
    associated density matrix.
    """

    dim: int
    coords: np.ndarray

    @classmethod
    def certify(cls, coords, basis, tol_psd=TOL_PSD):
        ok, lam = is_bloch_vector(coords, basis, tol_psd)
        if not ok:
            raise NotAStateError(f"not a Bloch vector: min eigenvalue {lam:.3g}")
        c = np.array(coords, dtype=float)
        c.setflags(write=False)
        return cls(basis.dim, c)


@dataclass(frozen=True, eq=False)
class PurityDecomposition:
    """Factorisation ``b = kappa * direction`` with a fixed-norm direction."""

    dim: int
    kappa: float
    direction: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.kappa <= 1.0 + 1e-12:
            raise ValueError(f"kappa must lie in [0, 1], got {self.kappa}")
        n = np.array(self.direction, dtype=float)
        if abs(np.linalg.norm(n) - direction_norm(self.dim)) > 1e-12:
            raise ValueError("direction does not have the outradius norm")
        n.setflags(write=False)
        object.__setattr__(self, "direction", n)

    @property
    def bloch(self):
        return self.kappa * self.direction


def decompose(b, d=None, tol=1e-12):
    """Split a Bloch vector into purity index and directional vector.

    The zero vector maps to ``kappa = 0`` with the direction along the first
    coordinate axis.
    """
    b = np.asarray(b, dtype=float)
    if d is None:
        d = int(round(np.sqrt(b.size + 1)))
    if b.size != d * d - 1:
        raise ValueError(f"Bloch vector for d={d} needs {d * d - 1} coordinates, got {b.size}")
    r = direction_norm(d)
    norm = np.linalg.norm(b)
    if norm > r + tol:
        raise ValueError(f"norm {norm:.6g} exceeds the outradius {r:.6g}")
    if norm < ZERO_NORM:
        n = np.zeros(b.size)
        n[0] = r
        return PurityDecomposition(d, 0.0, n)
    return PurityDecomposition(d, min(norm / r, 1.0), b * (r / norm))


def is_bloch_vector(b, basis, tol_psd=TOL_PSD):
    """Return ``(ok, min_eigenvalue)`` for the matrix ``I/d + b.s``."""
    b = _coords(b, basis)
    lam = float(kernels.directional_min_eigenvalues(b[None, :], basis.generators)[0])
    lam += 1.0 / basis.dim
    return lam >= -tol_psd, lam


def star_product(b1, b2, sc):
    """Return the vector with components ``sum_bc d_abc b1_b b2_c``."""
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    if b1.shape != (sc.size,) or b2.shape != (sc.size,):
        raise ValueError(f"vectors must have length {sc.size}")
    return sc.contract_d(b1, b2)


def pure_state_test(b, sc, tol=1e-9):
    """Test ``b * b == (d - 2)/d b`` for a point on the outer sphere."""
    b = np.asarray(b, dtype=float)
    d = sc.dim
    r = direction_norm(d)
    if abs(np.linalg.norm(b) - r) > tol:
        raise ValueError(f"vector norm {np.linalg.norm(b):.12g} is not the outradius {r:.12g}")
    resid = np.linalg.norm(star_product(b, b, sc) - (d - 2.0) / d * b)
    return bool(resid <= tol)


def state_overlap(p1, p2):
    """``Tr(rho1 rho2)`` from two purity decompositions."""
    if p1.dim != p2.dim:
        raise ValueError("decompositions have different dimensions")
    d = p1.dim
    cos = np.dot(p1.direction, p2.direction) / direction_norm(d) ** 2
    return (1.0 + (d - 1) * p1.kappa * p2.kappa * cos) / d


def max_angle(kappa, d):
    """Largest angle between directions of two states sharing purity ``kappa``."""
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    if kappa <= 1.0 / np.sqrt(d - 1):
        return np.pi
    return float(np.arccos(-1.0 / (kappa * kappa * (d - 1))))


def kappa_max_along(n, basis):
    """Largest ``kappa`` for which ``I/d + kappa n.s`` is positive semidefinite."""
    n = _coords(n, basis)
    d = basis.dim
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise ValueError("direction is the zero vector")
    if abs(norm - direction_norm(d)) > 1e-10:
        raise ValueError(f"direction norm {norm:.12g} is not {direction_norm(d):.12g}")
    lam = float(kernels.directional_min_eigenvalues(n[None, :], basis.generators)[0])
    return -1.0 / (d * lam)


def random_pure_state(d, rng):
    """Haar-random ket from normalised complex Gaussian amplitudes."""
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


def random_density_matrix(d, rng, rank=None):
    """Random mixed state ``G G^dagger / Tr`` with a complex Gaussian ``G``."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def projector(psi):
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())
