"""Symmetric POVMs built from a purity parameter and a simplex frame."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bloch import TOL_PSD
from .frames import FrameError, n_min, validate_frame

DISTINCT_TOL = 1e-8
NEAR_COINCIDENT = 1e-6


class PovmError(ValueError):
    """Raised when a symmetric POVM cannot be constructed."""


class PositivityError(PovmError):
    """An element of the would-be POVM has a negative eigenvalue.

    Attributes
    ----------
    index : int
        Element with the most negative eigenvalue.
    min_eigenvalue : float
    spectrum : ndarray
        Full spectrum of the worst element.
    """

    def __init__(self, index, min_eigenvalue, spectrum):
        self.index = index
        self.min_eigenvalue = min_eigenvalue
        self.spectrum = spectrum
        super().__init__(
            f"element {index} is not positive semidefinite: min eigenvalue {min_eigenvalue:.6g} "
            "(kappa too large for this orientation)"
        )


def closed_form_alpha_beta(d, n, kappa):
    beta = d * (d - 1) / (n * (n - 1)) * kappa**2
    alpha = (d / n - beta) / n
    return alpha, beta


def closed_form_traces(d, n, kappa):
    """``(Tr(E_i^2), Tr(E_i E_j))`` for ``i != j``."""
    diag = d / n * (1 + (d - 1) * kappa**2) / n
    off = d / n**2 * (1 - (d - 1) / (n - 1) * kappa**2)
    return diag, off


@dataclass(frozen=True, eq=False)
class SymmetricPovm:
    """Elements ``E_i = (d/N)(I/d + kappa n_i.s)`` with their generating data."""

    dim: int
    count: int
    kappa: float
    frame: object
    elements: np.ndarray
    alpha: float
    beta: float
    basis: object = field(default=None, repr=False)

    def gram(self):
        """Matrix of ``Tr(E_i E_j)``."""
        e = self.elements
        return np.einsum("iab,jba->ij", e, e).real


def _elements(d, n, kappa, frame, basis):
    blochs = kappa * frame.vectors
    rho = np.eye(d) / d + np.tensordot(blochs, basis.generators, axes=1)
    return (d / n) * rho


def build_symmetric_povm(d, n, kappa, frame, basis, tol_psd=TOL_PSD, tol=1e-10):
    """Construct and verify the symmetric POVM ``E(kappa, frame)``.

    Raises
    ------
    PovmError
        If ``n`` is outside ``[N_min(kappa), d**2]``, ``kappa`` outside (0, 1],
        the frame is invalid, or the measured trace constants disagree with
        the closed forms.
    PositivityError
        If some element has an eigenvalue below ``-tol_psd``.
    """
    if basis.dim != d or frame.dim != d:
        raise PovmError("dimension mismatch between d, frame and basis")
    if not 0.0 < kappa <= 1.0:
        raise PovmError(f"kappa must lie in (0, 1], got {kappa}")
    if frame.count != n:
        raise PovmError(f"frame has {frame.count} vectors, expected {n}")
    lo = n_min(kappa, d)
    if not lo <= n <= d * d:
        raise PovmError(f"N={n} outside the admissible range [{lo}, {d * d}] for kappa={kappa}, d={d}")
    report = validate_frame(frame, tol)
    if not report.passed:
        raise FrameError(f"invalid frame: {report}")

    elements = _elements(d, n, kappa, frame, basis)
    lams = kernels.min_eigenvalues(elements)
    worst = int(np.argmin(lams))
    if lams[worst] < -tol_psd:
        raise PositivityError(worst, float(lams[worst]), kernels.eigvalsh(elements[worst]))

    gram = np.einsum("iab,jba->ij", elements, elements).real
    off = ~np.eye(n, dtype=bool)
    measured_alpha = float(gram[off].mean())
    measured_beta = float(np.diag(gram).mean()) - measured_alpha
    alpha, beta = closed_form_alpha_beta(d, n, kappa)
    if abs(measured_alpha - alpha) > tol or abs(measured_beta - beta) > tol:
        raise PovmError(
            f"measured (alpha, beta) = ({measured_alpha:.12g}, {measured_beta:.12g}) "
            f"disagrees with closed form ({alpha:.12g}, {beta:.12g})"
        )
    elements.setflags(write=False)
    return SymmetricPovm(d, n, float(kappa), frame, elements, measured_alpha, measured_beta, basis)


@dataclass(frozen=True)
class PovmReport:
    completeness: float
    trace_residual: float
    symmetry_residual: float
    min_eigenvalue: float
    worst_element: int
    min_distance: float
    near_coincident: tuple
    tol: float

    @property
    def distinct(self):
        return self.min_distance > DISTINCT_TOL

    @property
    def passed(self):
        return (
            self.completeness <= self.tol
            and self.trace_residual <= self.tol
            and self.symmetry_residual <= self.tol
            and self.min_eigenvalue >= -self.tol
            and self.distinct
        )


def validate_povm(povm, tol=1e-10):
    """Check completeness, trace symmetry, distinctness and positivity.

    The symmetry residual compares measured ``Tr(E_i E_j)`` with the closed
    forms at the POVM's ``kappa``.
    """
    e = np.asarray(povm.elements)
    d, n = povm.dim, e.shape[0]
    completeness = float(np.linalg.norm(e.sum(axis=0) - np.eye(d)))
    traces = np.trace(e, axis1=1, axis2=2)
    trace_res = float(np.abs(traces - d / n).max())
    gram = np.einsum("iab,jba->ij", e, e).real
    diag, offv = closed_form_traces(d, n, povm.kappa)
    expected = np.full((n, n), offv)
    np.fill_diagonal(expected, diag)
    sym_res = float(np.abs(gram - expected).max())
    lams = kernels.min_eigenvalues(e)
    worst = int(np.argmin(lams))
    dist = np.linalg.norm((e[:, None] - e[None, :]).reshape(n, n, -1), axis=2)
    iu = np.triu_indices(n, 1)
    near = tuple(
        (int(i), int(j)) for i, j in zip(*iu) if dist[i, j] < NEAR_COINCIDENT
    )
    return PovmReport(
        completeness=completeness,
        trace_residual=trace_res,
        symmetry_residual=sym_res,
        min_eigenvalue=float(lams[worst]),
        worst_element=worst,
        min_distance=float(dist[iu].min()),
        near_coincident=near,
        tol=tol,
    )


def alpha_beta(povm, tol=1e-10):
    """Closed-form ``(alpha, beta)`` checked against the measured traces."""
    alpha, beta = closed_form_alpha_beta(povm.dim, povm.count, povm.kappa)
    gram = povm.gram()
    expected = alpha + beta * np.eye(povm.count)
    resid = np.abs(gram - expected).max()
    if resid > tol:
        raise PovmError(f"Tr(E_i E_j) deviates from alpha + beta delta_ij by {resid:.3g}")
    return alpha, beta


def kappa_from_beta(beta, d, n):
    return float(np.sqrt(beta * n * (n - 1) / (d * (d - 1))))


VON_NEUMANN = "von_neumann"
INFORMATIONALLY_COMPLETE = "informationally_complete"
SIC = "sic"
RANK_ONE = "rank_one"


def classify(povm, tol=1e-10):
    """Return the subset of structural labels the POVM satisfies."""
    d, n = povm.dim, povm.count
    e = np.asarray(povm.elements)
    labels = set()
    pure = abs(povm.kappa - 1.0) <= tol
    if pure:
        # rank one iff E_i^2 = Tr(E_i) E_i
        sq = np.einsum("iab,ibc->iac", e, e)
        if np.abs(sq - (d / n) * e).max() <= tol:
            labels.add(RANK_ONE)
    if n == d * d:
        labels.add(INFORMATIONALLY_COMPLETE)
        if RANK_ONE in labels:
            labels.add(SIC)
    if n == d and RANK_ONE in labels:
        gram = povm.gram()
        if np.abs(gram - np.eye(n)).max() <= tol:
            labels.add(VON_NEUMANN)
    return labels
