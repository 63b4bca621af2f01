"""Outcome statistics of symmetric POVMs and linear-inversion tomography.

Random draws use numpy's PCG64 bit generator. Per-trial generators are
seeded with ``SeedSequence([seed, trial])`` so results do not depend on the
order in which trials execute.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bloch import bloch_from_density, density_from_bloch
from .frames import probability_simplex_vertices

NEG_CLAMP = 1e-12


class InformationIncompleteError(ValueError):
    """The POVM has fewer than ``d**2`` outcomes, so only part of b is recoverable."""


@dataclass(frozen=True, eq=False)
class OutcomeCounts:
    tallies: np.ndarray

    @property
    def count(self):
        return self.tallies.size

    @property
    def shots(self):
        return int(self.tallies.sum())

    def frequencies(self):
        return self.tallies / self.shots


def outcome_probabilities(rho, povm, tol=1e-12):
    """Probabilities ``p_i = (d/N)(1/d + 2 kappa b.n_i)`` cross-checked against ``Tr(rho E_i)``."""
    rho = np.asarray(rho, dtype=np.complex128)
    d, n = povm.dim, povm.count
    if rho.shape != (d, d):
        raise ValueError(f"state is {rho.shape}, POVM acts on dimension {d}")
    b = bloch_from_density(rho, povm.basis)
    p = (d / n) * (1.0 / d + 2.0 * povm.kappa * (povm.frame.vectors @ b))
    direct = np.einsum("ab,iba->i", rho, povm.elements).real
    gap = np.abs(p - direct).max()
    if gap > tol:
        raise ArithmeticError(f"Bloch-form probabilities disagree with Tr(rho E_i) by {gap:.3g}")
    return p


def clamp_probabilities(p):
    """Zero out entries in ``[-1e-12, 0)``; used when serializing."""
    p = np.array(p, dtype=float)
    if (p < -NEG_CLAMP).any():
        raise ValueError(f"probability {p.min():.3g} is negative beyond tolerance")
    return np.where(p < 0.0, 0.0, p)


def check_probabilities(p, n=None, tol=1e-12):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or (n is not None and p.size != n):
        raise ValueError(f"expected {n} probabilities, got shape {p.shape}")
    if (p < -NEG_CLAMP).any():
        raise ValueError("probabilities must be nonnegative")
    if abs(p.sum() - 1.0) > tol:
        raise ValueError(f"probabilities sum to {p.sum():.15g}")
    return p


def embed_point(p, povm):
    """Point ``v = sum_i p_i t_i`` of the probability simplex in R^(d**2 - 1)."""
    p = np.asarray(p, dtype=float)
    if p.shape != (povm.count,):
        raise ValueError(f"expected {povm.count} probabilities, got {p.shape}")
    return p @ probability_simplex_vertices(povm.frame)


def _span_basis(frame, rank_tol=1e-9):
    u, s, _ = np.linalg.svd(frame.vectors.T, full_matrices=False)
    rank = int((s > rank_tol * s[0]).sum())
    if rank < frame.count - 1:
        raise ValueError(f"degenerate frame: span has rank {rank}, expected {frame.count - 1}")
    q = u[:, : frame.count - 1]
    # second orthogonalization pass
    q, _ = np.linalg.qr(q)
    return q


def project_onto_frame(b, frame):
    """Orthogonal projection of ``b`` onto the span of the frame vectors."""
    b = np.asarray(b, dtype=float)
    if b.shape != (frame.vectors.shape[1],):
        raise ValueError(f"vector has shape {b.shape}, frame lives in R^{frame.vectors.shape[1]}")
    q = _span_basis(frame)
    return q @ (q.T @ b)


def projection_residual(rho, povm):
    """``||v - kappa b_par||`` for the state ``rho``."""
    b = bloch_from_density(rho, povm.basis)
    v = embed_point(outcome_probabilities(rho, povm), povm)
    return float(np.linalg.norm(v - povm.kappa * project_onto_frame(b, povm.frame)))


def verify_projection_theorem(rho, povm, tol=1e-10):
    """Return ``(passed, residual)`` for the identity ``v = kappa b_par``."""
    r = projection_residual(rho, povm)
    return r <= tol, r


@dataclass(frozen=True, eq=False)
class Reconstruction:
    rho: np.ndarray
    min_eigenvalue: float
    trace: float

    @property
    def is_state(self):
        return self.min_eigenvalue >= 0.0


def reconstruct_state(p, povm, basis=None):
    """Linear inversion ``rho = I/d + ((d+1)/kappa) (sum_i p_i n_i).s``.

    The result is not projected onto the state set; ``min_eigenvalue`` flags
    unphysical reconstructions from noisy frequencies.
    """
    basis = povm.basis if basis is None else basis
    d, n = povm.dim, povm.count
    if n != d * d:
        raise InformationIncompleteError(
            f"N={n} < d^2={d * d}: only the projection of b onto the frame span is recoverable"
        )
    if povm.kappa < 1e-12:
        raise ValueError("kappa too small to invert")
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise ValueError(f"expected {n} probabilities, got {p.shape}")
    b = (d + 1) / povm.kappa * (p @ povm.frame.vectors)
    rho = density_from_bloch(b, basis)
    lam = float(np.linalg.eigvalsh(rho)[0])
    return Reconstruction(rho, lam, float(np.trace(rho).real))


def _draw(p, shots, rng):
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(shots), side="right")
    return np.bincount(np.minimum(idx, p.size - 1), minlength=p.size)


def sample_outcomes(rho, povm, shots, seed):
    """Multinomial outcome tallies drawn by inverse-CDF sampling."""
    if isinstance(shots, bool) or int(shots) != shots or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    p = outcome_probabilities(rho, povm)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return OutcomeCounts(_draw(p, int(shots), rng))


def trial_generator(seed, trial):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))


@dataclass(frozen=True)
class TomographyStats:
    shots: int
    trials: int
    kappa: float
    mean_error: float
    std_error: float
    unphysical_fraction: float
    errors: tuple


def tomography_error(rho, povm, shots, trials, seed, workers=1):
    """Frobenius error of linear-inversion tomography over repeated trials."""
    d, n = povm.dim, povm.count
    if n != d * d:
        raise InformationIncompleteError(f"tomography needs N=d^2={d * d} outcomes, got {n}")
    if trials < 1 or shots < 1:
        raise ValueError("shots and trials must be positive")
    rho = np.asarray(rho, dtype=np.complex128)
    p = outcome_probabilities(rho, povm)

    def one(trial):
        freq = _draw(p, shots, trial_generator(seed, trial)) / shots
        rec = reconstruct_state(freq, povm)
        return np.linalg.norm(rec.rho - rho), rec.min_eigenvalue < 0.0

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(t) for t in range(trials)]
    errs = np.array([r[0] for r in results])
    bad = np.array([r[1] for r in results])
    return TomographyStats(
        shots=int(shots),
        trials=int(trials),
        kappa=povm.kappa,
        mean_error=float(errs.mean()),
        std_error=float(errs.std(ddof=1)) if trials > 1 else 0.0,
        unphysical_fraction=float(bad.mean()),
        errors=tuple(float(e) for e in errs),
    )


def simplex_points(blochs, povm):
    """Probabilities and embedded simplex points for a batch of Bloch vectors.

    Returns ``(p, v)`` with shapes ``(K, N)`` and ``(K, d**2 - 1)``.
    """
    blochs = np.atleast_2d(np.asarray(blochs, dtype=float))
    d, n = povm.dim, povm.count
    p = (d / n) * (1.0 / d + 2.0 * povm.kappa * (blochs @ povm.frame.vectors.T))
    return p, p @ probability_simplex_vertices(povm.frame)


def projection_residuals(blochs, povm):
    """``||v - kappa b_par||`` for each row of a batch of Bloch vectors."""
    blochs = np.atleast_2d(np.asarray(blochs, dtype=float))
    _, v = simplex_points(blochs, povm)
    q = _span_basis(povm.frame)
    par = (blochs @ q) @ q.T
    return np.linalg.norm(v - povm.kappa * par, axis=1)
