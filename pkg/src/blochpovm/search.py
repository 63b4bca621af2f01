"""Hill-climbing search for simplex orientations with maximal purity parameter.

Each restart starts from a random orientation of the canonical frame and
composes small random rotations with the incumbent, accepting a proposal only
when the admissible kappa strictly improves. The step size decays after a
streak of rejections.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import kernels
from .frames import DirectionalFrame, Orientation, canonical_frame, validate_frame
from .povm import PovmError, build_symmetric_povm, validate_povm

# kappa within this of 1 cannot improve further
KAPPA_CEILING = 1.0 - 1e-12


@dataclass(frozen=True)
class SearchConfig:
    dim: int
    count: int
    restarts: int = 20
    max_iterations: int = 5000
    initial_step: float = 0.3
    step_decay: float = 0.9
    decay_patience: int = 50
    convergence_tol: float = 1e-8
    master_seed: int = 0

    def __post_init__(self):
        d, n = self.dim, self.count
        if d < 2 or not 2 <= n <= d * d:
            raise ValueError(f"need d >= 2 and 2 <= N <= d^2, got d={d}, N={n}")
        if self.restarts < 1 or self.max_iterations < 1 or self.decay_patience < 1:
            raise ValueError("restarts, max_iterations and decay_patience must be positive")
        if not 0.0 < self.step_decay < 1.0:
            raise ValueError("step_decay must lie in (0, 1)")
        if self.initial_step <= 0.0 or self.convergence_tol <= 0.0:
            raise ValueError("initial_step and convergence_tol must be positive")


@dataclass(frozen=True, eq=False)
class RestartOutcome:
    best_kappa: float
    frame_vectors: np.ndarray
    iterations: int
    converged: bool
    trace: tuple  # (iteration, incumbent kappa) after every acceptance


@dataclass(frozen=True, eq=False)
class SearchResult:
    dim: int
    count: int
    best_kappa: float
    best_frame: DirectionalFrame
    per_restart_bests: tuple
    iterations_used: int
    converged: bool
    traces: tuple = field(repr=False)

    def trace_rows(self):
        """``(restart, iteration, kappa)`` rows of every incumbent improvement."""
        for r, trace in enumerate(self.traces):
            for it, k in trace:
                yield r, it, k


def kappa_max_for_frame(frame, basis):
    """Largest kappa for which every ``I/d + kappa n_i.s`` stays positive, capped at 1."""
    if frame.dim != basis.dim:
        raise ValueError("frame and basis dimensions differ")
    report = validate_frame(frame, 1e-9)
    if not report.passed:
        raise ValueError(f"invalid frame: {report}")
    return _objective(frame.vectors, basis)


def _objective(vectors, basis):
    lams = kernels.directional_min_eigenvalues(vectors, basis.generators)
    return min(1.0, float((-1.0 / (basis.dim * lams)).min()))


def restart_generator(master_seed, restart):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([master_seed, restart])))


def _antisymmetric(rng, m):
    a = np.triu(rng.standard_normal((m, m)), 1)
    return (a - a.T) / np.sqrt(m)


def _run_restart(config, basis, restart):
    rng = restart_generator(config.master_seed, restart)
    d = config.dim
    base = canonical_frame(d, config.count).vectors
    q = Orientation.random(d, rng).matrix()
    vectors = base @ q.T
    best = _objective(vectors, basis)
    trace = [(0, best)]
    step = config.initial_step
    rejected = 0
    m = base.shape[1]
    it = 0
    converged = best >= KAPPA_CEILING
    while not converged and it < config.max_iterations:
        it += 1
        trial_q, rr = np.linalg.qr(expm(step * _antisymmetric(rng, m)) @ q)
        # QR keeps the composed rotation orthogonal; fix column signs
        trial_q = trial_q * np.sign(np.diag(rr))
        trial_vectors = base @ trial_q.T
        k = _objective(trial_vectors, basis)
        if k > best:
            q, vectors, best = trial_q, trial_vectors, k
            trace.append((it, best))
            rejected = 0
        else:
            rejected += 1
            if rejected >= config.decay_patience:
                step *= config.step_decay
                rejected = 0
        if best >= KAPPA_CEILING or step < config.convergence_tol:
            converged = True
    return RestartOutcome(best, vectors, it, converged, tuple(trace))


def optimize_orientation(config, basis, workers=1):
    """Multi-restart stochastic hill climbing over frame orientations.

    Restart ``r`` draws from a generator seeded by ``(master_seed, r)``, so
    the result is identical for any ``workers``.
    """
    if basis.dim != config.dim:
        raise ValueError("basis dimension differs from config")
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            outcomes = list(pool.map(lambda r: _run_restart(config, basis, r), range(config.restarts)))
    else:
        outcomes = [_run_restart(config, basis, r) for r in range(config.restarts)]
    bests = tuple(o.best_kappa for o in outcomes)
    winner = outcomes[int(np.argmax(bests))]
    floor = 1.0 / (config.dim - 1)
    if winner.best_kappa < floor - 1e-12:
        raise RuntimeError(f"search returned kappa {winner.best_kappa} below the inner-ball floor {floor}")
    return SearchResult(
        dim=config.dim,
        count=config.count,
        best_kappa=winner.best_kappa,
        best_frame=DirectionalFrame(config.dim, winner.frame_vectors),
        per_restart_bests=bests,
        iterations_used=sum(o.iterations for o in outcomes),
        converged=all(o.converged for o in outcomes),
        traces=tuple(o.trace for o in outcomes),
    )


def certify(result, basis, margin=1e-6):
    """True iff the best frame yields a valid POVM at ``best_kappa - margin``."""
    kappa = min(result.best_kappa - margin, 1.0)
    if kappa <= 0.0:
        return False
    try:
        povm = build_symmetric_povm(result.dim, result.count, kappa, result.best_frame, basis)
    except (PovmError, ValueError):
        return False
    return validate_povm(povm, 1e-9).passed
