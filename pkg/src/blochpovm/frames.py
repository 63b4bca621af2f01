"""Regular-simplex directional frames in the Bloch space R^(d**2 - 1)."""

from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import expm

from .bloch import direction_norm


class FrameError(ValueError):
    """Raised for frames that cannot be, or are not, regular simplices."""


@dataclass(frozen=True, eq=False)
class DirectionalFrame:
    """N directional vectors in R^(d**2 - 1), stored as rows of ``vectors``.

    Construction only checks the shape and the vertex count; numerical
    regularity is checked by :func:`validate_frame`.
    """

    dim: int
    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        d = self.dim
        if v.ndim != 2 or v.shape[1] != d * d - 1:
            raise FrameError(f"frame vectors for d={d} must have shape (N, {d * d - 1}), got {v.shape}")
        if not 2 <= v.shape[0] <= d * d:
            raise FrameError(
                f"a regular simplex in R^{d * d - 1} has between 2 and {d * d} vertices, got {v.shape[0]}"
            )
        if not np.all(np.isfinite(v)):
            raise FrameError("frame vectors must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def count(self):
        return self.vectors.shape[0]

    def __len__(self):
        return self.count

    def gram(self):
        return self.vectors @ self.vectors.T


@dataclass(frozen=True, eq=False)
class Orientation:
    """Rotation of R^m given by the upper-triangle entries of an antisymmetric matrix."""

    dim: int
    generator_coefficients: np.ndarray

    def __post_init__(self):
        m = self.dim * self.dim - 1
        c = np.array(self.generator_coefficients, dtype=float)
        if c.shape != (m * (m - 1) // 2,):
            raise ValueError(f"orientation for d={self.dim} needs {m * (m - 1) // 2} coefficients")
        if not np.all(np.isfinite(c)):
            raise ValueError("orientation coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "generator_coefficients", c)

    @classmethod
    def identity(cls, d):
        m = d * d - 1
        return cls(d, np.zeros(m * (m - 1) // 2))

    @classmethod
    def random(cls, d, rng, scale=np.pi):
        m = d * d - 1
        return cls(d, scale * rng.standard_normal(m * (m - 1) // 2))

    def antisymmetric(self):
        m = self.dim * self.dim - 1
        a = np.zeros((m, m))
        iu = np.triu_indices(m, 1)
        a[iu] = self.generator_coefficients
        return a - a.T

    def matrix(self):
        """The orthogonal matrix ``exp(A)``."""
        return expm(self.antisymmetric())


def simplex_vertices(n_vertices):
    """Unit-norm vertices of a regular simplex centred at the origin of R^(N-1).

    Built recursively: each new vertex sits on a fresh axis and the previous
    vertices are shrunk and shifted so all pairwise cosines are ``-1/(N-1)``.
    """
    if n_vertices < 2:
        raise ValueError("a simplex needs at least two vertices")
    verts = np.array([[1.0], [-1.0]])
    for k in range(2, n_vertices):
        shrink = math.sqrt(1.0 - 1.0 / (k * k))
        grown = np.zeros((k + 1, k))
        grown[:k, : k - 1] = shrink * verts
        grown[:k, k - 1] = -1.0 / k
        grown[k, k - 1] = 1.0
        verts = grown
    return verts


def canonical_frame(d, n_outcomes):
    """Regular simplex frame supported on the first ``N - 1`` coordinates."""
    if not 2 <= n_outcomes <= d * d:
        raise FrameError(f"number of outcomes must lie in [2, {d * d}] for d={d}, got {n_outcomes}")
    m = d * d - 1
    vecs = np.zeros((n_outcomes, m))
    vecs[:, : n_outcomes - 1] = simplex_vertices(n_outcomes) * direction_norm(d)
    frame = DirectionalFrame(d, vecs)
    _require_valid(frame)
    return frame


def rotate_frame(frame, orientation):
    """Apply ``exp(A)`` of the orientation to every frame vector."""
    if orientation.dim != frame.dim:
        raise ValueError(f"orientation is for d={orientation.dim}, frame for d={frame.dim}")
    return apply_rotation(frame, orientation.matrix())


def apply_rotation(frame, rotation):
    """Apply an explicit orthogonal matrix to the frame and revalidate."""
    out = DirectionalFrame(frame.dim, frame.vectors @ np.asarray(rotation).T)
    _require_valid(out)
    return out


def random_frame(d, n_outcomes, rng):
    """Canonical frame under a random orientation."""
    return rotate_frame(canonical_frame(d, n_outcomes), Orientation.random(d, rng))


def frame_from_bloch_vectors(vectors, d):
    """Rescale nonzero vectors to directional norm and wrap them as a frame."""
    v = np.asarray(vectors, dtype=float)
    v = v / np.linalg.norm(v, axis=1, keepdims=True) * direction_norm(d)
    return DirectionalFrame(d, v)


@dataclass(frozen=True)
class FrameReport:
    norm_deviation: float
    cosine_deviation: float
    sum_norm: float
    min_separation: float
    tol: float

    @property
    def passed(self):
        return (
            max(self.norm_deviation, self.cosine_deviation, self.sum_norm) <= self.tol
            and self.min_separation > self.tol
        )


def validate_frame(frame, tol=1e-10):
    """Report deviations from a centred regular simplex of outradius-norm vectors."""
    v = frame.vectors
    n = frame.count
    r = direction_norm(frame.dim)
    norms = np.linalg.norm(v, axis=1)
    unit = v / norms[:, None]
    cos = unit @ unit.T
    off = ~np.eye(n, dtype=bool)
    diff = v[:, None, :] - v[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    return FrameReport(
        norm_deviation=float(np.abs(norms - r).max()),
        cosine_deviation=float(np.abs(cos[off] + 1.0 / (n - 1)).max()),
        sum_norm=float(np.linalg.norm(v.sum(axis=0))),
        min_separation=float(dist[off].min()),
        tol=tol,
    )


def _require_valid(frame, tol=1e-10):
    report = validate_frame(frame, tol)
    if not report.passed:
        raise FrameError(f"frame is not a regular simplex: {report}")


def n_min(kappa, d):
    """Smallest admissible number of outcomes for purity parameter ``kappa``."""
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    if kappa <= 1.0 / math.sqrt(d - 1):
        return 2
    # guard the ceiling against rounding just above an integer
    return math.ceil(kappa * kappa * (d - 1) - 1e-12) + 1


def probability_simplex_vertices(frame):
    """Vertices ``t_i = (N-1)/(d-1) n_i`` of the embedded probability simplex."""
    return (frame.count - 1) / (frame.dim - 1) * frame.vectors
