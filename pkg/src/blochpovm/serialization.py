"""JSON and CSV formats for bases, states, frames, POVMs and search results.

Every JSON artifact carries ``schema_version`` and a ``kind`` tag. Complex
matrices are row-major nested lists of ``[re, im]`` pairs. Structure-constant
indices are 1-based.
"""

import csv
import io
import json

import numpy as np

from . import SCHEMA_VERSION
from .frames import DirectionalFrame
from .povm import SymmetricPovm, closed_form_alpha_beta


class SchemaError(ValueError):
    """Malformed JSON input; the message names the file and field."""


def complex_matrix_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def complex_matrix_from_json(data, where="matrix"):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: not a numeric array ({exc})") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise SchemaError(f"{where}: expected a square matrix of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _header(kind, **fields):
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **fields}


def dumps(obj):
    return json.dumps(obj, indent=1) + "\n"


def basis_to_json(basis, sc=None):
    out = _header(
        "su_basis",
        dim=basis.dim,
        generators=[complex_matrix_to_json(g) for g in basis.generators],
    )
    if sc is not None:
        out["structure_constants"] = [
            {"indices": [a + 1, b + 1, c + 1], "d": dv, "f": fv} for (a, b, c), dv, fv in sc.items()
        ]
    return out


def density_to_json(rho):
    rho = np.asarray(rho)
    return _header("density_matrix", dim=int(rho.shape[0]), matrix=complex_matrix_to_json(rho))


def bloch_to_json(b, d):
    return _header("bloch_vector", dim=int(d), bloch=[float(x) for x in b])


def frame_to_json(frame):
    return _header(
        "frame",
        dim=frame.dim,
        count=frame.count,
        vectors=[[float(x) for x in v] for v in frame.vectors],
    )


def povm_to_json(povm):
    return _header(
        "symmetric_povm",
        dim=povm.dim,
        count=povm.count,
        kappa=povm.kappa,
        frame=frame_to_json(povm.frame),
        elements=[complex_matrix_to_json(e) for e in povm.elements],
        alpha=povm.alpha,
        beta=povm.beta,
    )


def probs_to_json(p):
    return _header("probabilities", count=len(p), probs=[float(x) for x in p])


def counts_to_json(counts):
    return _header(
        "outcome_counts",
        count=counts.count,
        shots=counts.shots,
        tallies=[int(x) for x in counts.tallies],
    )


def search_result_to_json(result, certified, config):
    return _header(
        "search_result",
        dim=result.dim,
        count=result.count,
        config={
            "restarts": config.restarts,
            "max_iterations": config.max_iterations,
            "initial_step": config.initial_step,
            "step_decay": config.step_decay,
            "decay_patience": config.decay_patience,
            "convergence_tol": config.convergence_tol,
            "master_seed": config.master_seed,
        },
        best_kappa=result.best_kappa,
        per_restart_bests=list(result.per_restart_bests),
        iterations_used=result.iterations_used,
        converged=result.converged,
        certified=certified,
        best_frame=frame_to_json(result.best_frame),
    )


def search_trace_csv(result):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["restart", "iteration", "kappa"])
    for r, it, k in result.trace_rows():
        w.writerow([r, it, repr(float(k))])
    return buf.getvalue()


# -- readers ---------------------------------------------------------------


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None


def _field(data, name, where):
    if not isinstance(data, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    if name not in data:
        raise SchemaError(f"{where}: missing field '{name}'")
    return data[name]


def _int_field(data, name, where):
    v = _field(data, name, where)
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{where}: field '{name}' must be an integer")
    return v


def _float_field(data, name, where):
    v = _field(data, name, where)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where}: field '{name}' must be a number")
    return float(v)


def _check_kind(data, kinds, where):
    kind = _field(data, "kind", where)
    if kind not in kinds:
        raise SchemaError(f"{where}: field 'kind' is {kind!r}, expected one of {sorted(kinds)}")
    version = _field(data, "schema_version", where)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{where}: unsupported schema_version {version!r}")
    return kind


def frame_from_json(data, where="frame"):
    _check_kind(data, {"frame"}, where)
    d = _int_field(data, "dim", where)
    vectors = np.asarray(_field(data, "vectors", where), dtype=float)
    n = _int_field(data, "count", where)
    if vectors.ndim != 2 or vectors.shape[0] != n:
        raise SchemaError(f"{where}.vectors: expected {n} vectors, got shape {vectors.shape}")
    try:
        return DirectionalFrame(d, vectors)
    except ValueError as exc:
        raise SchemaError(f"{where}.vectors: {exc}") from None


def state_from_json(data, basis_factory, where="state"):
    """Density matrix from either a density-matrix or a Bloch-vector artifact."""
    kind = _check_kind(data, {"density_matrix", "bloch_vector"}, where)
    d = _int_field(data, "dim", where)
    if kind == "density_matrix":
        rho = complex_matrix_from_json(_field(data, "matrix", where), f"{where}.matrix")
        if rho.shape != (d, d):
            raise SchemaError(f"{where}.matrix: expected {d}x{d}, got {rho.shape}")
        return rho
    from .bloch import density_from_bloch

    b = np.asarray(_field(data, "bloch", where), dtype=float)
    if b.shape != (d * d - 1,):
        raise SchemaError(f"{where}.bloch: expected {d * d - 1} coordinates, got {b.shape}")
    return density_from_bloch(b, basis_factory(d))


def povm_from_json(data, basis_factory, where="povm"):
    """Rebuild a :class:`SymmetricPovm` from its stored matrices and metadata.

    The stored elements are kept as-is so that validation inspects the file
    contents, not a fresh construction.
    """
    _check_kind(data, {"symmetric_povm"}, where)
    d = _int_field(data, "dim", where)
    n = _int_field(data, "count", where)
    kappa = _float_field(data, "kappa", where)
    frame = frame_from_json(_field(data, "frame", where), f"{where}.frame")
    raw = _field(data, "elements", where)
    if not isinstance(raw, list) or len(raw) != n:
        raise SchemaError(f"{where}.elements: expected {n} matrices")
    elements = np.array(
        [complex_matrix_from_json(e, f"{where}.elements[{i}]") for i, e in enumerate(raw)]
    )
    if elements.shape != (n, d, d):
        raise SchemaError(f"{where}.elements: expected shape ({n}, {d}, {d}), got {elements.shape}")
    if frame.dim != d or frame.count != n:
        raise SchemaError(f"{where}.frame: dimension or count disagrees with the POVM")
    alpha = data.get("alpha")
    beta = data.get("beta")
    if alpha is None or beta is None:
        alpha, beta = closed_form_alpha_beta(d, n, kappa)
    elements.setflags(write=False)
    return SymmetricPovm(d, n, kappa, frame, elements, float(alpha), float(beta), basis_factory(d))


def probs_from_json(data, where="probs"):
    """Probabilities, or relative frequencies from an outcome-counts artifact."""
    kind = _check_kind(data, {"probabilities", "outcome_counts"}, where)
    if kind == "probabilities":
        return np.asarray(_field(data, "probs", where), dtype=float)
    tallies = np.asarray(_field(data, "tallies", where), dtype=float)
    total = tallies.sum()
    if total <= 0:
        raise SchemaError(f"{where}.tallies: no shots recorded")
    return tallies / total
