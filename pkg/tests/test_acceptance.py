"""Exit criteria for the toolkit, one test per criterion.

Each test appends a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria".
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from blochpovm.bloch import (
    bloch_from_density,
    direction_norm,
    is_bloch_vector,
    projector,
    pure_state_test,
    radii,
    random_density_matrix,
    random_pure_state,
)
from blochpovm.frames import canonical_frame, n_min, random_frame
from blochpovm.povm import alpha_beta, build_symmetric_povm, closed_form_traces, validate_povm
from blochpovm.search import SearchConfig, certify, kappa_max_for_frame, optimize_orientation
from blochpovm.statistics import (
    embed_point,
    outcome_probabilities,
    project_onto_frame,
    reconstruct_state,
    tomography_error,
)
from blochpovm.su_basis import generate_su_basis, structure_constants, verify_basis_relations
from conftest import ACCEPTANCE_LINES, basis_for, constants_for


def record(number, title, passed, detail):
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def test_01_basis_algebra():
    start = time.perf_counter()
    worst = 0.0
    d2_zero = True
    for d in range(2, 7):
        basis = generate_su_basis(d)
        sc = structure_constants(basis)
        rep = verify_basis_relations(basis, sc, 1e-10)
        worst = max(worst, rep.commutator, rep.anticommutator, rep.gram)
        if d == 2:
            d2_zero = all(dv == 0.0 for _, dv, _ in sc.items()) and not sc.dense_d().any()
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and d2_zero and elapsed < 10.0
    record(1, "basis algebra d=2..6", ok,
           f"max residual {worst:.2e} (<=1e-10), d=2 d_abc all zero={d2_zero}, {elapsed:.2f}s (<10s)")


def test_02_radii():
    worst = 0.0
    for d in range(2, 11):
        r_out, r_in = radii(d)
        worst = max(worst, abs(r_out - math.sqrt((d - 1) / (2 * d))), abs(r_in - 1 / math.sqrt(2 * d * (d - 1))))
    d2 = radii(2)
    ok = worst <= 1e-14 and d2[0] == pytest.approx(0.5, abs=1e-14) and d2[1] == pytest.approx(0.5, abs=1e-14)
    record(2, "outradius/inradius d<=10", ok, f"max deviation {worst:.1e} (<=1e-14), d=2 -> {tuple(map(float, d2))}")


def test_03_pure_state_star_condition():
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    pure_fail = 0
    for d in range(2, 6):
        b, sc = basis_for(d), constants_for(d)
        for _ in range(500):
            v = bloch_from_density(projector(random_pure_state(d, rng)), b)
            if not pure_state_test(v, sc, 1e-9):
                pure_fail += 1
    b3, sc3 = basis_for(3), constants_for(3)
    negatives = 0
    wrongly_passed = 0
    while negatives < 500:
        v = rng.standard_normal(8)
        v *= direction_norm(3) / np.linalg.norm(v)
        ok_state, lam = is_bloch_vector(v, b3)
        lam_ref = np.linalg.eigvalsh(np.eye(3) / 3 + np.tensordot(v, b3.generators, axes=1))[0]
        if ok_state or lam_ref >= -1e-10:
            continue
        negatives += 1
        if pure_state_test(v, sc3, 1e-9):
            wrongly_passed += 1
    elapsed = time.perf_counter() - start
    ok = pure_fail == 0 and wrongly_passed == 0 and elapsed < 60.0
    record(3, "pure-state star condition", ok,
           f"{pure_fail}/2000 Haar pure states rejected, {wrongly_passed}/500 non-states accepted, {elapsed:.1f}s (<60s)")


def test_04_inner_ball_universality():
    rng = np.random.default_rng(4)
    failures = []
    total = 0
    for d in range(2, 6):
        basis = basis_for(d)
        kappa = 1.0 / (d - 1)
        for n in range(2, d * d + 1):
            for _ in range(1000):
                total += 1
                frame = random_frame(d, n, rng)
                try:
                    povm = build_symmetric_povm(d, n, kappa, frame, basis)
                    if not validate_povm(povm, 1e-9).passed:
                        failures.append((d, n, "validate"))
                except ValueError as exc:
                    failures.append((d, n, str(exc)))
    record(4, "inner-ball universality", not failures,
           f"{total - len(failures)}/{total} random orientations build and validate at kappa=1/(d-1)")


def test_05_trace_laws():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(200):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(2, d * d + 1))
        frame = random_frame(d, n, rng)
        kappa = float(rng.uniform(0.05, 1.0)) * kappa_max_for_frame(frame, basis_for(d))
        povm = build_symmetric_povm(d, n, kappa, frame, basis_for(d))
        e = povm.elements
        traces = np.trace(e, axis1=1, axis2=2).real
        gram = np.array([[np.trace(a @ b).real for b in e] for a in e])
        diag, off = closed_form_traces(d, n, kappa)
        worst = max(
            worst,
            np.abs(traces - d / n).max(),
            np.abs(np.diag(gram) - diag).max(),
            np.abs(gram[~np.eye(n, dtype=bool)] - off).max(),
        )
    sic = build_symmetric_povm(2, 4, 1.0, canonical_frame(2, 4), basis_for(2))
    g = np.array([[np.trace(a @ b).real for b in sic.elements] for a in sic.elements])
    alpha, beta = alpha_beta(sic)
    sic_ok = (
        np.abs(g[~np.eye(4, dtype=bool)] - 1 / 12).max() <= 1e-12
        and np.abs(np.diag(g) - 1 / 4).max() <= 1e-12
        and abs(alpha - 1 / 12) <= 1e-12
        and abs(beta - 1 / 6) <= 1e-12
    )
    record(5, "trace laws", worst <= 1e-10 and sic_ok,
           f"max deviation {worst:.2e} over 200 POVMs (<=1e-10); qubit SIC 1/12, 1/4, alpha=1/12, beta=1/6: {sic_ok}")


def _brute_n_min(kappa, d):
    # smallest N whose simplex angle fits within the maximal separation angle
    cos_bound = max(-1.0, -1.0 / (kappa * kappa * (d - 1)))
    big_theta = math.acos(cos_bound)
    for n in range(2, d * d + 1):
        if math.acos(-1.0 / (n - 1)) <= big_theta + 1e-12:
            return n
    raise AssertionError("no admissible N")


def test_06_n_min_law():
    pure_ok = all(n_min(1.0, d) == d for d in range(2, 11))
    mismatches = 0
    for d in range(2, 7):
        for k in range(1, 1001):
            kappa = k / 1000
            if n_min(kappa, d) != _brute_n_min(kappa, d):
                mismatches += 1
    record(6, "N_min law", pure_ok and mismatches == 0,
           f"n_min(1,d)=d for d<=10: {pure_ok}; {mismatches} mismatches vs brute force over 5000 (kappa,d)")


def test_07_projection_theorem():
    rng = np.random.default_rng(7)
    worst = 0.0
    worst_complete = 0.0
    pairs = 0
    for d in range(2, 5):
        basis = basis_for(d)
        for n in range(2, d * d + 1):
            for _ in range(100):
                frame = random_frame(d, n, rng)
                kappa = float(rng.uniform(0.05, 1.0)) * kappa_max_for_frame(frame, basis)
                povm = build_symmetric_povm(d, n, kappa, frame, basis)
                rho = random_density_matrix(d, rng, rank=int(rng.integers(1, d + 1)))
                b = bloch_from_density(rho, basis)
                v = embed_point(outcome_probabilities(rho, povm), povm)
                worst = max(worst, np.linalg.norm(v - kappa * project_onto_frame(b, frame)))
                if n == d * d:
                    worst_complete = max(worst_complete, np.linalg.norm(v - kappa * b))
                pairs += 1
    ok = worst <= 1e-10 and worst_complete <= 1e-10
    record(7, "projection theorem", ok,
           f"max ||v - kappa b_par|| {worst:.2e}, max ||v - kappa b|| at N=d^2 {worst_complete:.2e} over {pairs} pairs")


def test_08_reconstruction_round_trip():
    rng = np.random.default_rng(8)
    worst = 0.0
    for d in range(2, 5):
        basis = basis_for(d)
        frame = random_frame(d, d * d, rng)
        kappa = kappa_max_for_frame(frame, basis) * 0.999
        povm = build_symmetric_povm(d, d * d, kappa, frame, basis)
        for _ in range(100):
            rho = random_density_matrix(d, rng, rank=int(rng.integers(1, d + 1)))
            rec = reconstruct_state(outcome_probabilities(rho, povm), povm)
            worst = max(worst, np.linalg.norm(rec.rho - rho))
    record(8, "reconstruction round trip", worst <= 1e-10, f"max Frobenius error {worst:.2e} (<=1e-10)")


def test_09_tomography_scaling():
    start = time.perf_counter()
    frame = canonical_frame(2, 4)
    sic = build_symmetric_povm(2, 4, 1.0, frame, basis_for(2))
    half = build_symmetric_povm(2, 4, 0.5, frame, basis_for(2))
    rho = np.diag([1.0, 0.0]).astype(complex)
    e_1e4 = tomography_error(rho, sic, 10_000, 200, seed=91).mean_error
    e_4e4 = tomography_error(rho, sic, 40_000, 200, seed=92).mean_error
    e_half = tomography_error(rho, half, 10_000, 200, seed=93).mean_error
    shots_ratio = e_4e4 / e_1e4
    kappa_ratio = e_half / e_1e4
    elapsed = time.perf_counter() - start
    ok = 0.4 <= shots_ratio <= 0.6 and 1.6 <= kappa_ratio <= 2.4 and elapsed < 120
    record(9, "tomography scaling", ok,
           f"err(4e4)/err(1e4)={shots_ratio:.3f} (0.5 +-20%), err(kappa=0.5)/err(kappa=1)={kappa_ratio:.3f} "
           f"([1.6, 2.4]), {elapsed:.1f}s (<120s)")


@pytest.mark.slow
@pytest.mark.parametrize("d,n", [(2, 4), (3, 3)])
def test_10_kappa_search(d, n):
    basis = basis_for(d)
    start = time.perf_counter()
    result = optimize_orientation(SearchConfig(d, n, restarts=20, max_iterations=5000, master_seed=10), basis)
    elapsed = time.perf_counter() - start
    certified = certify(result, basis, 1e-6)
    floor_ok = result.best_kappa >= 1 / (d - 1) - 1e-12 and min(result.per_restart_bests) >= 1 / (d - 1) - 1e-12
    ok = result.best_kappa >= 0.999 and certified and floor_ok and elapsed <= 120
    record(10, f"kappa search (d={d}, N={n})", ok,
           f"best kappa {result.best_kappa:.6f} (>=0.999), certified={certified}, floor={floor_ok}, "
           f"{elapsed:.1f}s (<=120s)")


def _cli(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "blochpovm", *map(str, args)], cwd=cwd,
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout


def test_11_cli_determinism(tmp_path):
    # inputs shared by the runs
    assert _cli(["povm", "build", "--dim", 2, "--outcomes", 4, "--kappa", 1, "--seed", 7,
                 "--out", "sic.json"], tmp_path)[0] == 0
    (tmp_path / "state.json").write_text(
        '{"schema_version": 1, "kind": "bloch_vector", "dim": 2, "bloch": [0.1, 0.2, -0.3]}'
    )
    commands = {
        "basis": ["basis", "--dim", 3, "--constants"],
        "frame": ["frame", "--dim", 3, "--outcomes", 5, "--seed", 3],
        "povm build": ["povm", "build", "--dim", 3, "--outcomes", 6, "--kappa", 0.5, "--seed", 5],
        "povm validate": ["povm", "validate", "sic.json"],
        "probs": ["probs", "--state", "state.json", "--povm", "sic.json"],
        "sample": ["sample", "--state", "state.json", "--povm", "sic.json", "--shots", 1000, "--seed", 2],
        "tomo": ["tomo", "--state", "state.json", "--povm", "sic.json", "--shots", 500, "--trials", 20,
                 "--seed", 2],
        "project": ["project", "--dim", 3, "--outcomes", 4, "--kappa", 0.5, "--samples", 200, "--seed", 1],
        "search": ["search", "--dim", 3, "--outcomes", 3, "--restarts", 2, "--iters", 300, "--seed", 4,
                   "--trace", "TRACE"],
    }
    differing = []
    for name, args in commands.items():
        outputs = []
        for run in range(2):
            trace = f"trace{run}.csv"
            argv = [trace if a == "TRACE" else a for a in args]
            code, out = _cli(argv, tmp_path)
            extra = (tmp_path / trace).read_bytes() if "TRACE" in args else b""
            outputs.append((code, out.encode(), extra))
        if outputs[0] != outputs[1] or outputs[0][0] != 0:
            differing.append(name)
    (tmp_path / "p.json").write_text(_cli(commands["probs"], tmp_path)[1])
    recon = [_cli(["reconstruct", "--probs", "p.json", "--povm", "sic.json"], tmp_path) for _ in range(2)]
    if recon[0] != recon[1] or recon[0][0] != 0:
        differing.append("reconstruct")
    record(11, "CLI determinism", not differing,
           f"{len(commands) + 1 - len(differing)}/{len(commands) + 1} subcommands byte-identical across runs"
           + (f"; differing: {differing}" if differing else ""))
