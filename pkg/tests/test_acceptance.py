"""End-to-end acceptance criteria; each test records one PASS/FAIL line."""
import time

import numpy as np
import pytest

from crange.demos import example, example5_data, example_cloud
from crange.geometry import (
    convex_hull,
    disc_diagnostic,
    occupancy_grid,
    polygon_area,
    star_center,
    star_shaped_test,
    winding_number,
)
from crange.groups import FullUnitary, Local, SpecialUnitary, haar_sample
from crange.linalg import commutator, dagger, expm_skew, fro_norm, is_nilpotent, matrix_unit
from crange.local import (
    CaseLabel,
    case_labels,
    classify_4x4,
    conjecture_check,
    homotopy_trace,
    tloc_feasibility,
)
from crange.numrange import hermitian_interval, radius, sample_range
from crange.symmetry import (
    blockshift_canonical,
    detect_weak_symmetry,
    is_su2,
    lie_closure,
    separation_index,
    su2_generators,
)

from .conftest import random_hermitian
from .planted import generic_negative, planted_positive

pytestmark = pytest.mark.acceptance

BUTTERFLY_BOUNDS = (-1 - 1e-9, 1 + 1e-9, -1 - 1e-9, 1 + 1e-9)
CUBE_ROOTS = np.exp(2j * np.pi * np.arange(3) / 3)


def test_c1_example1_circle(criterion):
    t0 = time.perf_counter()
    ex = example(1)
    pts = sample_range(ex.c, ex.a, ex.spec, 10_000, 0).points
    dev = float(np.max(np.abs(np.abs(pts) - 1)))
    rep = disc_diagnostic(pts)
    dt = time.perf_counter() - t0
    ok = dev <= 1e-9 and rep.rotation_invariant and rep.annulus_suspected and dt < 5
    criterion(1, "Example 1 is the unit circle", ok, f"max ||z|-1| = {dev:.1e}, {dt:.2f} s")


def test_c2_example2_butterfly(criterion):
    t0 = time.perf_counter()
    ex = example(2)
    pts = sample_range(ex.c, ex.a, ex.spec, 50_000, 0).points
    bad = int(np.sum((pts.real < -1) | (pts.real > 1) | (np.abs(pts.imag) > np.abs(pts.real) + 1e-9)))
    g = occupancy_grid(pts, 128, bounds=BUTTERFLY_BOUNDS)
    occ = g.region_occupancy(lambda z: np.abs(z.imag) <= np.abs(z.real))
    star = star_shaped_test(g, 0)
    ratio = polygon_area(convex_hull(pts)) / g.occupied_area
    dt = time.perf_counter() - t0
    ok = bad == 0 and occ >= 0.95 and star and ratio >= 1.2 and dt < 20
    criterion(2, "Example 2 is the butterfly", ok,
              f"violations {bad}, occupancy {occ:.3f}, star(0) {star}, hull/occupied {ratio:.2f}, {dt:.1f} s")


def test_c3_example3_gap_and_triangle(criterion, oracle):
    t0 = time.perf_counter()
    pts = example_cloud(3, samples=100_000).points
    gap = float(np.abs(pts).min())
    hull = convex_hull(pts)
    # every hull vertex sits at a corner and every corner is reached
    to_root = float(np.abs(hull[:, None] - CUBE_ROOTS[None, :]).min(axis=1).max())
    to_vertex = float(np.abs(hull[:, None] - CUBE_ROOTS[None, :]).min(axis=0).max())
    centre = star_center(occupancy_grid(pts, 128))
    dt = time.perf_counter() - t0
    target = oracle["example3_min_modulus"]
    ok = target - 1e-3 <= gap <= target + 5e-3 and max(to_root, to_vertex) <= 0.02 and centre is None and dt < 60
    criterion(3, "Example 3 has a hole around 0", ok,
              f"min |z| = {gap:.4f}, hull-to-roots {max(to_root, to_vertex):.4f}, star center {centre}, {dt:.1f} s")


def test_c4_von_neumann_endpoints(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst = 0.0
    interval_err = 0.0
    for k in range(50):
        n = (3, 4, 8)[k % 3]
        c, a = random_hermitian(rng, n), random_hermitian(rng, n)
        alpha, gamma = np.linalg.eigvalsh(a), np.linalg.eigvalsh(c)
        hi, lo = float(alpha @ gamma), float(alpha @ gamma[::-1])
        lo2, hi2 = hermitian_interval(c, a)
        interval_err = max(interval_err, abs(lo2 - lo), abs(hi2 - hi))
        target = max(abs(lo), abs(hi))
        val = radius(c, a, FullUnitary(n), restarts=32, seed=k).value
        worst = max(worst, abs(val - target) / target)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and interval_err <= 1e-12 * 50 and dt < 120
    criterion(4, "Hermitian radius equals the eigenvalue pairing", ok,
              f"max rel err {worst:.1e}, interval err {interval_err:.1e}, {dt:.1f} s")


def test_c5_symmetry_decision(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    specs = [FullUnitary(n) for n in range(2, 9)] + [SpecialUnitary(n) for n in range(2, 9)] + [Local(2), Local(3)]
    errors = []
    for k in range(200):
        spec = specs[k % len(specs)]
        if not detect_weak_symmetry(planted_positive(rng, spec), spec).verdict:
            errors.append(("positive", str(spec), k))
        spec = specs[int(rng.integers(len(specs)))]
        if detect_weak_symmetry(generic_negative(rng, spec.dim), spec).verdict:
            errors.append(("negative", str(spec), k))
    dt = time.perf_counter() - t0
    ok = not errors and dt < 60
    criterion(5, "weak-symmetry decision on 200 + 200 instances", ok, f"{len(errors)} errors, {dt:.1f} s")


def test_c6_example4_double_verdict(criterion):
    a = example(4).a
    loc = detect_weak_symmetry(a, Local(2)).verdict
    cls = classify_4x4(a, restarts=512, seed=0)
    # exact necessary condition on sampled local conjugates: a conjugate with a
    # nonzero diagonal is outside every torus eigenspace already
    tloc_hits = 0
    for v in [np.eye(4)] + [haar_sample(Local(2), s) for s in range(20)]:
        b = v @ a @ dagger(v)
        if np.max(np.abs(np.diag(b))) <= 1e-10 * fro_norm(b):
            tloc_hits += tloc_feasibility(b, 2).feasible
    u4 = detect_weak_symmetry(a, FullUnitary(4)).verdict
    bs = blockshift_canonical(a)
    ok = not loc and not cls.found and tloc_hits == 0 and u4 and bs.found and bs.partition.sizes == (1, 3)
    criterion(6, "Example 4 is symmetric in u(4) but not in loc(2)", ok,
              f"loc(2) {loc}, pattern found {cls.found}, u(4) {u4}, partition {bs.partition.sizes if bs.found else None}")


def test_c7_example5_negative_control(criterion):
    a, u0, om = example5_data(1.0, 1.0)
    flip = fro_norm(u0 @ a @ dagger(u0) + a)
    miss = fro_norm(commutator(om, a) + 1j * np.pi * a)
    ok = flip <= 1e-12 and miss >= 0.5 * fro_norm(a) and np.allclose(expm_skew(om, 1.0), u0, atol=1e-12)
    criterion(7, "Example 5 flips A without an ad-eigenvector", ok, f"flip {flip:.1e}, residual {miss:.3f}")


def test_c8_case_table(criterion):
    failures = []
    for label in case_labels():
        rng = np.random.default_rng(label.index + 100 * label.transposed)
        res = tloc_feasibility(label.instance(rng), 2)
        if not res.feasible:
            failures.append(str(label))
            continue
        lam, mu = res.case_coords
        if any(cl * lam + cm * mu != res.phi for cl, cm in label.relations):
            failures.append(str(label))
    criterion(8, "32 case patterns satisfy their relations exactly", not failures, f"failures {failures}")


def test_c9_permutation_witness_n2(criterion):
    t0 = time.perf_counter()
    found = 0
    for label in case_labels():
        found += conjecture_check(label.instance(np.random.default_rng(label.index)), 2).found
    rng = np.random.default_rng(16)
    res16 = conjecture_check(CaseLabel(16).instance(rng), 2)
    dt = time.perf_counter() - t0
    ok = found == 32 and res16.found and res16.involves_out and dt < 30
    criterion(9, "every n = 2 pattern has a block-shift permutation witness", ok,
              f"{found}/32, Case 16 uses P_out {res16.involves_out}, {dt:.1f} s")


def test_c10_lie_structure(criterion):
    rng = np.random.default_rng(10)
    bad = []
    specs = [FullUnitary(3), FullUnitary(4), SpecialUnitary(4), Local(2), Local(3)]
    for k in range(40):
        spec = specs[k % len(specs)]
        a = planted_positive(rng, spec)
        cert = detect_weak_symmetry(a, spec)
        aa = commutator(a, dagger(a))
        nested = commutator(aa, a)
        checks = [
            cert.verdict,
            is_nilpotent(a),
            fro_norm(aa) > 1e-10,
            fro_norm(commutator(cert.omega, aa)) <= 1e-8 * fro_norm(cert.omega) * fro_norm(a) ** 2,
            detect_weak_symmetry(dagger(a), spec).verdict,
            fro_norm(nested) <= 1e-10 * fro_norm(a) ** 3 or detect_weak_symmetry(nested, spec).verdict,
        ]
        if not all(checks):
            bad.append(f"properties {spec} #{k}")
    for seed in range(20):
        r = np.random.default_rng(seed)
        n = int(r.integers(2, 6))
        u = haar_sample(FullUnitary(n), seed)
        i, j = r.choice(n, size=2, replace=False)
        a = u @ (complex(r.standard_normal(), r.standard_normal()) * matrix_unit(n, i + 1, j + 1)) @ dagger(u)
        b = lie_closure(su2_generators(a))
        if not (separation_index(a).is_one and len(b) == 3 and is_su2(b)):
            bad.append(f"su2 #{seed}")
        if n >= 4:
            two = u @ (matrix_unit(n, 2, 1) + matrix_unit(n, 4, 3)) @ dagger(u)
            if separation_index(two).is_one:
                bad.append(f"rank two #{seed}")
    remark = matrix_unit(4, 2, 1) + 2 * matrix_unit(4, 4, 3)
    b = lie_closure(su2_generators(remark))
    if len(b) == 3 and is_su2(b):
        bad.append("remark matrix")
    if separation_index(remark).is_one:
        bad.append("remark separation index")
    criterion(10, "Lie-structure properties", not bad, f"failures {bad}")


def test_c11_homotopy_crosses_origin(criterion):
    rng = np.random.default_rng(11)
    a = CaseLabel(1).instance(rng)
    assert detect_weak_symmetry(a, Local(2)).verdict
    res = tloc_feasibility(a, 2)
    m = res.period_multiplier
    c = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = homotopy_trace(c, a, res.omega, 2, 2 * np.pi * m, t_steps=400, s_steps=101)
    ratio = float(np.abs(h).min() / np.abs(h).max())
    w = winding_number(h[:-1, 0], 0)
    ok = ratio <= 0.05 and w == m
    criterion(11, "homotopy reaches the origin", ok, f"min/max |h| {ratio:.4f}, winding {w}, predicted {m}")
