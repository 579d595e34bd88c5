"""Acceptance suite: closed-form reproductions and property checks, one per criterion.

Each criterion returns a :class:`CriterionResult`; :func:`run` executes a
selection and prints one ``PASS``/``FAIL`` line per criterion.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from . import loop1d, moebius, sparse_eig, thresholds
from .geometry import PolylineCurve, interval_curve, sample_polyline, spiral_curve
from .solver2d import (JumpField, assemble, build_crack_mesh, estimate_critical_strength,
                       evaluate_disc_form, field_scale, lowest_eigenvalues, pointwise_threshold_profile)

BOX = (-3.0, 4.0, -3.0, 3.0)
H_FINE = 1.0 / 64

# Ground state for the unit segment at omega = 2 in BOX, from an independent
# cell-centred finite-volume discretization at h = 1/16, 1/32, 1/64 with
# Aitken extrapolation (values -9.61574, -9.12715, -8.93428).
FV_REFERENCE_OMEGA2 = -8.8085


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: Dict[str, object] = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.1f} s)"


def _rel(a, b):
    return abs(a - b) / abs(b)


def criterion_1(seed: int = 0) -> CriterionResult:
    worst = {}
    errs = [_rel(thresholds.omega_star(interval_curve(L)), 1 / (2 * math.pi * L)) for L in (0.5, 1, 2)]
    worst["interval_omega_star"] = max(errs)
    sp = spiral_curve(10.0)
    errs = [_rel(thresholds.pointwise_bound(sp, r), 1 / (2 * math.pi * r * math.sqrt(1 + r * r)))
            for r in (0.5, 1.0, 2.0)]
    worst["spiral_pointwise"] = max(errs)
    lft_err, sup_err = 0.0, 0.0
    for R in (1.0, 2.0):
        for eps in (math.pi / 3, math.pi / 2):
            gamma, M = thresholds.arc_preimage(R, eps)
            poly = sample_polyline(gamma, 4001, include_endpoints=True)
            value = thresholds.lft_threshold(thresholds.omega_star(gamma), M, poly)
            lft_err = max(lft_err, _rel(value, math.tan(eps / 2) / (8 * math.pi * R)))
            sup_err = max(sup_err, abs(moebius.sup_sqrt_jacobian(M, poly) - 4 * R * R))
    worst["arc_lft_threshold"] = lft_err
    worst["arc_sup_sqrt_jacobian"] = sup_err
    ok = (worst["interval_omega_star"] <= 1e-12 and worst["spiral_pointwise"] <= 1e-12
          and lft_err <= 1e-6 and sup_err <= 1e-6)
    return CriterionResult(1, "threshold closed forms", ok, worst)


def loop_samples(seed: int, count: int = 200):
    """Seeded ``(d, omega)`` pairs on both sides of ``d omega = 1``."""
    rng = np.random.default_rng(seed)
    d_sub = rng.uniform(0.5, 5.0, count)
    p_sub = 1.0 - rng.uniform(0.0, 2.0, count)           # d omega in (-1, 1]
    d_sub[0], p_sub[0] = 2 * math.pi, 1.0                # the marginal case
    d_sup = rng.uniform(0.5, 5.0, count)
    p_sup = 1.0 + rng.uniform(0.02, 4.0, count)          # d omega in (1.02, 5)
    return list(zip(d_sub, p_sub / d_sub)), list(zip(d_sup, p_sup / d_sup))


def criterion_2(seed: int = 0, n: int = 2048) -> CriterionResult:
    t0 = time.perf_counter()
    sub, sup = loop_samples(seed)
    sub_fail, lowest = 0, math.inf
    for d, w in sub:
        spec = loop1d.LoopSpec(d, w)
        fe = loop1d.loop_fe_spectrum(spec, n=n, seed=seed).lowest
        lowest = min(lowest, fe)
        if len(loop1d.loop_negative_eigenvalues(spec)) != 0 or fe < -1e-8:
            sub_fail += 1
    sup_fail, worst = 0, 0.0
    for d, w in sup:
        spec = loop1d.LoopSpec(d, w)
        roots = loop1d.loop_negative_eigenvalues(spec)
        fe = loop1d.loop_fe_spectrum(spec, n=n, seed=seed).lowest
        if len(roots) != 1:
            sup_fail += 1
            continue
        err = _rel(fe, roots.lowest)
        worst = max(worst, err)
        if err > 1e-3:
            sup_fail += 1
    elapsed = time.perf_counter() - t0
    ok = sub_fail == 0 and sup_fail == 0 and elapsed <= 60.0
    return CriterionResult(2, "loop model dichotomy", ok,
                           {"subcritical_failures": sub_fail, "lowest_fe_subcritical": lowest,
                            "supercritical_failures": sup_fail, "worst_rel_err": worst,
                            "runtime_s": elapsed})


def criterion_3(seed: int = 0) -> CriterionResult:
    lam = loop1d.loop_negative_eigenvalues(loop1d.LoopSpec(50.0, 1.0)).lowest
    line = loop1d.line_delta_prime_eigenvalue(1.0)
    err = abs(lam - line) if lam is not None else math.inf
    return CriterionResult(3, "full-line limit", err <= 1e-5, {"lambda": lam, "line": line, "abs_err": err})


def _slope(hs, res):
    return float(np.polyfit(np.log(hs), np.log(res), 1)[0])


def criterion_4(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    inv = moebius.Moebius.reciprocal()
    z = rng.uniform(-2, 2, 100) + 1j * rng.uniform(-2, 2, 100)
    jac_err = float(np.max(np.abs(moebius.jacobian(inv, z) * np.abs(z) ** 4 - 1.0)))

    u = lambda x, y: x * x - y * y + 0.3 * x * y
    pts = rng.uniform(0.3, 1.5, 20) + 1j * rng.uniform(0.3, 1.5, 20)
    hs = np.array([1e-2, 5e-3, 2.5e-3])
    res = [sum(moebius.gradient_identity_check(inv, u, p, h) for p in pts) for h in hs]
    slope = _slope(hs, res)

    # curvilinear integral invariance along the arc of radius 1, eps = pi/2
    gamma, M = thresholds.arc_preimage(1.0, math.pi / 2)
    poly_g = sample_polyline(gamma, 998, include_endpoints=True)        # 1000 vertices
    poly_l = moebius.map_polyline(M, poly_g)
    omega_l = lambda x, y: 0.2 + 0.1 * x * x
    jump = lambda x, y: np.cos(x) + y
    w_tilde = moebius.pullback_strength(M, poly_g, omega_l)
    wl = poly_l.vertices
    f_l = omega_l(wl[:, 0], wl[:, 1]) * jump(wl[:, 0], wl[:, 1]) ** 2
    # v = jump o M on Gamma takes the same vertex values
    f_g = w_tilde.values * jump(wl[:, 0], wl[:, 1]) ** 2
    trap = lambda f, poly: float(np.sum(0.5 * poly.segment_lengths * (f[:-1] + f[1:])))
    I_l, I_g = trap(f_l, poly_l), trap(f_g, poly_g)
    inv_err = abs(I_g - I_l) / abs(I_l)

    group_err = 0.0
    for _ in range(20):
        Ms = [moebius.Moebius(*(rng.standard_normal(4) + 1j * rng.standard_normal(4))) for _ in range(3)]
        w = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        lhs = moebius.compose(moebius.compose(Ms[0], Ms[1]), Ms[2])(w)
        rhs = moebius.compose(Ms[0], moebius.compose(Ms[1], Ms[2]))(w)
        rt = moebius.compose(Ms[0], moebius.inverse(Ms[0]))(w)
        scale = np.maximum(1.0, np.abs(lhs))
        group_err = max(group_err, float(np.max(np.abs(lhs - rhs) / scale)),
                        float(np.max(np.abs(rt - w) / np.maximum(1.0, np.abs(w)))))
    ok = jac_err <= 1e-12 and abs(slope - 2.0) <= 0.3 and inv_err <= 1e-4 and group_err <= 1e-10
    return CriterionResult(4, "LFT suite", ok, {"jacobian_rel_err": jac_err, "gradient_identity_slope": slope,
                                                "integral_invariance_rel_err": inv_err,
                                                "group_law_err": group_err})


def disc_form_minimum(curve, omega, seed: int, count: int = 100, R: float = 1.0, n_poly: int = 1000):
    """Smallest normalized disc-form value over ``count`` seeded jump fields."""
    rng = np.random.default_rng(seed)
    poly = sample_polyline(curve, n_poly, include_endpoints=True)
    vals = []
    for _ in range(count):
        u = JumpField.random(curve, rng, R)
        vals.append(evaluate_disc_form(u, poly, omega, R) / field_scale(u, R))
    return float(np.min(vals)), np.array(vals)


def criterion_5(seed: int = 0) -> CriterionResult:
    seg = interval_curve(1.0)
    m_seg, _ = disc_form_minimum(seg, 1 / (2 * math.pi), seed)
    sp = spiral_curve(1.0)
    m_sp, _ = disc_form_minimum(sp, pointwise_threshold_profile(sp), seed)
    ok = m_seg >= -1e-8 and m_sp >= -1e-8
    return CriterionResult(5, "disc-form non-negativity", ok,
                           {"interval_min_normalized": m_seg, "spiral_min_normalized": m_sp})


def criterion_6(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    mesh = build_crack_mesh(BOX, H_FINE, (0.0, 1.0, 0.0))
    low = lowest_eigenvalues(assemble(mesh, 1 / (2 * math.pi)), seed=seed).lambda1
    high = lowest_eigenvalues(assemble(mesh, 2.0), seed=seed).lambda1
    ref = FV_REFERENCE_OMEGA2
    dev = abs(high - ref) / abs(ref)
    elapsed = time.perf_counter() - t0
    ok = low >= -1e-6 and high < 0 and dev <= 0.05 and elapsed <= 180.0
    return CriterionResult(6, "2D solver dichotomy", ok,
                           {"lambda1_threshold": low, "lambda1_omega2": high, "reference": ref,
                            "rel_dev": dev, "infinite_volume_bound": thresholds.strip_ground_state(1.0, 2.0),
                            "runtime_s": elapsed})


def criterion_7(seed: int = 0) -> CriterionResult:
    coarse = estimate_critical_strength(1.0, BOX, 1 / 32, tol_omega=0.05, seed=seed)
    fine = estimate_critical_strength(1.0, BOX, 1 / 64, tol_omega=0.05, seed=seed)
    lo_bound, hi_bound = 1 / (2 * math.pi), math.pi / 2
    inside = all(lo_bound < b.omega_lo and b.omega_hi < hi_bound for b in (coarse, fine))
    move = max(abs(coarse.omega_lo - fine.omega_lo), abs(coarse.omega_hi - fine.omega_hi))
    mid_shift = abs(coarse.midpoint - fine.midpoint) / coarse.midpoint
    ok = inside and coarse.width <= 0.05 and fine.width <= 0.05 and move <= 0.1 * coarse.width
    return CriterionResult(7, "critical-strength bracket", ok,
                           {"bracket_h": [coarse.omega_lo, coarse.omega_hi],
                            "bracket_h_half": [fine.omega_lo, fine.omega_hi],
                            "bracket_move": move, "midpoint_rel_shift": mid_shift})


def small_pencils(seed: int = 0):
    """Pencils with ``n <= 500`` drawn from the geometries of the other criteria."""
    out = []
    for d, w in (loop_samples(seed, 4)[0][:2] + loop_samples(seed, 4)[1][:2]):
        K, M = loop1d.loop_fe_matrices(loop1d.LoopSpec(d, w), 256)
        out.append((f"loop d={d:.3f} omega={w:.3f}", K, M))
    for h in (1 / 2, 1 / 3):
        mesh = build_crack_mesh(BOX, h, (0.0, 1.0, 0.0))
        for w in (1 / (2 * math.pi), 2.0):
            asm = assemble(mesh, w)
            out.append((f"crack h={h:.3f} omega={w:.3f}", asm.K - asm.B, asm.M))
    # the pulled-back arc problem; h = 1/2 keeps n below 500
    gamma, M = thresholds.arc_preimage(1.0, math.pi / 2)
    mesh = build_crack_mesh(BOX, 1 / 2, (-0.5, 0.5, -0.5))
    xs = mesh.crack_x
    table = moebius.pullback_strength(M, PolylineCurve(np.column_stack([xs, np.full(xs.size, -0.5)])),
                                      1 / (8 * math.pi))
    asm = assemble(mesh, table.values)
    out.append(("arc pullback h=0.500", asm.K - asm.B, asm.M))
    return out


def criterion_8(seed: int = 0, k: int = 4) -> CriterionResult:
    worst, names = 0.0, []
    ok = True
    for name, A, B in small_pencils(seed):
        if A.n > 500:
            continue
        names.append(name)
        sparse = sparse_eig.smallest_eigenpairs(A, B, k=k, tol=1e-10, seed=seed, maxiter=20000)
        dense = sparse_eig.dense_eig_oracle(A.toarray(), B.toarray())[:k]
        err = float(np.max(np.abs(sparse.eigenvalues - dense))) / A.norm()
        worst = max(worst, err)
        ok &= err <= 1e-7
    return CriterionResult(8, "eigensolver oracle equivalence", ok,
                           {"pencils": names, "worst_err_over_normK": worst})


CRITERIA: Dict[int, Callable[..., CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
}


def run(criteria: Optional[Iterable[int]] = None, seed: int = 0, echo=print) -> List[CriterionResult]:
    results = []
    for number in sorted(criteria or CRITERIA):
        t0 = time.perf_counter()
        try:
            res = CRITERIA[number](seed=seed)
        except Exception as exc:  # a crash is a failed criterion, not an aborted suite
            res = CriterionResult(number, CRITERIA[number].__name__, False,
                                  {"error": f"{type(exc).__name__}: {exc}"})
        res.seconds = time.perf_counter() - t0
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
