"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criteria 7 and 8 need the public TwoLeadECG / SonyAIBORobotSurface1 files on
disk (./data or $RATMAX_DATA) and skip, not fail, when absent.
"""

import json
import math
import time

import numpy as np

from ratmax import (SampleSet, SolverConfig, evaluate, load_ucr,
                    quasiconvexity_probe, train_bisection, train_classifier,
                    train_diffcorr)
from ratmax.cli import main as cli_main
from ratmax.data_io import load_model

from conftest import (TABLE1_BISECTION, TABLE1_BISECTION_DEV,
                      TABLE1_DIFFCORR_DEV, random_feasible_model,
                      require_dataset)
from test_lp import random_bounded_problem, vertex_enumeration_minimum


def check(num: int, desc: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'} - {desc}"
    if detail:
        line += f" [{detail}]"
    print(line)
    assert ok, line


# -- 1, 2, 3: activation fitting against the reference column ---------------

def test_criterion_1_relu_bisection(relu_fit_bisection):
    act, report = relu_fit_bisection
    dev_ok = abs(report.final_deviation - TABLE1_BISECTION_DEV) <= 1e-4
    coeff_ok = bool(np.all(np.abs(act.as_array() - TABLE1_BISECTION.as_array())
                           <= 1e-3))
    time_ok = report.wall_time_seconds < 5.0
    check(1, "ReLU (1,1) bisection fit on the 2001-point grid",
          dev_ok and coeff_ok and time_ok,
          f"dev={report.final_deviation:.12f}, "
          f"fit={report.wall_time_seconds:.2f}s")


def test_criterion_2_relu_diffcorr(relu_fit_bisection, relu_fit_diffcorr):
    act_b, _ = relu_fit_bisection
    act_d, report = relu_fit_diffcorr
    dev_ok = abs(report.final_deviation - TABLE1_DIFFCORR_DEV) <= 1e-4
    agree_ok = bool(np.all(np.abs(act_b.as_array() - act_d.as_array()) <= 1e-3))
    time_ok = report.wall_time_seconds < 10.0
    check(2, "ReLU (1,1) differential correction fit agrees with bisection",
          dev_ok and agree_ok and time_ok,
          f"dev={report.final_deviation:.12f}, "
          f"fit={report.wall_time_seconds:.2f}s")


def test_criterion_3_equioscillation(relu_fit_bisection):
    from ratmax import equioscillation_report, relu_target
    act, _ = relu_fit_bisection
    t0 = time.perf_counter()
    eq = equioscillation_report(act, relu_target(), -1.0, 1.0,
                                probe_points=20001)
    elapsed = time.perf_counter() - t0
    magnitudes_ok = all(abs(e) >= 0.95 * eq.max_deviation
                        for _, e in eq.extrema)
    check(3, "error curve of the fitted ReLU activation equioscillates",
          eq.alternations >= 4 and eq.optimal and magnitudes_ok
          and elapsed < 1.0,
          f"alternations={eq.alternations}, {elapsed:.2f}s")


# -- 4: quasiconvexity property ---------------------------------------------

def test_criterion_4_quasiconvexity():
    rng = np.random.default_rng(4040)
    lambdas = np.arange(0.1, 0.95, 0.1)
    t0 = time.perf_counter()
    ok = True
    for _ in range(1000):
        X = rng.uniform(-1.0, 1.0, size=(10, 3))
        y = rng.uniform(0.0, 1.0, size=10)
        data = SampleSet(X, y)
        m1 = random_feasible_model(rng, TABLE1_BISECTION, X)
        m2 = random_feasible_model(rng, TABLE1_BISECTION, X)
        if not quasiconvexity_probe(TABLE1_BISECTION, data, m1, m2, lambdas):
            ok = False
            break
    elapsed = time.perf_counter() - t0
    check(4, "1000 random segment probes satisfy quasiconvexity at 1e-12 slack",
          ok and elapsed < 10.0, f"{elapsed:.2f}s")


# -- 5: grid-search oracle equivalence --------------------------------------

def _dense_grid_min(act, xs, ys, lo, hi, step, delta, chunk=16):
    """Independent oracle: worst-case loss minimised over a dense (w, b) grid.

    Residuals are evaluated through |alpha*t + beta| / q with t = w*x + b, in
    float32 and small w-blocks so the scan stays cache-resident.
    """
    n = int(round((hi - lo) / step)) + 1
    axis = (lo + step * np.arange(n)).astype(np.float32)
    alphas = (ys * act.b1 - act.a1).astype(np.float32)
    betas = (ys * act.b0 - act.a0).astype(np.float32)
    b0, b1 = np.float32(act.b0), np.float32(act.b1)
    delta = np.float32(delta)
    best = np.inf
    t = np.empty((chunk, n), np.float32)
    q = np.empty_like(t)
    num = np.empty_like(t)
    worst = np.empty_like(t)
    for s in range(0, n, chunk):
        w = axis[s:s + chunk][:, None]
        rows = w.shape[0]
        worst[:rows] = 0.0
        for x, alpha, beta in zip(xs, alphas, betas):
            np.multiply(w, np.float32(x), out=t[:rows])
            t[:rows] += axis[None, :]
            np.multiply(t[:rows], b1, out=q[:rows])
            q[:rows] += b0
            np.multiply(t[:rows], alpha, out=num[:rows])
            num[:rows] += beta
            np.abs(num[:rows], out=num[:rows])
            with np.errstate(divide="ignore", invalid="ignore"):
                num[:rows] /= q[:rows]
            np.copyto(num[:rows], np.inf, where=q[:rows] < delta)
            np.maximum(worst[:rows], num[:rows], out=worst[:rows])
        m = float(worst[:rows].min())
        if m < best:
            best = m
    return best


def _random_scalar_instance(rng):
    N = int(rng.integers(2, 6))
    xs = rng.uniform(-1.0, 1.0, size=N)
    w, b = rng.uniform(-0.5, 0.5, size=2)
    t = w * xs + b
    ys = ((TABLE1_BISECTION.a0 + TABLE1_BISECTION.a1 * t)
          / (1.0 + TABLE1_BISECTION.b1 * t))
    ys = ys + rng.uniform(-0.05, 0.05, size=N)
    return xs, ys


def test_criterion_5_oracle_equivalence():
    rng = np.random.default_rng(5050)
    t0 = time.perf_counter()
    worst_bis = worst_dc = 0.0
    for trial in range(20):
        xs, ys = _random_scalar_instance(rng)
        data = SampleSet(xs.reshape(-1, 1), ys)

        rb = train_bisection(TABLE1_BISECTION, data, SolverConfig(eps=1e-5))
        oracle_b = _dense_grid_min(TABLE1_BISECTION, xs, ys,
                                   -5.0, 5.0, 1e-3, delta=1e-6)
        worst_bis = max(worst_bis, abs(rb.final_deviation - oracle_b))

        rd = train_diffcorr(TABLE1_BISECTION, data,
                            SolverConfig(eps=1e-7, max_iters=300))
        oracle_d = _dense_grid_min(TABLE1_BISECTION, xs, ys,
                                   -1.0, 1.0, 1e-3, delta=0.0)
        worst_dc = max(worst_dc, abs(rd.final_deviation - oracle_d))
    elapsed = time.perf_counter() - t0
    check(5, "both trainers match dense grid-search oracles on 20 instances",
          worst_bis <= 2e-3 and worst_dc <= 5e-3 and elapsed < 60.0,
          f"max|bis-grid|={worst_bis:.2e}, max|dc-grid|={worst_dc:.2e}, "
          f"{elapsed:.1f}s")


# -- 6: LP suite --------------------------------------------------------------

def test_criterion_6_lp_suite():
    from ratmax import LpProblem, LpStatus, solve_lp
    t0 = time.perf_counter()
    ok = True
    sol = solve_lp(LpProblem(c=[1.0], A=[[-1.0]], h=[-3.0]))
    ok &= sol.status is LpStatus.OPTIMAL and abs(sol.objective_value - 3.0) < 1e-9
    sol = solve_lp(LpProblem(c=[-1.0, -1.0], A=[[1.0, 1.0]], h=[1.0],
                             lower=[0.0, 0.0]))
    ok &= sol.status is LpStatus.OPTIMAL and abs(sol.objective_value + 1.0) < 1e-9

    rng = np.random.default_rng(6060)
    for _ in range(30):
        V = int(rng.integers(2, 7))
        R = int(rng.integers(3, 11))
        p = random_bounded_problem(rng, V, R)
        sol = solve_lp(p)
        if sol.status is not LpStatus.OPTIMAL:
            ok = False
            break
        oracle = vertex_enumeration_minimum(p)
        ok &= abs(sol.objective_value - oracle) <= 1e-8
        # independent feasibility certificate
        ok &= float(np.max(p.A @ sol.values - p.h)) <= 1e-9
        ok &= bool(np.all(sol.values >= p.lower - 1e-9))
        ok &= bool(np.all(sol.values <= p.upper + 1e-9))
    elapsed = time.perf_counter() - t0
    check(6, "LP textbook cases and 30 vertex-enumeration oracles agree",
          bool(ok) and elapsed < 10.0, f"{elapsed:.1f}s")


# -- 7, 8: public datasets (skipped when absent) -----------------------------

def _accuracy_pct(report):
    return 100.0 * report.accuracy


def test_criterion_7_twoleadecg():
    train_path = require_dataset("TwoLeadECG", "TRAIN")
    test_path = require_dataset("TwoLeadECG", "TEST")
    t0 = time.perf_counter()
    train = load_ucr(train_path)
    test = load_ucr(test_path).with_classes(train.classes)
    assert train.n_samples == 23 and train.class_counts() == (12, 11)
    assert test.n_samples == 1139
    cfg = SolverConfig(eps=1e-5)

    model_b, rep_b = train_classifier(train, TABLE1_BISECTION, "bisection", cfg)
    loss_ok = rep_b.final_deviation <= 1e-4
    eval_b = evaluate(TABLE1_BISECTION, model_b, test)
    acc_b_ok = abs(_accuracy_pct(eval_b) - 87.71) <= 1.0

    model_d, _ = train_classifier(train, TABLE1_BISECTION, "diffcorr", cfg)
    eval_d = evaluate(TABLE1_BISECTION, model_d, test)
    acc_d_ok = abs(_accuracy_pct(eval_d) - 55.31) <= 2.0

    filtered = evaluate(TABLE1_BISECTION, model_b, test, outlier_threshold=10.0)
    removed_ok = abs(filtered.removed_outliers - 18) <= 3
    acc_f_ok = abs(_accuracy_pct(filtered) - 87.51) <= 1.0
    elapsed = time.perf_counter() - t0
    check(7, "TwoLeadECG original split matches the reference protocol",
          loss_ok and acc_b_ok and acc_d_ok and removed_ok and acc_f_ok
          and elapsed < 120.0,
          f"loss={rep_b.final_deviation:.3e}, acc_b={_accuracy_pct(eval_b):.2f}%, "
          f"acc_d={_accuracy_pct(eval_d):.2f}%, removed={filtered.removed_outliers}, "
          f"{elapsed:.0f}s")


def test_criterion_8_sonyaibo():
    train_path = require_dataset("SonyAIBORobotSurface1", "TRAIN")
    test_path = require_dataset("SonyAIBORobotSurface1", "TEST")
    train = load_ucr(train_path)
    test = load_ucr(test_path).with_classes(train.classes)
    assert train.n_samples == 20
    assert test.n_samples == 601 and test.class_counts() == (343, 258)
    cfg = SolverConfig(eps=1e-5)
    model_b, _ = train_classifier(train, TABLE1_BISECTION, "bisection", cfg)
    model_d, _ = train_classifier(train, TABLE1_BISECTION, "diffcorr", cfg)
    acc_b = _accuracy_pct(evaluate(TABLE1_BISECTION, model_b, test))
    acc_d = _accuracy_pct(evaluate(TABLE1_BISECTION, model_d, test))
    check(8, "SonyAIBORobotSurface1 original split accuracies",
          abs(acc_b - 67.22) <= 1.0 and abs(acc_d - 63.06) <= 2.0,
          f"acc_b={acc_b:.2f}%, acc_d={acc_d:.2f}%")


# -- 9: seeded subset protocols end to end -----------------------------------

def _write_synthetic_ucr(path, rng, n_a=12, n_b=11, n_feat=6):
    with open(path, "w") as fh:
        for label, n, centre in ((1, n_a, -0.5), (2, n_b, 0.5)):
            for _ in range(n):
                row = rng.normal(centre, 0.35, n_feat)
                fh.write("\t".join([str(label)] + [repr(float(v)) for v in row])
                         + "\n")


REPORT_KEYS = {"accuracy", "confusion", "test_loss", "removed_outliers",
               "evaluated", "pole_flags", "empty_after_filter", "provenance",
               "classes", "flags"}


def test_criterion_9_seeded_protocols(tmp_path):
    rng = np.random.default_rng(909)
    train_file = str(tmp_path / "synth_TRAIN.tsv")
    test_file = str(tmp_path / "synth_TEST.tsv")
    _write_synthetic_ucr(train_file, rng)
    _write_synthetic_ucr(test_file, rng, n_a=30, n_b=30)
    act_file = str(tmp_path / "act.json")
    assert cli_main(["fit-activation", "--target", "relu", "--grid", "501",
                     "--out", act_file, "--omit-timing"]) == 0

    protocols = ["random:10", "imbalance:2:2", "imbalance:1:2"]
    expected_sizes = [10, 13, 14]
    ok = True
    for proto, size in zip(protocols, expected_sizes):
        tag = proto.replace(":", "_")
        outputs = []
        for run in ("x", "y"):
            net = str(tmp_path / f"net_{tag}.json")
            rep = str(tmp_path / f"rep_{tag}.json")
            code = cli_main(["train", "--train", train_file,
                             "--activation", act_file,
                             "--subsample", proto, "--seed", "4242",
                             "--omit-timing", "--out", net])
            ok &= code == 0
            code = cli_main(["evaluate", "--test", test_file, "--net", net,
                             "--omit-timing", "--report", rep])
            ok &= code == 0
            load_model(net)  # schema-valid or raises
            doc = json.load(open(rep))
            ok &= REPORT_KEYS <= set(doc)
            ok &= json.load(open(net))["training"]["train_size"] == size
            outputs.append((open(net, "rb").read(), open(rep, "rb").read()))
        ok &= outputs[0] == outputs[1]  # byte-for-byte determinism
    check(9, "seeded subset protocols emit schema-valid deterministic reports",
          bool(ok))


# -- 10: bisection iteration count -------------------------------------------

def test_criterion_10_iteration_count():
    t0 = time.perf_counter()
    ok = True
    cases = [
        ([0.0, 1.0], 1e-5),          # u0 = 0.881966868782169
        ([0.0, 1.0], 1e-3),
        ([TABLE1_BISECTION.a0 + 1.0], 1.0 / 1024.0),   # u0 = 1, exactly 10
        ([TABLE1_BISECTION.a0 + 0.25], 1e-4),          # u0 = 0.25
    ]
    for targets, eps in cases:
        data = SampleSet([[float(i)] for i in range(len(targets))], targets)
        u0 = max(abs(t - TABLE1_BISECTION.a0) for t in targets)
        report = train_bisection(TABLE1_BISECTION, data, SolverConfig(eps=eps))
        expected = math.ceil(math.log2(u0 / eps)) if u0 > eps else 0
        ok &= report.lp_solves == expected
    elapsed = time.perf_counter() - t0
    check(10, "bisection performs exactly ceil(log2(u0/eps)) feasibility LPs",
          ok and elapsed < 1.0, f"{elapsed:.2f}s")
