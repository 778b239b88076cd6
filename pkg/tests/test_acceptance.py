"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line; the lines are repeated
in the terminal summary.
"""

import io
import math
import random
import time
from collections import Counter

import networkx as nx
import numpy as np
import pytest

from bspmr import (
    MachineConfig,
    MrProgram,
    check_efficiency,
    estimate_bsp_time,
    estimate_bspmr_on_mr_time,
    run_bsp,
    run_mr,
    shuffle,
    simulate_bsp_on_mr,
    simulate_mr_on_bsp,
)
from bspmr.algorithms import bfs_bsp, bfs_mr, matmul_bsp, matmul_mr, psrs_bsp, psrs_mr, wordcount
from bspmr.algorithms import inputs as gen
from bspmr.algorithms import oracles
from bspmr.core import BspCostLedger, SuperstepRecord
from bspmr.efficiency import fit_exponent
from bspmr.mapreduce import write_trace_csv
from bspmr.report import dumps, emit_report
from bspmr.scheduling import greedy_schedule, optimal_makespan_bruteforce
from bspmr.workload import WorkloadSpec, run_workload
from conftest import Chatter

RESULTS: list[str] = []


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return bool(np.array_equal(a, b))
    return a == b


def nx_distances(graph, root):
    g = nx.Graph()
    g.add_nodes_from(graph)
    g.add_edges_from((u, v) for u, nbrs in graph.items() for v in nbrs)
    dist = nx.single_source_shortest_path_length(g, root)
    return {v: dist.get(v, math.inf) for v in graph}


def bsp_on_mr_sweep(make, sizes, q):
    runs = []
    for n in sizes:
        job = make(n)
        native = run_bsp(job.program, job.inputs)
        sim = simulate_bsp_on_mr(job.program, job.inputs, MachineConfig(p=job.p, q=q, r=job.p))
        runs.append((n, native.ledger, sim.ledger))
    return runs, job.p


def test_criterion_1_oracle_equivalence():
    start = time.perf_counter()
    failures = []
    cases = 0
    for seed in range(50):
        for n in (1000, 10_000):
            data = gen.random_ints(n, seed)
            expected = oracles.sequential_sort(data)
            for p in (2, 4, 8):
                job = psrs_bsp(data, p)
                if job.program.collect(run_bsp(job.program, job.inputs).outputs) != expected:
                    failures.append(("psrs_bsp", seed, n, p))
                job = psrs_mr(data, 2 * p, p)
                res = run_mr(job.program, job.input, MachineConfig(p=p, q=2 * p, r=p))
                if job.program.collect(res.output) != expected:
                    failures.append(("psrs_mr", seed, n, p))
                cases += 2
    for n in (8, 16, 32, 64):
        a, b = gen.random_matrix_pair(n, seed=n)
        expected = np.array(oracles.matmul_triple_loop(a, b), dtype=np.int64)
        for p in (1, 8, 27):
            job = matmul_bsp(a, b, p)
            if not same(job.program.collect(run_bsp(job.program, job.inputs).outputs), expected):
                failures.append(("matmul_bsp", n, p))
            job = matmul_mr(a, b, p)
            res = run_mr(job.program, job.input, MachineConfig(p=max(1, p // 2), q=p, r=p))
            if not same(job.program.collect(res.output), expected):
                failures.append(("matmul_mr", n, p))
            cases += 2
    rng = random.Random(2024)
    for seed in range(50):
        size = rng.randint(1, 2**11)
        prob = rng.choice([0.001, 0.005, 0.02, 0.05])
        graph = gen.random_graph(size, seed, prob, connected=rng.random() < 0.7)
        root = rng.randrange(size)
        p = rng.choice([1, 2, 3, 4, 8])
        job = bfs_bsp(graph, root, p)
        out = job.program.collect(run_bsp(job.program, job.inputs).outputs)
        if {v: d for v, (d, _) in out.items()} != nx_distances(graph, root):
            failures.append(("bfs_bsp", seed, size, p))
        cases += 1
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 120
    report(1, "oracle equivalence", ok, f"{cases} runs, {len(failures)} mismatches, {elapsed:.1f}s")


def test_criterion_2_graham_bound():
    rng = random.Random(7)
    violations = 0
    worst = 0.0
    for _ in range(200):
        p = rng.choice([2, 3, 4])
        times = [rng.randint(1, 100) for _ in range(rng.randint(1, 12))]
        greedy = greedy_schedule(times, p).makespan
        opt = optimal_makespan_bruteforce(times, p)
        worst = max(worst, greedy / opt)
        if greedy * p > (2 * p - 1) * opt:
            violations += 1
    report(2, "greedy makespan within (2 - 1/p) OPT", violations == 0, f"200 vectors, {violations} violations, worst ratio {worst:.3f}")


def test_criterion_3_cross_simulation_fidelity():
    problems = []
    mr_jobs = {
        "wordcount": (wordcount(gen.random_words(2000, 1)), MachineConfig(p=3, q=8, r=5)),
        "psrs-mr": (psrs_mr(gen.random_ints(3000, 1), 8, 4), MachineConfig(p=4, q=8, r=4)),
        "matmul-mr": (matmul_mr(*gen.random_matrix_pair(24, 1), 8), MachineConfig(p=4, q=8, r=8)),
        "bfs-mr": (bfs_mr(gen.random_graph(300, 1, 0.02), 0), MachineConfig(p=4, q=8, r=6)),
    }
    for name, (job, cfg) in mr_jobs.items():
        native = run_mr(job.program, job.input, cfg)
        sim = simulate_mr_on_bsp(job.program, job.input, cfg)
        if Counter(map(repr, sim.output)) != Counter(map(repr, native.output)):
            problems.append(f"{name}: output differs")
        D, S = native.ledger.D, sim.ledger.S
        if not 2 * D <= S <= 3 * D - 1:
            problems.append(f"{name}: S={S} D={D}")
    bsp_jobs = {
        "psrs-bsp": psrs_bsp(gen.random_ints(3000, 2), 4),
        "matmul-bsp": matmul_bsp(*gen.random_matrix_pair(24, 2), 8),
        "bfs-bsp": bfs_bsp(gen.random_graph(300, 2, 0.02), 0, 4),
    }
    for name, job in bsp_jobs.items():
        native = run_bsp(job.program, job.inputs)
        sim = simulate_bsp_on_mr(job.program, job.inputs, MachineConfig(p=2, q=8, r=job.p))
        if not same(job.program.collect(sim.outputs), job.program.collect(native.outputs)):
            problems.append(f"{name}: output differs")
        if sim.ledger.D != native.ledger.S:
            problems.append(f"{name}: D={sim.ledger.D} S={native.ledger.S}")
    report(3, "cross-simulation fidelity", not problems, "; ".join(problems) or f"{len(mr_jobs) + len(bsp_jobs)} workloads")


def test_criterion_4_efficiency_separation():
    start = time.perf_counter()
    psrs = check_efficiency(*bsp_on_mr_sweep(lambda n: psrs_bsp(gen.random_ints(n, 5), 4), [2**12, 2**13, 2**14, 2**15], 8))
    # block-cube matmul needs a cubic processor count; 8 is the closest to 4
    mm = check_efficiency(*bsp_on_mr_sweep(lambda n: matmul_bsp(*gen.random_matrix_pair(n, 5), 8), [16, 32, 64, 128], 16))
    bfs = check_efficiency(*bsp_on_mr_sweep(lambda n: bfs_bsp(gen.random_graph(n, 5), 0, 4), [256, 512, 1024, 2048], 8))
    iv = bfs.condition("iv")
    elapsed = time.perf_counter() - start
    ok = psrs.satisfied and mm.satisfied and not iv.satisfied and iv.exponent_gap >= 0.75 and elapsed < 300
    detail = (
        f"psrs {psrs.to_dict()['verdict']}, matmul {mm.to_dict()['verdict']}, "
        f"bfs (iv) gap {iv.exponent_gap:.2f}, {elapsed:.1f}s"
    )
    report(4, "efficiency conditions separate psrs/matmul from bfs", ok, detail)


def test_criterion_5_cost_model_scaling():
    fits = {}
    sizes = [2**12, 2**13, 2**14, 2**15]
    leds = []
    for n in sizes:
        job = psrs_bsp(gen.random_ints(n, 9), 4)
        leds.append(run_bsp(job.program, job.inputs).ledger)
    fits["psrs W/log n"] = (fit_exponent(sizes, [l.W / math.log2(n) for l, n in zip(leds, sizes)]), 1.0, 0.25)
    fits["psrs H"] = (fit_exponent(sizes, [l.H for l in leds]), 1.0, 0.25)
    sizes = [16, 32, 64, 128]
    leds = []
    for n in sizes:
        job = matmul_bsp(*gen.random_matrix_pair(n, 9), 8)
        leds.append(run_bsp(job.program, job.inputs).ledger)
    fits["matmul W"] = (fit_exponent(sizes, [l.W for l in leds]), 3.0, 0.25)
    fits["matmul H"] = (fit_exponent(sizes, [l.H for l in leds]), 2.0, 0.25)
    n, qs = 64, [1, 8, 64]
    a, b = gen.random_matrix_pair(n, 9)
    cs = []
    for q in qs:
        job = matmul_mr(a, b, q)
        cs.append(run_mr(job.program, job.input, MachineConfig(p=max(1, q // 2), q=q, r=q)).ledger.C / n**2)
    fits["matmul C in q"] = (fit_exponent(qs, cs), 1 / 3, 0.15)
    bad = {k: v for k, v in fits.items() if abs(v[0] - v[1]) > v[2]}
    detail = ", ".join(f"{k} {got:.3f} (want {want:.2f}±{tol})" for k, (got, want, tol) in fits.items())
    report(5, "fitted cost exponents", not bad, detail)


def test_criterion_6_conservation():
    rng = random.Random(99)
    cases = failures = 0
    for _ in range(300):
        r = rng.randint(1, 9)
        tasks = [[(rng.randint(-40, 40), rng.random()) for _ in range(rng.randint(0, 40))] for _ in range(rng.randint(1, 6))]
        groups = shuffle([[(k % r, k, v) for k, v in t] for t in tasks], r)
        if Counter(kv for t in tasks for kv in t) != Counter((k, v) for g in groups for k, vs in g for v in vs):
            failures += 1
        cases += 1
    for _ in range(300):
        p, rounds = rng.randint(1, 5), rng.randint(1, 4)
        pattern = [[[(rng.randrange(p), rng.randint(1, 9)) for _ in range(rng.randint(0, 5))] for _ in range(p)] for _ in range(rounds)]
        res = run_bsp(Chatter(pattern, rounds), [None] * p)
        sent = Counter((src, dest, size) for s in pattern for src, msgs in enumerate(s) for dest, size in msgs)
        got = Counter((src, dest, size) for dest, out in enumerate(res.outputs) for src, size in out)
        if sent != got:
            failures += 1
        cases += 1
    for _ in range(250):
        data = [(rng.randint(0, 30), rng.randint(-9, 9)) for _ in range(rng.randint(0, 80))]
        r = rng.randint(1, 6)
        program = wordcount([str(k) for k, _ in data]).program if rng.random() < 0.5 else MrProgram()
        led = run_mr(program, data, MachineConfig(p=rng.randint(1, 4), q=r + 1, r=r)).ledger
        if led.T < led.C:
            failures += 1
        cases += 1
    for _ in range(300):
        led = BspCostLedger()
        for _ in range(rng.randint(0, 8)):
            led.append(SuperstepRecord(*(rng.randint(0, 50) for _ in range(3)), rng.choice([0, 0, rng.randint(1, 50)])))
        g, l = rng.choice([0, 1, 2.5]), rng.randint(0, 20)
        a, b = estimate_bspmr_on_mr_time(led, g, l), estimate_bsp_time(led, g, l)
        if a < b or (a == b) != (led.F * g == 0):
            failures += 1
        cases += 1
    report(6, "conservation properties", failures == 0 and cases >= 1000, f"{cases} cases, {failures} failures")


def test_criterion_7_determinism():
    specs = [
        WorkloadSpec(algorithm="psrs", model="mr", n=1000, p=4, q=8, r=4, g=1, l=10, seed=7),
        WorkloadSpec(algorithm="psrs", model="bsp", n=2000, p=4, seed=3),
        WorkloadSpec(algorithm="matmul", model="bsp-on-mr", n=16, p=8, seed=1),
        WorkloadSpec(algorithm="matmul", model="mr-on-bsp", n=16, p=8, seed=1),
        WorkloadSpec(algorithm="bfs", model="bsp-on-mr", n=300, p=4, seed=5),
        WorkloadSpec(algorithm="bfs", model="mr", n=300, p=4, seed=5),
        WorkloadSpec(algorithm="wordcount", model="mr-on-bsp", n=500, p=3, seed=2),
    ]
    differing = []
    for spec in specs:
        blobs = []
        for _ in range(2):
            out = run_workload(spec)
            buf = io.StringIO()
            write_trace_csv(out.traces, buf)
            blobs.append((dumps(emit_report(out)), buf.getvalue(), repr(out.messages)))
        if blobs[0] != blobs[1]:
            differing.append(f"{spec.algorithm}/{spec.model}")
    report(7, "byte-identical reruns", not differing, ", ".join(differing) or f"{len(specs)} workloads")
