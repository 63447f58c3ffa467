"""The seven acceptance criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are printed at the end of
the session under "acceptance criteria".
"""

import os
import subprocess
import sys
import time

import pytest

from s4q.basis import enumerate_space, simple_space
from s4q.dirac_zeta import zeta_suite
from s4q.fredholm import pairing_suite
from s4q.approx_rep import approx_suite
from s4q.real_structure import real_suite
from s4q.sphere_alg import highest_weight_checks, idempotent_suite, relations_suite

from conftest import ACCEPTANCE_LINES, QS


def report(key, ok, detail, seconds):
    line = f"{key}: {'PASS' if ok else 'FAIL'} ({detail}; {seconds:.1f} s)"
    ACCEPTANCE_LINES[key] = line
    print(line)
    return line


def worst(records, pred=lambda r: True):
    return max((r.residual for r in records if pred(r)), default=0.0)


def test_ac1_relations():
    t0 = time.perf_counter()
    records = []
    spaces = (simple_space(40), enumerate_space("scalar", 12), enumerate_space("spinor", "25/2"))
    for q in QS:
        for space in spaces:
            records += relations_suite(space, q)
    secs = time.perf_counter() - t0
    counts = {}
    for r in records:
        fam, cat = r.check_id.split(":")[:2]
        counts[(fam, cat, r.q)] = counts.get((fam, cat, r.q), 0) + 1
    families_ok = all(
        counts.get((fam, "defining", q), 0) >= 5
        and (fam.startswith("simple") or (counts.get((fam, "crossed", q)) == 18
                                          and counts.get((fam, "radius", q)) == 1))
        for fam in ("simple+", "simple-", "scalar", "spinor+", "spinor-") for q in QS)
    res = worst(records)
    ok = families_ok and res <= 1e-9 and secs <= 60
    report("AC1 relations", ok, f"{len(records)} relation instances, max residual {res:.1e} <= 1e-9", secs)
    assert families_ok
    assert res <= 1e-9
    assert secs <= 60


def test_ac2_idempotent():
    t0 = time.perf_counter()
    records = []
    for q in QS:
        records += idempotent_suite(simple_space(40), q) + highest_weight_checks(enumerate_space("scalar", 12), q)
    secs = time.perf_counter() - t0
    exact = [r for r in records if r.check_id.startswith(("kappa", "covariance"))]
    loose = [r for r in records if r.check_id.startswith(("simple:e^2", "highest-weight"))]
    ok = (bool(exact) and bool(loose) and worst(exact) <= 1e-12 and worst(loose) <= 1e-9
          and all(r.passed for r in records))
    report("AC2 idempotent", ok, f"affine-level max {worst(exact):.1e} <= 1e-12, "
                                 f"represented max {worst(loose):.1e} <= 1e-9", secs)
    assert ok


def test_ac3_pairing():
    t0 = time.perf_counter()
    records = []
    for q in QS:
        records += pairing_suite(q, "25/2")
    secs = time.perf_counter() - t0
    limits = {"simple": 1e-12, "series": 1e-8, "series-tail": 1e-10, "direct": 1e-6, "methods-agree": 1e-6,
              "complement": 1e-12}
    bad = [r for r in records if r.check_id in limits and r.residual > limits[r.check_id]]
    seen = {(r.check_id, r.q) for r in records}
    complete = all((cid, q) in seen for cid in limits for q in QS)
    ok = complete and not bad and secs <= 60
    report("AC3 index pairing", ok, f"all three methods = 1 and complement = -1 at q in {QS}", secs)
    assert complete and not bad, [str(r) for r in bad]
    assert secs <= 60


def test_ac4_zeta():
    t0 = time.perf_counter()
    records = []
    space = enumerate_space("spinor", "25/2")
    for q in QS:
        records += zeta_suite(q, space)
    secs = time.perf_counter() - t0
    limits = {"multiplicities": 0.0, "zeta_trace(6)": 1e-8, "residue_fit(1)": 1e-10,
              "residue_fit(L_q).a1": 1e-8, "residue_fit(x2x2*).a3": 1e-6, "residue_fit(x2x2*).a2": 1e-6,
              "top_residue(x0^2)": 1e-6}
    bad = [r for r in records if r.residual > limits[r.check_id]]
    complete = {r.check_id for r in records} == set(limits)
    ok = complete and not bad and secs <= 30
    report("AC4 zeta", ok, "multiplicities, zeta trace and residues within tolerance", secs)
    assert complete and not bad, [str(r) for r in bad]
    assert secs <= 30


_REAL = {}


def _real_records():
    if not _REAL:
        t0 = time.perf_counter()
        recs = []
        for q in QS:
            recs += real_suite(q, "25/2", cutoffs=("17/2", "21/2", "25/2"), k_max=4)
        _REAL["records"] = recs
        _REAL["seconds"] = time.perf_counter() - t0
    return _REAL["records"], _REAL["seconds"]


def _ac5_failures(records):
    limits = {"J^2=-1": 0.0, "JD=DJ": 0.0, "Jgamma=gammaJ": 0.0}
    bad = []
    for r in records:
        cid = r.check_id
        if cid in limits:
            if r.residual > limits[cid]:
                bad.append(r)
        elif cid.startswith("T-equivariance"):
            if r.residual > 1e-9:
                bad.append(r)
        elif cid.startswith("f(l,1/2,l)") and cid.endswith("/published"):
            # the criterion names the closed form; l <= 21/2
            two_l = int(cid.split("l=")[1].split("/")[0])
            if two_l <= 21 and r.residual > 1e-10:
                bad.append(r)
        elif cid.startswith(("j-decay", "l-decay-rate", "smoothing", "witness")):
            if not r.passed:
                bad.append(r)
    return bad


DOCUMENTED_AC5 = ("published closed form of f(l,1/2,l); at q = 0.8 the (x2*,x2) l-rate "
                  "and the smoothing increment at cutoffs 17/2..25/2")


@pytest.mark.xfail(strict=True, reason="fails on " + DOCUMENTED_AC5)
def test_ac5_real_structure():
    records, secs = _real_records()
    bad = _ac5_failures(records)
    pairs = {r.check_id for r in records if r.check_id.startswith("j-decay")}
    ok = not bad and len(pairs) == 25 and secs <= 120
    published = [r for r in bad if r.check_id.endswith("/published")]
    others = sorted(f"{r.check_id} q={r.q}" for r in bad if r not in published)
    parts = ([f"published f(l,1/2,l) off at {len(published)} (level, q) points"] if published else []) + others
    report("AC5 real structure", ok, "; ".join(parts) if bad else "all sub-checks pass", secs)
    assert ok


def test_ac5_remaining_subchecks():
    """Everything in AC5 outside the documented failures passes."""
    records, secs = _real_records()
    bad = _ac5_failures(records)
    unexpected = [r for r in bad if not (
        r.check_id.endswith("/published")
        or (r.q == 0.8 and r.check_id in ("l-decay-rate[x2*,x2]", "smoothing[[D,x2],Jx2J^-1],k<=4")))]
    assert not unexpected, [str(r) for r in unexpected]
    derived = [r for r in records if r.check_id.endswith("/derived")]
    assert derived and max(r.residual for r in derived) <= 1e-10
    assert len({r.check_id for r in records if r.check_id.startswith("j-decay")}) == 25
    assert any(r.check_id.startswith("witness") and r.passed for r in records)
    assert secs <= 120


def test_ac6_approximation():
    t0 = time.perf_counter()
    records = []
    for q in QS:
        records += approx_suite(q, "25/2", C=10.0)
    secs = time.perf_counter() - t0
    rel = worst(records, lambda r: r.check_id.startswith("hat:"))
    pq = worst(records, lambda r: r.check_id == "PQ=1")
    dev = max(r.value for r in records if r.check_id.startswith("deviation["))
    tier = max(r.value for r in records if r.check_id.startswith("tier-l"))
    ok = all(r.passed for r in records) and rel <= 1e-9 and pq == 0.0 and dev <= 10 and tier <= 10 and secs <= 60
    report("AC6 approximation", ok, f"hat relations {rel:.1e}, PQ-1 {pq:.0e}, "
                                    f"max C_dev {dev:.2f}, max C_tier {tier:.2f} (<= 10)", secs)
    assert ok, [str(r) for r in records if not r.passed]


def test_ac7_determinism(tmp_path):
    t0 = time.perf_counter()
    outs = []
    for i, threads in enumerate(("1", "4")):
        path = tmp_path / f"run{i}.json"
        env = dict(os.environ, Q4S_THREADS=threads)
        proc = subprocess.run([sys.executable, "-m", "s4q.cli", "all", "--output", str(path)],
                              env=env, capture_output=True, text=True, check=False)
        assert proc.returncode in (0, 2), proc.stderr
        outs.append(path.read_bytes())
    secs = time.perf_counter() - t0
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    report("AC7 determinism", ok, f"two `all` runs, {len(outs[0])} bytes, byte-identical={outs[0] == outs[1]}",
           secs)
    assert ok
