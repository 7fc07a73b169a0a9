"""Acceptance criteria 1-10, one test each, exact-zero tolerance throughout."""
import itertools
import json
import os
import subprocess
import sys
import time
from pathlib import Path


from qtwistor import cli
from qtwistor.coeff import Params
from qtwistor.harmonic import ModuliContext, verify_gradient_identity, verify_harmonic
from qtwistor.suites import DEFAULT_SAMPLES, Sample, run_task, tasks_for
from qtwistor.tensor import Tensor, build_glq_rmatrix, hecke_residual, yang_baxter_residual

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = Path(__file__).parent / "golden"


def run(suite, keys=None, sample=Sample(), N=2, P=1):
    """Checks of the selected tasks and the wall time spent."""
    t0 = time.perf_counter()
    checks = []
    for task in tasks_for(suite, sample, N, P):
        if keys is None or task.key in keys:
            checks.extend(run_task(task).checks)
    return checks, time.perf_counter() - t0


def bad(checks):
    return ["%s (%d)" % (c.check_id, c.residual_terms) for c in checks if c.status not in ("pass", "reported")]


def cli_run(args, tmp_path):
    env = dict(os.environ, PYTHONPATH=str(ROOT / "src"))
    proc = subprocess.run([sys.executable, "-m", "qtwistor", "verify", *args, "--out", str(tmp_path)],
                          env=env, capture_output=True, text=True)
    return proc.returncode, json.loads((tmp_path / "report.json").read_text())


def test_criterion_01_rmatrix_ybe_hecke_unitary():
    checks, elapsed = run("rmatrix", {"ybe-hecke", "unitary"})
    ids = {c.check_id for c in checks}
    assert {"eq2.1/ybe-N2", "eq2.1/ybe-N3", "eq2.1/ybe-N4", "eq2.2/hecke-N4", "eq2.4/unitary-N4"} <= ids
    assert bad(checks) == []
    assert elapsed < 10


def test_criterion_02_projectors():
    checks, elapsed = run("rmatrix", {"projectors"})
    ids = {c.check_id for c in checks}
    assert {"eq2.11/trace-plus-N4", "eq2.11/trace-minus-N4", "eq2.11/trace-plus-N2", "eq2.11/trace-minus-N2"} <= ids
    assert bad(checks) == []
    assert elapsed < 5


def test_criterion_03_epsilon():
    checks, elapsed = run("rmatrix", {"epsilon"})
    by_id = {c.check_id: c for c in checks}
    assert by_id["eq2.15/well-defined"].passed
    assert by_id["eq4.8/r-identity"].passed
    assert bad(checks) == []
    assert elapsed < 10


def test_criterion_04_reality():
    checks, elapsed = run("reality")
    assert bad(checks) == []
    assert elapsed < 5


def test_criterion_05_twistor_algebra():
    checks, elapsed = run("twistor")
    ids = [c.check_id for c in checks]
    assert sum(i.startswith("eq2.16/component") for i in ids) == 32
    assert bad(checks) == []
    assert elapsed < 120


def test_criterion_06_moduli():
    checks, elapsed = run("harmonic")
    ids = [c.check_id for c in checks]
    assert sum(i.startswith("eq4.18/component") for i in ids) == 16
    assert sum(i.startswith("eq4.19/component") for i in ids) == 16
    assert bad(checks) == []
    assert elapsed < 300


def test_criterion_07_thooft(tmp_path):
    single, _ = run("thooft")
    t0 = time.perf_counter()
    args = ["--suite", "thooft", "--mode", "numeric", "--P", "2"]
    for s in DEFAULT_SAMPLES:
        args += ["--s", str(s)]
    code, reports = cli_run(args, tmp_path)
    elapsed = time.perf_counter() - t0
    failures = bad(single) + ["%s (%d)" % (r["check_id"], r["residual_term_count"])
                              for r in reports if r["status"] not in ("pass", "reported")]
    assert failures == []
    assert code == 0
    assert elapsed < 900


ADHM_IDS = ("eq5.7/", "eq5.13/g11-z", "eq5.15/forward", "eq5.15/converse", "eq5.29/")


def test_criterion_08_adhm():
    checks, elapsed = run("adhm", {"gauge-algebra", "g-centrality", "constraint", "self-dual"})
    selected = [c for c in checks if c.check_id.startswith(ADHM_IDS) and c.check_id != "eq5.13/g11-z-weight"
                and c.check_id != "eq5.15/forward-normalized"]
    assert {c.check_id for c in selected} >= {"eq5.7/gauge-algebra", "eq5.13/g11-z", "eq5.15/forward",
                                               "eq5.15/converse", "eq5.29/self-dual"}
    assert bad(selected) == []
    assert elapsed < 900


def test_criterion_09_determinism(tmp_path):
    for name in cli.DUMP_NAMES:
        cli.dump(name, tmp_path / "dumps")
        for suffix in (".tensor", ".json"):
            assert (tmp_path / "dumps" / (name + suffix)).read_bytes() == (GOLDEN / (name + suffix)).read_bytes()
    runs = []
    for k in range(2):
        out = tmp_path / ("run%d" % k)
        cli_run(["--suite", "rmatrix,reality,twistor"], out)
        runs.append((out / "report.stable.json").read_bytes())
    assert runs[0] == runs[1]
    golden = (GOLDEN / "report-rmatrix-reality-twistor.json").read_bytes()
    assert runs[0] == golden
    args = ["--suite", ",".join(cli.SUITES), "--mode", "both"]
    for s in DEFAULT_SAMPLES:
        args += ["--s", str(s)]
    _, reports = cli_run(args, tmp_path / "both")
    modes = [r for r in reports if r["check_id"].startswith("modes/")]
    assert len(modes) > 100
    assert [r["check_id"] for r in modes if r["status"] != "pass"] == []


def _perturbation_outcome(R, key, params):
    entries = dict(R.entries)
    entries[key] = entries.get(key, params.zero) + params.one
    Rp = Tensor(R.dims, entries)
    algebraic = not yang_baxter_residual(Rp, params).is_zero() or not hecke_residual(Rp, params).is_zero()
    try:
        mc = ModuliContext(1, params, R4=Rp)
    except ValueError:
        return algebraic, True, True
    g = any(not c.passed for c in verify_gradient_identity(mc))
    h = any(not c.passed for c in verify_harmonic(mc))
    return algebraic, g, h


def test_criterion_10_negative_controls():
    params = Params.symbolic()
    R = build_glq_rmatrix(4, 1, params)
    insensitive = []
    for key in itertools.product(range(1, 5), repeat=4):
        algebraic, g, h = _perturbation_outcome(R, key, params)
        if not (algebraic and g and h):
            insensitive.append((key, algebraic, g, h))
    # the isotropy quadric is implied by the b exchange relations for generic q, so it is dropped at q = 1
    classical = Params.numeric(1)
    loose = ModuliContext(1, classical, isotropy=False)
    iso_g = any(not c.passed for c in verify_gradient_identity(loose))
    iso_h = any(not c.passed for c in verify_harmonic(loose))
    assert iso_g and iso_h
    assert insensitive == []
