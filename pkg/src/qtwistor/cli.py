"""Command-line runner: ``verify`` executes suites, ``dump`` writes constant tensors.

Exit codes: 0 when every check passes or is reported as expected, 1 when a
check fails, 2 for an invalid configuration or an unknown dump name.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .coeff import Params
from .suites import SUITES, Sample, Task, TaskResult, run_task, tasks_for
from .tensor import (Tensor, build_adhm_rmatrix, build_charge_conjugation, build_epsilon_q, build_glq_rmatrix,
                     build_slq2_rmatrix, dump_tensor, epsilon_lower, epsilon_upper, projectors)


class ConfigInvalid(ValueError):
    pass


class UnknownName(KeyError):
    pass


MODES = ("symbolic", "numeric", "both")


@dataclass
class SuiteConfig:
    suites: List[str] = field(default_factory=lambda: ["rmatrix"])
    mode: str = "symbolic"
    samples: List[Sample] = field(default_factory=list)
    degree_cap: int = 12
    N: int = 2
    P: int = 1
    output_dir: Optional[str] = None
    workers: int = 1

    def validate(self) -> "SuiteConfig":
        if not self.suites:
            raise ConfigInvalid("no suites selected")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigInvalid("unknown suite(s) %s; choose from %s" % (", ".join(unknown), ", ".join(SUITES)))
        if self.mode not in MODES:
            raise ConfigInvalid("mode must be one of %s" % ", ".join(MODES))
        if self.mode in ("numeric", "both") and not self.samples:
            raise ConfigInvalid("numeric mode needs at least one sample (--s)")
        if self.degree_cap < 4:
            raise ConfigInvalid("degree_cap must be at least 4")
        if self.N < 1 or self.P < 1:
            raise ConfigInvalid("N and P must be positive")
        if self.workers < 1:
            raise ConfigInvalid("workers must be positive")
        if self.P >= 2 and self.mode != "numeric" and "thooft" in self.suites:
            raise ConfigInvalid("the t'Hooft suite at P >= 2 runs sampled: use --mode numeric with --s values")
        return self


@dataclass
class CheckReport:
    check_id: str
    paper_ref: str
    status: str
    residual_term_count: int
    elapsed: float
    notes: str


# ----------------------------------------------------------------------
# configuration


def _fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigInvalid("not a rational number: %r" % (text,)) from exc


def _parse_r(items: Sequence[str]) -> Tuple[Tuple[Tuple[int, int], Fraction], ...]:
    out = {}
    for item in items:
        try:
            pair, value = item.split("=")
            a, b = (int(x) for x in pair.split(","))
        except ValueError as exc:
            raise ConfigInvalid("--r expects a,b=<rational>, got %r" % item) from exc
        if a == b or not (1 <= a <= 8 and 1 <= b <= 8):
            raise ConfigInvalid("r(a,b) needs distinct indices in 1..8")
        v = _fraction(value)
        if v == 0:
            raise ConfigInvalid("r(a,b) must be nonzero")
        if a > b:
            a, b, v = b, a, 1 / v
        out[(a, b)] = v
    return tuple(sorted(out.items()))


def _parse_suites(value) -> List[str]:
    if isinstance(value, str):
        value = value.split(",")
    names = []
    for v in value:
        names.extend(x.strip() for x in str(v).split(",") if x.strip())
    return names


def build_config(args: argparse.Namespace) -> SuiteConfig:
    data: Dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid("cannot read config %s: %s" % (args.config, exc)) from exc
        if not isinstance(data, dict):
            raise ConfigInvalid("config must be a flat JSON object")
        extra = set(data) - {"suites", "mode", "s", "r", "degree_cap", "N", "P", "output_dir", "workers"}
        if extra:
            raise ConfigInvalid("unknown config keys: %s" % ", ".join(sorted(extra)))
    # flags override the file
    for key, flag in (("suites", args.suite), ("mode", args.mode), ("s", args.s), ("r", args.r),
                      ("degree_cap", args.degree_cap), ("N", args.N), ("P", args.P),
                      ("output_dir", args.out), ("workers", args.workers)):
        if flag is not None:
            data[key] = flag
    try:
        r = _parse_r(data.get("r", []))
        s_values = data.get("s", [])
        if not isinstance(s_values, list):
            s_values = [s_values]
        samples = [Sample(_fraction(s), r) for s in s_values]
        for smp in samples:
            if smp.s <= 0:
                raise ConfigInvalid("s must be positive")
        cfg = SuiteConfig(
            suites=_parse_suites(data.get("suites", ["rmatrix"])),
            mode=data.get("mode", "symbolic"),
            samples=samples,
            degree_cap=int(data.get("degree_cap", 12)),
            N=int(data.get("N", 2)),
            P=int(data.get("P", 1)),
            output_dir=data.get("output_dir"),
            workers=int(data.get("workers", 1)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(str(exc)) from exc
    return cfg.validate()


# ----------------------------------------------------------------------
# running


def plan(cfg: SuiteConfig) -> List[Tuple[Task, ...]]:
    """Tasks grouped into batches; sampled P >= 2 t'Hooft batches stop after the first failing sample."""
    points: List[Sample] = []
    if cfg.mode in ("symbolic", "both"):
        points.append(Sample())
    if cfg.mode in ("numeric", "both"):
        points.extend(cfg.samples)
    batches = []
    for suite in cfg.suites:
        for smp in points:
            batches.append(tuple(tasks_for(suite, smp, cfg.N, cfg.P, cfg.degree_cap)))
    return batches


def _stops_on_failure(batch: Tuple[Task, ...]) -> bool:
    t = batch[0]
    return t.suite == "thooft" and t.P >= 2 and not t.sample.symbolic


def execute(cfg: SuiteConfig) -> List[TaskResult]:
    batches = plan(cfg)
    results: List[TaskResult] = []
    stopped = set()
    if cfg.workers == 1:
        for batch in batches:
            key = (batch[0].suite, batch[0].P)
            if _stops_on_failure(batch) and key in stopped:
                continue
            res = [run_task(t) for t in batch]
            results.extend(res)
            if _stops_on_failure(batch) and any(not c.passed for r in res for c in r.checks):
                stopped.add(key)
        return results
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [[pool.submit(run_task, t) for t in batch] for batch in batches]
        for batch, futs in zip(batches, futures):
            key = (batch[0].suite, batch[0].P)
            if _stops_on_failure(batch) and key in stopped:
                for f in futs:
                    f.cancel()
                continue
            res = [f.result() for f in futs]
            results.extend(res)
            if _stops_on_failure(batch) and any(not c.passed for r in res for c in r.checks):
                stopped.add(key)
    return results


def mode_agreement(results: Sequence[TaskResult]) -> List[CheckReport]:
    """For checks run both symbolically and at samples, the zero/nonzero verdicts must agree."""
    sym: Dict[str, int] = {}
    num: Dict[str, List[Tuple[str, int]]] = {}
    for r in results:
        for c in r.checks:
            base, _, label = c.check_id.partition("@")
            if r.task.sample.symbolic:
                sym[c.check_id] = c.residual_terms
            elif label:
                num.setdefault(base, []).append((label, c.residual_terms))
    reports = []
    for base in sorted(set(sym) & set(num)):
        bad = [lab for lab, n in num[base] if (n == 0) != (sym[base] == 0)]
        reports.append(CheckReport("modes/" + base, base.split("/", 1)[0], "pass" if not bad else "fail",
                                   len(bad), 0.0, "disagrees at " + "; ".join(bad) if bad else ""))
    return reports


def to_reports(results: Sequence[TaskResult]) -> List[CheckReport]:
    out = []
    for r in results:
        share = r.elapsed / max(1, len(r.checks))
        for c in r.checks:
            out.append(CheckReport(c.check_id, c.tag, c.status, c.residual_terms, round(share, 6), c.notes))
    return out


def run(cfg: SuiteConfig) -> Tuple[List[CheckReport], int]:
    results = execute(cfg)
    reports = to_reports(results)
    if cfg.mode == "both":
        reports.extend(mode_agreement(results))
    code = 0 if all(r.status in ("pass", "reported") for r in reports) else 1
    return reports, code


def stable_json(reports: Sequence[CheckReport]) -> str:
    """The report array without timings; byte-identical across runs of one configuration."""
    rows = []
    for r in reports:
        d = asdict(r)
        d.pop("elapsed")
        rows.append(d)
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"


def render_table(reports: Sequence[CheckReport]) -> str:
    width = max([len(r.check_id) for r in reports] + [8])
    lines = ["%-*s  %-8s  %8s  %s" % (width, "check", "status", "residual", "notes")]
    for r in reports:
        lines.append("%-*s  %-8s  %8d  %s" % (width, r.check_id, r.status, r.residual_term_count, r.notes))
    counts = {}
    for r in reports:
        counts[r.status] = counts.get(r.status, 0) + 1
    lines.append("")
    lines.append(", ".join("%s: %d" % kv for kv in sorted(counts.items())))
    return "\n".join(lines) + "\n"


def write_outputs(reports: Sequence[CheckReport], cfg: SuiteConfig, started: str, finished: str):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps([asdict(r) for r in reports], indent=2, sort_keys=True) + "\n")
    (out / "report.stable.json").write_text(stable_json(reports))
    (out / "report.txt").write_text(render_table(reports))
    meta = {"started": started, "finished": finished,
            "elapsed_total": round(sum(r.elapsed for r in reports), 6)}
    (out / "timing.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------------
# dumps


def _dump_registry() -> Dict[str, Callable[[Params], Tensor]]:
    return {
        "glq2_rmatrix": lambda p: build_glq_rmatrix(2, 1, p),
        "glq4_rmatrix": lambda p: build_glq_rmatrix(4, 1, p),
        "glq4_rmatrix_inverse": lambda p: build_glq_rmatrix(4, -1, p),
        "slq2_rmatrix": build_slq2_rmatrix,
        "epsilon_upper": epsilon_upper,
        "epsilon_lower": epsilon_lower,
        "epsilon_q": lambda p: build_epsilon_q(4, p),
        "projector_plus_4": lambda p: projectors(build_glq_rmatrix(4, 1, p), p)[0],
        "projector_minus_4": lambda p: projectors(build_glq_rmatrix(4, 1, p), p)[1],
        "projector_plus_2": lambda p: projectors(build_slq2_rmatrix(p), p)[0],
        "projector_minus_2": lambda p: projectors(build_slq2_rmatrix(p), p)[1],
        "charge_conjugation": build_charge_conjugation,
        "adhm_rmatrix_N2_p1": lambda p: build_adhm_rmatrix(2, 1, p),
    }


DUMP_NAMES = tuple(sorted(_dump_registry()))


def dump(name: str, directory, params: Optional[Params] = None):
    reg = _dump_registry()
    if name not in reg:
        raise UnknownName("unknown tensor %r; available: %s" % (name, ", ".join(DUMP_NAMES)))
    params = params or Params.symbolic()
    return dump_tensor(reg[name](params), directory, name, params)


# ----------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qtwistor", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--config", help="flat JSON file; flags override its values")
    v.add_argument("--suite", action="append", help="suite name(s), comma separated or repeated: %s" % ", ".join(SUITES))
    v.add_argument("--mode", choices=MODES)
    v.add_argument("--s", action="append", help="rational sample value of s (q = s^2); repeatable")
    v.add_argument("--r", action="append", help="multiparameter r(a,b) as a,b=<rational>; repeatable")
    v.add_argument("--N", type=int)
    v.add_argument("--P", type=int, help="instanton number for the t'Hooft and ADHM suites")
    v.add_argument("--degree-cap", dest="degree_cap", type=int)
    v.add_argument("--workers", type=int)
    v.add_argument("--out", help="directory for report.json, report.txt and timing.json")
    v.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
    d = sub.add_parser("dump", help="write a constant tensor and its manifest")
    d.add_argument("--name", required=True)
    d.add_argument("--out", default=".")
    d.add_argument("--s", help="numeric s instead of symbolic q")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "dump":
        try:
            params = Params.numeric(_fraction(args.s)) if args.s else Params.symbolic()
            data, manifest = dump(args.name, args.out, params)
        except (UnknownName, ConfigInvalid) as exc:
            print("error: %s" % (exc.args[0] if exc.args else exc), file=sys.stderr)
            return 2
        print("%s\n%s" % (data, manifest))
        return 0
    try:
        cfg = build_config(args)
    except ConfigInvalid as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    started = datetime.now(timezone.utc).isoformat()
    reports, code = run(cfg)
    finished = datetime.now(timezone.utc).isoformat()
    if cfg.output_dir:
        write_outputs(reports, cfg, started, finished)
    if args.json:
        sys.stdout.write(json.dumps([asdict(r) for r in reports], indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(render_table(reports))
    return code


if __name__ == "__main__":
    sys.exit(main())
