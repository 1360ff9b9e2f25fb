"""
Invariant battery behind the ``check`` command.

Hard checks (any failure is a breach, exit code 3):
    round_trip          replay(value(code), T) reproduces every digit string
    definition_oracle   pixel bits == non-uniform clusters found by a threshold walk
    hu_table            common length, absorbing 1, isotone values
    additivity          Q0 + sum(Q_i) == Q for every cut of the expansion
    telescoping         E_k - E_{k+1} == delta_e of the split taken; cuts nested
    dominance           optimal E_k <= expansion E_k (g <= 64), equal at k=1 and k=g
    classical           Hartley / Shannon totals agree with per-pixel summation
    coincidence         equal-count 2^m levels + balanced: Q == N*m == Hartley == Shannon

Soft reports (logged, never fatal):
    convexity           E_k > (E_{k-1} + E_{k+1}) / 2 counts per method
    trend               balanced Q within 15% of Shannon; otsu / merge Q >= Shannon

Breaches are appended to ``<out>/breaches.jsonl``, one ``BreachRecord`` per line.
"""
import glob
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from approx import ApproxStep, compact_sequence, convexity_report, expand, optimal_steps
from clustering import Hierarchy, build_hierarchy
from image_io import Histogram, Image, histogram, read_pgm_file, synthesize
from infometrics import (
    decompose_at_cut,
    hartley_total,
    hartley_total_per_pixel,
    integer_total,
    shannon_total,
    shannon_total_per_pixel,
)
from invariant import HuDecodeError, HuTable, encode, pixel_bits, replay, validate_table, value
from schemas import BreachRecord, GeneratorSpec, RunConfig, validate_and_log

from .commands import DEFAULT_OUT_DIR, load_image

logger = logging.getLogger("PixInfoChecks")

DOMINANCE_MAX_G = 64
CLASSICAL_REL_TOL = 1e-9
TREND_BALANCED_TOLERANCE = 0.15
BATTERY_SIZE = 200
BATTERY_MAX_G = 64
BATTERY_MAX_COUNT = 1000


class InvariantBreach(RuntimeError):
    """Raised when at least one hard invariant failed."""

    def __init__(self, breaches: Sequence[BreachRecord]):
        self.breaches = list(breaches)
        first = self.breaches[0] if self.breaches else None
        detail = f" first: [{first.check}] {first.message}" if first else ""
        super().__init__(f"{len(self.breaches)} invariant breach(es);{detail}")


class BreachLog:
    """Append-only JSONL file of breach records."""

    def __init__(self, path: str):
        self.path = path
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)

    def write(self, record: BreachRecord) -> None:
        try:
            with open(self.path, "a") as fh:
                fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
        except OSError as exc:
            logger.error("Breach log write failed: %s", exc)


# ---------------------------------------------------------------------------
# Battery
# ---------------------------------------------------------------------------

def _histogram_instance(counts: Dict[int, int], seed: int) -> Image:
    return synthesize(GeneratorSpec.from_dict({"kind": "histogram_exact", "params": {"counts": counts}}), seed=seed)


def builtin_battery(seed: int = 0, size: int = BATTERY_SIZE) -> List[Tuple[str, Image]]:
    """Worked example, equal-count 2^m images (m = 1..6) and *size* random histograms."""
    battery = [("worked", _histogram_instance({0: 2, 1: 1, 3: 1}, seed))]
    for m in range(1, 7):
        step = 256 // 2 ** m
        battery.append((f"equal_2^{m}", _histogram_instance({i * step: 4 for i in range(2 ** m)}, seed)))

    rng = np.random.default_rng(seed)
    for i in range(size):
        g = int(rng.integers(1, BATTERY_MAX_G + 1))
        levels = np.sort(rng.choice(256, size=g, replace=False))
        counts = rng.integers(1, BATTERY_MAX_COUNT + 1, size=g)
        battery.append((
            f"random_{i}",
            _histogram_instance({int(v): int(c) for v, c in zip(levels, counts)}, seed + i),
        ))
    return battery


def describe(name: str, h: Histogram) -> Dict:
    """Enough to rebuild the instance with ``histogram_exact``."""
    return {"name": name, "maxval": h.maxval, "counts": {str(v): c for v, c in h.counts.items()}}


def load_battery_file(path: str, seed: int = 0) -> List[Tuple[str, Image]]:
    """
    One generator descriptor per JSON line, e.g.
    ``{"name": "bimodal", "kind": "two_gaussians", "params": {...}}``.
    Malformed lines are logged and skipped.
    """
    battery: List[Tuple[str, Image]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            context = f"check:battery:{os.path.basename(path)}:{lineno}"
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                logger.warning("[%s] not valid JSON: %s", context, exc)
                continue
            if not isinstance(payload, dict):
                logger.warning("[%s] expected a JSON object, got %s", context, type(payload).__name__)
                continue
            name = str(payload.pop("name", f"line_{lineno}"))
            spec = validate_and_log(GeneratorSpec, payload, context=context)
            if spec is None:
                continue
            battery.append((name, synthesize(spec, seed=seed + lineno)))
    logger.info("Loaded %d battery instance(s) from %s", len(battery), path)
    return battery


def glob_battery(pattern: str) -> List[Tuple[str, Image]]:
    paths = sorted(glob.glob(pattern))
    if not paths:
        raise FileNotFoundError(f"no files match {pattern}")
    return [(path, read_pgm_file(path)) for path in paths]


# ---------------------------------------------------------------------------
# Hard checks
# ---------------------------------------------------------------------------

def check_hu_table(hier: Hierarchy, table: HuTable, instance: Dict) -> List[BreachRecord]:
    breaches = [
        BreachRecord("hu_table", problem, hier.splitter, instance)
        for problem in validate_table(table)
    ]
    for level, code in sorted(table.codes.items()):
        try:
            if replay(value(code), table.depth) != code:
                breaches.append(BreachRecord(
                    "round_trip", f"level {level}: '{code}' replays differently", hier.splitter, instance,
                ))
        except HuDecodeError as exc:
            breaches.append(BreachRecord("round_trip", f"level {level}: {exc}", hier.splitter, instance))
        expected = hier.non_uniform_ancestors(level)
        if pixel_bits(code) != expected:
            breaches.append(BreachRecord(
                "definition_oracle",
                f"level {level}: '{code}' has {pixel_bits(code)} even digits, tree walk found {expected}",
                hier.splitter, instance,
            ))
    return breaches


def check_expansion(hier: Hierarchy, table: HuTable, steps: Sequence[ApproxStep], instance: Dict) -> List[BreachRecord]:
    breaches: List[BreachRecord] = []
    q_total = integer_total(hier.histogram, table)
    for step in steps:
        q0, parts = decompose_at_cut(hier, step.cut)
        if q0 + sum(parts) != q_total:
            breaches.append(BreachRecord(
                "additivity", f"k={step.k}: Q0={q0} + sum(Qi)={sum(parts)} != Q={q_total}", hier.splitter, instance,
            ))
        cut_error = sum((node.squared_error for node in step.cut), 0)
        if cut_error != step.energy:
            breaches.append(BreachRecord(
                "telescoping", f"k={step.k}: E={step.energy} but cut errors sum to {cut_error}", hier.splitter, instance,
            ))

    for prev, cur in zip(steps, steps[1:]):
        prev_ids = {id(node): node for node in prev.cut}
        cur_ids = {id(node): node for node in cur.cut}
        removed = [node for key, node in prev_ids.items() if key not in cur_ids]
        added = {key for key in cur_ids if key not in prev_ids}
        if len(removed) != 1 or removed[0].split is None or added != {
            id(removed[0].split.low), id(removed[0].split.high)
        }:
            breaches.append(BreachRecord(
                "telescoping", f"k={cur.k}: cut does not refine k={prev.k} by one split", hier.splitter, instance,
            ))
            continue
        if prev.energy - cur.energy != removed[0].split.delta_e or cur.energy >= prev.energy:
            breaches.append(BreachRecord(
                "telescoping",
                f"k={cur.k}: E drop {prev.energy - cur.energy} != delta_e {removed[0].split.delta_e}",
                hier.splitter, instance,
            ))

    if steps and steps[-1].k == hier.histogram.g and steps[-1].energy != 0:
        breaches.append(BreachRecord(
            "telescoping", f"E at k=g is {steps[-1].energy}, expected 0", hier.splitter, instance,
        ))
    return breaches


def check_dominance(
    optimal: Sequence[ApproxStep], steps: Sequence[ApproxStep], splitter: str, instance: Dict,
) -> List[BreachRecord]:
    breaches = []
    for opt, step in zip(optimal, steps):
        if opt.energy > step.energy:
            breaches.append(BreachRecord(
                "dominance", f"k={step.k}: optimal E={opt.energy} > expansion E={step.energy}", splitter, instance,
            ))
    endpoints = [0] + ([len(steps) - 1] if len(steps) == len(optimal) else [])
    for i in endpoints:
        if optimal[i].energy != steps[i].energy:
            breaches.append(BreachRecord(
                "dominance", f"k={steps[i].k}: optimal and expansion E differ at an endpoint", splitter, instance,
            ))
    return breaches


def check_classical(img: Image, h: Histogram, instance: Dict) -> List[BreachRecord]:
    breaches = []
    pairs = (
        ("Hartley", hartley_total(h.total, h.g), hartley_total_per_pixel(img)),
        ("Shannon", shannon_total(h), shannon_total_per_pixel(img)),
    )
    for name, per_level, per_pixel in pairs:
        if not math.isclose(per_level, per_pixel, rel_tol=CLASSICAL_REL_TOL, abs_tol=1e-9):
            breaches.append(BreachRecord(
                "classical", f"{name}: per-level {per_level!r} != per-pixel {per_pixel!r}", "", instance,
            ))
    return breaches


def check_coincidence(h: Histogram, q_balanced: int, instance: Dict) -> List[BreachRecord]:
    """Equal counts over 2^m levels: every estimator gives N*m bits."""
    counts = set(h.counts.values())
    m = h.g.bit_length() - 1
    if len(counts) != 1 or h.g != 2 ** m or m < 1:
        return []
    expected = h.total * m
    hartley, shannon = hartley_total(h.total, h.g), shannon_total(h)
    if q_balanced != expected or hartley != expected or shannon != expected:
        return [BreachRecord(
            "coincidence",
            f"expected {expected} bits, got integer={q_balanced} hartley={hartley!r} shannon={shannon!r}",
            "balanced", instance,
        )]
    return []


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    instances: int = 0
    checks_run: Dict[str, int] = field(default_factory=dict)
    breaches: List[BreachRecord] = field(default_factory=list)
    convexity: Dict[str, Dict[str, int]] = field(default_factory=dict)
    trend: Dict[str, Dict[str, int]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.breaches

    def count(self, check: str) -> None:
        self.checks_run[check] = self.checks_run.get(check, 0) + 1

    def record_convexity(self, method: str, energies: Sequence) -> List[int]:
        tally = self.convexity.setdefault(method, {"violations": 0, "interior": 0})
        violations = convexity_report(energies)
        tally["violations"] += len(violations)
        tally["interior"] += max(len(energies) - 2, 0)
        return violations

    def record_trend(self, splitter: str, held: bool) -> None:
        tally = self.trend.setdefault(splitter, {"held": 0, "deviated": 0})
        tally["held" if held else "deviated"] += 1

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "instances": self.instances,
            "checks_run": dict(sorted(self.checks_run.items())),
            "breaches": [
                {"check": b.check, "splitter": b.splitter, "message": b.message,
                 "instance": b.instance.get("name", "")}
                for b in self.breaches
            ],
            "convexity": {
                method: {**tally, "fraction": tally["violations"] / tally["interior"] if tally["interior"] else 0.0}
                for method, tally in sorted(self.convexity.items())
            },
            "trend": dict(sorted(self.trend.items())),
        }


def _trend_holds(splitter: str, q_integer: int, shannon: float) -> bool:
    if splitter == "balanced":
        return abs(q_integer - shannon) <= TREND_BALANCED_TOLERANCE * shannon + 1e-9
    return q_integer >= shannon - 1e-9


def check_instance(name: str, img: Image, splitters: Sequence[str], report: CheckReport) -> None:
    h = histogram(img)
    instance = describe(name, h)
    report.instances += 1

    report.breaches.extend(check_classical(img, h, instance))
    report.count("classical")

    optimal: Optional[List[ApproxStep]] = None
    if h.g <= DOMINANCE_MAX_G:
        optimal = optimal_steps(h)
        violations = report.record_convexity("optimal", [s.energy for s in optimal])
        if violations:
            logger.warning("Convexity violated by optimal sequence at %s on %s", violations, name)

    shannon = shannon_total(h)
    for splitter in splitters:
        hier = build_hierarchy(h, splitter)
        table = encode(hier)
        steps = expand(hier)

        report.breaches.extend(check_hu_table(hier, table, instance))
        report.count("round_trip")
        report.count("definition_oracle")
        report.count("hu_table")
        report.breaches.extend(check_expansion(hier, table, steps, instance))
        report.count("additivity")
        report.count("telescoping")
        if optimal is not None:
            report.breaches.extend(check_dominance(optimal, steps, splitter, instance))
            report.count("dominance")

        q_integer = integer_total(h, table)
        if splitter == "balanced":
            report.breaches.extend(check_coincidence(h, q_integer, instance))
            report.count("coincidence")

        violations = report.record_convexity(splitter, [s.energy for s in steps])
        if violations:
            logger.warning("Convexity violated by %s expansion at %s on %s", splitter, violations, name)
        report.record_convexity(f"{splitter}_compact", [s.energy for s in compact_sequence(hier)])
        held = _trend_holds(splitter, q_integer, shannon)
        report.record_trend(splitter, held)
        if not held:
            logger.warning(
                "Trend deviation (%s): Q_integer=%d vs Shannon=%.3f on %s",
                splitter, q_integer, shannon, json.dumps(instance, sort_keys=True),
            )


def run_checks(
    cfg: RunConfig,
    out: TextIO = sys.stdout,
    battery: Optional[Sequence[Tuple[str, Image]]] = None,
) -> CheckReport:
    """Run every check over the configured input (or the built-in battery) and print a JSON report.

    ``--input`` may be a glob pattern; every matching PGM becomes an instance.
    """
    if battery is None:
        if cfg.battery_path is not None:
            battery = load_battery_file(cfg.battery_path, cfg.seed)
        elif cfg.input_path is not None and any(ch in cfg.input_path for ch in "*?["):
            battery = glob_battery(cfg.input_path)
        elif cfg.input_path is not None or cfg.synth is not None:
            battery = [(cfg.input_path or cfg.synth.kind, load_image(cfg))]
        else:
            battery = builtin_battery(cfg.seed)

    report = CheckReport()
    for name, img in battery:
        check_instance(name, img, cfg.splitters, report)

    out.write(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    logger.info(
        "Checked %d instances: %d breach(es)", report.instances, len(report.breaches),
    )
    if report.breaches:
        log = BreachLog(os.path.join(cfg.out_dir or DEFAULT_OUT_DIR, "breaches.jsonl"))
        for breach in report.breaches:
            logger.critical("[%s] %s (%s)", breach.check, breach.message, breach.splitter or "-")
            log.write(breach)
        raise InvariantBreach(report.breaches)
    return report
