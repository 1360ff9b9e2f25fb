"""
PixInfo command implementations.

Each command takes a validated ``RunConfig`` and a text stream for CSV output;
logging goes to stderr so stdout stays machine-readable.
"""
import logging
import os
import sys
from typing import List, Optional, TextIO

import pandas as pd

from approx import compact_curve, curve, expand, optimal_steps, render, to_csv
from clustering import build_hierarchy
from image_io import Image, histogram, read_pgm_file, synthesize, write_pgm_file
from infometrics import approximation_report, recompute_integer_total
from invariant import encode, encode_at_cut, hu_image
from schemas import INFO_COLUMNS, InfoReport, RunConfig

logger = logging.getLogger("PixInfoCLI")

DEFAULT_OUT_DIR = "./out"


def load_image(cfg: RunConfig) -> Image:
    if cfg.input_path is not None:
        return read_pgm_file(cfg.input_path)
    return synthesize(cfg.synth, seed=cfg.seed, size=cfg.size)


def _clamp_k_max(cfg: RunConfig, g: int) -> int:
    if cfg.k_max is None:
        return g
    if cfg.k_max > g:
        logger.info("k_max=%d exceeds g=%d; clamped", cfg.k_max, g)
    return min(cfg.k_max, g)


def _emit(table: pd.DataFrame, out: TextIO, path: Optional[str] = None) -> None:
    if path is None:
        out.write(to_csv(table))
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    to_csv(table, path)
    logger.info("Wrote %s (%d rows)", path, len(table))


# ---------------------------------------------------------------------------
# info
# ---------------------------------------------------------------------------

def cmd_info(cfg: RunConfig, out: TextIO = sys.stdout) -> List[InfoReport]:
    """Hartley / Shannon / integer totals for every k-cluster approximation, one CSV row per k."""
    img = load_image(cfg)
    h = histogram(img)
    k_max = _clamp_k_max(cfg, h.g)

    reports: List[InfoReport] = []
    for name in cfg.splitters:
        hier = build_hierarchy(h, name)
        for step in expand(hier, k_max):
            report = approximation_report(hier, step.cut, img, cfg.volume_bits)
            if cfg.recompute:
                report.q_integer_recomputed = recompute_integer_total(render(img, step), name)
            reports.append(report)

    columns = list(INFO_COLUMNS) + (["Q_integer_recomputed"] if cfg.recompute else [])
    table = pd.DataFrame([r.to_row() for r in reports], columns=columns)
    if cfg.splitter == "all":
        table.insert(0, "splitter", [r.splitter for r in reports])
    _emit(table, out)
    return reports


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

def cmd_curves(cfg: RunConfig, out: TextIO = sys.stdout) -> pd.DataFrame:
    """E / sigma curve table, or the per-depth compact table with ``--compact``."""
    img = load_image(cfg)
    if cfg.compact:
        table, filename = compact_curve(img, cfg.splitters), "compact.csv"
    else:
        table, filename = curve(img, cfg.splitters, cfg.k_max), "curves.csv"
    path = os.path.join(cfg.out_dir, filename) if cfg.out_dir else None
    _emit(table, out, path)
    return table


# ---------------------------------------------------------------------------
# hu
# ---------------------------------------------------------------------------

def cmd_hu(cfg: RunConfig, out: TextIO = sys.stdout) -> List[str]:
    """Hu dump and normalized Hu image per splitter, plus rendered approximations for each ``--k``."""
    img = load_image(cfg)
    h = histogram(img)
    out_dir = cfg.out_dir or DEFAULT_OUT_DIR
    os.makedirs(out_dir, exist_ok=True)

    ks = sorted(set(cfg.ks))
    skipped = [k for k in ks if k > h.g]
    if skipped:
        logger.warning("Requested k=%s exceed g=%d; skipped", skipped, h.g)
    ks = [k for k in ks if k <= h.g]

    written: List[str] = []
    for name in cfg.splitters:
        hier = build_hierarchy(h, name)
        table = encode(hier)
        dump_path = os.path.join(out_dir, f"hu_{name}.tsv")
        lines = table.dump_lines()
        with open(dump_path, "w") as fh:
            fh.write("".join(line + "\n" for line in lines))
        written.append(dump_path)
        if cfg.dump:
            out.write("".join(line + "\n" for line in lines))

        written.append(write_pgm_file(os.path.join(out_dir, f"hu_{name}.pgm"), hu_image(img, table)))

        if ks:
            steps = expand(hier, ks[-1])
            for k in ks:
                step = steps[k - 1]
                written.append(write_pgm_file(
                    os.path.join(out_dir, f"approx_{name}_k{k}.pgm"), render(img, step),
                ))
                written.append(write_pgm_file(
                    os.path.join(out_dir, f"hu_{name}_k{k}.pgm"),
                    hu_image(img, encode_at_cut(hier, step.cut)),
                ))

    if ks:
        optimal = optimal_steps(h, ks[-1])
        for k in ks:
            written.append(write_pgm_file(
                os.path.join(out_dir, f"optimal_k{k}.pgm"), render(img, optimal[k - 1]),
            ))
    logger.info("hu wrote %d files to %s", len(written), out_dir)
    return written
