"""Command line entry point: ``lapident <command> ...``.

Data goes to files only; diagnostics go to stderr. A failed run prints one
line ``error: <code>: <message>`` and exits nonzero.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .diffusion import DiffusionError, shell_sizes, tree_radial_kernel
from .graph import GraphError, generate_random_regular, is_connected, read_edgelist, write_edgelist
from .identify import CSV_COLUMNS, SeparationConfig, run_separation
from .plotting import separation_svg
from .randomwave import fitted_alpha, min_separation_scaling, smallball_estimate
from .spectral import (
    SpectralError,
    apply_sign_flips,
    apply_subspace_rotation,
    build_psi,
    graph_spectrum,
    random_orthogonal,
)

log = logging.getLogger("lapident")


class CommandFailed(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


def _out_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _load_connected(path):
    g = read_edgelist(path)
    if not is_connected(g):
        raise CommandFailed("disconnected", f"{path}: graph is disconnected")
    return g


# --- gen ---------------------------------------------------------------------

def cmd_gen(args) -> None:
    g = generate_random_regular(args.n, args.r, args.seed)
    write_edgelist(g, args.out)
    log.info("wrote %d-regular graph on %d nodes to %s", args.r, args.n, args.out)


# --- pe ----------------------------------------------------------------------

def cmd_pe(args) -> None:
    g = _load_connected(args.graph)
    count = min(args.M, g.n - 1) + 1
    pe = build_psi(graph_spectrum(g, count), args.M)
    rows = [[v, *pe.values[v]] for v in range(g.n)]
    io.write_csv(args.out, ["node", *pe.column_names()], rows)


# --- treekernel --------------------------------------------------------------

def cmd_treekernel(args) -> None:
    table = tree_radial_kernel(args.r, args.t, args.d_max, args.tail_eps)
    rows = [[d, table.p[d], table.p2t[d], table.psi[d]] for d in range(table.d_max + 1)]
    io.write_csv(args.out, ["d", "p_t", "p_2t", "psi"], rows)
    problems = []
    if table.psi[0] != 0:
        problems.append("psi[0] != 0")
    if not np.all(np.diff(table.p) < 0):
        problems.append("p_t not strictly decreasing")
    if not np.all(np.diff(table.psi) >= 0):
        problems.append("psi decreases somewhere")
    if table.shell_mass() > 1 + 1e-9:
        problems.append(f"shell mass {table.shell_mass()} exceeds 1")
    horizon = table.monotone_horizon()
    if horizon < table.d_max:
        log.warning("psi is strictly increasing only up to d=%d in float64; beyond that it is flat", horizon)
    if problems:
        raise CommandFailed("assertion", "; ".join(problems))


# --- separation ----------------------------------------------------------------

def separation_config_from_text(text: str, seed_override: int | None = None) -> SeparationConfig:
    raw = io.parse_config(text)
    problems = []
    kwargs = {}
    parsers = {
        "n_values": io.parse_int_list, "k_values": io.parse_int_list, "r": int, "trials": int,
        "seed": int, "m": int, "t": float, "tail_eps": float, "radii": str,
    }
    for key, value in raw.items():
        if key not in parsers:
            problems.append(f"unknown key {key!r}")
            continue
        try:
            kwargs[key] = parsers[key](value)
        except ValueError:
            problems.append(f"{key}: cannot parse {value!r}")
    if seed_override is not None:
        kwargs["seed"] = seed_override
    if "seed" not in kwargs:
        problems.append("seed is required")
    cfg = SeparationConfig(**kwargs)
    problems += cfg.validate()
    if problems:
        raise io.ConfigError(problems)
    return cfg


def cmd_separation(args) -> None:
    text = Path(args.config).read_text() if args.config else ""
    cfg = separation_config_from_text(text, args.seed)
    curves = run_separation(cfg)
    out = _out_dir(args.out)
    rows = [[row[c] for c in CSV_COLUMNS] for curve in curves for row in curve.rows()]
    io.write_csv(out / "separation.csv", CSV_COLUMNS, rows)
    (out / "separation.svg").write_bytes(separation_svg(curves).encode("ascii"))
    problems = []
    for curve in curves:
        for p in curve.points:
            if not math.isnan(p.accuracy) and not 0 <= p.accuracy <= 1:
                problems.append(f"{curve.method} n={curve.n} k={p.k}: accuracy out of range")
            e = p.exp_inv_bucket
            slack = 3 * max(p.acc_stderr, math.sqrt(e * (1 - e) / p.trials)) + 1 / p.trials
            if curve.method == "WL" and p.accuracy > e + slack:
                problems.append(f"WL n={curve.n} k={p.k}: accuracy above the bucket ceiling")
    if problems:
        raise CommandFailed("assertion", "; ".join(problems))


# --- invariance ----------------------------------------------------------------

@dataclass
class InvarianceReport:
    sign_flip_max_deviation: float
    rotation_entrywise_max_deviation: float
    rotation_groupsum_max_deviation: float
    simple_rotation_max_deviation: float
    degenerate_groups: int
    straddling_groups: int
    trials: int

    def text(self) -> str:
        return "".join(f"{k}={io.fmt(v)}\n" for k, v in vars(self).items())


def invariance_report(g, M: int, trials: int, seed: int) -> InvarianceReport:
    dec = graph_spectrum(g)
    M = min(M, g.n - 1)
    base = build_psi(dec, M)
    rng = np.random.default_rng(seed)
    inside = [(lo, hi) for lo, hi in dec.groups if lo >= 1 and hi <= M + 1]
    straddling = sum(1 for lo, hi in dec.groups if lo < M + 1 < hi)
    sign_dev = entry_dev = group_dev = simple_dev = 0.0
    for _ in range(trials):
        signs = rng.choice([-1.0, 1.0], size=dec.count)
        sign_dev = max(sign_dev, float(np.abs(build_psi(apply_sign_flips(dec, signs), M).values - base.values).max()))
        rotated = dec
        for lo, hi in inside:
            rotated = apply_subspace_rotation(rotated, (lo, hi), random_orthogonal(hi - lo, rng))
        pe = build_psi(rotated, M)
        dev = float(np.abs(pe.values - base.values).max())
        for lo, hi in inside:
            # s-block columns are shifted by one because index 0 is skipped
            cols = slice(lo - 1, hi - 1)
            gs = np.abs(pe.s_block[:, cols].sum(1) - base.s_block[:, cols].sum(1)).max()
            group_dev = max(group_dev, float(gs))
        if all(hi - lo == 1 for lo, hi in inside):
            simple_dev = max(simple_dev, dev)
        entry_dev = max(entry_dev, dev)
    degenerate = sum(1 for lo, hi in inside if hi - lo > 1)
    return InvarianceReport(sign_dev, entry_dev, group_dev, simple_dev, degenerate, straddling, trials)


def cmd_invariance(args) -> None:
    g = _load_connected(args.graph)
    report = invariance_report(g, args.M, args.trials, args.seed)
    Path(args.out).write_bytes(report.text().encode("ascii"))
    problems = []
    if report.sign_flip_max_deviation != 0:
        problems.append("sign flips changed the encoding")
    if report.rotation_groupsum_max_deviation > 1e-10:
        problems.append("rotation changed a group-summed s-feature")
    if report.degenerate_groups == 0 and report.simple_rotation_max_deviation > 1e-10:
        problems.append("rotation changed the encoding on a simple spectrum")
    if report.degenerate_groups:
        log.warning(
            "%d degenerate eigenspace(s): entrywise deviation under rotation is %.3e (reported, not asserted)",
            report.degenerate_groups, report.rotation_entrywise_max_deviation,
        )
    if problems:
        raise CommandFailed("assertion", "; ".join(problems))


# --- injectivity -----------------------------------------------------------------

def cmd_injectivity(args) -> None:
    out = _out_dir(args.out)
    rows = []
    for M in args.M:
        for pt in smallball_estimate(M, args.eps, args.pairs, args.seed):
            rows.append([pt.M, pt.eps, pt.trials, pt.collision_prob, pt.stderr])
    io.write_csv(out / "smallball.csv", ["M", "eps", "trials", "collision_prob", "stderr"], rows)
    samples = min_separation_scaling(args.n, args.C, args.trials, args.seed)
    io.write_csv(out / "minsep.csv", ["n", "M", "trial", "min_sep"], [[s.n, s.M, s.trial, s.min_sep] for s in samples])
    log.info("fitted alpha (median min-sep ~ n^-alpha): %.4f", fitted_alpha(samples))
    collisions = sum(s.collisions for s in samples)
    if collisions or any(not s.min_sep > 0 for s in samples):
        raise CommandFailed("assertion", f"{collisions} exact collisions; nonpositive separation present")


# --- parser --------------------------------------------------------------------

def _int_list(s: str) -> tuple[int, ...]:
    return io.parse_int_list(s)


def _float_list(s: str) -> tuple[float, ...]:
    return io.parse_float_list(s)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lapident", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", help="sample a random regular graph to an edge-list file")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("pe", help="write the unsigned Laplacian positional encoding as CSV")
    s.add_argument("graph")
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_pe)

    s = sub.add_parser("treekernel", help="tabulate the radial tree heat kernel and psi")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--d-max", type=int, required=True)
    s.add_argument("--tail-eps", type=float, default=1e-12)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_treekernel)

    s = sub.add_parser("separation", help="run the WL vs LAP identification experiment")
    s.add_argument("--config", help="key = value file; omitted keys take defaults (seed is required)")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_separation)

    s = sub.add_parser("invariance", help="check the encoding under sign flips and eigenspace rotations")
    s.add_argument("graph")
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_invariance)

    s = sub.add_parser("injectivity", help="random-wave small-ball and min-separation estimates")
    s.add_argument("--M", type=_int_list, default=(2, 4, 8))
    s.add_argument("--eps", type=_float_list, default=(0.1, 0.3, 0.5))
    s.add_argument("--pairs", type=int, default=10**6)
    s.add_argument("--n", type=_int_list, default=(256, 512, 1024))
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_injectivity)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args.func(args)
    except CommandFailed as exc:
        code, msg = exc.code, str(exc)
    except io.ConfigError as exc:
        code, msg = "config", " | ".join(exc.problems)
    except (GraphError, SpectralError, DiffusionError) as exc:
        code, msg = "input", str(exc)
    except OSError as exc:
        code, msg = "io", str(exc)
    else:
        return 0
    print(f"error: {code}: {msg}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
