"""Command-line entry point: ``quadbounds {moments,bounds,roc,distance} --config FILE``."""
from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from .config import ConfigError, ScenarioConfig, load_config
from .metrics import cvm_distance, format_number
from .moments import y_moments, z_moments_closed_form
from .tcd import (
    alpha_grid,
    analytic_grid,
    beta_grid,
    bound_curves,
    empirical_alpha,
    empirical_beta,
    roc_table,
    sample_window_sums,
)
from .edgeworth import clt_cdf, edgeworth_cdf
from .evt import alpha_edgeworth, alpha_evt

BETA_COLUMNS = ("beta_edg", "beta_clt", "beta_emp", "beta_emp_se")
ALPHA_COLUMNS = ("alpha_edg", "alpha_evt", "alpha_emp", "alpha_emp_se")


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else format_number(cell) for cell in row])
    return buf.getvalue()


def _grid(cfg: ScenarioConfig, scenario, which: str) -> np.ndarray:
    if cfg.h_min is not None:
        return np.linspace(cfg.h_min, cfg.h_max, cfg.h_steps)
    return analytic_grid(scenario, which, cfg.h_steps)


def _m_values(cfg: ScenarioConfig):
    return list(cfg.m_list) if cfg.m_list is not None else [cfg.m]


def cmd_moments(cfg: ScenarioConfig) -> str:
    s = cfg.scenario()
    q = s.llr()
    rows = []
    for hyp in (0, 1):
        my = y_moments(q, s.gaussian(hyp))
        mz = z_moments_closed_form(my, s.m)
        label = f"H{hyp}"
        rows += [(label, f"xi_y{k}", v) for k, v in enumerate(my.as_tuple(), 1)]
        rows += [(label, f"xi_z{k}", v) for k, v in enumerate(mz.as_tuple(), 1)]
        rows += [(label, "sigma_z", mz.sigma), (label, "c3", mz.c3), (label, "c4", mz.c4), (label, "c6", mz.c6)]
    return _rows_to_csv(("hypothesis", "name", "value"), rows)


def cmd_bounds(cfg: ScenarioConfig, which: str = "both", mc: bool = False) -> str:
    ms = _m_values(cfg)
    keep = {"beta": BETA_COLUMNS, "alpha": ALPHA_COLUMNS, "both": BETA_COLUMNS + ALPHA_COLUMNS}[which]
    header, rows = None, []
    for m in ms:
        s = cfg.scenario(m)
        table = bound_curves(s, _grid(cfg, s, which), cfg.n_trials if mc else None, cfg.seed, cfg.workers)
        names = [n for n in table.names if n in keep]
        prefix = ("m", "m_alpha") if cfg.m_list is not None else ()
        header = (*prefix, "h", *names)
        for i, h in enumerate(table.h):
            lead = (m, s.m_alpha) if prefix else ()
            rows.append((*lead, h, *(table[n][i] for n in names)))
    return _rows_to_csv(header, rows)


def cmd_roc(cfg: ScenarioConfig) -> str:
    s = cfg.scenario()
    return roc_table(s, _grid(cfg, s, "both"), cfg.n_trials, cfg.seed, cfg.workers).to_csv()


def cmd_distance(cfg: ScenarioConfig, which: str = "both") -> str:
    """CvM distances of each approximation to the sampled exact bound, one row per ``m``.

    ``m_alpha`` follows ``m_alpha_factor * m`` (factor 10 unless configured). The
    ``*_exact`` columns are the distance of the exact curve to itself.
    """
    factor = cfg.m_alpha_factor or 10
    p_range = (cfg.p_lo, cfg.p_hi)
    width = cfg.p_hi - cfg.p_lo
    header = ["m", "m_alpha"]
    if which in ("beta", "both"):
        header += ["beta_exact", "beta_edg", "beta_clt"]
    if which in ("alpha", "both"):
        header += ["alpha_exact", "alpha_edg", "alpha_evt"]
    header += [f"{name}_norm" for name in header[2:]]
    rows = []
    for m in _m_values(cfg):
        s = cfg.scenario(m).replace(m_alpha=factor * m)
        values = []
        if which in ("beta", "both"):
            d1 = s.dist(1)
            z1 = sample_window_sums(s, 1, cfg.n_trials, cfg.seed, workers=cfg.workers)
            h = beta_grid(z1, cfg.h_steps)
            exact, _ = empirical_beta(z1, h)
            values += [cvm_distance(exact, approx, p_range)
                       for approx in (exact, edgeworth_cdf(d1, h), clt_cdf(d1.mean, d1.sigma, h))]
        if which in ("alpha", "both"):
            d0 = s.dist(0)
            z0 = sample_window_sums(s, 0, cfg.n_trials, cfg.seed + 1, workers=cfg.workers)
            h = alpha_grid(z0, cfg.h_steps)
            exact, _ = empirical_alpha(z0, h, s.m_alpha)
            values += [cvm_distance(exact, approx, p_range)
                       for approx in (exact, alpha_edgeworth(d0, s.m_alpha, h), alpha_evt(d0, s.m_alpha, h))]
        rows.append((m, s.m_alpha, *values, *(v / width for v in values)))
    return _rows_to_csv(header, rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadbounds",
        description="Edgeworth/EVT approximations of FMA detector error bounds, as CSV tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, metavar="PATH", help="key = value scenario file")
        p.add_argument("--trials", type=int, metavar="N", help="override n_trials")
        p.add_argument("--seed", type=int, metavar="N", help="override seed")
        p.add_argument("--out", metavar="PATH", help="write CSV here instead of standard output")
        return p

    common(sub.add_parser("moments", help="raw moments and Hermite coefficients under both hypotheses"))
    bounds = common(sub.add_parser("bounds", help="beta/alpha bound approximations on a threshold grid"))
    bounds.add_argument("--which", choices=("beta", "alpha", "both"))
    bounds.add_argument("--mc", action="store_true", help="add empirical bounds from sampled window sums")
    common(sub.add_parser("roc", help="approximate bounds next to Monte Carlo P_fa/P_md of the detector"))
    dist = common(sub.add_parser("distance", help="Cramer-von Mises distances over m_list"))
    dist.add_argument("--which", choices=("beta", "alpha", "both"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).replace(n_trials=args.trials, seed=args.seed)
        which = getattr(args, "which", None) or cfg.which
        if args.command == "moments":
            text = cmd_moments(cfg)
        elif args.command == "bounds":
            text = cmd_bounds(cfg, which, args.mc)
        elif args.command == "roc":
            text = cmd_roc(cfg)
        else:
            text = cmd_distance(cfg, which)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"quadbounds {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
