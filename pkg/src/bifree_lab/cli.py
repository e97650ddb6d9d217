"""``bifree-lab <mode> --config PATH`` front end."""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import itertools
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from .bnc import LEFT, RIGHT, SideMap
from .combinat import SizeLimitError
from .config import MODES, ConfigError, ExperimentConfig, load_config
from .cumulant import MomentOracle, OracleGapError, bifree_cumulant
from .ensemble import EnsembleSpec
from .limits import CLTFamily, diagonal_family, limit_moment, moment_oracle
from .mc import convergence_sweep, estimate_moment
from .selftest import run_selftest, summarize
from .words import Diag, Var

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
MAX_CUMULANT_ROWS = 200_000


def fmt(x) -> str:
    """17 significant digits for floats; everything else via str."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def to_json(obj, indent: int = 0) -> str:
    """JSON with floats written to 17 significant digits."""
    pad, inner = " " * indent, " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent + 2)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 2) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, float):
        return fmt(obj) if math.isfinite(obj) else "null"
    return json.dumps(obj)


# -- mode runners: each returns (header, rows, summary line) -----------------------


def run_exact(cfg: ExperimentConfig, threads: int):
    value, variant = limit_moment(cfg.word, cfg.families, cfg.diagonal)
    return ["variant", "value"], [[variant, value]], f"{fmt(value)} ({variant})"


def run_simulate(cfg: ExperimentConfig, threads: int):
    N = cfg.Ns[-1]
    spec = EnsembleSpec(cfg.families, N, cfg.entry_law, cfg.base_seed)
    est = estimate_moment(cfg.word, spec, cfg.diagonal, cfg.n_samples, threads)
    row = [est.N, est.mean, est.stderr, est.n_samples]
    return ["N", "mean", "stderr", "n_samples"], [row], f"N={N}: {fmt(est.mean)} +- {fmt(est.stderr)}"


def run_sweep(cfg: ExperimentConfig, threads: int):
    spec = EnsembleSpec(cfg.families, cfg.Ns[0], cfg.entry_law, cfg.base_seed)
    rows = convergence_sweep(cfg.word, spec, cfg.diagonal, cfg.Ns, cfg.n_samples, threads)
    table = [[r.N, r.mean, r.stderr, r.exact, r.abs_err] for r in rows]
    last = rows[-1]
    return ["N", "mean", "stderr", "exact", "abs_err"], table, f"N={last.N}: abs_err {fmt(last.abs_err)}"


def _cumulant_alphabet(cfg: ExperimentConfig):
    c = cfg.cumulants
    if c.symbols is not None:
        symbols = list(c.symbols)
        phi = MomentOracle(c.moments)
        return symbols, c.symbols.__getitem__, phi
    letters = [Var(C.side_of(i), k, i) for k, C in cfg.families.items() for i in C.indices]
    fams = [CLTFamily(k, C) for k, C in cfg.families.items()]
    if cfg.diagonal is not None:
        letters += [Diag(side, s) for s in cfg.diagonal.symbols for side in (LEFT, RIGHT)]
        fams.append(diagonal_family(cfg.diagonal))
    return letters, (lambda a: a.side), moment_oracle(fams)


def run_cumulants(cfg: ExperimentConfig, threads: int):
    alphabet, side_of, phi = _cumulant_alphabet(cfg)
    order = cfg.cumulants.order
    total = sum(len(alphabet) ** n for n in range(1, order + 1))
    if total > MAX_CUMULANT_ROWS:
        raise SizeLimitError(f"{total} words up to order {order} exceeds {MAX_CUMULANT_ROWS}")
    rows = []
    for n in range(1, order + 1):
        for w in itertools.product(alphabet, repeat=n):
            chi = SideMap(tuple(side_of(a) for a in w))
            rows.append([n, str(chi), " ".join(str(a) for a in w), bifree_cumulant(phi, chi, w)])
    return ["order", "chi", "word", "cumulant"], rows, f"{len(rows)} cumulants up to order {order}"


def run_selftest_mode(cfg: ExperimentConfig, threads: int):
    results = run_selftest()
    p, f = summarize(results)
    rows = [[r.name, "pass" if r.passed else "fail", r.detail] for r in results]
    return ["check", "status", "detail"], rows, f"{p} passed, {f} failed"


RUNNERS = {
    "exact": run_exact,
    "simulate": run_simulate,
    "sweep": run_sweep,
    "cumulants": run_cumulants,
    "selftest": run_selftest_mode,
}


def render(cfg: ExperimentConfig, header, rows, timestamp: str | None) -> str:
    if cfg.output.format == "json":
        doc = {}
        if timestamp is not None:
            doc["generated"] = timestamp
        doc["mode"] = cfg.mode
        doc["rows"] = [dict(zip(header, r)) for r in rows]
        doc["config"] = cfg.to_dict()
        return to_json(doc) + "\n"
    buf = io.StringIO()
    if timestamp is not None:
        buf.write(f"# generated {timestamp}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([fmt(v) for v in r])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bifree-lab", description="Bi-free central limits: exact moments and random-matrix checks.")
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", required=False, help="YAML experiment config (optional for selftest)")
    p.add_argument("--output", help="report path (overrides output.path); '-' for stdout")
    p.add_argument("--seed-override", type=int, metavar="U64", help="replace base_seed")
    p.add_argument("--threads", type=int, default=1, metavar="N", help="Monte Carlo worker threads")
    p.add_argument("--no-timestamp", action="store_true", help="omit the generated-at line")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            if args.mode != "selftest":
                raise ConfigError("--config", f"required for mode {args.mode}")
            cfg = ExperimentConfig(mode="selftest")
        else:
            cfg = load_config(args.config, args.mode)
        if args.seed_override is not None:
            if not 0 <= args.seed_override < 2**64:
                raise ConfigError("--seed-override", "must be an unsigned 64-bit integer")
            cfg = replace(cfg, base_seed=args.seed_override)
        if args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
        header, rows, summary = RUNNERS[cfg.mode](cfg, args.threads)
    except (ConfigError, SizeLimitError, OracleGapError, ValueError, OSError) as err:
        kind = {
            ConfigError: "config error",
            SizeLimitError: "size limit",
            OracleGapError: "missing moment",
        }.get(type(err), "error")
        print(f"bifree-lab: {kind}: {err}", file=sys.stderr)
        return EXIT_INVALID

    stamp = None if args.no_timestamp else _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    text = render(cfg, header, rows, stamp)
    path = args.output if args.output is not None else cfg.output.path
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="")
        print(summary)
    if cfg.mode == "selftest" and any(r[1] == "fail" for r in rows):
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
