"""Command-line entry point ``modspace``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .. import multipliers as mp
from ..gabor import analyze
from ..grid import GridSpec, sample
from ..modnorm import ModNormRequest, mod_norm
from ..products import gaussian_request, pair_request, stft_convolve, stft_multiply
from ..weights import from_json as weight_from_json
from ..windows import WindowSpec, certify, make_window_pair
from . import config as cfgmod
from . import io
from .experiments import CATALOG, RUNNERS, Report, run


def _grid(text: str, dim: int) -> GridSpec:
    try:
        L, n = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("--grid expects L,n") from exc
    return GridSpec(dim, L, n)


def write_report(rep: Report, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    io.write_csv(out / f"{rep.experiment}.csv", rep.rows, rep.header)
    (out / f"{rep.experiment}.json").write_text(json.dumps(rep.summary(), indent=2) + "\n")


def cmd_run(args) -> int:
    if args.all:
        configs = [cfgmod.build({"experiment": name}, args.seed) for name in RUNNERS]
    elif args.config:
        configs = [cfgmod.load(args.config, args.seed, args.out)]
    elif args.experiment:
        configs = [cfgmod.build({"experiment": args.experiment}, args.seed)]
    else:
        raise SystemExit("run needs --config, --experiment or --all")
    ok = True
    for cfg in configs:
        rep = run(cfg)
        out = Path(args.out or cfg.out or "reports")
        write_report(rep, out)
        summary = rep.summary()
        print(json.dumps(summary))
        ok = ok and rep.passed
    return 0 if ok else 1


def cmd_list(args) -> int:
    for name, text in CATALOG.items():
        print(f"{name}: {text}")
    return 0


def _window(sigma: float, spec: GridSpec):
    return make_window_pair(WindowSpec(sigma, spec))


def cmd_norm(args) -> int:
    f = io.load(args.signal)
    weight = weight_from_json(json.loads(Path(args.weight).read_text())) if args.weight else None
    req = ModNormRequest(args.p, args.q, _window(args.sigma, f.spec), args.flavor, weight, args.mode)
    print(json.dumps({"flavor": args.flavor, "p": args.p, "q": args.q, "mode": args.mode, "norm": mod_norm(f, req)}))
    return 0


def cmd_apply(args) -> int:
    f = io.load(args.signal)
    sym_json = json.loads(Path(args.symbol).read_text())
    if args.kind in ("step", "fourier-step"):
        sym = mp.symbol_from_json(sym_json)
        op = (lambda g: mp.step_apply(sym, g)) if args.kind == "step" else (lambda g: mp.fourier_step_apply(sym, g))
    else:
        sym = mp.slope_from_json(sym_json)
        op = (lambda g: mp.slope_step_apply(sym, g)) if args.kind == "slope-step" else (lambda g: mp.slope_fourier_apply(sym, g))
    out = op(f)
    if args.out:
        io.save(out, args.out)
    if args.matrix:
        band = 2 if args.kind == "step" else None
        A = mp.gabor_matrix(op, _window(args.sigma, f.spec), band=band)
        rows = [dict(zip(("row", "col", "re", "im"), r)) for r in A.to_rows()]
        io.write_csv(args.matrix, rows, ["row", "col", "re", "im"])
        print(json.dumps({"nonzeros": A.matrix.nnz, "decay_certificate": A.decay_certificate()}))
    return 0


def cmd_product(args) -> int:
    factors = [io.load(p) for p in args.factors]
    spec = factors[0].spec
    if args.windows == "auto":
        req = gaussian_request(args.kind, spec, len(factors))
    else:
        req = pair_request(args.kind, _window(args.sigma, spec), len(factors))
    out = stft_multiply(factors, req) if args.kind == "multiply" else stft_convolve(factors, req)
    if args.out:
        io.save(out, args.out)
    if args.report:
        io.write_csv(args.report, list(io.coefficient_rows(analyze(out, _window(args.sigma, spec).phi, warn_tail=False))), ["j", "k", "re", "im"])
    return 0


def cmd_window_make(args) -> int:
    spec = _grid(args.grid, args.dim)
    pair = _window(args.sigma, spec)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    io.save(pair.phi, prefix.with_name(prefix.name + "_phi.msk"))
    io.save(pair.psi, prefix.with_name(prefix.name + "_psi.msk"))
    print(json.dumps(certify(pair)))
    return 0


def cmd_sample(args) -> int:
    spec = _grid(args.grid, args.dim)
    io.save(sample(json.loads(args.descriptor), spec), args.out)
    return 0


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modspace", description="Gabor analysis, step multipliers and modulation-space checks.")
    sub = ap.add_subparsers(dest="verb", required=True)

    r = sub.add_parser("run", help="run an experiment and write CSV and JSON reports")
    r.add_argument("--config")
    r.add_argument("--experiment", choices=sorted(RUNNERS))
    r.add_argument("--all", action="store_true", help="run every experiment with its defaults")
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)

    sub.add_parser("list", help="list experiments").set_defaults(func=cmd_list)

    n = sub.add_parser("norm", help="modulation or Wiener-type quasi-norm of a stored signal")
    n.add_argument("--signal", required=True)
    n.add_argument("--flavor", choices=["M", "W"], default="M")
    n.add_argument("--p", default="2")
    n.add_argument("--q", default="2")
    n.add_argument("--weight")
    n.add_argument("--mode", choices=["lattice", "dense"], default="lattice")
    n.add_argument("--sigma", type=float, default=2.0)
    n.set_defaults(func=cmd_norm)

    a = sub.add_parser("apply", help="apply a multiplier to a stored signal")
    a.add_argument("--kind", choices=["step", "fourier-step", "slope-step", "slope-fourier"], required=True)
    a.add_argument("--symbol", required=True)
    a.add_argument("--signal", required=True)
    a.add_argument("--out")
    a.add_argument("--matrix", help="write the operator's Gabor matrix as coordinate-list CSV")
    a.add_argument("--sigma", type=float, default=2.0)
    a.set_defaults(func=cmd_apply)

    p = sub.add_parser("product", help="multiply or convolve stored signals through their STFTs")
    p.add_argument("--kind", choices=["multiply", "convolve"], required=True)
    p.add_argument("--factors", nargs="+", required=True)
    p.add_argument("--windows", choices=["auto", "pair"], default="auto")
    p.add_argument("--out")
    p.add_argument("--report", help="write Gabor coefficients of the result as CSV")
    p.add_argument("--sigma", type=float, default=2.0)
    p.set_defaults(func=cmd_product)

    w = sub.add_parser("window-make", help="build and certify a window pair")
    w.add_argument("--sigma", type=float, default=2.0)
    w.add_argument("--grid", default="16,32")
    w.add_argument("--dim", type=int, default=1)
    w.add_argument("--out", required=True, help="path prefix for the _phi/_psi files")
    w.set_defaults(func=cmd_window_make)

    s = sub.add_parser("sample", help="sample a catalog signal to a file")
    s.add_argument("--descriptor", required=True, help='JSON, e.g. {"name": "gaussian", "width": 0.5}')
    s.add_argument("--grid", default="16,32")
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = parser().parse_args(argv)
    try:
        return args.func(args)
    except (cfgmod.ConfigError, io.FormatError, argparse.ArgumentTypeError, OSError, ValueError) as exc:
        print(f"modspace: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
