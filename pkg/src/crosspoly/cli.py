"""Command-line entry point.

Exit status: 0 on success, 1 when an identity check fails, 2 for invalid
input, 3 when a computation cannot reach the requested precision.
"""

import argparse
import json
import sys
from pathlib import Path

from mpmath import mp

from . import __version__
from .errors import ConfigurationError, CrossPolyError, ValidationError
from .geometry import BUILTINS, CrossGeometry, builtin_weight, load_weight
from .precision import DEFAULT_DIRECT_PREC, DEFAULT_SURFACE_PREC, ENV_VAR, env_prec

CONFIG_KEYS = {
    "a", "b", "weight", "builtin", "n", "n_min", "n_max", "prec", "epsilon", "order", "grid", "out", "format",
}
DEFAULTS = {"a": 1.0, "b": 1.0, "epsilon": 0.1, "order": 0, "grid": "default", "format": None}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys mirror the flags")
    common.add_argument("--a", type=float, help="half-length of the real arm")
    common.add_argument("--b", type=float, help="half-length of the imaginary arm")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--weight", help="weight-spec JSON file")
    src.add_argument("--builtin", choices=BUILTINS, help="builtin weight")
    common.add_argument("--n", help="index or comma-separated list of indices")
    common.add_argument("--n-min", type=int, dest="n_min")
    common.add_argument("--n-max", type=int, dest="n_max")
    common.add_argument("--prec", type=int, help=f"working precision in bits (default from {ENV_VAR})")
    common.add_argument("--epsilon", type=float, help="threshold of the allowable-index filter")
    common.add_argument("--order", type=int, choices=(0, 1), help="order of the asymptotic prediction")
    common.add_argument("--grid", help="'default', 'circle:COUNT:RADIUS' or a grid JSON file")
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--format", choices=("json", "csv", "text"))

    parser = argparse.ArgumentParser(prog="crosspoly", description="Orthogonal polynomials on a cross.")
    parser.add_argument("--version", action="version", version=f"crosspoly {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("periods", "period B, K+, K- and the omega/tau self-check"),
        ("szego", "c_rho, nu, S at infinity and the special points z_k"),
        ("direct", "coefficients of Q_n from the moments"),
        ("predict", "asymptotic Q_n on a grid"),
        ("compare", "direct versus predicted Q_n"),
        ("pade", "Pade poles near the special points"),
        ("identities", "theta-function identity residuals"),
    ]:
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def resolve_config(args):
    """Merge defaults, the optional config file and the flags (flags win)."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}", module="cli") from exc
        if not isinstance(data, dict):
            raise ConfigurationError("config file must hold a mapping", module="cli")
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}", module="cli")
        cfg.update(data)
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if args.weight is not None:
        cfg.pop("builtin", None)
    if args.builtin is not None:
        cfg.pop("weight", None)
    if cfg.get("weight") and cfg.get("builtin"):
        raise ConfigurationError("give either a weight file or a builtin, not both", module="cli")
    cfg["n_list"] = _n_list(cfg)
    return cfg


def _n_list(cfg):
    n = cfg.get("n")
    if n is not None:
        items = n if isinstance(n, list) else str(n).split(",")
        try:
            out = [int(x) for x in items]
        except ValueError as exc:
            raise ConfigurationError(f"bad index list {n!r}", module="cli") from exc
    elif cfg.get("n_min") is not None or cfg.get("n_max") is not None:
        lo = int(cfg.get("n_min") or 1)
        hi = int(cfg.get("n_max") or lo)
        out = list(range(lo, hi + 1))
    else:
        return []
    if any(k < 0 for k in out):
        raise ConfigurationError("indices must be non-negative", module="cli")
    return out


def precisions(cfg):
    if cfg.get("prec") is not None:
        p = int(cfg["prec"])
        if p < 32:
            raise ConfigurationError("precision must be at least 32 bits", module="cli")
        return p, p
    return env_prec(DEFAULT_SURFACE_PREC), env_prec(DEFAULT_DIRECT_PREC)


def load_spec(cfg):
    if cfg.get("weight"):
        return load_weight(cfg["weight"], cfg["a"], cfg["b"])
    if cfg.get("builtin"):
        return builtin_weight(cfg["builtin"], cfg["a"], cfg["b"])
    raise ConfigurationError("this command needs --weight or --builtin", module="cli")


def _need_n(cfg):
    if not cfg["n_list"]:
        raise ConfigurationError("this command needs --n or --n-min/--n-max", module="cli")
    return cfg["n_list"]


def _c(x):
    x = complex(x)
    return [x.real, x.imag]


def fmt_coeff(x, chop):
    """Short decimal for a coefficient; parts below ``chop`` print as 0."""
    re, im = mp.re(x), mp.im(x)
    re = 0 if abs(re) <= chop else re
    im = 0 if abs(im) <= chop else im

    def one(v):
        if v == 0:
            return "0"
        s = mp.nstr(v, 15)
        return s[:-2] if s.endswith(".0") else s

    if im == 0:
        return one(re)
    if re == 0:
        return one(im) + "j"
    sign = "+" if im > 0 else "-"
    return f"{one(re)}{sign}{one(abs(im))}j"


def emit(cfg, payload, text=None):
    """Write ``payload`` as JSON, or ``text`` when there is one and no format was asked for."""
    fmt = cfg.get("format")
    body = text if (text is not None and fmt in (None, "text")) else payload
    if not isinstance(body, str):
        body = json.dumps(body, indent=2, sort_keys=True)
    if cfg.get("out"):
        Path(cfg["out"]).write_text(body + "\n")
    else:
        print(body)


# --- commands ---------------------------------------------------------------

def cmd_periods(cfg):
    from .surface import compute_periods

    sp, _ = precisions(cfg)
    ctx = compute_periods(CrossGeometry(cfg["a"], cfg["b"]), sp)
    with mp.workprec(sp):
        vals = {
            "B": ctx.B, "K+": ctx.Kplus, "K-": ctx.Kminus, "alpha_period": ctx.alpha_period,
            "omega": ctx.omega, "tau": ctx.tau,
        }
        text = "\n".join(f"{k} = {mp.nstr(v, 20)}" for k, v in vals.items())
    emit(cfg, {k: _c(v) for k, v in vals.items()}, text)
    return 0


def cmd_szego(cfg):
    from .asym import AsymptoticModel

    sp, _ = precisions(cfg)
    model = AsymptoticModel(load_spec(cfg), prec=sp, epsilon=cfg["epsilon"])
    with mp.workprec(sp):
        info = {
            "c_rho": _c(model.c_rho),
            "nu": _c(model.nu),
            "S_infinity": _c(model.S_inf),
            "z_k": [
                {"point": z.point.label(), "l": z.l, "m": z.m, "sigma": model.sigma[k]} for k, z in enumerate(model.zk)
            ],
            "d_exponent": model.d_exponent,
            "allowable_up_to_20": model.allowable_indices(n_max=20),
        }
        text = "\n".join(
            [
                f"c_rho = {mp.nstr(model.c_rho, 20)}",
                f"nu = {mp.nstr(model.nu, 20)}",
                f"S(inf^(0)) = {mp.nstr(model.S_inf, 20)}",
            ]
            + [f"z_{k} = {z.point.label()}  (l, m) = ({z.l}, {z.m})" for k, z in enumerate(model.zk)]
        )
    emit(cfg, info, text)
    return 0


def cmd_direct(cfg):
    from .direct import direct_Qn, solution_to_dict

    _, dp = precisions(cfg)
    spec = load_spec(cfg)
    for n in _need_n(cfg):
        sol = direct_Qn(spec, n, dp)
        with mp.workprec(dp):
            scale = max(abs(c) for c in sol.coeffs)
            chop = scale * max(mp.mpf(10) ** (-(int(dp * 0.30103) // 2)), 100 * mp.mpf(sol.error_estimate or 0))
            print(" ".join(fmt_coeff(c, chop) for c in sol.padded()))
        if cfg.get("out"):
            data = solution_to_dict(sol)
            path = Path(cfg["out"])
            if len(cfg["n_list"]) > 1:
                path = path.with_name(f"{path.stem}_n{n}{path.suffix}")
            path.write_text(json.dumps(data, indent=2) + "\n")
    return 0


def cmd_predict(cfg):
    from .asym import AsymptoticModel
    from .harness import parse_grid

    sp, _ = precisions(cfg)
    spec = load_spec(cfg)
    model = AsymptoticModel(spec, prec=sp, epsilon=cfg["epsilon"])
    grid = parse_grid(cfg["grid"], spec.geometry)
    rows = []
    for n in _need_n(cfg):
        for z in grid.interior:
            v = model.predict_Q(n, z, cfg["order"])
            rows.append({"n": n, "z": _c(z), "predicted": _c(v)})
    if cfg["format"] == "csv":
        lines = ["n,re z,im z,re predicted,im predicted"]
        lines += [f"{r['n']},{r['z'][0]!r},{r['z'][1]!r},{r['predicted'][0]!r},{r['predicted'][1]!r}" for r in rows]
        emit(cfg, "\n".join(lines))
    else:
        emit(cfg, {"weight": spec.name, "order": cfg["order"], "rows": rows})
    return 0


def cmd_compare(cfg):
    import io

    from .asym import AsymptoticModel
    from .harness import parse_grid, run_comparison, write_rows

    sp, dp = precisions(cfg)
    spec = load_spec(cfg)
    model = AsymptoticModel(spec, prec=sp, epsilon=cfg["epsilon"])
    requested = _need_n(cfg)
    allowed = [n for n in requested if n >= 1 and model.is_allowable(n)]
    skipped = sorted(set(requested) - set(allowed))
    if not allowed:
        raise ConfigurationError("no allowable index in the requested range", module="cli", skipped=skipped)
    orders = (0, 1) if cfg["order"] == 1 else (0,)
    report = run_comparison(
        spec, allowed, parse_grid(cfg["grid"], spec.geometry), orders, sp, dp, model=model
    )
    if skipped:
        report.notes.append(f"skipped non-allowable indices {skipped}")
    if cfg["format"] == "csv":
        buf = io.StringIO()
        write_rows(buf, report.rows)
        emit(cfg, buf.getvalue().rstrip("\n"))
    else:
        emit(cfg, report.to_dict())
    return 0


def cmd_pade(cfg):
    from dataclasses import asdict

    from .asym import AsymptoticModel
    from .harness import pade_pole_tracker

    sp, dp = precisions(cfg)
    spec = load_spec(cfg)
    model = AsymptoticModel(spec, prec=sp, epsilon=cfg["epsilon"])
    table = pade_pole_tracker(spec, _need_n(cfg), dp, model=model)
    rows = [
        {k: (_c(v) if isinstance(v, complex) else v) for k, v in asdict(r).items()} for r in table["rows"]
    ]
    emit(cfg, {"status": table["status"], "rows": rows})
    return 0


def cmd_identities(cfg):
    from .identities import run_identities

    sp, _ = precisions(cfg)
    spec = load_spec(cfg) if (cfg.get("weight") or cfg.get("builtin")) else None
    results = run_identities(cfg["a"], cfg["b"], sp, spec)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.name:<{width}}  {r.residual:.3e}  {'ok' if r.ok else 'FAIL'}")
    if cfg.get("out"):
        Path(cfg["out"]).write_text(json.dumps([r.as_dict() for r in results], indent=2) + "\n")
    return 0 if all(r.ok for r in results) else 1


COMMANDS = {
    "periods": cmd_periods,
    "szego": cmd_szego,
    "direct": cmd_direct,
    "predict": cmd_predict,
    "compare": cmd_compare,
    "pade": cmd_pade,
    "identities": cmd_identities,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ValidationError as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return 2
    except CrossPolyError as exc:
        print(f"precision failure [{exc.module}]: {exc}", file=sys.stderr)
        if exc.details:
            print(f"  details: {exc.details}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
