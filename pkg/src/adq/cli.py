"""Command-line front end: ``adq verify | quantize | portrait | tables``.

Settings come from a JSON config file (``--config`` or ``$ADQ_CONFIG``) and
are overridden by flags.  Exit codes: 0 success, 1 failed check, 2 usage or
configuration error, 3 numerical convergence failure.
"""
from __future__ import annotations

import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import click
import numpy as np

from .checks import SUITES, CheckConfig, expected_kappa, run_suite
from .errors import ConvergenceError, DomainError
from .expr import compile_expression
from .geometry import OBSERVABLE_FUNCTIONS
from .grid import angular_count
from .portrait import PortraitConfig, kappa_constant, portrait_grid
from .quantizer import gamma_constant, parse_weight, quantize, quantizer, s_series

__all__ = ["RunConfig", "load_config", "main"]

EXIT_FAIL, EXIT_USAGE, EXIT_CONVERGENCE = 1, 2, 3
CONFIG_ENV = "ADQ_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    eta: float = 2.0
    dim: int = 40
    weight: str = "perelomov"
    weight2: str = "perelomov"
    radial_order: int = 64
    angular_points: int = 256
    out: str | None = None
    format: str = "json"
    seed: int = 0

    def validate(self) -> "RunConfig":
        if not self.eta > 0.5:
            raise DomainError(f"eta must exceed 1/2, got {self.eta}")
        if self.dim < 2:
            raise DomainError(f"dim must be at least 2, got {self.dim}")
        if self.radial_order < 1 or self.angular_points < 1:
            raise DomainError("grid orders must be positive")
        if self.format not in ("csv", "json"):
            raise DomainError(f"format must be csv or json, got {self.format!r}")
        for w in (self.weight, self.weight2):
            parse_weight(w, self.eta)
        return self


_FIELD_TYPES = {"eta": float, "dim": int, "radial_order": int, "angular_points": int, "seed": int}


def load_config(path: str | None) -> dict:
    """Read a JSON config; unknown keys are an error."""
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise DomainError("config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(unknown)}")
    out = {}
    for k, v in data.items():
        cast = _FIELD_TYPES.get(k)
        try:
            out[k] = cast(v) if cast and v is not None else v
        except (TypeError, ValueError) as exc:
            raise DomainError(f"config key {k!r}: {exc}") from exc
    return out


def _resolve(ctx: click.Context, flags: dict) -> RunConfig:
    path = flags.pop("config", None) or os.environ.get(CONFIG_ENV) or None
    base = load_config(path)
    base.update({k: v for k, v in flags.items() if v is not None})
    return RunConfig(**base).validate()


def _common(fn):
    opts = [
        click.option("--eta", type=float, help="Lowest weight of the representation (default 2)."),
        click.option("--dim", type=int, help="Truncation dimension N (default 40)."),
        click.option("--weight", help="Analysis weight: power:s, perelomov, projector:m, half, custom:file.json."),
        click.option("--weight2", help="Reconstruction weight for portraits."),
        click.option("--radial-order", "radial_order", type=int, help="Radial quadrature order (default 64)."),
        click.option("--angular-points", "angular_points", type=int, help="Angular nodes (default 256)."),
        click.option("--out", type=click.Path(dir_okay=True), help="Output file (stdout if omitted)."),
        click.option("--format", "format", type=click.Choice(["csv", "json"]), help="Output format."),
        click.option("--seed", type=int, help="Seed for randomized checks."),
        click.option("--config", type=click.Path(), help=f"JSON config file (default ${CONFIG_ENV})."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _run(fn):
    """Translate library errors into exit codes."""
    try:
        return fn()
    except ConvergenceError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONVERGENCE)
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)


def _observable(name: str, singular_order: float | None):
    if name in OBSERVABLE_FUNCTIONS:
        return OBSERVABLE_FUNCTIONS[name], 1.0 if singular_order is None else singular_order
    if name.startswith("custom:"):
        return compile_expression(name[len("custom:") :]), 0.0 if singular_order is None else singular_order
    raise DomainError(f"unknown observable {name!r}; use one of {sorted(OBSERVABLE_FUNCTIONS)} or custom:EXPR")


@click.group()
def main():
    """Weight-based quantization on the disk: checks, matrices, portraits and tables."""


@main.command()
@click.argument("suite", type=click.Choice(SUITES + ("all",)))
@_common
@click.pass_context
def verify(ctx, suite, **flags):
    """Run a verification suite and report every check."""

    def go():
        cfg = _resolve(ctx, flags)
        ccfg = CheckConfig(cfg.eta, cfg.dim, cfg.weight, cfg.weight2, cfg.radial_order, angular_count(cfg.angular_points), cfg.seed)
        results = run_suite(suite, ccfg)
        rows = [r.as_dict() for r in results]
        if cfg.format == "csv":
            text = _csv(rows, ["name", "ref", "measured", "tolerance", "status", "detail"])
        else:
            text = _json({"suite": suite, "config": asdict(ccfg), "checks": rows})
        _emit(text, cfg.out)
        if any(r.status == "error" for r in results):
            return EXIT_CONVERGENCE
        return 0 if all(r.passed for r in results) else EXIT_FAIL

    sys.exit(_run(go))


@main.command("quantize")
@click.argument("observable")
@_common
@click.option("--singular-order", type=float, default=None, help="Growth order q of the observable at the edge.")
@click.pass_context
def quantize_cmd(ctx, observable, singular_order, **flags):
    """Quantize OBSERVABLE (k0, k1, k2, kplus, kminus or custom:EXPR in z)."""

    def go():
        cfg = _resolve(ctx, flags)
        f, q_order = _observable(observable, singular_order)
        q = quantizer(cfg.eta, cfg.weight, cfg.dim)
        res = quantize(
            q, f, cfg.dim, singular_order=q_order,
            radial_order=cfg.radial_order, angular_points=angular_count(cfg.angular_points),
        )
        A = res.operator.matrix
        gamma = None
        if cfg.eta > 1:
            try:
                gamma = gamma_constant(cfg.eta, q)
            except ConvergenceError:
                gamma = None
        meta = {
            "eta": cfg.eta,
            "N": cfg.dim,
            "weight": q.weight.label,
            "observable": observable,
            "gamma": gamma,
            "error_estimate": res.error_estimate,
        }
        if cfg.format == "csv":
            rows = [
                {"i": i, "j": j, "re": float(A[i, j].real), "im": float(A[i, j].imag)}
                for i in range(A.shape[0])
                for j in range(A.shape[1])
            ]
            text = "".join(f"# {k}: {_fmt(v)}\n" for k, v in sorted(meta.items())) + _csv(rows, ["i", "j", "re", "im"])
        else:
            text = _json({**meta, "real": A.real.tolist(), "imag": A.imag.tolist()})
        _emit(text, cfg.out)
        return 0

    sys.exit(_run(go))


@main.command("portrait")
@click.argument("observable")
@_common
@click.option("--radii", type=int, default=5, show_default=True, help="Radial samples on (0, rmax].")
@click.option("--angles", type=int, default=8, show_default=True, help="Angular samples.")
@click.option("--rmax", type=float, default=0.8, show_default=True, help="Largest sampled radius.")
@click.option("--singular-order", type=float, default=None, help="Growth order q of the observable at the edge.")
@click.pass_context
def portrait_cmd(ctx, observable, radii, angles, rmax, singular_order, **flags):
    """Sample the portrait of OBSERVABLE on a polar grid."""

    def go():
        cfg = _resolve(ctx, flags)
        if not 0 < rmax < 1 or radii < 1 or angles < 1:
            raise DomainError("need 0 < rmax < 1 and positive sample counts")
        f, q_order = _observable(observable, singular_order)
        pc = PortraitConfig(cfg.eta, cfg.weight, cfg.weight2, cfg.dim, cfg.radial_order, angular_count(min(cfg.angular_points, 64)))
        rs = rmax * np.arange(1, radii + 1) / radii
        zs, vals = portrait_grid(f, pc, rs, angles, singular_order=q_order)
        rows = [
            {"re_z": float(z.real), "im_z": float(z.imag), "re_f": float(v.real), "im_f": float(v.imag)}
            for z, v in zip(zs, vals)
        ]
        if cfg.format == "csv":
            text = _csv(rows, ["re_z", "im_z", "re_f", "im_f"])
        else:
            text = _json({"eta": cfg.eta, "w1": pc.w1.label, "w2": pc.w2.label, "observable": observable, "samples": rows})
        _emit(text, cfg.out)
        return 0

    sys.exit(_run(go))


def _tables(cfg: RunConfig) -> dict[str, tuple[list[str], list[dict]]]:
    eta = cfg.eta
    n_cols = min(cfg.dim, 8)
    # quantizer diagonals along the power family, across the positivity boundary s = eta + 1
    diag_rows = []
    for s in np.round(np.arange(1.25, eta + 2 + 1e-9, 0.25), 12):
        q = quantizer(eta, f"power:{s}", max(cfg.dim, 2))
        d = q.diagonal(cfg.dim)
        row = {"eta": eta, "s": float(s), "positive": bool(np.all(d >= -1e-15))}
        row.update({f"M{n}": float(d[n]) for n in range(n_cols)})
        diag_rows.append(row)
    diag_cols = ["eta", "s", "positive"] + [f"M{n}" for n in range(n_cols)]

    gamma_rows = []
    for e in (1.5, 2.0, 3.0):
        powers = sorted({1.75, 2.0, 2.5, e + 1})
        labels = ["half"] + [f"projector:{m}" for m in range(4)] + [f"power:{s:g}" for s in powers]
        for lab in labels:
            q = quantizer(e, lab, 8)
            S, err = s_series(q)
            gamma_rows.append({"eta": e, "weight": lab, "S": S, "S_error": err, "gamma": gamma_constant(e, q)})
    gamma_cols = ["eta", "weight", "S", "S_error", "gamma"]

    kappa_rows = []
    for e in (1.5, 2.0, 3.0):
        pc = PortraitConfig(e, "perelomov", "perelomov", 20, cfg.radial_order, 64)
        kappa = kappa_constant(pc)
        kappa_rows.append({
            "eta": e,
            "w1": "perelomov",
            "w2": "perelomov",
            "kappa": kappa,
            "kappa_from_moments": expected_kappa(e, s_series(pc.q1)[0], s_series(pc.q2)[0]),
        })
    kappa_cols = ["eta", "w1", "w2", "kappa", "kappa_from_moments"]
    return {
        "diagonals": (diag_cols, diag_rows),
        "gamma": (gamma_cols, gamma_rows),
        "kappa": (kappa_cols, kappa_rows),
    }


@main.command()
@_common
@click.pass_context
def tables(ctx, **flags):
    """Tabulate quantizer diagonals and the constants gamma and kappa.

    With ``--format csv`` and ``--out DIR`` one file per table is written.
    """

    def go():
        cfg = _resolve(ctx, flags)
        tabs = _tables(cfg)
        if cfg.format == "json":
            _emit(_json({name: rows for name, (_, rows) in tabs.items()}), cfg.out)
            return 0
        if cfg.out is not None:
            outdir = Path(cfg.out)
            outdir.mkdir(parents=True, exist_ok=True)
            for name, (cols, rows) in tabs.items():
                (outdir / f"{name}.csv").write_text(_csv(rows, cols))
        else:
            click.echo("".join(f"# table: {name}\n{_csv(rows, cols)}" for name, (cols, rows) in tabs.items()), nl=False)
        return 0

    sys.exit(_run(go))


if __name__ == "__main__":
    main()
