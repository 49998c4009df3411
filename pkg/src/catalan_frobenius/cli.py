"""Command-line front end.

Every subcommand prints a deterministic report (JSON with sorted keys and
exact-rational strings, or CSV for tables).  Exit status: 0 when every
requested verification passes, 1 when one fails, 2 on invalid input.

Defaults for any option may come from a JSON file given by ``--config``:
either a flat object or one keyed by subcommand name, e.g.
``{"verify-hirota": {"n_max": 2, "k": "-1,0,1"}}``.  The cache directory for
ancestor polynomials is taken from CATALAN_FROBENIUS_CACHE or ``--cache-dir``.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any, Callable, Sequence

import click

from . import __version__
from .cache import CACHE_ENV, load_potential
from .calibration import r_matrix, s_matrix
from .catalan import CatalanError, MapCountQuery, count_maps_bruteforce, verify_potential_against_maps
from .frobenius import FrobeniusError, format_point_report, make_point
from .givental import GiventalError
from .hirota import HirotaError, HqeInstance, verify_hqe
from .kdv import intersection_table
from .lax import LaxCaps, LaxError, TauFrame, lax_data, verify_nls, verify_toda
from .operators import OperatorError
from .periods import PeriodError, period_near_ui, period_special
from .series import SeriesError

SCHEMA_VERSION = 1
RESIDUE_CONVENTION = "res_{lambda=infinity} f dlambda = -[lambda^-1] f"

DOMAIN_ERRORS = (CatalanError, FrobeniusError, GiventalError, HirotaError, LaxError, OperatorError,
                 PeriodError, SeriesError, ZeroDivisionError)


# ---------------------------------------------------------------------------
# option parsing


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"not a rational number: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from exc


def _psi(text: str) -> Fraction | None:
    return None if str(text).strip().lower() == "symbolic" else _rational(str(text))


def _point(text: str) -> tuple[Fraction, Fraction]:
    parts = str(text).split(",")
    if len(parts) != 2:
        raise click.BadParameter("point must be 't1,t2'")
    return _rational(parts[0]), _rational(parts[1])


def _window(text: str) -> tuple[int, int]:
    vals = _int_list(text)
    if len(vals) != 2 or vals[0] > vals[1]:
        raise click.BadParameter("window must be 'min,max' with min ≤ max")
    return vals[0], vals[1]


def _flows(text: str) -> list[tuple[int, int]]:
    out = []
    for item in str(text).split(","):
        if not item.strip():
            continue
        try:
            a, l = item.split(":")
            out.append((int(a), int(l)))
        except ValueError as exc:
            raise click.BadParameter(f"flow must look like 'i:l', got {item!r}") from exc
    return out


def _fmt(x: Any) -> str:
    return str(x)


def _psi_label(psi: Fraction | None) -> str:
    return "symbolic" if psi is None else str(psi)


# ---------------------------------------------------------------------------
# report emission


class Verdict(Exception):
    """Carries the exit code of a finished verification."""

    def __init__(self, code: int) -> None:
        super().__init__(code)
        self.code = code


def _emit(ctx: click.Context, payload: Any, *, ok: bool | None = None, started: float | None = None) -> None:
    obj = ctx.find_root().obj
    if isinstance(payload, dict):
        payload = {"schema": SCHEMA_VERSION, "command": ctx.info_name, **payload}
        if ok is not None:
            payload["ok"] = ok
        if obj.get("timings") and started is not None:
            payload["seconds"] = f"{time.perf_counter() - started:.3f}"
        text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    else:
        text = payload
    out = obj.get("output")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    if ok is False:
        raise Verdict(1)


def _potential(ctx: click.Context, genus_max: int, chi_max: int, psi: Fraction | None):
    return load_potential(genus_max, chi_max, psi, ctx.find_root().obj.get("cache_dir"))


def _load_config(path: str | None, command: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise click.UsageError("config file must contain a JSON object")
    return data


class _Group(click.Group):
    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except Verdict as v:
            ctx.exit(v.code)
        except DOMAIN_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(2)


@click.group(cls=_Group, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="catalan-frobenius")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON file with option defaults (flat or keyed by subcommand).")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="Write the report here.")
@click.option("--cache-dir", default=None, envvar=CACHE_ENV, help=f"Ancestor cache directory [env: {CACHE_ENV}].")
@click.option("--timings/--no-timings", default=False, help="Include wall-clock seconds (breaks byte-identity).")
@click.option("--seed", default=0, show_default=True, type=int, help="Seed echoed in reports.")
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(1, 64), help="Worker processes.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, output: str | None, cache_dir: str | None,
         timings: bool, seed: int, jobs: int) -> None:
    """Exact computations and verifications for the Catalan Frobenius manifold."""
    data = _load_config(config_path, ctx.invoked_subcommand)
    nested = {k: v for k, v in data.items() if isinstance(v, dict)}
    flat = {k: v for k, v in data.items() if not isinstance(v, dict)}
    if ctx.invoked_subcommand:
        ctx.default_map = {ctx.invoked_subcommand: {**flat, **nested.get(ctx.invoked_subcommand, {})}}
    ctx.obj = {"output": output, "cache_dir": cache_dir, "timings": timings, "seed": seed, "jobs": jobs}


def _config_echo(ctx: click.Context, **values: Any) -> dict:
    obj = ctx.find_root().obj
    return {"config": {**{k: _jsonable(v) for k, v in values.items()}, "seed": obj["seed"]}}


def _jsonable(v: Any) -> Any:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


# ---------------------------------------------------------------------------
# data subcommands


@main.command()
@click.option("--point", default="0,1", show_default=True, help="Flat coordinates t1,t2 (t2 > 0).")
@click.pass_context
def frobenius(ctx: click.Context, point: str) -> None:
    """Structure constants, metrics and frames at a point."""
    t1, t2 = _point(point)
    _emit(ctx, {**_config_echo(ctx, point=[t1, t2]), "data": format_point_report(make_point(t1, t2))})


@main.command("s-matrix")
@click.option("--point", default="0,1", show_default=True)
@click.option("--order", default=8, show_default=True, type=click.IntRange(0, 64))
@click.option("--psi", default="0", show_default=True, help="Rational value or 'symbolic'.")
@click.pass_context
def s_matrix_cmd(ctx: click.Context, point: str, order: int, psi: str) -> None:
    """Calibration matrices S_0..S_K."""
    t1, t2 = _point(point)
    p = _psi(psi)
    table = s_matrix(make_point(t1, t2), order, p)
    _emit(ctx, {**_config_echo(ctx, point=[t1, t2], order=order, psi=_psi_label(p)), "data": table.to_json_obj()})


@main.command("r-matrix")
@click.option("--point", default="0,1", show_default=True)
@click.option("--order", default=8, show_default=True, type=click.IntRange(0, 64))
@click.pass_context
def r_matrix_cmd(ctx: click.Context, point: str, order: int) -> None:
    """R-matrix coefficients R_0..R_K in the normalized canonical frame."""
    t1, t2 = _point(point)
    table = r_matrix(make_point(t1, t2), order)
    _emit(ctx, {**_config_echo(ctx, point=[t1, t2], order=order), "data": table.to_json_obj()})


@main.command()
@click.option("--level", default=0, show_default=True, type=int)
@click.option("--rep", type=click.Choice(["closed", "infty", "u1", "u2"]), default="closed", show_default=True)
@click.option("--order", default=8, show_default=True, type=click.IntRange(0, 200))
@click.option("--label", default="1,0", show_default=True, help="Coefficients of the period label (expansions at ∞).")
@click.pass_context
def periods(ctx: click.Context, level: int, rep: str, order: int, label: str) -> None:
    """Period vectors at λ = ∞ or Puiseux expansions at a canonical coordinate."""
    if rep in ("u1", "u2"):
        data = period_near_ui(int(rep[1]), level, order).to_json_obj()
    else:
        lab = [_rational(x) for x in label.split(",")]
        if len(lab) != 2:
            raise click.BadParameter("label must have two components")
        data = period_special(level, order, lab, "closed" if rep == "closed" else "infty").to_json_obj()
    _emit(ctx, {**_config_echo(ctx, level=level, rep=rep, order=order, label=label),
                "residue_convention": RESIDUE_CONVENTION, "data": data})


@main.command()
@click.option("--genus-max", default=2, show_default=True, type=click.IntRange(0, 6))
@click.option("--n-max", default=3, show_default=True, type=click.IntRange(1, 8))
@click.pass_context
def intersections(ctx: click.Context, genus_max: int, n_max: int) -> None:
    """ψ-class intersection numbers as CSV rows (g, partition, value)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["g", "a", "value"])
    for (g, a), v in sorted(intersection_table(genus_max, n_max).items()):
        w.writerow([g, " ".join(map(str, a)), _fmt(v)])
    _emit(ctx, buf.getvalue())


@main.command()
@click.option("--genus", required=True, type=click.IntRange(0, 10))
@click.option("--profile", required=True, help="Polygon sizes k1,k2,...")
@click.pass_context
def catalan(ctx: click.Context, genus: int, profile: str) -> None:
    """Number of rooted genus-g gluings of the given polygons."""
    ks = _int_list(profile)
    _emit(ctx, f"{count_maps_bruteforce(MapCountQuery(genus, tuple(ks)))}\n")


def _slot_multisets(n: int, index_max: int) -> list[tuple[tuple[int, int], ...]]:
    slots = [(alpha, a) for a in range(index_max + 1) for alpha in (1, 2)]
    return list(combinations_with_replacement(sorted(slots), n))


@main.command()
@click.option("--genus-max", default=2, show_default=True, type=click.IntRange(0, 4))
@click.option("--n-max", default=2, show_default=True, type=click.IntRange(1, 6))
@click.option("--index-max", default=2, show_default=True, type=click.IntRange(0, 8))
@click.option("--psi", default="0", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.pass_context
def descendent(ctx: click.Context, genus_max: int, n_max: int, index_max: int, psi: str, fmt: str) -> None:
    """Coefficients of log 𝒟 in the shifted times t̂^α_a."""
    p = _psi(psi)
    chi = max(2 * g - 2 + n_max for g in range(genus_max + 1))
    D = _potential(ctx, genus_max, chi, p)
    rows = []
    for g in range(genus_max + 1):
        for n in range(1, n_max + 1):
            if 2 * g - 2 + n <= 0 and not (g == 0 and n in (1, 2)):
                continue
            for slots in _slot_multisets(n, index_max):
                c = D.coefficient(g, slots)
                if c:
                    mono = " ".join(f"t{alpha}_{a}" for alpha, a in slots)
                    rows.append({"genus": g, "monomial": mono, "value": str(c)})
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["genus", "monomial", "value"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _emit(ctx, buf.getvalue())
    else:
        _emit(ctx, {**_config_echo(ctx, genus_max=genus_max, n_max=n_max, index_max=index_max,
                                   psi=_psi_label(p)), "coefficients": rows})


# ---------------------------------------------------------------------------
# verification subcommands


@main.command("verify-theorem")
@click.option("--genus-max", default=2, show_default=True, type=click.IntRange(0, 3))
@click.option("--n-max", default=3, show_default=True, type=click.IntRange(1, 4))
@click.option("--k-max", default=5, show_default=True, type=click.IntRange(0, 8))
@click.option("--chi-max", default=3, show_default=True, type=click.IntRange(1, 6))
@click.pass_context
def verify_theorem(ctx: click.Context, genus_max: int, n_max: int, k_max: int, chi_max: int) -> None:
    """Compare t^1-coefficients of log 𝒟 with brute-force gluing counts."""
    started = time.perf_counter()
    chi = min(chi_max, max(2 * g - 2 + n_max for g in range(genus_max + 1)))
    D = _potential(ctx, genus_max, chi_max, Fraction(0))
    report = verify_potential_against_maps(genus_max, n_max, k_max, chi, potential=D)
    _emit(ctx, {**_config_echo(ctx, genus_max=genus_max, n_max=n_max, k_max=k_max, chi_max=chi),
                "report": report.to_json_obj()}, ok=report.ok, started=started)


def _hqe_worker(args: tuple[int, int, int, int, int, Fraction | None, str | None]) -> dict:
    k, n_max, degree_max, index_max, eps_max, psi, cache = args
    inst = HqeInstance(k, n_max, degree_max, index_max, eps_max, psi)
    D = load_potential(inst.genus_max, inst.chi_max, psi, cache)
    return verify_hqe(inst, D).to_json_obj()


@main.command("verify-hirota")
@click.option("--n-max", default=2, show_default=True, type=click.IntRange(0, 6))
@click.option("--k", "ks", default="-1,0,1", show_default=True, help="Comma-separated k values.")
@click.option("--degree-max", default=3, show_default=True, type=click.IntRange(0, 5))
@click.option("--index-max", default=1, show_default=True, type=click.IntRange(0, 3))
@click.option("--eps-window", default="-2,2", show_default=True, help="min,max powers of ε kept.")
@click.option("--psi", default="symbolic", show_default=True)
@click.pass_context
def verify_hirota(ctx: click.Context, n_max: int, ks: str, degree_max: int, index_max: int,
                  eps_window: str, psi: str) -> None:
    """Residues of the Hirota quadratic equations in the exact range."""
    started = time.perf_counter()
    k_values = _int_list(ks)
    lo, hi = _window(eps_window)
    p = _psi(psi)
    obj = ctx.find_root().obj
    tasks = [(k, n_max, degree_max, index_max, hi, p, obj["cache_dir"]) for k in k_values]
    if obj["jobs"] > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=obj["jobs"]) as pool:
            results = list(pool.map(_hqe_worker, tasks))
    else:
        results = [_hqe_worker(t) for t in tasks]
    ok = all(r["ok"] for r in results)
    _emit(ctx, {**_config_echo(ctx, n_max=n_max, k=k_values, degree_max=degree_max, index_max=index_max,
                               eps_window=[lo, hi], psi=_psi_label(p)),
                "residue_convention": RESIDUE_CONVENTION, "reports": results}, ok=ok, started=started)


def _lax_frame(ctx: click.Context, degree_max: int, eps_window: str, depth: int, psi: str) -> TauFrame:
    lo, hi = _window(eps_window)
    caps = LaxCaps.from_windows(degree_max, hi, depth, _psi(psi))
    return TauFrame(caps, _potential(ctx, caps.genus_max, caps.chi_max, caps.psi))


_lax_options: list[Callable] = [
    click.option("--degree-max", default=2, show_default=True, type=click.IntRange(0, 5)),
    click.option("--eps-window", default="-2,2", show_default=True),
    click.option("--depth", default=4, show_default=True, type=click.IntRange(3, 8),
                 help="Number of Λ^{±1} / D^{-1} orders kept."),
    click.option("--psi", default="symbolic", show_default=True),
]


def _with_lax_options(fn: Callable) -> Callable:
    for opt in reversed(_lax_options):
        fn = opt(fn)
    return fn


@main.command("verify-lax")
@click.option("--flows", default="1:0,1:1,2:0,2:1", show_default=True)
@_with_lax_options
@click.pass_context
def verify_lax(ctx: click.Context, flows: str, degree_max: int, eps_window: str, depth: int, psi: str) -> None:
    """Extended Toda: dressing, logarithm coefficients and Lax flows."""
    started = time.perf_counter()
    fl = tuple(_flows(flows))
    frame = _lax_frame(ctx, degree_max, eps_window, depth, psi)
    report = verify_toda(frame, fl)
    _emit(ctx, {**_config_echo(ctx, flows=[f"{a}:{l}" for a, l in fl], degree_max=degree_max,
                               eps_window=eps_window, depth=depth, psi=psi),
                "report": report.to_json_obj()}, ok=report.ok, started=started)


@main.command("verify-nls")
@click.option("--flows", default="1:0,1:1", show_default=True, help="Sato flows 1:ℓ to check.")
@_with_lax_options
@click.pass_context
def verify_nls_cmd(ctx: click.Context, flows: str, degree_max: int, eps_window: str, depth: int, psi: str) -> None:
    """Extended NLS: pseudo-differential Lax operator, Sato equations, flow commutativity."""
    started = time.perf_counter()
    fl = _flows(flows)
    if any(a != 1 for a, _ in fl):
        raise click.BadParameter("only flows of the form 1:ℓ are available here", param_hint="--flows")
    frame = _lax_frame(ctx, degree_max, eps_window, depth, psi)
    report = verify_nls(frame, tuple(l for _, l in fl))
    _emit(ctx, {**_config_echo(ctx, flows=[f"{a}:{l}" for a, l in fl], degree_max=degree_max,
                               eps_window=eps_window, depth=depth, psi=psi),
                "report": report.to_json_obj()}, ok=report.ok, started=started)


@main.command("lax-data")
@_with_lax_options
@click.pass_context
def lax_data_cmd(ctx: click.Context, degree_max: int, eps_window: str, depth: int, psi: str) -> None:
    """Dump v, u, φ, ρ as truncated series."""
    frame = _lax_frame(ctx, degree_max, eps_window, depth, psi)
    _emit(ctx, {**_config_echo(ctx, degree_max=degree_max, eps_window=eps_window, depth=depth, psi=psi),
                "data": lax_data(frame)})


def run(argv: Sequence[str] | None = None) -> int:
    """Entry point returning the exit code instead of exiting."""
    try:
        main.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return 2
    except click.exceptions.Abort:
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(run())
