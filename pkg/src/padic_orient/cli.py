"""Command-line front end.

Exit codes: 0 success with all checks passing, 1 a check failed, 2 usage or
configuration error.  JSON output is key-sorted and timestamp-free, so equal
inputs give byte-identical reports.
"""
from __future__ import annotations

import argparse
import json
import sys

from .cache import DiskCache
from .chars import parse_character
from .config import RunConfig, load_basis, load_config
from .eisenstein import NORMALIZATION, eisenstein_chi
from .errors import OrientError, ParameterError
from .measures import (
    eisenstein_moments,
    j_tilde_moment,
    kummer_check_units,
    kummer_check_zp,
    mean_target,
    mean_via_limit,
    moments_j_tilde,
    moments_mu,
    moments_nu_bar,
    mu_moment,
    nu_bar_moment,
    run_ring,
)
from .opcheck import battery
from .orientation import (
    characteristic_series,
    fgl_exponential,
    genus_cpn,
    saturating_increase,
    verify_conditions,
)
from .qseries import QExpansion

MEASURES = ("H", "Jtilde", "NuBar", "Mu")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output


def _render_text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        if all(isinstance(x, dict) for x in obj):
            for x in obj:
                head = x.get("name") or ", ".join(f"{k}={x[k]}" for k in ("c", "k", "p", "N") if k in x)
                status = x.get("pass")
                mark = "" if status is None else ("PASS " if status else "FAIL ")
                lines.append(f"{pad}- {mark}{head}")
                rest = {k: v for k, v in x.items() if k not in ("name", "pass")}
                lines.extend(_render_text(rest, indent + 2))
        else:
            lines.append(f"{pad}{obj}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def _emit(report: dict, args) -> None:
    if args.format == "text":
        text = "\n".join(_render_text(report)) + "\n"
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cache(args):
    if getattr(args, "no_cache", False):
        return None
    return DiskCache(getattr(args, "cache_dir", None))


def _parse_inject(s: str | None) -> dict | None:
    if not s:
        return None
    out = {}
    for part in s.split(","):
        key, _, val = part.partition("=")
        if key not in ("k", "n", "delta") or not val:
            raise UsageError(f"bad --inject-error item {part!r}; expected k=..[,n=..][,delta=..]")
        try:
            out[key] = int(val)
        except ValueError:
            raise UsageError(f"bad --inject-error value {part!r}") from None
    if "k" not in out:
        raise UsageError("--inject-error needs k=")
    return out


def _config(args, **extra) -> RunConfig:
    over = {
        "p": args.p, "N": args.N, "chi": args.chi, "K": args.K, "Q": args.Q, "M": args.M,
        "r_max": getattr(args, "rmax", None), "D": getattr(args, "D", None),
        "a": getattr(args, "a", None), "b": getattr(args, "b", None),
        "c": getattr(args, "c", None), "cache_dir": getattr(args, "cache_dir", None),
    }
    over.update(extra)
    return load_config(getattr(args, "config", None), over)


# ---------------------------------------------------------------------------
# subcommands


def cmd_eisen(args) -> int:
    chi = parse_character(args.chi) if args.chi else parse_character(f"{args.N or 1}:0")
    if args.N is not None and args.N != chi.modulus:
        raise UsageError(f"--N {args.N} does not match character {chi.name}")
    ring = chi.natural_ring()
    if args.M is not None:
        if args.p is None:
            raise UsageError("--M needs --p")
        ring = run_ring(chi, args.p, args.M)
    f = eisenstein_chi(args.k, chi, args.Q, ring, _cache(args))
    report = {
        "params": {"k": args.k, "chi": chi.name, "N": chi.modulus, "Q": args.Q, "p": args.p, "M": args.M},
        "normalization": NORMALIZATION,
        "series": f.to_json(),
    }
    if all(not any(c.c[1:]) for c in f.coeffs):
        report["coeffs"] = [str(c.c[0]) for c in f.coeffs]
    _emit(report, args)
    return 0


def cmd_ops_verify(args) -> int:
    report = battery(primes=tuple(args.primes), levels=tuple(args.levels), n_forms=args.forms,
                     Q=args.Q, M=args.M, seed=args.seed)
    _emit(report, args)
    return 0 if report["pass"] else 1


def _build_measure(cfg: RunConfig, which: str, restricted: bool, c: int, cache=None):
    chi = cfg.character
    if which == "H":
        a = cfg.a if cfg.a is not None else c
        return eisenstein_moments(chi, a, cfg.b, cfg.K, cfg.Q, cfg.M, cfg.p, restricted, cache)
    if restricted:
        raise UsageError("--restricted only applies to the H measure")
    if which == "Jtilde":
        return moments_j_tilde(chi, c, cfg.K, cfg.Q, cfg.M, cfg.p)
    if which == "NuBar":
        return moments_nu_bar(c, cfg.K, cfg.Q, cfg.M, cfg.p, chi)
    return moments_mu(chi, c, cfg.K, cfg.Q, cfg.M, cfg.p)


def cmd_measure(args) -> int:
    cfg = _config(args).validate(need_odd_p=args.measure in ("NuBar", "Mu"),
                                 need_odd=args.measure == "Mu")
    inject = _parse_inject(args.inject_error)
    cache = _cache(args)
    params = dict(cfg.echo(), measure=args.measure, restricted=args.restricted)
    params.pop("D")
    checks, valuations, moments = [], [], {}
    plot_series = {}
    for c in cfg.c:
        if args.action == "mean":
            entry = _mean(cfg, args.measure, c)
            valuations.append(entry)
            plot_series[f"c={c}"] = entry["valuations"]
            if entry["pass"] is not None:
                checks.append({"name": f"mean_limit_c{c}", "pass": entry["pass"], "witness": entry.get("witness")})
            continue
        b = _build_measure(cfg, args.measure, args.restricted, c, cache)
        if inject:
            b = b.perturbed(inject["k"], inject.get("n", 0), inject.get("delta", 1))
        if args.action == "moments":
            moments[f"c={c}"] = b.to_json()
            continue
        if b.domain == "Zp":
            rep = kummer_check_zp(b)
            plot_series[f"c={c}"] = rep["slack"]
        else:
            rep = kummer_check_units(b)
        rep["c"] = c
        checks.append(rep)
        if args.measure == "H" and cfg.a is not None:
            break
    report = {"params": params, "checks": checks, "valuations": valuations}
    if moments:
        report["moments"] = moments
    if args.plot and plot_series:
        from .plotting import plot_valuations

        if args.action == "mean":
            plot_valuations(plot_series, args.plot, title=f"mean of {args.measure}: v_p(m_r - target)",
                            cap=cfg.M)
        else:
            plot_valuations(plot_series, args.plot, title="Mahler divisibility slack", xlabel="m",
                            ylabel="achieved minus required valuation")
        report["plot"] = args.plot
    _emit(report, args)
    return 0 if all(ch["pass"] for ch in checks) else 1


def _mean(cfg: RunConfig, which: str, c: int) -> dict:
    chi = cfg.character
    ring = run_ring(chi, cfg.p, cfg.M)
    Q, M, p = cfg.Q, cfg.M, cfg.p
    if which == "Jtilde":
        gen, target = (lambda k: j_tilde_moment(chi, c, k, Q, ring)), 0
    elif which == "NuBar":
        gen, target = (lambda k: nu_bar_moment(c, k, Q, ring)), mean_target(c, p, M)
    elif which == "Mu":
        gen, target = (lambda k: mu_moment(chi, c, k, Q, ring)), mean_target(c, p, M)
    else:
        raise UsageError("mean is defined for Jtilde, NuBar and Mu")
    ml = mean_via_limit(gen, p, M, Q, cfg.r_max)
    t = QExpansion.constant(ring, target, Q)
    vals = [min((m - t).valuation(), M) for m in ml.approximations]
    if which == "Jtilde":
        ok = all(v >= min(r, M) for r, v in enumerate(vals))
    else:
        ok = saturating_increase(vals, M)
    return {
        "c": c,
        "target": target,
        "exponents": list(ml.exponents),
        "valuations": vals,
        "difference_valuations": [min(v, M) for v in ml.difference_valuations],
        "pass": ok,
    }


def cmd_orient_verify(args) -> int:
    cfg = _config(args).validate(need_odd=True, need_odd_p=True)
    inject = _parse_inject(args.inject_error)
    report = verify_conditions(cfg.character, cfg.c, cfg.K, cfg.Q, cfg.M, cfg.r_max, cfg.p,
                               basis=load_basis(cfg), inject=inject).to_json()
    if args.plot:
        from .plotting import plot_valuations

        series = {f"c={x['c']}": x["valuations"] for x in report["conditions"]["c2"]}
        plot_valuations(series, args.plot, title="mean limit: v_p(m_r - target)", cap=cfg.M)
        report["plot"] = args.plot
    if inject:
        report["params"]["inject_error"] = inject
    _emit(report, args)
    return 0 if report["overall"] else 1


def _series_json(s) -> list:
    return [c.to_json() for c in s.coeffs]


def cmd_orient_charseries(args) -> int:
    chi = parse_character(args.chi)
    K = characteristic_series(chi, args.D, args.Q)
    exp_f, log_f = fgl_exponential(K)
    report = {
        "params": {"chi": chi.name, "D": args.D, "Q": args.Q},
        "K": _series_json(K),
        "exp_F": _series_json(exp_f),
        "log_F": _series_json(log_f),
    }
    _emit(report, args)
    return 0


def cmd_orient_genus(args) -> int:
    chi = parse_character(args.chi)
    D = max(args.D, args.n, 2)
    K = characteristic_series(chi, D, args.Q)
    report = {
        "params": {"chi": chi.name, "n": args.n, "D": D, "Q": args.Q},
        "genus": genus_cpn(K, args.n).to_json(),
    }
    _emit(report, args)
    return 0


def cmd_cache(args) -> int:
    cache = DiskCache(args.cache_dir)
    if args.action == "clear":
        report = {"removed": cache.clear(), "root": str(cache.root)}
    else:
        report = cache.stat()
    _emit(report, args)
    return 0


# ---------------------------------------------------------------------------
# parser


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")


def _run_params(p: argparse.ArgumentParser, with_measure: bool = True):
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--p", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--chi")
    p.add_argument("--c", type=_int_list, help="unit(s) c, comma separated")
    p.add_argument("--K", type=int)
    p.add_argument("--Q", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--rmax", type=int)
    p.add_argument("--cache-dir")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--inject-error", help="perturb one moment: k=3[,n=0][,delta=1]")
    p.add_argument("--plot", help="render a valuation plot to this file")
    if with_measure:
        p.add_argument("--a", type=int)
        p.add_argument("--b", type=int)
        p.add_argument("--restricted", action="store_true")
        p.add_argument("--measure", choices=MEASURES, default="H")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padic-orient", description="Eisenstein measures and orientation checks")
    sub = ap.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eisen", help="q-expansion of G_k^chi")
    _common(e)
    e.add_argument("--p", type=int)
    e.add_argument("--M", type=int)
    e.add_argument("--N", type=int)
    e.add_argument("--chi")
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--Q", type=int, default=16)
    e.add_argument("--cache-dir")
    e.add_argument("--no-cache", action="store_true")
    e.set_defaults(func=cmd_eisen)

    o = sub.add_parser("ops", help="operator identities")
    osub = o.add_subparsers(dest="action", required=True)
    ov = osub.add_parser("verify")
    _common(ov)
    ov.add_argument("--primes", type=_int_list, default=[3, 5, 7])
    ov.add_argument("--levels", type=_int_list, default=[3, 5])
    ov.add_argument("--forms", type=int, default=50)
    ov.add_argument("--Q", type=int, default=32)
    ov.add_argument("--M", type=int, default=8)
    ov.add_argument("--seed", type=int, default=0)
    ov.set_defaults(func=cmd_ops_verify)

    m = sub.add_parser("measure", help="moment sequences, Kummer checks, means")
    msub = m.add_subparsers(dest="action", required=True)
    for name in ("moments", "kummer", "mean"):
        mp = msub.add_parser(name)
        _common(mp)
        _run_params(mp)
        mp.set_defaults(func=cmd_measure)

    r = sub.add_parser("orient", help="orientation checks")
    rsub = r.add_subparsers(dest="action", required=True)
    rv = rsub.add_parser("verify")
    _common(rv)
    _run_params(rv, with_measure=False)
    rv.set_defaults(func=cmd_orient_verify)
    rc = rsub.add_parser("charseries")
    _common(rc)
    rc.add_argument("--chi", default="3:quad")
    rc.add_argument("--D", type=int, default=8)
    rc.add_argument("--Q", type=int, default=16)
    rc.set_defaults(func=cmd_orient_charseries)
    rg = rsub.add_parser("genus")
    _common(rg)
    rg.add_argument("--chi", default="3:quad")
    rg.add_argument("--n", type=int, required=True)
    rg.add_argument("--D", type=int, default=8)
    rg.add_argument("--Q", type=int, default=16)
    rg.set_defaults(func=cmd_orient_genus)

    c = sub.add_parser("cache", help="disk cache maintenance")
    csub = c.add_subparsers(dest="action", required=True)
    for name in ("clear", "stat"):
        cp = csub.add_parser(name)
        _common(cp)
        cp.add_argument("--cache-dir")
        cp.set_defaults(func=cmd_cache)
    return ap


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (UsageError, ParameterError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OrientError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())
