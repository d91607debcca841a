"""Command-line front end.

    ssc-gamma gamma     --p 3 --l 3 --eps +1 --tau all
    ssc-gamma poles     --p 3 --l 3
    ssc-gamma verify    [--check NAME ...] [--break-measure 2]
    ssc-gamma parameter --p 2 --l 2

Exit codes: 0 success, 1 verification failure, 2 invalid configuration.
Every JSON document carries ``"schema": "v1"``.  The uniformizer is fixed
to ``p``; ``--alpha-class`` picks the square class of alpha.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .characters import MultChar, quadratic_tame_chars
from .padic_core import is_prime, nonresidue
from .qsymb import PoleError, order_at, leading_value, substitute
from .rs_integral import TruncationSpec, gamma_closed
from .whittaker import SSCDatum

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
TAU_CHOICES = ("trivial", "unramified", "tame", "tame-unramified", "all")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    p: int = 3
    l: int = 3
    alpha_class: str = "square"
    eps: int = 1
    omega: int = 1
    tau: str = "all"
    s_points: list = field(default_factory=list)
    truncation: Optional[TruncationSpec] = None
    fmt: str = "json"
    seed: int = 0

    def validate(self) -> "RunConfig":
        if not is_prime(self.p):
            raise ConfigError(f"p = {self.p} is not prime")
        if self.l < 2:
            raise ConfigError("l must be at least 2")
        if self.p == 2 and self.alpha_class != "square":
            raise ConfigError("for p = 2 every residue unit is a square")
        if self.p == 2 and self.omega != 1:
            raise ConfigError("for p = 2 omega must be +1")
        if self.p == 2 and self.tau.startswith("tame"):
            raise ConfigError("no tamely ramified quadratic character for p = 2")
        return self

    @property
    def alpha(self) -> int:
        return 1 if self.alpha_class == "square" else nonresidue(self.p)

    def datum(self) -> SSCDatum:
        try:
            return SSCDatum(self.l, self.p, alpha=self.alpha, eps=self.eps, omega=self.omega)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def taus(self) -> list:
        p = self.p
        if self.tau == "all":
            return quadratic_tame_chars(p)
        return [{"trivial": lambda: MultChar(p),
                 "unramified": lambda: MultChar.quadratic(p, -1),
                 "tame": lambda: MultChar.quadratic(p, 1, True),
                 "tame-unramified": lambda: MultChar.quadratic(p, -1, True)}[self.tau]()]

    def to_json(self) -> dict:
        return {"p": self.p, "l": self.l, "alpha_class": self.alpha_class, "eps": self.eps,
                "omega": self.omega, "tau": self.tau, "s_points": [str(s) for s in self.s_points],
                "truncation": (self.truncation or TruncationSpec()).to_json(),
                "format": self.fmt, "seed": self.seed}


# -- parsing helpers ------------------------------------------------------------------

def _sign(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = None
    if v not in (1, -1):
        raise argparse.ArgumentTypeError(f"expected +1 or -1, got {text!r}")
    return v


def _s_point(text: str):
    """``3/2`` stays exact; anything with ``j`` or ``i`` becomes complex."""
    t = text.strip().replace("i", "j")
    try:
        return Fraction(t) if "j" not in t else complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an s-point: {text!r}")


def _truncation(text: str) -> TruncationSpec:
    try:
        parts = [int(x) for x in text.replace(",", " ").split()]
        return TruncationSpec(N_v=parts[0], N_u=parts[1] if len(parts) > 1 else 4)
    except (ValueError, IndexError) as e:
        raise argparse.ArgumentTypeError(f"truncation is 'N_v,N_u': {e}")


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers: {text!r}")


def _complex_json(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def dump(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True)


# -- commands ---------------------------------------------------------------------------

def cmd_gamma(cfg: RunConfig) -> dict:
    d = cfg.datum()
    entries = []
    for tau in cfg.taus():
        f = gamma_closed(d, tau)
        o = order_at(f, 1)
        e = {"tau": tau.to_json(), "gamma": f.to_json(), "order_at_1": o, "pole_at_1": o < 0,
             "repr": repr(f)}
        vals = []
        for s in cfg.s_points:
            try:
                vals.append({"s": str(s), "value": _complex_json(substitute(f, s, cfg.p))})
            except PoleError:
                vals.append({"s": str(s), "value": None, "pole": True})
        if vals:
            e["values"] = vals
        entries.append(e)
    return {"schema": "v1", "command": "gamma", "datum": d.to_json(), "entries": entries}


def cmd_poles(cfg: RunConfig) -> dict:
    d = cfg.datum()
    rows = []
    for tau in cfg.taus():
        f = gamma_closed(d, tau)
        o = order_at(f, 1)
        lv = leading_value(f, 1)
        rows.append({"tau": tau.label(), "tau_at_varpi": tau.sign(d.varpi),
                     "tau_at_gamma": tau.sign(d.gamma), "order_at_1": o,
                     "criterion": tau.sign(d.varpi) == d.eps * tau.sign(d.gamma),
                     "leading": {k: str(v) for k, v in lv.items()}})
    return {"schema": "v1", "command": "poles", "datum": d.to_json(), "rows": rows,
            "poles": sum(r["order_at_1"] < 0 for r in rows)}


def cmd_verify(cfg: RunConfig, checks=None, break_measure=Fraction(1), primes=None, ranks=None,
               workers: int = 4, full: bool = True) -> tuple:
    from .checks import Grid, run_checks
    grid = Grid(primes=primes, ranks=ranks, break_measure=Fraction(break_measure), seed=cfg.seed,
                trunc=cfg.truncation)
    rep = run_checks(checks, grid, workers=workers)
    out = rep.to_json(full)
    out["command"] = "verify"
    out["break_measure"] = str(break_measure)
    return out, rep.passed


def cmd_parameter(cfg: RunConfig) -> dict:
    from .parameter import report
    out = report(cfg.datum()).to_json()
    out["command"] = "parameter"
    return out


# -- text rendering -------------------------------------------------------------------

def _text(doc: dict) -> str:
    cmd = doc.get("command")
    lines = []
    if cmd in ("gamma", "poles"):
        d = doc["datum"]
        lines.append(f"p={d['p']} l={d['l']} alpha={d['alpha']} eps={d['eps']:+d} omega={d['omega']:+d}")
    if cmd == "gamma":
        for e in doc["entries"]:
            flag = "  [pole at s=1]" if e["pole_at_1"] else ""
            lines.append(f"{e['tau']['label']:>20}: {e['repr']}{flag}")
            for v in e.get("values", []):
                val = "pole" if v["value"] is None else complex(v["value"]["re"], v["value"]["im"])
                lines.append(f"{'':>22}s={v['s']}: {val}")
    elif cmd == "poles":
        lines.append(f"{'tau':>20} {'tau(varpi)':>10} {'tau(gamma)':>10} {'ord s=1':>8}")
        for r in doc["rows"]:
            lines.append(f"{r['tau']:>20} {r['tau_at_varpi']:>10} {r['tau_at_gamma']:>10} {r['order_at_1']:>8}")
        lines.append(f"{doc['poles']} of {len(doc['rows'])} characters give a pole")
    elif cmd == "verify":
        for name, s in doc["summary"].items():
            status = "PASS" if s["passed"] else "FAIL"
            lines.append(f"[{status}] criterion {s['criterion']} {name}: {s['cases'] - s['failures']}/"
                         f"{s['cases']} cases ({s['seconds']} s)")
        for name, rs in doc.get("results", {}).items():
            for r in rs:
                if not r["passed"]:
                    lines.append(f"  {name}: {r['case']}: measured {r['measured']} expected {r['expected']}"
                                 + (f" ({r['detail']})" if r["detail"] else ""))
        lines.append("all checks passed" if doc["passed"] else "verification FAILED")
    elif cmd == "parameter":
        lines.append(f"p={doc['p']} l={doc['l']} alpha {doc['alpha_class']} eps={doc['eps']:+d} "
                     f"omega={doc['omega']:+d}")
        for s in doc["summands"]:
            lines.append(f"  summand: tau(varpi)={s['unram_value']:+d}, tame part {s['tame']}")
        lines.append(f"  complement: dimension {doc['complement_dim']}, central character "
                     f"{doc['central_char']}")
        lines.append(f"  delta = {doc['delta']['exact']}  ({doc['delta']['psi_convention']})")
        if doc.get("annotation"):
            lines.append(f"  {doc['annotation']}")
        for c in doc["caveats"]:
            lines.append(f"  caveat: {c}")
    return "\n".join(lines)


# -- argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ssc-gamma", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, need_p=True):
        sp.add_argument("--p", type=int, required=need_p, default=None if need_p else 3, help="residue prime")
        sp.add_argument("--l", type=int, default=3, help="rank (group SO_2l)")
        sp.add_argument("--alpha-class", choices=("square", "nonsquare"), default="square")
        sp.add_argument("--eps", type=_sign, default=1, help="chi(g_chi), +1 or -1")
        sp.add_argument("--omega", type=_sign, default=1, help="central sign pi(-1), +1 or -1")
        sp.add_argument("--trunc", type=_truncation, default=None,
                        help="N_v,N_u (default from GAMMA_TRUNC_DEFAULT or 12,4)")
        sp.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--output", "-o", default=None, help="write the report to this file")

    g = sub.add_parser("gamma", help="closed gamma factors for quadratic depth-zero twists")
    common(g)
    g.add_argument("--tau", choices=TAU_CHOICES, default="all")
    g.add_argument("--s", dest="s_points", type=_s_point, action="append", default=[],
                   help="evaluate at this s (repeatable; 3/2, 2+1j)")

    pl = sub.add_parser("poles", help="pole orders at s = 1")
    common(pl)
    pl.add_argument("--tau", choices=TAU_CHOICES, default="all")

    v = sub.add_parser("verify", help="run the oracle comparisons")
    common(v, need_p=False)
    from .checks import CHECKS
    v.add_argument("--check", action="append", choices=list(CHECKS), default=None,
                   help="run only this check (repeatable)")
    v.add_argument("--break-measure", type=Fraction, default=Fraction(1),
                   help="rescale vol(o) in the Psi check (negative control)")
    v.add_argument("--primes", type=_int_list, default=None, help="restrict grids to these p")
    v.add_argument("--ranks", type=_int_list, default=None, help="restrict grids to these l")
    v.add_argument("--workers", type=int, default=4)
    v.add_argument("--summary", action="store_true", help="omit per-case results from JSON")

    pa = sub.add_parser("parameter", help="Langlands parameter report")
    common(pa)
    return ap


def _config(ns) -> RunConfig:
    return RunConfig(p=ns.p, l=ns.l, alpha_class=ns.alpha_class, eps=ns.eps, omega=ns.omega,
                     tau=getattr(ns, "tau", "all"), s_points=getattr(ns, "s_points", []),
                     truncation=ns.trunc, fmt=ns.fmt, seed=ns.seed).validate()


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else EXIT_OK
    status = EXIT_OK
    try:
        cfg = _config(ns)
        if ns.command == "gamma":
            doc = cmd_gamma(cfg)
        elif ns.command == "poles":
            doc = cmd_poles(cfg)
        elif ns.command == "parameter":
            doc = cmd_parameter(cfg)
        else:
            if ns.break_measure <= 0:
                raise ConfigError("--break-measure must be positive")
            if ns.workers < 1:
                raise ConfigError("--workers must be positive")
            doc, ok = cmd_verify(cfg, ns.check, ns.break_measure, ns.primes, ns.ranks,
                                 ns.workers, not ns.summary)
            status = EXIT_OK if ok else EXIT_FAIL
    except ConfigError as e:
        print(f"ssc-gamma: invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    doc["config"] = cfg.to_json()
    text = dump(doc) if cfg.fmt == "json" else _text(doc)
    if ns.output:
        with open(ns.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
