"""Command-line entry point: ``torsdiv <command> ...`` prints one JSON report.

Exit status is 0 for pass (or report-only), 1 for fail and 2 for errors.
Flags are the only configuration source.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from . import _accel
from . import acceptance
from . import chebfam as cf
from . import linkcheck as lc
from . import lseries as ls
from . import replab as rl
from .groebner import BudgetExceeded, IdealBasis, buchberger, time_budget
from .mpoly import VARS, MultiPoly

EXIT = {"pass": 0, "report-only": 0, "fail": 1, "error": 2}
DEFAULT_BUDGET_S = 1800


class UnknownSubcommand(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    n: int | None = None
    p: int | None = None
    k: int | None = None
    kind: str | None = None
    prec: int = ls.DEFAULT_PREC
    deg: int = ls.DEFAULT_DEG
    point: tuple | None = None
    samples: int = 100
    budget_s: int | None = None
    seed: int = rl.DEFAULT_SEED
    backend: str = "auto"
    out: str | None = None
    emit_gb: str | None = None
    pretty: bool = False
    timing: bool = True

    @property
    def name(self) -> str:
        return f"{self.command} {self.target}" if self.target else self.command

    def inputs(self) -> dict:
        keys = {
            "check": ("n", "budget_s"),
            "family": ("k", "kind"),
            "oracle": {"reps": ("n", "p", "backend"), "peripheral": ("samples", "seed"),
                       "order3": ("samples", "seed")},
            "lfunction": ("n", "p", "prec", "deg", "point", "backend"),
            "lfunction survey": ("n", "p", "prec", "deg", "backend"),
            "verify-all": ("budget_s", "seed", "backend"),
        }
        ks = keys.get(self.name, keys.get(self.command))
        if isinstance(ks, dict):
            ks = ks[self.target]
        out = {}
        for k in ks:
            val = getattr(self, k)
            out[k] = list(val) if isinstance(val, tuple) else val
        return out


# ---------------------------------------------------------------------------
# report helpers


def _jsonable(obj):
    """Deep copy with exact numbers as strings; floats are refused."""
    if isinstance(obj, float):
        raise TypeError("floating-point value in report")
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction) or type(obj).__name__ == "mpq":
        return str(obj)
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    if hasattr(obj, "item"):  # numpy scalar
        return _jsonable(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render(report: dict, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(report, indent=2, sort_keys=True)
    return json.dumps(report, sort_keys=True, separators=(",", ":"))


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _write_gb(path: str, check: str, n, basis, order: str = "grevlex"):
    payload = {"check": check, "n": n, "order": order, "vars": list(VARS),
               "basis": [g.to_json() for g in basis]}
    with open(path, "w") as fh:
        fh.write(render(_jsonable(payload), pretty=True) + "\n")


# ---------------------------------------------------------------------------
# handlers: each returns (status, certificate)


def _need(cfg: RunConfig, *names):
    missing = [f"--{n}" for n in names if getattr(cfg, n) is None]
    if missing:
        raise ValueError(f"{cfg.name} requires {', '.join(missing)}")


def do_check(cfg: RunConfig):
    t = cfg.target
    if t == "whitehead-divisor":
        cert = lc.whitehead_divisor_check()
        return _status(cert.ok and lc.verify_certificate(cert)), cert.to_json()
    if t == "smooth":
        _need(cfg, "n")
        rep = lc.smoothness_report(cfg.n)
        if cfg.emit_gb:
            fp = lc.family_polys(cfg.n)
            G = buchberger(IdealBasis([fp.trace_rel, fp.f_n, *fp.chain_partials]))
            _write_gb(cfg.emit_gb, "smooth", cfg.n, G.elements)
        return _status(rep["ok"]), rep
    if t == "nongeometric":
        _need(cfg, "n")
        rep = lc.nongeometric_check(cfg.n)
        return _status(rep["ok"]), rep
    if t == "geometric-mult":
        _need(cfg, "n")
        cert = lc.geometric_mult_check(cfg.n)
        if cfg.emit_gb:
            fp = lc.family_polys(cfg.n)
            G = lc._sat_gb([fp.trace_rel, fp.f_n, fp.tau_n], lc.geometric_gens(cfg.n).units)
            _write_gb(cfg.emit_gb, "geometric-mult", cfg.n, G.elements)
        return _status(cert.ok), cert.to_json()
    if t == "diagonal":
        try:
            rep = lc.diagonal_elimination_check()
        except lc.BasisMismatch as e:
            return "fail", {"message": str(e)}
        if cfg.emit_gb:
            _write_gb(cfg.emit_gb, "diagonal", None, [MultiPoly.from_json(b) for b in rep["basis"]],
                      order="elimination(z)")
        return _status(rep["ok"]), rep
    raise UnknownSubcommand(f"unknown check {t!r}")


def do_family(cfg: RunConfig):
    if cfg.target != "cheb":
        raise UnknownSubcommand(f"unknown family {cfg.target!r}")
    _need(cfg, "k", "kind")
    poly = {"S": cf.S, "T": cf.T, "P": cf.P}[cfg.kind](cfg.k, ("v",))
    return "report-only", {"kind": cfg.kind, "k": cfg.k, "poly": poly.to_json(), "str": str(poly)}


def do_oracle(cfg: RunConfig):
    t = cfg.target
    if t == "reps":
        _need(cfg, "n", "p")
        rep = rl.relator_oracle(cfg.n, cfg.p, cfg.backend)
        return _status(rep["violations"] == 0), rep
    if t == "peripheral":
        rep = rl.whitehead_peripheral_check(cfg.samples, cfg.seed)
        return _status(rep["ok"]), rep
    if t == "order3":
        rep = rl.order3_suite(cfg.samples, cfg.seed)
        return _status(rep["ok"]), rep
    raise UnknownSubcommand(f"unknown oracle {t!r}")


def do_lfunction(cfg: RunConfig):
    _need(cfg, "n", "p")
    if cfg.target == "survey":
        s = ls.l_survey(cfg.n, cfg.p, cfg.prec, cfg.deg, cfg.backend)
        cert = {"summary": s["summary"], "reports": [r.to_json() for r in s["reports"]]}
        return _status(s["ok"]), cert
    if cfg.target is not None:
        raise UnknownSubcommand(f"unknown lfunction mode {cfg.target!r}")
    if cfg.point is not None:
        pt = ls.FpPoint.at(*cfg.point, cfg.n, cfg.p)
    else:
        study = [q for q in ls.find_points(cfg.n, cfg.p, cfg.backend) if q.in_study_set]
        if not study:
            return "report-only", {"message": "empty study set"}
        pt = study[0]
    rep = ls.l_function(pt, cfg.prec, cfg.deg)
    status = {"pass": "pass", "fail": "fail", "not-applicable": "report-only"}[rep.verdict]
    return status, rep.to_json()


class BudgetStop(BudgetExceeded):
    """Budget ran out in verify-all; carries the criteria finished so far."""

    def __init__(self, msg, results):
        super().__init__(msg)
        self.partial = {"criteria": results}


def do_verify_all(cfg: RunConfig):
    budget = DEFAULT_BUDGET_S if cfg.budget_s is None else cfg.budget_s
    deadline = time.monotonic() + budget
    results = []
    for c in acceptance.CRITERIA:
        left = deadline - time.monotonic()
        if left <= 0:
            raise BudgetStop(f"budget exhausted before criterion {c.number}", results)
        try:
            with time_budget(left):
                r = acceptance.run(c, seed=cfg.seed, backend=cfg.backend)
        except BudgetExceeded:
            raise BudgetStop(f"budget exhausted during criterion {c.number}", results) from None
        if not cfg.timing:
            r["elapsed_ms"] = 0
        results.append(r)
    ok = all(r["ok"] for r in results)
    return _status(ok), {"criteria": results}


HANDLERS = {"check": do_check, "family": do_family, "oracle": do_oracle, "lfunction": do_lfunction,
            "verify-all": do_verify_all}


def dispatch(cfg: RunConfig) -> dict:
    """Run one command and build its report (never raises for command failures)."""
    handler = HANDLERS.get(cfg.command)
    if handler is None:
        raise UnknownSubcommand(cfg.command)
    t0 = time.perf_counter()
    try:
        with time_budget(cfg.budget_s if cfg.command != "verify-all" else None):
            status, cert = handler(cfg)
    except UnknownSubcommand:
        raise
    except BudgetExceeded as e:
        cert = {"error": "BudgetExceeded", "message": str(e), **getattr(e, "partial", {})}
        status = "error"
    except Exception as e:  # report, do not crash
        status, cert = "error", {"error": type(e).__name__, "message": str(e)}
    elapsed = int((time.perf_counter() - t0) * 1000) if cfg.timing else 0
    return _jsonable({
        "check": cfg.name,
        "n": cfg.n,
        "inputs": cfg.inputs(),
        "status": status,
        "certificate": cert,
        "elapsed_ms": elapsed,
        "version": __version__,
        "seed": cfg.seed,
    })


# ---------------------------------------------------------------------------
# argument parsing


def _point(s: str) -> tuple:
    try:
        a, b, c = (int(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a,b,c") from None
    return a, b, c


def _common(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--pretty", action="store_true", default=d(False), help="indented JSON")
    p.add_argument("--out", default=d(None), metavar="FILE", help="write the report to FILE")
    p.add_argument("--seed", type=int, default=d(rl.DEFAULT_SEED))
    p.add_argument("--no-timing", dest="no_timing", action="store_true", default=d(False),
                   help="report elapsed_ms as 0 so reruns are byte-identical")
    p.add_argument("--backend", choices=("auto", "numba", "numpy"), default=d("auto"),
                   help="finite-field kernel implementation")
    p.add_argument("--budget-s", dest="budget_s", type=int, default=d(None), metavar="S")
    p.add_argument("--emit-gb", dest="emit_gb", default=d(None), metavar="FILE",
                   help="write the reduced Groebner basis used by the check")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torsdiv", description="Exact checks for twisted Whitehead link torsion.")
    ap.add_argument("--version", action="version", version=f"torsdiv {__version__}")
    _common(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def leaf(parent, name, **kw):
        p = parent.add_parser(name, **kw)
        _common(p, suppress=True)
        return p

    chk = sub.add_parser("check", help="algebraic certificates").add_subparsers(dest="target", required=True)
    leaf(chk, "whitehead-divisor")
    for name in ("smooth", "nongeometric", "geometric-mult"):
        leaf(chk, name).add_argument("--n", type=int, required=True)
    leaf(chk, "diagonal")

    fam = sub.add_parser("family", help="Chebyshev-type polynomials").add_subparsers(dest="target", required=True)
    cheb = leaf(fam, "cheb")
    cheb.add_argument("--k", type=int, required=True)
    cheb.add_argument("--kind", choices=("S", "T", "P"), required=True)

    ora = sub.add_parser("oracle", help="representation oracles").add_subparsers(dest="target", required=True)
    reps = leaf(ora, "reps")
    reps.add_argument("--n", type=int, required=True)
    reps.add_argument("--p", type=int, required=True)
    leaf(ora, "peripheral").add_argument("--samples", type=int, default=100)
    leaf(ora, "order3").add_argument("--samples", type=int, default=100)

    lf = leaf(sub, "lfunction", help="truncated L-series at F_p points")
    lf.add_argument("target", nargs="?", choices=("survey",), default=None)
    lf.add_argument("--n", type=int, required=True)
    lf.add_argument("--p", type=int, required=True)
    lf.add_argument("--prec", type=int, default=ls.DEFAULT_PREC)
    lf.add_argument("--deg", type=int, default=ls.DEFAULT_DEG)
    lf.add_argument("--point", type=_point, default=None, metavar="a,b,c")

    leaf(sub, "verify-all", help="run every acceptance criterion")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command,
        target=getattr(ns, "target", None),
        n=getattr(ns, "n", None),
        p=getattr(ns, "p", None),
        k=getattr(ns, "k", None),
        kind=getattr(ns, "kind", None),
        prec=getattr(ns, "prec", ls.DEFAULT_PREC),
        deg=getattr(ns, "deg", ls.DEFAULT_DEG),
        point=getattr(ns, "point", None),
        samples=getattr(ns, "samples", 100),
        budget_s=ns.budget_s,
        seed=ns.seed,
        backend=_accel.resolve_backend(ns.backend),
        out=ns.out,
        emit_gb=ns.emit_gb,
        pretty=ns.pretty,
        timing=not ns.no_timing,
    )
    if cfg.budget_s is not None and cfg.budget_s < 0:
        raise ValueError("--budget-s must be >= 0")
    return cfg


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as e:
        print(f"torsdiv: {e}", file=sys.stderr)
        return 2
    report = dispatch(cfg)
    text = render(report, cfg.pretty)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT[report["status"]]


if __name__ == "__main__":
    sys.exit(main())
