"""Command-line front end.

    quantmod check-poisson --fixture so3-r2
    quantmod cohomology --fixture k --module trivial
    quantmod star-verify --fixture so3 --seed 7
    quantmod obstruction --fixture so3-kk --pi1 all-admissible
    quantmod report-all --output structured

Exit codes: 0 all checks pass, 1 some check failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from math import factorial
from pathlib import Path

from . import __version__, counterexample as ce, data, lie, obstruction as ob, sampling, star
from .lie import LieAlgebra
from .poly import (
    FormalMultiVector,
    MultiVector,
    Polynomial,
    coisotropy_check,
    jacobi_check,
    poisson_bracket,
    rational_to_str,
)

COMMANDS = ("check-poisson", "cohomology", "star-verify", "obstruction", "report-all")
MODULES = ("trivial", "adjoint", "coadjoint")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    fixture: str | None = None
    order: int = 3
    output: str = "text"
    seed: int = 0
    module: str = "trivial"
    pi1: str = "zero"
    wheel_sign: int = 1
    samples: int = 100
    expected_dims: list | None = None  # cohomology only; set by report-all

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.order < 0:
            raise UsageError("--order must be >= 0")
        if self.samples < 0:
            raise UsageError("--samples must be >= 0")
        if self.wheel_sign not in (1, -1):
            raise UsageError("--wheel-sign must be + or -")

    def echo(self):
        return {
            "command": self.command, "fixture": self.fixture, "order": self.order,
            "seed": self.seed, "module": self.module, "pi1": self.pi1,
            "wheel_sign": "+" if self.wheel_sign > 0 else "-", "samples": self.samples,
        }


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "seconds": round(self.seconds, 6)}


@dataclass
class Report:
    config: RunConfig
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def to_dict(self):
        return {
            "toolkit": "quantmod",
            "version": __version__,
            "config": self.config.echo(),
            "seed": self.config.seed,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def render(self) -> str:
        if self.config.output == "structured":
            return json.dumps(self.to_dict(), indent=2)
        cfg = self.config
        lines = [f"quantmod {__version__}  command={cfg.command} fixture={cfg.fixture} "
                 f"order={cfg.order} seed={cfg.seed}"]
        for c in self.checks:
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  ({c.seconds:.3f}s)")
            for k, v in c.detail.items():
                if isinstance(v, (dict, list)) and len(json.dumps(v)) > 120:
                    continue
                lines.append(f"      {k}: {v}")
        lines.append("RESULT: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _timed(report: Report, name: str, fn):
    t0 = time.perf_counter()
    passed, detail = fn()
    report.checks.append(Check(name, bool(passed), detail, time.perf_counter() - t0))


def _load(ref):
    if ref is None:
        raise UsageError("--fixture is required for this command")
    try:
        return data.load(ref)
    except data.UnknownFixture as e:
        raise UsageError(str(e)) from None
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"could not read fixture {ref}: {e}") from None


def _pi_of(obj) -> MultiVector:
    if isinstance(obj, LieAlgebra):
        return obj.linear_poisson()
    if isinstance(obj, ce.CounterexampleData):
        return ce.build(obj).pi
    return obj.pi


# -- check-poisson ------------------------------------------------------------------

def run_check_poisson(cfg: RunConfig, report: Report):
    obj = _load(cfg.fixture)
    tag = cfg.fixture
    if isinstance(obj, ce.CounterexampleData):
        def hyp():
            r = ce.validate_data(obj)
            return r.ok, {"hypotheses": r.checks, "failures": r.failures}
        _timed(report, f"{tag}: data hypotheses", hyp)
        if not report.checks[-1].passed:
            return
        try:
            b = ce.build(obj)
        except ce.ConstructionDefect as e:
            report.checks.append(Check(f"{tag}: construction", False, {"error": str(e)}))
            return
        pi = b.pi

        def pieces():
            br = ce.jacobi_lemma_breakdown(b)
            return br.holds and all(br.as_dict().values()), br.as_dict()
        _timed(report, f"{tag}: graded pieces of [pi,pi]", pieces)

        def blocks():
            mixed = all(not pi[i, a] for i in b.x_block for a in b.y_block)
            glin = obj.g.linear_poisson(b.n, 0)
            x_ok = all(pi[i, j] == glin[i, j] for i in b.x_block for j in b.x_block)
            return mixed and x_ok, {"mixed_block_zero": mixed, "x_block_is_linear_g": x_ok, "n": b.n}
        _timed(report, f"{tag}: block structure", blocks)
    else:
        pi = _pi_of(obj)

    def jac():
        r = jacobi_check(pi)
        nonzero = sum(len(t.components) for t in r.residual)
        return r.holds, {"nonzero_trivector_components": nonzero}
    _timed(report, f"{tag}: [pi,pi] = 0", jac)
    _timed(report, f"{tag}: pi(0) = 0", lambda: (coisotropy_check(pi), {}))


# -- cohomology ----------------------------------------------------------------------

def _module(g: LieAlgebra, which: str):
    return {"trivial": lie.trivial_module, "adjoint": lie.adjoint_module,
            "coadjoint": lie.coadjoint_module}[which](g)


def run_cohomology(cfg: RunConfig, report: Report):
    obj = _load(cfg.fixture)
    if isinstance(obj, ce.CounterexampleData):
        g = lie.direct_sum(obj.g, obj.h)
    elif isinstance(obj, LieAlgebra):
        g = obj
    else:
        raise UsageError("cohomology needs a Lie algebra or counterexample fixture")
    if cfg.module not in MODULES:
        raise UsageError(f"--module must be one of {', '.join(MODULES)}")
    V = _module(g, cfg.module)
    cx = lie.ce_complex(g, V)
    tag = f"{cfg.fixture} ({cfg.module})"
    _timed(report, f"{tag}: d^2 = 0", lambda: (cx.check_d_squared(), {}))

    def dims():
        rep = lie.cohomology(cx)
        ok = all(
            rep.kernel_dims[p] + rep.ranks[p] == cx.dim(p) and rep.dims[p] >= 0
            for p in range(g.dim + 1)
        )
        if cfg.expected_dims is not None:
            ok = ok and rep.dims == cfg.expected_dims
        return ok, {"dims": rep.dims, "expected_dims": cfg.expected_dims, "cochain_dims": [cx.dim(p) for p in range(g.dim + 1)],
                    "ranks": rep.ranks}
    _timed(report, f"{tag}: cohomology dimensions", dims)


# -- star-verify ----------------------------------------------------------------------

def run_star_verify(cfg: RunConfig, report: Report):
    obj = _load(cfg.fixture)
    pi = _pi_of(obj)
    top = min(cfg.order, 3) - 1  # highest eps power compared
    tag = cfg.fixture
    if top < 0:
        report.checks.append(Check(f"{tag}: nothing to compare at order 0", True, {}))
        return
    rng = sampling.rng_for(cfg.seed)
    n = pi.n_vars
    K = star.KontsevichStar(pi, star.KONTSEVICH_WEIGHTS.with_wheel_sign(cfg.wheel_sign))
    N = cfg.samples
    rp = lambda: sampling.random_polynomial(rng, n, 3, 3)
    note = {"samples": N, "compared_up_to_eps_power": top}
    if cfg.order > 3:
        note["capped"] = "Kontsevich product is implemented to eps^2"

    def unit():
        e = Polynomial.one(n)
        ok = all(K(e, f, top)[0] == f and star.series_is_zero(K(e, f, top)[1:])
                 and K(f, e, top)[0] == f and star.series_is_zero(K(f, e, top)[1:])
                 for f in (rp() for _ in range(N)))
        return ok, note
    _timed(report, f"{tag}: unit law", unit)

    if top >= 1:
        def eps1():
            ok = True
            for _ in range(N):
                f, g = rp(), rp()
                ok = ok and K(f, g, 1)[1] - K(g, f, 1)[1] == poisson_bracket(pi, f, g)
            return ok, note
        _timed(report, f"{tag}: eps^1 commutator is the Poisson bracket", eps1)

    def assoc():
        ok = True
        for _ in range(N):
            f, g, h = rp(), rp(), rp()
            ok = ok and star.star_series(K, K(f, g, top), [h], top) == star.star_series(K, [f], K(g, h, top), top)
        return ok, note
    _timed(report, f"{tag}: associativity mod eps^{top + 1}", assoc)

    if isinstance(obj, LieAlgebra):
        g = obj

        def character():
            ok = True
            for _ in range(N):
                f, h = rp(), rp()
                lhs = star.rho_series(g, K(f, h, top), top)
                rhs = star.series_product_scalar(star.rho_linear(g, f, top), star.rho_linear(g, h, top), top)
                ok = ok and lhs == rhs
            return ok, note
        _timed(report, f"{tag}: character rho(f*g) = rho(f)rho(g)", character)

        def intertwine():
            G = star.GuttStar(g, top)
            ok = True
            for _ in range(N):
                f, h = rp(), rp()
                lhs = star.duflo_apply_series(g, G(f, h, top), top)
                rhs = star.star_series(K, star.duflo_apply(g, f, top), star.duflo_apply(g, h, top), top)
                ok = ok and lhs == rhs
            return ok, note
        _timed(report, f"{tag}: D(f *CBH g) = Df *K Dg", intertwine)

        def cbh_assoc():
            G = star.GuttStar(g, max(cfg.order - 1, 0))
            m = max(cfg.order - 1, 0)
            ok = True
            for _ in range(max(N // 4, 1)):
                f, h, k = (sampling.random_polynomial(rng, g.dim, 2, 2) for _ in range(3))
                ok = ok and star.star_series(G, G(f, h, m), [k], m) == star.star_series(G, [f], G(h, k, m), m)
            return ok, {"samples": max(N // 4, 1), "compared_up_to_eps_power": m}
        _timed(report, f"{tag}: CBH associativity", cbh_assoc)

    def wheels():
        vals = {n: star.wheel_weight(n) for n in range(1, 6)}
        ok = all(v and abs(v) == abs(star.bernoulli(2 * n)) / (4 * n * factorial(2 * n)) for n, v in vals.items())
        return ok, {"wheel_weights": {str(k): rational_to_str(v) for k, v in vals.items()}}
    _timed(report, "wheel weights |B_2n|/(4n(2n)!)", wheels)


# -- obstruction ----------------------------------------------------------------------

def _read_pi1(path: str, n: int) -> MultiVector:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"--pi1: no such file {path}")
    try:
        mv = MultiVector.from_dict(json.loads(p.read_text()))
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"--pi1: could not parse {path}: {e}") from None
    if mv.degree != 2 or mv.n_vars != n:
        raise UsageError(f"--pi1 must be a bivector on {n} variables")
    return mv


def run_obstruction(cfg: RunConfig, report: Report):
    obj = _load(cfg.fixture)
    tag = cfg.fixture
    if isinstance(obj, ce.CounterexampleData):
        b = ce.build(obj)
        pi = b.pi
        A3 = ob.anomaly_a3(b, cfg.wheel_sign)
        expected = obj.expected_verdict
    else:
        b = None
        pi = _pi_of(obj)
        A3 = ob.AnomalyTerm.zero(pi.n_vars)
        expected = "feasible" if isinstance(obj, LieAlgebra) else obj.expected_verdict

    if cfg.pi1 == "all-admissible":
        if b is None:
            raise UsageError("--pi1 all-admissible needs a counterexample fixture")

        def specialized():
            r = ob.specialized_verdict(b, seed=cfg.seed)
            ok = r.verdict == (expected or "infeasible") and r.ok
            d = r.to_dict()
            d["expected_verdict"] = expected
            return ok, d
        _timed(report, f"{tag}: infeasible for every admissible pi1", specialized)
        return

    pi1 = None
    if cfg.pi1 != "zero":
        pi1 = _read_pi1(cfg.pi1, pi.n_vars)

        def admissible():
            zero_at_0 = coisotropy_check(pi1)
            jac = jacobi_check(FormalMultiVector((pi, pi1)), order=1)
            return zero_at_0 and jac.holds, {"pi1_vanishes_at_0": zero_at_0, "[pi,pi1]=0": jac.holds}
        _timed(report, f"{tag}: pi1 is an admissible first-order term", admissible)
        if not report.checks[-1].passed:
            return

    system = ob.assemble_con3(pi, pi1, A3, ob.assemble_d1con(pi))
    for lam, label in [(None, "symbolic lambda"), (A3.concrete_lambda, f"lambda = {rational_to_str(A3.concrete_lambda)}")]:
        def dec(lam=lam):
            cert = ob.decide(system, lam)
            verified = cert.kind != "undecided" and cert.verify(system)
            ok = verified and (expected is None or cert.kind == expected)
            return ok, {"verdict": cert.kind, "expected_verdict": expected,
                        "certificate_verified": verified, "certificate": cert.to_dict(),
                        "anomaly": A3.to_dict()}
        _timed(report, f"{tag}: decide ({label})", dec)
    report.checks[-1].detail["system"] = system.to_dict()


# -- report-all ----------------------------------------------------------------------

REPORT_ALL = [
    ("check-poisson", "so3-r2", {}),
    ("check-poisson", "so3-kk", {}),
    ("cohomology", "k", {"module": "trivial", "expected_dims": [1, 1, 0]}),
    ("cohomology", "k", {"module": "adjoint", "expected_dims": [0, 0, 0]}),
    ("cohomology", "k-plus-k", {"module": "trivial", "expected_dims": [1, 2, 1, 0, 0]}),
    ("cohomology", "k-plus-k", {"module": "adjoint", "expected_dims": [0, 0, 0, 0, 0]}),
    ("cohomology", "so3", {"module": "trivial", "expected_dims": [1, 0, 0, 1]}),
    ("star-verify", "so3", {}),
    ("star-verify", "so3-r2", {"samples": 20}),
    ("obstruction", "so3-r2", {"pi1": "zero"}),
    ("obstruction", "so3-kk", {"pi1": "all-admissible"}),
    ("obstruction", "so3", {"pi1": "zero"}),
    ("obstruction", "quadratic-2", {"pi1": "zero"}),
]


def run_report_all(cfg: RunConfig, report: Report):
    for cmd, fixture, extra in REPORT_ALL:
        opts = dict(order=cfg.order, seed=cfg.seed, wheel_sign=cfg.wheel_sign, samples=cfg.samples)
        opts.update(extra)
        if "samples" in extra:
            opts["samples"] = min(extra["samples"], cfg.samples)
        sub = RunConfig(cmd, fixture, output=cfg.output, **opts)
        r = Report(sub)
        RUNNERS[cmd](sub, r)
        for c in r.checks:
            c.name = f"[{cmd}] {c.name}"
        report.checks.extend(r.checks)

    def ansatz():
        r = ob.order12_ansatz_report(pi=ce.build(data.load_counterexample("so3-r2")).pi, seed=cfg.seed)
        return r.ok, r.to_dict()
    _timed(report, "[ansatz] order 1 and 2 reduction probes", ansatz)


RUNNERS = {
    "check-poisson": run_check_poisson,
    "cohomology": run_cohomology,
    "star-verify": run_star_verify,
    "obstruction": run_obstruction,
    "report-all": run_report_all,
}


def run(cfg: RunConfig) -> Report:
    report = Report(cfg)
    RUNNERS[cfg.command](cfg, report)
    return report


# -- argument parsing -------------------------------------------------------------------

def _sign(s: str) -> int:
    if s in ("+", "+1", "1"):
        return 1
    if s in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError("expected + or -")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quantmod", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"quantmod {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--fixture", help="fixture name or path to a JSON file")
        sp.add_argument("--order", type=int, default=3, help="compare terms below eps^ORDER (default 3)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--output", choices=("text", "structured"), default="text")
        sp.add_argument("--samples", type=int, default=100, help="random instances per property probe")
        sp.add_argument("--wheel-sign", type=_sign, default=1, dest="wheel_sign", metavar="{+,-}")
        if name == "cohomology":
            sp.add_argument("--module", choices=MODULES, default="trivial")
        if name == "obstruction":
            sp.add_argument("--pi1", default="zero", metavar="{zero,all-admissible,FILE}")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = RunConfig(
            args.command, args.fixture, args.order, args.output, args.seed,
            getattr(args, "module", "trivial"), getattr(args, "pi1", "zero"),
            args.wheel_sign, args.samples,
        )
        report = run(cfg)
    except UsageError as e:
        print(f"quantmod: error: {e}", file=sys.stderr)
        return 2
    print(report.render())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
