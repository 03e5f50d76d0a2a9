"""Checks callable from scenario files, and the report they produce."""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

from . import __version__
from .birational import indeterminacy_components, maps_into_report, verify_charts
from .bundle import (FIBER_VARS, BundleSystem, RationalSection, bundle_system, contains_standard_line,
                     decompose_along_line, discriminant_octic, eliminate, elimination_in_ideal,
                     same_up_to_scalar, section_residuals)
from .groebner import DEFAULT_POWER_BOUND, SMOOTHNESS_PRIMES, smoothness_check
from .jacobian import (HODGE_TARGETS, QuadricNet, graded_piece, hodge_check, jacobian_generators,
                       period_rank, verify_basis)
from .lattice import ChowClass, GramLattice, gram_table, two_adic_compare
from .linalg import DEFAULT_PRIMES, ExactMatrix, rank_certified
from .poly import Polynomial, exact_divide, format_monomial, monomial_basis, substitute
from .scenario import CheckCall, Scenario, ScenarioError, load_scenario, parse_scenario

SCHEMA = 1
PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}
EXIT_USAGE = 64
PRESETS = ("xspecial", "xsection", "xprime", "prop-special", "lattice-sec4")


@dataclass
class Options:
    prime: int | None = None
    exact: bool = False
    jobs: int = 1


@dataclass
class CheckResult:
    name: str
    status: str
    details: dict = field(default_factory=dict)
    witness: object = None
    millis: int = 0

    def as_dict(self) -> dict:
        out = {"name": self.name, "status": self.status, "details": self.details}
        if self.witness is not None:
            out["witness"] = self.witness
        out["millis"] = self.millis
        return out


@dataclass
class Report:
    scenario: str
    checks: list
    version: str = __version__

    @property
    def verdict(self) -> str:
        statuses = {c.status for c in self.checks}
        if FAIL in statuses:
            return FAIL
        if INCONCLUSIVE in statuses:
            return INCONCLUSIVE
        return PASS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def as_dict(self) -> dict:
        return {"schema": SCHEMA, "version": self.version, "scenario": self.scenario,
                "checks": [c.as_dict() for c in self.checks], "verdict": self.verdict}


def emit_report(report: Report, format: str = "json") -> str:
    if format == "json":
        return json.dumps(report.as_dict(), indent=2, default=str) + "\n"
    if format != "text":
        raise ValueError(f"unknown format {format!r}; use json or text")
    order = sorted(report.checks, key=lambda c: {FAIL: 0, INCONCLUSIVE: 1, PASS: 2}[c.status])
    lines = [f"scenario {report.scenario}: {report.verdict.upper()}"]
    for c in order:
        lines.append(f"  [{c.status:>12}] {c.name}  ({c.millis} ms)")
        for k, v in c.details.items():
            lines.append(f"      {k}: {_short(v)}")
        if c.witness is not None:
            lines.append(f"      witness: {_short(c.witness)}")
    return "\n".join(lines) + "\n"


def _short(v, limit: int = 400) -> str:
    s = v if isinstance(v, str) else json.dumps(v, default=str)
    return s if len(s) <= limit else s[:limit] + " ..."


# ---------------------------------------------------------------------------
# helpers

def _net(sc: Scenario, names) -> QuadricNet:
    Q = [sc.poly(n) for n in names]
    return QuadricNet(tuple(Q), ",".join(names))


def _primes(opts: Options) -> tuple:
    if opts.prime is None:
        return DEFAULT_PRIMES
    rest = [p for p in DEFAULT_PRIMES if p != opts.prime]
    return (opts.prime, rest[0])


def _jac_prime(opts: Options) -> int:
    return opts.prime or DEFAULT_PRIMES[0]


def _scalar(c) -> str:
    return str(c) if not isinstance(c, Fraction) else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# check implementations: (scenario, call, options) -> (status, details, witness)

def check_line(sc, call, opts):
    net = [sc.poly(n) for n in call.args[:3]]
    ok = contains_standard_line(net)
    return (PASS if ok else FAIL), {"line": "x2 = ... = x7 = 0", "contained": ok}, None


def check_bundle(sc, call, opts):
    Q, E = call.args[:3], call.args[3:6]
    expected = [sc.poly(n) for n in E]
    lambdas = expected[0].vars.mu
    sys = bundle_system([sc.poly(n) for n in Q], lambdas)
    details, bad = {}, []
    for name, got, want in zip(E, sys.equations, expected):
        if got.vars != want.vars:
            raise ScenarioError(f"{name} must live in the table (lambdas; x2..x7)")
        c = same_up_to_scalar(got, want)
        details[name] = {"computed": str(got), "scalar": None if c is None else _scalar(c)}
        if c is None:
            bad.append(f"{name}: computed {got}, stated {want}")
    return (FAIL if bad else PASS), details, (bad or None)


def check_section(sc, call, opts):
    Q, S = call.args[:3], call.args[3:9]
    coords = [sc.poly(n) for n in S]
    sys = bundle_system([sc.poly(n) for n in Q], coords[0].vars.mu)
    section = RationalSection(tuple(coords))
    res = section_residuals(sys, section)
    # per-quadric contributions l_i * (L_i, M_i, q_i)(s) before they cancel
    table = sys.vars
    lam = [Polynomial.var(table, n) for n in table.mu]
    contributions = {"e1": [], "e2": [], "e3": []}
    for l, q in zip(lam, (sc.poly(n) for n in Q)):
        d = decompose_along_line(q)
        for key, part in zip(contributions, (d.L, d.M, d.q)):
            moved = substitute(part, {x: Polynomial.var(table, x) for x in FIBER_VARS}, table)
            contributions[key].append(str(l * substitute(moved, dict(zip(FIBER_VARS, coords)))))
    details = {k: {"terms": v, "sum": str(r)} for (k, v), r in zip(contributions.items(), res)}
    ok = all(r.is_zero() for r in res)
    return (PASS if ok else FAIL), details, (None if ok else [str(r) for r in res])


def check_eliminate(sc, call, opts):
    E, target = call.args[:3], sc.poly(call.args[3])
    sys = BundleSystem(*(sc.poly(n) for n in E))
    el = eliminate(sys)
    c = same_up_to_scalar(el.result, target)
    in_ideal = elimination_in_ideal(sys, el)
    details = {"result": str(el.result), "multiplier": str(el.multiplier),
               "scalar": None if c is None else _scalar(c), "in_ideal": in_ideal}
    ok = c is not None and in_ideal
    if "conic" in call.kwargs:
        F = sc.poly(call.kwargs["conic"])
        coeff = _x_coefficient(el.result, call.kwargs.get("along", "x5"), 2)
        conic_ok = same_up_to_scalar(coeff, F) is not None
        details["conic"] = str(coeff)
        details["conic_matches"] = conic_ok
        ok = ok and conic_ok
    return (PASS if ok else FAIL), details, (None if ok else f"computed {el.result}, stated {target}")


def _x_coefficient(f: Polynomial, var: str, k: int) -> Polynomial:
    i = f.vars.position(var)
    return Polynomial(f.vars, {e[:i] + (0,) + e[i + 1:]: c for e, c in f.terms.items() if e[i] == k}, f.field)


def check_discriminant(sc, call, opts):
    sys = BundleSystem(*(sc.poly(n) for n in call.args[:3]))
    D = discriminant_octic(sys)
    details = {"discriminant": str(D), "degree": None if D.is_zero() else D.degree()}
    if len(call.args) < 4:
        ok = D.is_zero() or D.degree() == 8
        return (PASS if ok else FAIL), details, None
    want = sc.poly(call.args[3])
    ratio = _monomial_ratio(D, want)
    details["ratio"] = ratio
    ok = ratio is not None
    return (PASS if ok else FAIL), details, (None if ok else f"{D} is not a monomial multiple of {want}")


def _monomial_ratio(f: Polynomial, g: Polynomial):
    """c*m (constant times monomial) with f == c*m*g or g == c*m*f, as text."""
    for a, b, flip in ((f, g, False), (g, f, True)):
        q = exact_divide(a, b)
        if q is not None and len(q) == 1:
            return ("1/" if flip else "") + f"({q})"
    return None


def check_smoothness(sc, call, opts):
    net = [sc.poly(n) for n in call.args[:3]]
    expect = call.kwargs.get("expect", "certified")
    if expect not in ("certified", "not-certified"):
        raise ScenarioError(f"expect must be certified or not-certified, got {expect!r}")
    p = int(call.kwargs["prime"]) if "prime" in call.kwargs else opts.prime
    bound = int(call.kwargs.get("bound", DEFAULT_POWER_BOUND))
    cert = smoothness_check(net, p, SMOOTHNESS_PRIMES, bound)
    details = {"status": cert.status, "prime": cert.prime, "attempts": cert.attempts,
               "witness": cert.witness, "expected": expect}
    if expect == "certified":
        if cert.smooth:
            return PASS, details, None
        if all(a["status"] == "inconclusive" for a in cert.attempts):
            return INCONCLUSIVE, details, None
        return FAIL, details, cert.witness
    return (FAIL if cert.smooth else PASS), details, None


def _piece_exact(net: QuadricNet, a: int, b: int, limit: int = 60000):
    """Dimension over Q when the generator matrix is small enough, else None."""
    monos = monomial_basis(a, b, net.vars)
    if not monos:
        return 0
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for g in jacobian_generators(net):
        if g.is_zero():
            continue
        c, d = g.bidegree()
        if c > a or d > b:
            continue
        for m in monomial_basis(a - c, b - d, net.vars):
            row = [0] * len(monos)
            for e, v in g.terms.items():
                row[index[tuple(x + y for x, y in zip(m, e))]] = v
            rows.append(row)
    if len(rows) * len(monos) > limit:
        return None
    if not rows:
        return len(monos)
    r = rank_certified(ExactMatrix(rows, 0, len(monos)), exact=True)
    return len(monos) - r.rank


def check_hodge(sc, call, opts):
    net = _net(sc, call.args[:3])
    primes = _primes(opts)
    rep = hodge_check(net, primes)
    details = rep.as_dict()
    ok = rep.passed
    if opts.exact:
        exact = {}
        for (a, b), want in HODGE_TARGETS.items():
            d = _piece_exact(net, a, b)
            exact[f"R{a},{b}"] = "too large for exact rank; modular upper bound only" if d is None else d
            if d is not None and d != want:
                ok = False
        details["exact"] = exact
    return (PASS if ok else FAIL), details, (None if ok else details["dims"])


def check_symmetry(sc, call, opts):
    net = _net(sc, call.args[:3])
    p = _jac_prime(opts)
    a = graded_piece(net, 1, 0, p).dim
    b = graded_piece(net, 3, 4, p).dim
    return (PASS if a == b else FAIL), {"R1,0": a, "R3,4": b, "prime": p}, None


def check_period(sc, call, opts):
    net = _net(sc, call.args[:3])
    gamma = sc.poly(call.args[3])
    details, ok = {"gamma": str(gamma)}, True
    for p in _primes(opts):
        target = graded_piece(net, 3, 4, p)
        r = period_rank(net, gamma, p)
        details[str(p)] = {"rank": r, "dim R3,4": target.dim, "dim R1,2": graded_piece(net, 1, 2, p).dim,
                           "basis R3,4": [format_monomial(m, net.vars.names) for m in target.basis]}
        ok = ok and r == target.dim
    return (PASS if ok else FAIL), details, None


def check_basis(sc, call, opts):
    net = _net(sc, call.args[:3])
    elems = [sc.poly(n) for n in call.args[3:]]
    a, b = (int(v) for v in call.kwargs.get("bidegree", "3 4").split())
    details, ok = {}, True
    for p in _primes(opts):
        v = verify_basis(net, elems, a, b, p)
        details[str(p)] = v
        ok = ok and v
    details["elements"] = [str(e) for e in elems]
    return (PASS if ok else FAIL), details, None


def check_maps_into(sc, call, opts):
    Y, phi = sc.poly(call.args[0]), sc.maps[call.args[1]]
    eqs = [sc.poly(n) for n in call.args[2:]]
    rep = maps_into_report(Y, phi, eqs)
    details = {f"{n}∘{call.args[1]}": ("0" if q is not None and q.is_zero() else
                                       f"({q}) * {call.args[0]}" if q is not None else "not divisible")
               for n, q in zip(call.args[2:], rep.quotients)}
    return (PASS if rep.passed else FAIL), details, (None if rep.passed else rep.as_dict()["residuals"])


def check_indeterminacy(sc, call, opts):
    phi, Y = sc.maps[call.args[0]], sc.poly(call.args[1])
    loci = {n: sc.loci[n] for n in call.args[2:]}
    res = indeterminacy_components(phi, Y, loci)
    ok = all(r.passed for r in res)
    return (PASS if ok else FAIL), {r.name: r.as_dict() for r in res}, None


def check_chart(sc, call, opts):
    name = call.args[0]
    # parents are verified along the way; only the requested report is kept
    chain, c = [], sc.charts[name]
    while True:
        chain.append(c)
        if c.parent == "phi":
            break
        c = sc.charts[c.parent]
    dom = sc.poly(call.kwargs.get("domain", "Y"))
    phi = sc.maps[call.kwargs.get("map", "phi")]
    eqs = [sc.poly(n) for n in call.kwargs.get("targets", "E1 E2 E3").split()]
    reports = {r.name: r for r in verify_charts(chain, dom, phi, eqs)}
    rep = reports[name]
    d = rep.as_dict()
    wit = d.pop("witnesses")
    return (PASS if rep.passed else FAIL), d, (wit or None)


def check_chow(sc, call, opts):
    cls = sc.classes[call.args[0]]
    want = call.kwargs.get("expected")
    names = ("h1", "h2") if want and ("h1" in want or "h2" in want) else ("g1", "g2")
    expected = ChowClass.parse(want, cls.ambient, names)
    ok = cls == expected
    return (PASS if ok else FAIL), {"class": str(cls), "expected": str(expected), "basis names": names}, None


def check_gram(sc, call, opts):
    cls, want = sc.classes[call.args[0]], sc.grams[call.args[1]]
    G = gram_table(cls)
    ok = G.matrix == want
    return (PASS if ok else FAIL), G.as_dict(), (None if ok else {"stated": want})


def check_compare(sc, call, opts):
    A, B = (GramLattice(("g1^2", "g1*g2", "g2^2"), sc.grams[n]) for n in call.args[:2])
    rep = two_adic_compare(A, B)
    want = call.kwargs.get("expect")
    ok = want is None or rep.verdict == want
    return (PASS if ok else FAIL), rep.as_dict(), None


CHECKS: dict[str, Callable] = {
    "line": check_line,
    "bundle": check_bundle,
    "section": check_section,
    "eliminate": check_eliminate,
    "discriminant": check_discriminant,
    "smoothness": check_smoothness,
    "hodge": check_hodge,
    "symmetry": check_symmetry,
    "period": check_period,
    "basis": check_basis,
    "maps_into": check_maps_into,
    "indeterminacy": check_indeterminacy,
    "chart": check_chart,
    "chow": check_chow,
    "gram": check_gram,
    "compare": check_compare,
}


def run_check(sc: Scenario, call: CheckCall, opts: Options) -> CheckResult:
    fn = CHECKS.get(call.name)
    t0 = time.perf_counter()
    if fn is None:
        status, details, witness = FAIL, {"error": f"unknown check {call.name!r}; known: {', '.join(sorted(CHECKS))}"}, None
    else:
        try:
            status, details, witness = fn(sc, call, opts)
        except (ScenarioError, ValueError, KeyError, ArithmeticError) as exc:
            status, details, witness = FAIL, {"error": f"{type(exc).__name__}: {exc}"}, None
    return CheckResult(call.label, status, details, witness, int((time.perf_counter() - t0) * 1000))


def _worker(args):
    text, path, index, opts = args
    sc = parse_scenario(text, Path(path) if path else None)
    return run_check(sc, sc.checks[index], opts)


def run_scenario(sc: Scenario, opts: Options | None = None, prefix: str = "") -> list[CheckResult]:
    opts = opts or Options()
    if opts.jobs > 1 and len(sc.checks) > 1:
        jobs = [(sc.text, None, i, opts) for i in range(len(sc.checks))]
        with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
            results = list(pool.map(_worker, jobs))
    else:
        results = [run_check(sc, c, opts) for c in sc.checks]
    if prefix:
        for r in results:
            r.name = f"{prefix}: {r.name}"
    return results


# ---------------------------------------------------------------------------
# presets

def preset_path(name: str) -> Path:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS + ('all',))}")
    return Path(str(resources.files("quadricnets") / "presets" / f"{name}.scn"))


def load_preset(name: str) -> Scenario:
    return load_scenario(preset_path(name))


def dump_preset(name: str) -> str:
    return load_preset(name).text


def run_preset(name: str, opts: Options | None = None) -> Report:
    if name == "all":
        checks = []
        for p in PRESETS:
            checks += run_scenario(load_preset(p), opts, prefix=p)
        return Report("all", checks)
    sc = load_preset(name)
    return Report(sc.name or name, run_scenario(sc, opts))


def run_path(path, opts: Options | None = None) -> Report:
    sc = load_scenario(path)
    return Report(sc.name or Path(path).stem, run_scenario(sc, opts))
