"""Exact checks of a rational map Y --> Q and of blow-up charts resolving it.

Everything lives in one variable table.  A map is a tuple of component
polynomials for named target coordinates, split into a lambda block and an
x block (each block is a point of a projective space, so each may be
rescaled independently).  A chart records the substitution defining it, the
strict-transform equation, the extension of the map and the image of the
exceptional divisor; :func:`verify_chart` turns each of these into a
polynomial identity.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .groebner import buchberger
from .poly import Polynomial, PolynomialError, VarTable, exact_divide, substitute

log = logging.getLogger(__name__)

MAX_EXCEPTIONAL_POWER = 8


@dataclass(frozen=True)
class PolyMap:
    source: VarTable
    target: VarTable
    coords: tuple                 # target coordinate names
    components: tuple             # Polynomials over source
    blocks: tuple = ()            # (start, stop) index ranges rescaled independently

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.coords) != len(self.components):
            raise PolynomialError(f"{len(self.coords)} coordinates but {len(self.components)} components")
        for c in self.coords:
            self.target.position(c)
        for f in self.components:
            if f.vars != self.source:
                raise PolynomialError("map components must live in the source table")
        if all(f.is_zero() for f in self.components):
            raise PolynomialError("all components of the map are zero")
        if not self.blocks:
            object.__setattr__(self, "blocks", ((0, len(self.coords)),))

    @classmethod
    def identity(cls, table: VarTable, coords: Sequence[str] | None = None) -> "PolyMap":
        coords = tuple(coords or table.names)
        return cls(table, table, coords, tuple(Polynomial.var(table, c) for c in coords))

    def block(self, i: int) -> tuple:
        a, b = self.blocks[i]
        return self.components[a:b]

    def pullback(self, assignment: Mapping) -> "PolyMap":
        """Components with a change of variables substituted in."""
        return replace(self, components=tuple(substitute(f, assignment) for f in self.components))

    def __str__(self):
        return "(" + ", ".join(str(f) for f in self.components) + ")"


def compose(map: PolyMap, f: Polynomial) -> Polynomial:
    if f.vars != map.target:
        raise PolynomialError("polynomial does not live in the target table of the map")
    return substitute(f, dict(zip(map.coords, map.components)), map.source if map.source != map.target else None)


# ---------------------------------------------------------------------------
# membership helpers

def residual(f: Polynomial, gens: Sequence[Polynomial]) -> Polynomial:
    """Normal form of f modulo the ideal (gens) over Q; zero iff f is a member."""
    gens = [g for g in gens if not g.is_zero()]
    if f.is_zero():
        return f
    if not gens:
        return f
    if len(gens) == 1 and exact_divide(f, gens[0]) is not None:
        return Polynomial.zero(f.vars, f.field)
    return buchberger(gens, check=False).normal_form(f)


def divisible(f: Polynomial, g: Polynomial) -> bool:
    return f.is_zero() or exact_divide(f, g) is not None


@dataclass
class MapsIntoReport:
    passed: bool
    quotients: list          # composition / domain_eq, or None where not divisible
    residuals: list          # normal forms, zero on success

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "quotients": [None if q is None else str(q) for q in self.quotients],
            "residuals": [str(r) for r in self.residuals],
        }


def maps_into_report(domain_eq: Polynomial, map: PolyMap, target_eqs: Sequence[Polynomial]) -> MapsIntoReport:
    if domain_eq.is_zero():
        raise PolynomialError("domain equation is zero")
    quotients, residuals = [], []
    for e in target_eqs:
        c = compose(map, e)
        q = Polynomial.zero(c.vars) if c.is_zero() else exact_divide(c, domain_eq)
        quotients.append(q)
        residuals.append(Polynomial.zero(c.vars) if q is not None else residual(c, [domain_eq]))
    return MapsIntoReport(all(q is not None for q in quotients), quotients, residuals)


def maps_into(domain_eq: Polynomial, map: PolyMap, target_eqs: Sequence[Polynomial]) -> bool:
    return maps_into_report(domain_eq, map, target_eqs).passed


# ---------------------------------------------------------------------------
# indeterminacy

@dataclass
class LocusCheck:
    name: str
    ideal: list
    map_vanishes: bool          # some block of the map vanishes identically on the locus
    on_domain: bool             # the locus lies on the domain hypersurface
    block: int | None = None
    residuals: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.map_vanishes and self.on_domain

    def as_dict(self) -> dict:
        return {"locus": self.name, "ideal": [str(g) for g in self.ideal],
                "map_vanishes": self.map_vanishes, "on_domain": self.on_domain,
                "block": self.block, "residuals": [str(r) for r in self.residuals]}


def indeterminacy_components(map: PolyMap, domain_eq: Polynomial | None,
                             loci: Mapping[str, Sequence[Polynomial]]) -> list[LocusCheck]:
    """Check that the map is undefined along each stated locus.

    A point is in the indeterminacy locus when one whole block of coordinates
    vanishes there; membership of each component in the locus ideal is decided
    with a Groebner basis over Q.
    """
    out = []
    for name, ideal in loci.items():
        ideal = list(ideal)
        gb = buchberger(ideal, check=False)
        hit, best = None, None
        for b in range(len(map.blocks)):
            res = [gb.normal_form(f) for f in map.block(b)]
            if all(r.is_zero() for r in res):
                hit = b
                best = res
                break
            if best is None:
                best = res
        on = domain_eq is None or gb.contains(domain_eq)
        out.append(LocusCheck(name, ideal, hit is not None, on, hit,
                              [] if hit is not None else [r for r in best if not r.is_zero()]))
    return out


# ---------------------------------------------------------------------------
# charts

CHART_ITEMS = (
    "change of variables",
    "equation defining the blowup",
    "exceptional divisor",
    "extension of phi",
    "image of the exceptional divisor",
)


@dataclass
class ChartSpec:
    name: str
    parent: str                                   # "phi" or another chart name
    substitution: dict                            # var -> Polynomial
    chart_equation: Polynomial
    exceptional_parameter: Polynomial
    exceptional_equation: Polynomial | None       # strict transform restricted to the divisor
    extension: PolyMap
    claimed_image: tuple
    restriction: dict = field(default_factory=dict)      # how to restrict to the divisor
    dehomogenize: dict = field(default_factory=dict)     # affine chart used for the image
    indeterminacy: list = field(default_factory=list)    # stated locus where the extension fails
    errata: dict = field(default_factory=dict)           # item -> Erratum
    derived: tuple = ()                                  # items not displayed, computed by hand
    notes: tuple = ()

    def __post_init__(self):
        if self.chart_equation.is_zero():
            raise PolynomialError(f"chart {self.name}: equation defining the blowup is zero")
        table = self.chart_equation.vars
        for v in self.substitution:
            table.position(v)
        if not self.restriction:
            p = self.exceptional_parameter
            names = p.variables()
            if len(p) == 1 and len(names) == 1 and p.degree() == 1:
                self.restriction = {names.pop(): 0}
            else:
                raise PolynomialError(f"chart {self.name}: exceptional parameter {p} needs an explicit restriction")

    def corrected(self) -> "ChartSpec":
        """The chart with every erratum applied."""
        out = replace(self)
        for item, e in self.errata.items():
            out = e.apply(out)
        return out


@dataclass
class Erratum:
    item: str
    printed: str
    corrected: str
    note: str
    value: object                     # parsed replacement

    def apply(self, chart: ChartSpec) -> ChartSpec:
        attr = {
            "equation defining the blowup": "chart_equation",
            "exceptional divisor": "exceptional_equation",
            "extension of phi": "extension",
            "image of the exceptional divisor": "claimed_image",
            "change of variables": "substitution",
        }[self.item]
        return replace(chart, **{attr: self.value})

    def as_dict(self) -> dict:
        return {"item": self.item, "printed": self.printed, "corrected": self.corrected, "note": self.note}


CHECKS = ("pullback_matches", "extension_lands_in_Q", "exceptional_image_matches",
          "exceptional_divisor_matches", "extension_agrees_with_parent", "indeterminacy_locus")


@dataclass
class ChartReport:
    name: str
    checks: dict                      # check name -> bool (every entry of CHECKS present)
    witnesses: dict                   # check name -> residual description
    normalization: dict               # k, unit for the pullback; block ratios
    errata_applied: list = field(default_factory=list)
    printed_checks: dict = field(default_factory=dict)
    derived: tuple = ()
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def pullback_matches(self) -> bool:
        return self.checks["pullback_matches"]

    @property
    def extension_lands_in_Q(self) -> bool:
        return self.checks["extension_lands_in_Q"]

    @property
    def exceptional_image_matches(self) -> bool:
        return self.checks["exceptional_image_matches"]

    def as_dict(self) -> dict:
        return {
            "chart": self.name,
            "passed": self.passed,
            "checks": dict(self.checks),
            "printed_checks": dict(self.printed_checks),
            "witnesses": dict(self.witnesses),
            "normalization": dict(self.normalization),
            "errata_applied": list(self.errata_applied),
            "derived_items": list(self.derived),
            "notes": list(self.notes),
        }


def exceptional_power(pulled: Polynomial, param: Polynomial, equation: Polynomial,
                      max_k: int = MAX_EXCEPTIONAL_POWER):
    """(k, unit) with pulled == unit * param^k * equation, searching k <= max_k, unit = +-1."""
    rest = pulled
    for k in range(max_k + 1):
        if rest == equation:
            return k, 1
        if rest == -equation:
            return k, -1
        rest = exact_divide(rest, param)
        if rest is None:
            return None
    return None


def _block_ratio(parent: Sequence[Polynomial], child: Sequence[Polynomial]):
    """r with parent == r * child componentwise, or None."""
    pivot = next((i for i, c in enumerate(child) if not c.is_zero()), None)
    if pivot is None:
        return None
    r = exact_divide(parent[pivot], child[pivot])
    if r is None:
        return None
    if all(p == r * c for p, c in zip(parent, child)):
        return r
    return None


def _run_checks(chart: ChartSpec, domain_eq: Polynomial, parent_map: PolyMap,
                target_eqs: Sequence[Polynomial]):
    checks, witnesses, norm = {}, {}, {}
    eq = chart.chart_equation

    # (1) strict transform
    pulled = substitute(domain_eq, chart.substitution)
    found = exceptional_power(pulled, chart.exceptional_parameter, eq)
    checks["pullback_matches"] = found is not None
    if found:
        norm["exceptional_power"], norm["unit"] = found
    else:
        witnesses["pullback_matches"] = f"pullback {pulled} is not +-({chart.exceptional_parameter})^k * ({eq})"

    # (2) the extension lands in the target
    bad = []
    for i, e in enumerate(target_eqs):
        c = compose(chart.extension, e)
        if not divisible(c, eq):
            bad.append(f"e{i + 1}: residual {residual(c, [eq])}")
    checks["extension_lands_in_Q"] = not bad
    if bad:
        witnesses["extension_lands_in_Q"] = "; ".join(bad)

    # (3) image of the exceptional divisor
    image = [substitute(substitute(f, chart.restriction), chart.dehomogenize) for f in chart.extension.components]
    claimed = [substitute(f, chart.dehomogenize) for f in chart.claimed_image]
    diffs = [f"{c}: {a} vs claimed {b}" for c, a, b in zip(chart.extension.coords, image, claimed) if a != b]
    if len(claimed) != len(image):
        diffs.append(f"claimed image has {len(claimed)} coordinates, expected {len(image)}")
    checks["exceptional_image_matches"] = not diffs
    if diffs:
        witnesses["exceptional_image_matches"] = "; ".join(diffs)

    # (4) strict transform along the divisor
    if chart.exceptional_equation is None:
        checks["exceptional_divisor_matches"] = True
    else:
        restricted = substitute(eq, chart.restriction)
        ok = restricted == chart.exceptional_equation or restricted == -chart.exceptional_equation
        checks["exceptional_divisor_matches"] = ok
        if not ok:
            witnesses["exceptional_divisor_matches"] = f"equation on the divisor is {restricted}, stated {chart.exceptional_equation}"

    # (5) the extension is the parent map in new coordinates
    moved = parent_map.pullback(chart.substitution)
    ratios, ok = [], True
    for b in range(len(moved.blocks)):
        r = _block_ratio(moved.block(b), chart.extension.block(b))
        if r is None:
            ok = False
            witnesses["extension_agrees_with_parent"] = (
                f"block {b}: {', '.join(map(str, moved.block(b)))} is not a multiple of "
                f"{', '.join(map(str, chart.extension.block(b)))}")
            break
        ratios.append(str(r))
    checks["extension_agrees_with_parent"] = ok
    if ok:
        norm["block_ratios"] = ratios

    # (6) stated indeterminacy of the extension
    if chart.indeterminacy:
        loc = indeterminacy_components(chart.extension, None, {"stated": chart.indeterminacy})[0]
        checks["indeterminacy_locus"] = loc.map_vanishes
        if not loc.map_vanishes:
            witnesses["indeterminacy_locus"] = "nonvanishing: " + ", ".join(map(str, loc.residuals))
    else:
        checks["indeterminacy_locus"] = True
    return checks, witnesses, norm


def verify_chart(chart: ChartSpec, domain_eq: Polynomial, target_eqs: Sequence[Polynomial],
                 parent_map: PolyMap) -> ChartReport:
    """Run every chart check on the printed data; fall back to the listed errata.

    A chart passes if its printed data passes, or if the data with all of its
    errata applied passes; the report then lists each erratum together with
    the printed checks that failed.
    """
    checks, wit, norm = _run_checks(chart, domain_eq, parent_map, target_eqs)
    report = ChartReport(chart.name, checks, wit, norm, printed_checks=dict(checks),
                         derived=tuple(chart.derived), notes=tuple(chart.notes))
    if all(checks.values()) or not chart.errata:
        if chart.errata:
            report.notes += ("errata listed but not needed",)
        return report
    fixed = chart.corrected()
    checks2, wit2, norm2 = _run_checks(fixed, domain_eq, parent_map, target_eqs)
    report.checks, report.witnesses, report.normalization = checks2, wit2, norm2
    failed = sorted(k for k, v in checks.items() if not v)
    report.errata_applied = [dict(e.as_dict(), printed_failures=failed) for e in chart.errata.values()]
    report.witnesses["printed"] = wit
    return report


def verify_charts(charts: Sequence[ChartSpec], domain_eq: Polynomial, phi: PolyMap,
                  target_eqs: Sequence[Polynomial]) -> list[ChartReport]:
    """Verify charts in dependency order; sub-charts use their parent's corrected data."""
    if not charts:
        log.warning("no charts to verify")
        return []
    by_name = {c.name: c for c in charts}
    effective: dict = {}
    reports = {}

    def run(c: ChartSpec):
        if c.name in reports:
            return
        if c.parent == "phi":
            dom, pmap = domain_eq, phi
        else:
            parent = by_name.get(c.parent)
            if parent is None:
                raise PolynomialError(f"chart {c.name}: unknown parent {c.parent}")
            run(parent)
            p = effective[parent.name]
            dom, pmap = p.chart_equation, p.extension
        rep = verify_chart(c, dom, target_eqs, pmap)
        reports[c.name] = rep
        effective[c.name] = c.corrected() if rep.errata_applied else c

    for c in charts:
        run(c)
    return [reports[c.name] for c in sorted(charts, key=lambda c: c.name)]
