"""Compare expansions at infinity with the admissible local shape of holonomic
functions,

    exp(P(Z^{-1/r})) Z^alpha sum_j Q_j(log Z) Z^{j s},     Z = 1/z,

and name the first violated clause.

Rationality and "infinitely many" are structural declarations (exact
``Fraction`` anchors, lattice flags, declaration strings); they are never
guessed from floating-point values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .coeff_functions import (Algebraic, CoefficientFunction, Essential, PoleLattice,
                              singularity_to_json)
from .errors import DomainError, HypothesisError, UnanchoredExactnessError
from .expansions import (INFINITY, Expansion, ExpansionTerm, algebraic_expansion,
                         polar_expansion)

CONSISTENT = "Consistent"
VIOLATION = "Violation"
CLAUSES = ("NonIntegerLogPower", "ExpOfLogPower", "IrrationalProgressionStep",
           "InfinitelyManyImaginaryParts", "UnboundedLogDegree",
           "NotInFiniteProgressionUnion")

DECL_NOT_PROGRESSION = "poles-not-finite-progression-union"
DECL_INFINITE_IMAG = "infinitely-many-imaginary-parts"
DECL_UNBOUNDED_LOG = "unbounded-log-degree"

# a float this far from every integer cannot be an integer
_INTEGER_SLACK = 1e-9


@dataclass(frozen=True)
class Verdict:
    status: str
    clause: str | None = None
    witness: object = None
    note: str = ""

    def __post_init__(self):
        if self.status == VIOLATION and self.witness is None:
            raise DomainError("a violation needs a witness")

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, ExpansionTerm):
            w = {"term": w.to_json()}
        elif isinstance(w, PoleLattice):
            w = {"lattice": singularity_to_json(w)}
        elif isinstance(w, (list, tuple)):
            w = {"exponents": [str(x) for x in w]}
        elif w is not None and not isinstance(w, (str, dict)):
            w = str(w)
        return {"schema_version": 1, "status": self.status, "clause": self.clause,
                "witness": w, "note": self.note}


@dataclass(frozen=True)
class ExponentSet:
    """A finite set of z-exponents (e.g. pole locations) to test for a progression cover.

    Entries are ``Fraction`` (exact real), a pair of ``Fraction`` (exact complex)
    or floats; floats are accepted only together with a declaration.
    """
    exponents: tuple
    declarations: frozenset = frozenset()
    unbounded: bool = False
    label: str = ""


# -- exactness helpers --------------------------------------------------------------

def _is_integer(value, anchor: Fraction | None, what: str) -> bool:
    if anchor is not None:
        return anchor.denominator == 1
    v = complex(value)
    if v.imag != 0:
        return False
    if abs(v.real - round(v.real)) > _INTEGER_SLACK:
        return False
    raise UnanchoredExactnessError(
        f"{what} = {v.real!r} is numerically an integer but carries no exact anchor")


def _exact_exponent(e):
    """Exact (re, im) pair of Fractions, or None for unanchored floats."""
    if isinstance(e, Fraction):
        return (e, Fraction(0))
    if isinstance(e, int):
        return (Fraction(e), Fraction(0))
    if isinstance(e, tuple) and len(e) == 2 and all(isinstance(x, (Fraction, int)) for x in e):
        return (Fraction(e[0]), Fraction(e[1]))
    return None


def min_progressions(exps, max_den: int = 64) -> int:
    """Fewest progressions a + (m/d) N, d <= max_den, covering exact exponents."""
    classes: dict = {}
    for re, im in exps:
        # exponents differing by a rational number can share a progression
        classes.setdefault(im, []).append(re)
    total = 0
    for values in classes.values():
        remaining = sorted(set(values))
        while remaining:
            best = None
            for base in remaining:
                for d in range(1, max_den + 1):
                    covered = [v for v in remaining
                               if v >= base and ((v - base) * d).denominator == 1]
                    if best is None or len(covered) > len(best):
                        best = covered
                if best is not None and len(best) == len(remaining):
                    break
            remaining = [v for v in remaining if v not in best]
            total += 1
    return total


# -- classification ----------------------------------------------------------------

def classify(obj, budget: int = 8, max_den: int = 64) -> Verdict:
    """Verdict for an Expansion, a CoefficientFunction, a singularity catalog
    (sequence of singularities) or an :class:`ExponentSet`."""
    if isinstance(obj, Expansion):
        return _classify_expansion(obj, budget, max_den)
    if isinstance(obj, CoefficientFunction):
        return _classify_function(obj, budget, max_den)
    if isinstance(obj, ExponentSet):
        return _classify_exponents(obj, budget, max_den)
    if isinstance(obj, (list, tuple)):
        v = _classify_catalog(tuple(obj), frozenset())
        return v or Verdict(CONSISTENT, note="no violating catalog entry")
    raise DomainError(f"cannot classify an object of type {type(obj).__name__}")


def _canonical(terms):
    return sorted(terms, key=lambda t: json.dumps(t.to_json(), sort_keys=True))


def _classify_expansion(E: Expansion, budget, max_den) -> Verdict:
    if E.variable != INFINITY:
        raise DomainError("classification needs an expansion at infinity (Z = 1/z)")
    terms = _canonical(E.terms)
    for t in terms:
        if t.exp_beta is not None and t.exp_q != 0 and not _is_integer(
                t.exp_beta, t.exp_beta_exact, "exp power"):
            return Verdict(VIOLATION, "ExpOfLogPower", t,
                           f"factor exp(q (log z)^{t.exp_beta:g}) with non-integer power")
        if t.osc is not None and not _is_integer(t.osc.beta, t.osc.beta_exact, "cos power"):
            return Verdict(VIOLATION, "ExpOfLogPower", t,
                           f"factor cos(r (log z)^{t.osc.beta:g} + phase) with non-integer power")
    for t in terms:
        if not _is_integer(t.log_pow, t.log_pow_exact, "log power"):
            return Verdict(VIOLATION, "NonIntegerLogPower", t,
                           f"(log z)^{complex(t.log_pow).real:g} has a non-integer exponent")
    v = _classify_catalog(E.lattices, E.declarations)
    if v is not None:
        return v
    if DECL_UNBOUNDED_LOG in E.declarations:
        return Verdict(VIOLATION, "UnboundedLogDegree", DECL_UNBOUNDED_LOG,
                       "log-polynomial degrees are declared unbounded")
    exps = [_term_exponent(t) for t in terms]
    if any(e is None for e in exps):
        raise UnanchoredExactnessError(
            "some z-exponents carry no exact anchor; declare the structure instead")
    n = min_progressions(exps, max_den)
    if n > budget:
        return Verdict(VIOLATION, "NotInFiniteProgressionUnion", tuple(_fmt_exp(e) for e in exps),
                       f"needs {n} > {budget} progressions (step denominators <= {max_den}); "
                       "semi-decision within budget")
    return Verdict(CONSISTENT, note=f"exponents covered by {n} rational progression(s)")


def _term_exponent(t: ExpansionTerm):
    if t.s0_exact is not None and complex(t.s0).imag == 0:
        return (t.s0_exact, Fraction(0))
    return None


def _fmt_exp(e):
    re, im = e
    return str(re) if im == 0 else f"{re}+{im}i"


def _classify_catalog(catalog, declarations) -> Verdict | None:
    lattices = sorted((s for s in catalog if isinstance(s, PoleLattice)),
                      key=lambda l: json.dumps(singularity_to_json(l), sort_keys=True))
    for lat in lattices:
        step = complex(lat.step)
        if step.real != 0 and lat.count != 1:
            if lat.step_rational is None:
                raise UnanchoredExactnessError(
                    f"lattice step {lat.step_text or step} has no rationality declaration")
            if lat.step_rational is False:
                return Verdict(VIOLATION, "IrrationalProgressionStep", lat,
                               f"pole progression with irrational step {lat.step_text or step}")
    for lat in lattices:
        if lat.count is None and complex(lat.step).imag != 0:
            return Verdict(VIOLATION, "InfinitelyManyImaginaryParts", lat,
                           f"unbounded vertical pole lattice, step {lat.step_text or lat.step}")
    if DECL_INFINITE_IMAG in declarations:
        return Verdict(VIOLATION, "InfinitelyManyImaginaryParts", DECL_INFINITE_IMAG,
                       "exponents with infinitely many imaginary parts (declared)")
    if DECL_NOT_PROGRESSION in declarations:
        return Verdict(VIOLATION, "NotInFiniteProgressionUnion", DECL_NOT_PROGRESSION,
                       "pole set declared not to be a finite union of progressions")
    return None


def _classify_exponents(S: ExponentSet, budget, max_den) -> Verdict:
    if S.unbounded:
        return Verdict(VIOLATION, "InfinitelyManyImaginaryParts", S.label or "unbounded set",
                       "declared unbounded exponent family")
    v = _classify_catalog((), S.declarations)
    if v is not None:
        return v
    exps = [_exact_exponent(e) for e in S.exponents]
    if any(e is None for e in exps):
        raise UnanchoredExactnessError("exponent set contains floats without a declaration")
    n = min_progressions(exps, max_den)
    if n > budget:
        return Verdict(VIOLATION, "NotInFiniteProgressionUnion", tuple(_fmt_exp(e) for e in exps),
                       f"needs {n} > {budget} progressions; semi-decision within budget")
    return Verdict(CONSISTENT, note=f"covered by {n} progression(s)")


def _classify_function(f: CoefficientFunction, budget, max_den) -> Verdict:
    v = _classify_catalog(f.catalog, f.declarations)
    if v is not None:
        return v
    if f.kind == "exp" and f.params[1] < 0 and f.params[0] != 0:
        from .saddle_boundary import saddle_expansion
        E = saddle_expansion(*f.params)
    elif any(isinstance(s, Algebraic) for s in f.catalog):
        E = algebraic_expansion(f, 1.0)
    elif any(isinstance(s, Essential) for s in f.catalog):
        raise HypothesisError(f"{f.label}: essential singularity without a known expansion")
    else:
        E = polar_expansion(f, 2.5)
    return _classify_expansion(E, budget, max_den)
