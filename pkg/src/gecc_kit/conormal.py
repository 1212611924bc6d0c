"""Conormal and relative conormal varieties from stratified input.

Construction is Jacobian-minor based: the fiber conditions are linear in
the cotangent coordinates with coefficients the Jacobian minors, and the
rank-drop locus is removed by a single-witness saturation. That shape is
exactly the prime-certification route of the decomposition engine, so
every emitted component is certified by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import modclass as mc
from .cycles import (
    AmbientSpace,
    Component,
    EnrichedCycle,
    GradedEnrichedCycle,
    TSTAR_KIND,
    U_KIND,
    component_from_prime,
)
from .decompose import minimal_primes
from .ideal import (
    DEFAULT_LIMITS,
    EngineLimits,
    Ideal,
    radical_contains,
    saturate_element,
    variety_contained_in,
)
from .modclass import ModClass
from .polyring import COTANGENT, Polynomial, VarContext


class RankAnomaly(RuntimeError):
    """Jacobian rank does not match the stratum codimension."""


class FConstantOnStratum(RuntimeError):
    """Relative conormal requested for a function constant on the stratum."""


class StratificationError(ValueError):
    """Stratified-complex descriptor violates a structural invariant."""


@dataclass
class Stratum:
    """Closure ideal (prime, in the base space), dimension, Morse table."""

    name: str
    closure_ideal: Ideal
    dim: int
    morse: dict = field(default_factory=dict)

    def visible(self) -> bool:
        return any(not m.is_zero() for m in self.morse.values())

    def morse_items(self) -> list:
        return sorted((k, m) for k, m in self.morse.items() if not m.is_zero())


class StratifiedComplex:
    """Ambient base space plus strata; the full engine input descriptor."""

    def __init__(
        self,
        ambient: AmbientSpace,
        strata: Sequence[Stratum],
        label: str = "F",
        validate: bool = True,
        limits: EngineLimits | None = None,
    ):
        if ambient.kind != U_KIND:
            raise StratificationError("stratified complexes live in a base space U")
        self.ambient = ambient
        self.strata = list(strata)
        self.label = label
        self.limits = limits or DEFAULT_LIMITS
        if validate:
            self._validate()

    def _validate(self) -> None:
        seen = []
        for s in self.strata:
            if s.closure_ideal.ctx != self.ambient.context():
                raise StratificationError(f"stratum {s.name}: wrong context")
            d = s.closure_ideal.dimension(self.limits)
            if d != s.dim:
                raise StratificationError(
                    f"stratum {s.name}: declared dim {s.dim}, computed {d}"
                )
            if any(s.closure_ideal == t for t in seen):
                raise StratificationError(f"duplicate stratum closure {s.name}")
            seen.append(s.closure_ideal)

    def visible_strata(self) -> list:
        return [s for s in self.strata if s.visible()]

    def tstar_ambient(self) -> AmbientSpace:
        return self.ambient.with_kind(TSTAR_KIND)

    def stratum(self, name: str) -> Stratum:
        for s in self.strata:
            if s.name == name:
                return s
        raise KeyError(name)

    def check_vf_union_of_strata(self, ft: Polynomial) -> bool:
        """V(f) meets X in a union of strata closures."""
        inside = [s for s in self.strata if radical_contains(s.closure_ideal, ft, self.limits)]
        for s in self.strata:
            if s in inside:
                continue
            cut = s.closure_ideal.with_extra([ft])
            if cut.is_trivial():
                continue
            pieces = minimal_primes(cut, self.limits)
            for w in pieces:
                if not any(
                    variety_contained_in(w.ideal, t.closure_ideal, self.limits)
                    for t in inside
                ):
                    return False
        return True


# ---------------------------------------------------------------------------
# Jacobian-minor machinery


def _det(matrix: list) -> Polynomial:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    ctx = matrix[0][0].ctx
    total = ctx.zero()
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in matrix[1:]]
        term = entry * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _gradient(p: Polynomial, base_names: Sequence[str], ctx: VarContext) -> list:
    return [p.partial(n).lift(ctx) if p.degree_in(n) > 0 else ctx.zero() for n in base_names]


def _minors_with_last_row(rows: list, size: int, ncols: int) -> list:
    """Determinants of size x size submatrices forced to use the final row."""
    if size > len(rows) or size > ncols:
        return []
    head = rows[:-1]
    out = []
    for rsel in itertools.combinations(range(len(head)), size - 1):
        for csel in itertools.combinations(range(ncols), size):
            matrix = [[head[i][j] for j in csel] for i in rsel]
            matrix.append([rows[-1][j] for j in csel])
            d = _det(matrix)
            if not d.is_zero():
                out.append(d)
    return out


def _rank_witness(rows: list, size: int, ncols: int, modulus: Ideal) -> Polynomial | None:
    """A size x size minor of the given rows nonzero mod the ideal."""
    if size == 0:
        return None  # rank condition vacuous; no saturation needed
    if size > len(rows) or size > ncols:
        return "rank-too-small"  # sentinel: no such minor exists
    for rsel in itertools.combinations(range(len(rows)), size):
        for csel in itertools.combinations(range(ncols), size):
            matrix = [[rows[i][j] for j in csel] for i in rsel]
            d = _det(matrix)
            if d.is_zero():
                continue
            if not modulus.contains(d):
                return d
    return "rank-too-small"


def _conormal_from_rows(
    stratum: Stratum,
    extra_rows: list,
    ambient_t: AmbientSpace,
    limits: EngineLimits,
) -> Component:
    """Common core: I_S + minors([J; extras; w]) saturated at a rank witness."""
    ctx = ambient_t.context()
    base_names = [v.name for v in ambient_t.base_vars()]
    lifted = [g.lift(ctx) for g in stratum.closure_ideal.generators]
    base = Ideal(ctx, lifted)
    rows = [_gradient(g, base_names, ctx) for g in stratum.closure_ideal.generators]
    rows += extra_rows
    c = (ambient_t.n + 1) - stratum.dim + (len(extra_rows))
    ncols = ambient_t.n + 1
    witness = _rank_witness(rows, c, ncols, base)
    if witness == "rank-too-small" and c <= min(len(rows), ncols):
        raise RankAnomaly(
            f"stratum {stratum.name}: expected generic rank {c} not attained"
        )
    wrow = [ctx.gen(v) for v in ambient_t.cotangent_vars()]
    minors = _minors_with_last_row(rows + [wrow], c + 1, ncols)
    full = Ideal(ctx, lifted + minors)
    if isinstance(witness, Polynomial):
        full = saturate_element(full, witness, limits)
    return component_from_prime(full, ambient_t, limits)


def conormal_variety(
    stratum: Stratum,
    ambient_t: AmbientSpace,
    limits: EngineLimits | None = None,
) -> Component:
    """Closure of the conormal space to the stratum, as a certified component."""
    limits = limits or DEFAULT_LIMITS
    comp = _conormal_from_rows(stratum, [], ambient_t, limits)
    if comp.dim != ambient_t.n + 1:
        raise RankAnomaly(
            f"conormal of {stratum.name} has dimension {comp.dim}, "
            f"expected Lagrangian dimension {ambient_t.n + 1}"
        )
    _assert_conic(comp, ambient_t)
    return comp


def f_nonconstant_on(stratum: Stratum, ft: Polynomial, ambient_t: AmbientSpace,
                     limits: EngineLimits | None = None) -> bool:
    """d(f|_S) not identically zero: some Jacobian+gradient minor survives."""
    limits = limits or DEFAULT_LIMITS
    ctx = ambient_t.context()
    base_names = [v.name for v in ambient_t.base_vars()]
    base = Ideal(ctx, [g.lift(ctx) for g in stratum.closure_ideal.generators])
    rows = [_gradient(g, base_names, ctx) for g in stratum.closure_ideal.generators]
    rows.append(_gradient(ft, base_names, ctx))
    c = (ambient_t.n + 1) - stratum.dim
    witness = _rank_witness(rows, c + 1, ambient_t.n + 1, base)
    return isinstance(witness, Polynomial)


def relative_conormal(
    stratum: Stratum,
    ft: Polynomial,
    ambient_t: AmbientSpace,
    limits: EngineLimits | None = None,
) -> Component:
    """Closure of the relative conormal of f on the stratum."""
    limits = limits or DEFAULT_LIMITS
    ctx = ambient_t.context()
    base_names = [v.name for v in ambient_t.base_vars()]
    if not f_nonconstant_on(stratum, ft, ambient_t, limits):
        raise FConstantOnStratum(
            f"{ft} is constant on stratum {stratum.name}"
        )
    frow = _gradient(ft, base_names, ctx)
    comp = _conormal_from_rows(stratum, [frow], ambient_t, limits)
    if comp.dim != ambient_t.n + 2:
        raise RankAnomaly(
            f"relative conormal of {stratum.name} has dimension {comp.dim}, "
            f"expected {ambient_t.n + 2}"
        )
    _assert_conic(comp, ambient_t)
    return comp


def _assert_conic(comp: Component, ambient_t: AmbientSpace) -> None:
    positions = [comp.ideal.ctx.position(v) for v in ambient_t.cotangent_vars()]
    for g in comp.ideal.groebner_basis():
        if not g.is_homogeneous_in(positions):
            raise RankAnomaly(f"non-conic conormal output: {g}")


def im_d(gt: Polynomial, ambient_t: AmbientSpace) -> Ideal:
    """Graph ideal of the differential of gt inside the cotangent space."""
    ctx = ambient_t.context()
    gens = []
    for zv, wv in zip(ambient_t.base_vars(), ambient_t.cotangent_vars()):
        gens.append(ctx.gen(wv) - gt.partial(zv.name).lift(ctx))
    return Ideal(ctx, gens)


def gecc_assemble(
    SC: StratifiedComplex, limits: EngineLimits | None = None
) -> GradedEnrichedCycle:
    """Graded enriched characteristic cycle from the Morse tables."""
    limits = limits or SC.limits
    ambient_t = SC.tstar_ambient()
    degrees: dict = {}
    for s in SC.visible_strata():
        comp = conormal_variety(s, ambient_t, limits)
        for k, m in s.morse_items():
            cyc = degrees.setdefault(k, EnrichedCycle(ambient_t))
            degrees[k] = cyc.add_term(comp, m)
    return GradedEnrichedCycle(ambient_t, degrees)


def relative_conormal_cycle(
    SC: StratifiedComplex, ft: Polynomial, limits: EngineLimits | None = None
) -> GradedEnrichedCycle:
    """Graded enriched relative conormal cycle of f."""
    limits = limits or SC.limits
    ambient_t = SC.tstar_ambient()
    degrees: dict = {}
    for s in SC.visible_strata():
        if not f_nonconstant_on(s, ft, ambient_t, limits):
            continue
        comp = relative_conormal(s, ft, ambient_t, limits)
        for k, m in s.morse_items():
            cyc = degrees.setdefault(k, EnrichedCycle(ambient_t))
            degrees[k] = cyc.add_term(comp, m)
    return GradedEnrichedCycle(ambient_t, degrees)
