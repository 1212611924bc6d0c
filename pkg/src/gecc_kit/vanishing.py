"""Vanishing-cycle machinery: isolating coordinates, the Pi/Delta
iteration, characteristic polar cycles, downward reconstruction of the
graded cycle, and the blow-up / exceptional-divisor cross-check.

The iteration cuts the input graded cycle by the graph equations of df
one coordinate at a time, splitting off at each step the part supported
on the graph; pushforwards of those parts determine the vanishing-cycle
gecc by downward induction over dimension.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import modclass as mc
from .cycles import (
    AmbientSpace,
    Component,
    EnrichedCycle,
    GradedEnrichedCycle,
    OrdinaryCycle,
    TSTAR_KIND,
    TSTAR_P_KIND,
    U_KIND,
    U_P_KIND,
    ci_intersect,
    component_from_prime,
    decompose_components,
    divisor_intersect,
    gap_remove,
    intersection_multiplicity,
    irrelevant_ideal,
    proper_pushforward,
    pushforward_with_degree,
    scalar_multiply,
    to_ordinary,
)
from .conormal import (
    StratifiedComplex,
    Stratum,
    conormal_variety,
    gecc_assemble,
    im_d,
)
from .hypersurface import nearby_gecc
from .ideal import (
    DEFAULT_LIMITS,
    EngineLimits,
    Ideal,
    eliminate,
    radical_contains,
    variety_contained_in,
)
from .modclass import ModClass
from .polyring import Polynomial, VarContext, Variable


class InconsistencyError(RuntimeError):
    """Reconstruction arithmetic failed; inputs contradict the theory."""


class NonConicCycle(ValueError):
    """Projectivization requested for a non-homogeneous component."""


class ImproperStep(RuntimeError):
    """A Pi/Delta or slicing step met a non-proper intersection."""


# ---------------------------------------------------------------------------
# Microsupport bound and isolating coordinates


@dataclass
class MicrosupportBound:
    """Per-degree sandwich for the vanishing-cycle microsupport."""

    lower: dict
    upper: dict

    def upper_components(self) -> list:
        out: list = []
        for comps in self.upper.values():
            for c in comps:
                if c not in out:
                    out.append(c)
        return out

    def support_dimension(self, limits: EngineLimits | None = None) -> int:
        """Dimension of the base projection of the upper bound."""
        best = -1
        for comp in self.upper_components():
            ambient = comp.ambient
            dropped = [v for v in comp.ideal.ctx.variables if v.kind == "cotangent"]
            image = eliminate(comp.ideal, dropped, limits, restrict=True)
            best = max(best, image.dimension(limits))
        return best


def microsupport_phi_bound(
    SC: StratifiedComplex,
    ft: Polynomial,
    rng: random.Random,
    limits: EngineLimits | None = None,
    psi: GradedEnrichedCycle | None = None,
) -> MicrosupportBound:
    """Lower/upper bounds for |gecc(vanishing cycles)| per degree."""
    limits = limits or SC.limits
    ambient_t = SC.tstar_ambient()
    if psi is None:
        psi = nearby_gecc(SC, ft, rng, limits)
    lower: dict = {}
    upper: dict = {}
    for s in SC.visible_strata():
        if not radical_contains(s.closure_ideal, ft, limits):
            continue
        comp = conormal_variety(s, ambient_t, limits)
        for k, m in s.morse_items():
            lower.setdefault(k, [])
            if comp not in lower[k]:
                lower[k].append(comp)
    for k in sorted(set(lower) | set(psi.degrees)):
        comps = list(lower.get(k, []))
        for comp in psi.degree(k).support():
            if comp not in comps:
                comps.append(comp)
        if comps:
            upper[k] = comps
    return MicrosupportBound(lower, upper)


def phi_support_dimension(
    SC: StratifiedComplex,
    ft: Polynomial,
    limits: EngineLimits | None = None,
) -> int:
    """Upper bound for dim supp of the vanishing cycles: the dimension of
    the base projection of |gecc(F)| meet the graph of df."""
    limits = limits or SC.limits
    ambient_t = SC.tstar_ambient()
    graph = im_d(ft, ambient_t)
    wvars = list(ambient_t.cotangent_vars())
    best = -1
    for s in SC.visible_strata():
        comp = conormal_variety(s, ambient_t, limits)
        cut = comp.ideal.with_extra(graph.generators)
        if cut.is_trivial():
            continue
        image = eliminate(cut, wvars, limits, restrict=True)
        best = max(best, image.dimension(limits))
    return best


def isolating_check(
    SC: StratifiedComplex,
    ft: Polynomial,
    ss_bound: Sequence[Component],
    point: Mapping | None = None,
    s_dim: int | None = None,
    limits: EngineLimits | None = None,
) -> dict:
    """Isolating-coordinate diagnostics for the ambient coordinate order.

    For each j below the support dimension, the projectivized bound must
    meet the coordinate plane of the first j+1 cotangent directions
    properly, with the point isolated in the sliced base image.
    """
    limits = limits or SC.limits
    ambient_t = SC.tstar_ambient()
    ambient_u = SC.ambient
    ctx = ambient_t.context()
    uctx = ambient_u.context()
    wvars = list(ambient_t.cotangent_vars())
    zvars = list(ambient_u.base_vars())
    if s_dim is None:
        s_dim = phi_support_dimension(SC, ft, limits)
    results: dict = {"s": s_dim, "per_j": {}, "pass": True}
    for j in range(max(s_dim, 0)):
        ok = True
        notes = []
        for comp in ss_bound:
            cut = comp.ideal.with_extra([ctx.gen(w) for w in wvars[j + 1 :]])
            if cut.is_trivial():
                continue
            visible = Ideal(ctx, [ctx.gen(w) for w in wvars[: j + 1]])
            pieces = [
                p
                for p in decompose_components(cut, ambient_t, limits)
                if not variety_contained_in(p.ideal, visible, limits)
            ]
            for p in pieces:
                # proper slice of the projectivized cone: affine dim j+1
                if p.ideal.dimension(limits) != j + 1:
                    ok = False
                    notes.append(f"{p!r}: improper slice at j={j}")
                    continue
                image = eliminate(p.ideal, wvars, limits, restrict=True)
                image = Ideal(uctx, [g.lift(uctx) for g in image.generators])
                slices = [
                    uctx.gen(z) - uctx.const((point or {}).get(z.name, 0))
                    for z in zvars[:j]
                ]
                K = image.with_extra(slices)
                if K.is_trivial():
                    continue
                if K.dimension(limits) <= 0:
                    continue
                for w in decompose_components(K, ambient_u, limits):
                    through = all(
                        g.evaluate(
                            {v.name: (point or {}).get(v.name, 0) for v in uctx.variables}
                        )
                        == 0
                        for g in w.ideal.generators
                    )
                    if w.dim >= 1 and through:
                        ok = False
                        notes.append(f"{w!r}: positive-dimensional through the point at j={j}")
        results["per_j"][j] = ok
        if notes:
            results.setdefault("notes", []).extend(notes)
        if not ok:
            results["pass"] = False
    return results


# ---------------------------------------------------------------------------
# Pi/Delta iteration


@dataclass
class PiDeltaStep:
    j: int
    divisor: Polynomial
    total: EnrichedCycle
    pi: EnrichedCycle
    delta: EnrichedCycle
    discarded: EnrichedCycle


@dataclass
class PiDeltaTrace:
    ambient: AmbientSpace
    graph: Ideal
    by_degree: dict

    def delta(self, k: int, j: int) -> EnrichedCycle:
        for step in self.by_degree.get(k, []):
            if step.j == j:
                return step.delta
        return EnrichedCycle(self.ambient)

    def pi(self, k: int, j: int) -> EnrichedCycle:
        for step in self.by_degree.get(k, []):
            if step.j == j:
                return step.pi
        return EnrichedCycle(self.ambient)


def pi_delta(
    gecc_F: GradedEnrichedCycle,
    ft: Polynomial,
    rng: random.Random,
    limits: EngineLimits | None = None,
) -> PiDeltaTrace:
    """The graph-cutting iteration, top cotangent coordinate first."""
    limits = limits or DEFAULT_LIMITS
    ambient = gecc_F.ambient
    if ambient.kind != TSTAR_KIND:
        raise ValueError("pi_delta expects a cycle in the cotangent space")
    ctx = ambient.context()
    graph = im_d(ft, ambient)
    graph_gens = list(graph.generators)
    by_degree: dict = {}
    for k in sorted(gecc_F.degrees):
        # components disjoint from the graph never contribute to any Delta
        pi_current = EnrichedCycle(
            ambient,
            {
                comp: m
                for comp, m in gecc_F.degree(k).terms.items()
                if not comp.ideal.with_extra(graph_gens).is_trivial()
            },
        )
        steps = []
        for j in range(ambient.n, -1, -1):
            divisor = graph_gens[j]
            cyc = GradedEnrichedCycle.single(0, pi_current)
            try:
                total = divisor_intersect(cyc, divisor, rng, limits).degree(0)
            except Exception as exc:
                raise ImproperStep(f"degree {k}, step j={j}: {exc}") from exc
            delta_terms: dict = {}
            pi_terms: dict = {}
            discard_terms: dict = {}
            for comp, m in total.terms.items():
                if variety_contained_in(comp.ideal, graph, limits):
                    delta_terms[comp] = m
                elif comp.ideal.with_extra(graph_gens).is_trivial():
                    discard_terms[comp] = m
                else:
                    pi_terms[comp] = m
            step = PiDeltaStep(
                j,
                divisor,
                total,
                EnrichedCycle(ambient, pi_terms),
                EnrichedCycle(ambient, delta_terms),
                EnrichedCycle(ambient, discard_terms),
            )
            steps.append(step)
            pi_current = step.pi
            if not pi_current:
                break
        by_degree[k] = steps
    return PiDeltaTrace(ambient, graph, by_degree)


@dataclass
class CharPolarCycles:
    """(degree, dimension) -> enriched cycle in the base space."""

    ambient: AmbientSpace
    cycles: dict

    def get(self, k: int, j: int) -> EnrichedCycle:
        return self.cycles.get((k, j), EnrichedCycle(self.ambient))

    def degrees(self) -> list:
        return sorted({k for k, _ in self.cycles})

    def dims(self, k: int) -> list:
        return sorted({j for kk, j in self.cycles if kk == k}, reverse=True)


def lambda_cycles(
    trace: PiDeltaTrace,
    rng: random.Random,
    limits: EngineLimits | None = None,
) -> CharPolarCycles:
    """Pushforward of the graph parts: the characteristic polar cycles of
    the vanishing cycles."""
    limits = limits or DEFAULT_LIMITS
    ambient_u = trace.ambient.with_kind(U_KIND)
    out: dict = {}
    for k, steps in trace.by_degree.items():
        for step in steps:
            if not step.delta:
                continue
            image = proper_pushforward(
                GradedEnrichedCycle.single(0, step.delta), ambient_u, rng, limits
            ).degree(0)
            for comp in image.terms:
                if comp.dim != step.j:
                    raise InconsistencyError(
                        f"Lambda component {comp!r} has dim {comp.dim}, expected {step.j}"
                    )
            if image:
                out[(k, step.j)] = image
    return CharPolarCycles(ambient_u, out)


# ---------------------------------------------------------------------------
# Projectivization and characteristic polar cycles


def projectivize(
    E: GradedEnrichedCycle, limits: EngineLimits | None = None
) -> GradedEnrichedCycle:
    """Reinterpret a conic cotangent cycle inside U x P^n (tags as rays)."""
    limits = limits or DEFAULT_LIMITS
    source = E.ambient
    if source.kind != TSTAR_KIND:
        raise ValueError("projectivize expects a cotangent-space cycle")
    target = source.with_kind(U_P_KIND)
    sctx = source.context()
    tctx = target.context()
    wpos = [sctx.position(v) for v in source.cotangent_vars()]
    mapping = {}
    for v in source.base_vars():
        mapping[v.name] = tctx.gen(v.name)
    for i, v in enumerate(source.cotangent_vars()):
        mapping[v.name] = tctx.gen(f"u{i}")
    irr = irrelevant_ideal(target)
    degrees: dict = {}
    for k, cyc in E.degrees.items():
        acc = EnrichedCycle(target)
        for comp, m in cyc.terms.items():
            for g in comp.ideal.groebner_basis(limits=limits):
                if not g.is_homogeneous_in(wpos):
                    raise NonConicCycle(f"component {comp!r} is not conic: {g}")
            gens = [g.substitute(mapping) for g in comp.ideal.generators]
            ideal = Ideal(tctx, gens)
            if variety_contained_in(ideal, irr, limits):
                continue  # pure zero-section: empty in the projectivization
            acc = acc.add_term(component_from_prime(ideal, target, limits), m)
        if acc:
            degrees[k] = acc
    return GradedEnrichedCycle(target, degrees)


def char_polar_cycles(
    geccP: GradedEnrichedCycle,
    js: Sequence[int],
    rng: random.Random,
    limits: EngineLimits | None = None,
) -> CharPolarCycles:
    """Slice the projectivized cycle by tag planes and push to the base."""
    limits = limits or DEFAULT_LIMITS
    ambient_p = geccP.ambient
    if ambient_p.kind != U_P_KIND:
        raise ValueError("char_polar_cycles expects a projectivized cycle")
    ambient_u = ambient_p.with_kind(U_KIND)
    ctx = ambient_p.context()
    n = ambient_p.n
    out: dict = {}
    for j in js:
        cuts = [ctx.gen(f"u{i}") for i in range(n, j, -1)]
        for k in sorted(geccP.degrees):
            sliced = ci_intersect(
                GradedEnrichedCycle.single(0, geccP.degree(k)), cuts, rng, limits
            )
            if not sliced:
                continue
            image = pushforward_with_degree(sliced, ambient_u, rng, limits).degree(0)
            if image:
                out[(k, j)] = image
    return CharPolarCycles(ambient_u, out)


def absolute_polar_slice_multiplicity(
    W: Component,
    j: int,
    rng: random.Random,
    limits: EngineLimits | None = None,
) -> int:
    """Coefficient of [W] in eta_*( P(T*_W) . U x P^j x {0} )."""
    limits = limits or DEFAULT_LIMITS
    ambient_u = W.ambient
    stratum = Stratum("_candidate", W.ideal, W.dim, {0: ModClass.free(1)})
    conormal = conormal_variety(stratum, ambient_u.with_kind(TSTAR_KIND), limits)
    P = projectivize(
        GradedEnrichedCycle.single(
            0, EnrichedCycle(conormal.ambient, {conormal: ModClass.free(1)})
        ),
        limits,
    )
    sliced = char_polar_cycles(P, [j], rng, limits)
    coeff = sliced.get(0, j).terms.get(W)
    if coeff is None:
        raise InconsistencyError(
            f"candidate conormal of {W!r} does not slice onto its base"
        )
    return coeff.rank


def reconstruct_gecc(
    cpc: CharPolarCycles,
    rng: random.Random,
    limits: EngineLimits | None = None,
) -> GradedEnrichedCycle:
    """Downward induction over dimension: recover the graded cycle whose
    characteristic polar cycles are the given ones."""
    limits = limits or DEFAULT_LIMITS
    ambient_u = cpc.ambient
    ambient_t = ambient_u.with_kind(TSTAR_KIND)
    result_degrees: dict = {}
    for k in cpc.degrees():
        dims = cpc.dims(k)
        if not dims:
            continue
        acc = EnrichedCycle(ambient_t)
        projective_sum = None  # D_{>= j+1} as a projectivized cycle
        for j in range(max(dims), -1, -1):
            lam = cpc.get(k, j)
            correction = EnrichedCycle(ambient_u)
            if projective_sum is not None and projective_sum:
                sliced = char_polar_cycles(
                    GradedEnrichedCycle.single(0, projective_sum), [j], rng, limits
                )
                correction = sliced.get(0, j)
            M: dict = dict(lam.terms)
            for comp, m in correction.terms.items():
                have = M.get(comp, ModClass.zero())
                if not mc.mod_leq(m, have):
                    raise InconsistencyError(
                        f"correction {m} at {comp!r} exceeds available {have}"
                    )
                rest = mc.mod_sub(have, m)
                if rest.is_zero():
                    M.pop(comp, None)
                else:
                    M[comp] = rest
            for W, coeff in sorted(M.items(), key=lambda t: sorted(t[0].gen_strings())):
                if W.dim != j:
                    raise InconsistencyError(
                        f"leftover cycle {W!r} has dim {W.dim} at induction step {j}"
                    )
                c = absolute_polar_slice_multiplicity(W, j, rng, limits)
                morse = mc.divide_free(coeff, c)
                stratum = Stratum("_rec", W.ideal, W.dim, {0: ModClass.free(1)})
                conormal = conormal_variety(stratum, ambient_t, limits)
                acc = acc.add_term(conormal, morse)
                P = projectivize(
                    GradedEnrichedCycle.single(
                        0, EnrichedCycle(ambient_t, {conormal: morse})
                    ),
                    limits,
                ).degree(0)
                projective_sum = P if projective_sum is None else projective_sum.plus(P)
        if acc:
            result_degrees[k] = acc
    ambient = ambient_t
    return GradedEnrichedCycle(ambient, result_degrees)


# ---------------------------------------------------------------------------
# Blow-up route


@dataclass
class BlowupComponentResult:
    source: Component
    status: str  # "blown-up" | "disjoint" | "inside-center"
    exceptional: EnrichedCycle | None = None


@dataclass
class BlowupResult:
    per_component: list
    exceptional: GradedEnrichedCycle
    pushforward: GradedEnrichedCycle

    def vanishing_part(self, ft: Polynomial, limits: EngineLimits | None = None) -> GradedEnrichedCycle:
        """Components of the pushforward whose base image lies in V(f)."""
        ctx = self.pushforward.ambient.context()
        inside, _ = gap_remove(self.pushforward, Ideal(ctx, [ft.lift(ctx)]))
        return inside


def _blowup_cone(
    comp: Component,
    graph_gens: list,
    ambient_b: AmbientSpace,
    limits: EngineLimits,
) -> Component:
    """Closure of the graph cone of the center equations over the component."""
    ctx_b = ambient_b.context()
    aux = Variable("_s", "base", len(ctx_b))
    big = ctx_b.extend([aux])
    gens = [g.lift(big) for g in comp.ideal.generators]
    s = big.gen(aux)
    for i, h in enumerate(graph_gens):
        gens.append(big.gen(f"u{i}") - s * h.lift(big))
    cone = eliminate(Ideal(big, gens), [aux], limits, restrict=True)
    lifted = Ideal(ctx_b, [g.lift(ctx_b) for g in cone.generators])
    return component_from_prime(lifted, ambient_b, limits)


def blowup_exceptional(
    gecc_F: GradedEnrichedCycle,
    ft: Polynomial,
    rng: random.Random,
    limits: EngineLimits | None = None,
) -> BlowupResult:
    """Blow up each component along the graph of df; collect the
    exceptional divisors and push them to U x P^n."""
    limits = limits or DEFAULT_LIMITS
    ambient_t = gecc_F.ambient
    if ambient_t.kind != TSTAR_KIND:
        raise ValueError("blowup_exceptional expects a cotangent-space cycle")
    ambient_b = ambient_t.with_kind(TSTAR_P_KIND)
    ambient_p = ambient_t.with_kind(U_P_KIND)
    ctx_b = ambient_b.context()
    graph = im_d(ft, ambient_t)
    graph_gens = [g.lift(ctx_b) for g in graph.generators]
    per_component: list = []
    cache: dict = {}
    degrees: dict = {}
    for k, cyc in gecc_F.degrees.items():
        acc = EnrichedCycle(ambient_b)
        for comp, m in cyc.terms.items():
            if comp not in cache:
                cache[comp] = _exceptional_of_component(
                    comp, graph, graph_gens, ambient_b, rng, limits
                )
                per_component.append(cache[comp])
            result = cache[comp]
            if result.exceptional is not None:
                for piece, mult in result.exceptional:
                    acc = acc.add_term(piece, mc.tensor(m, ModClass.free(mult)))
        if acc:
            degrees[k] = acc
    exceptional = GradedEnrichedCycle(ambient_b, degrees)
    push = pushforward_with_degree(exceptional, ambient_p, rng, limits) if exceptional else GradedEnrichedCycle.zero(ambient_p)
    return BlowupResult(per_component, exceptional, push)


def _exceptional_of_component(
    comp: Component,
    graph: Ideal,
    graph_gens: list,
    ambient_b: AmbientSpace,
    rng: random.Random,
    limits: EngineLimits,
):
    ctx_t = comp.ideal.ctx
    if variety_contained_in(comp.ideal, graph, limits):
        return BlowupComponentResult(comp, "inside-center", None)
    meet = comp.ideal.with_extra(graph.generators)
    if meet.is_trivial():
        return BlowupComponentResult(comp, "disjoint", None)
    bl = _blowup_cone(comp, graph_gens, ambient_b, limits)
    center_cut = bl.ideal.with_extra(graph_gens)
    pieces = [
        p
        for p in decompose_components(center_cut, ambient_b, limits)
        if p.dim == bl.dim - 1
    ]
    out = []
    ctx_b = ambient_b.context()
    for piece in pieces:
        chart = next(
            (
                i
                for i in range(ambient_b.n + 1)
                if not piece.ideal.contains(ctx_b.gen(f"u{i}"))
            ),
            None,
        )
        if chart is None:
            continue
        # multiplicity of the piece in the divisor cut by the chart equation
        mult = intersection_multiplicity(
            bl.ideal.with_extra([graph_gens[chart]]),
            piece,
            [],
            rng,
            limits,
            others_complete=False,
        )
        out.append((piece, mult))
    return BlowupComponentResult(comp, "blown-up", out)


# ---------------------------------------------------------------------------
# Orchestration


@dataclass
class VanishingReport:
    complex: StratifiedComplex
    function: Polynomial
    bound: MicrosupportBound
    isolating: dict
    trace: PiDeltaTrace | None
    lambdas: CharPolarCycles | None
    gecc_phi: GradedEnrichedCycle | None
    cc_phi: OrdinaryCycle | None
    blowup: BlowupResult | None = None
    agreement: bool | None = None

    def to_json(self) -> dict:
        data: dict = {
            "function": str(self.function),
            "isolating": {
                "s": self.isolating.get("s"),
                "pass": self.isolating.get("pass"),
                "per_j": {str(j): v for j, v in self.isolating.get("per_j", {}).items()},
            },
        }
        if self.gecc_phi is not None:
            data["gecc_phi"] = self.gecc_phi.to_json()
        if self.cc_phi is not None:
            data["cc_phi"] = self.cc_phi.to_json()
        if self.trace is not None:
            data["trace"] = {
                str(k): [
                    {
                        "j": step.j,
                        "divisor": str(step.divisor),
                        "pi": GradedEnrichedCycle.single(0, step.pi).to_json(),
                        "delta": GradedEnrichedCycle.single(0, step.delta).to_json(),
                        "discarded": GradedEnrichedCycle.single(0, step.discarded).to_json(),
                    }
                    for step in steps
                ]
                for k, steps in self.trace.by_degree.items()
            }
        if self.lambdas is not None:
            data["lambda"] = {
                f"{k},{j}": GradedEnrichedCycle.single(0, cyc).to_json()
                for (k, j), cyc in sorted(self.lambdas.cycles.items())
            }
        if self.agreement is not None:
            data["two_route_agreement"] = self.agreement
        return data


def vanishing_pipeline(
    SC: StratifiedComplex,
    ft: Polynomial,
    rng: random.Random,
    route: str = "pidelta",
    limits: EngineLimits | None = None,
    require_isolating: bool = True,
) -> VanishingReport:
    """Full germ-at-the-origin vanishing-cycle computation.

    When ``require_isolating`` is off, the iteration runs on per-step
    properness alone; that mode records success but does not certify it.
    """
    limits = limits or SC.limits
    gecc_F = gecc_assemble(SC, limits)
    bound = microsupport_phi_bound(SC, ft, rng, limits)
    iso = isolating_check(SC, ft, bound.upper_components(), None, None, limits)
    trace = lambdas = gecc_phi = cc_phi = None
    blowup = None
    agreement = None
    if not iso["pass"] and require_isolating:
        return VanishingReport(SC, ft, bound, iso, None, None, None, None, None, None)
    if route in ("pidelta", "both"):
        trace = pi_delta(gecc_F, ft, rng, limits)
        lambdas = lambda_cycles(trace, rng, limits)
        gecc_phi = reconstruct_gecc(lambdas, rng, limits)
        cc_phi = to_ordinary(gecc_phi)
    if route in ("blowup", "both"):
        blowup = blowup_exceptional(gecc_F, ft, rng, limits)
    if route == "both" and gecc_phi is not None and blowup is not None:
        projected = projectivize(gecc_phi, limits)
        agreement = blowup.vanishing_part(ft, limits) == projected
    return VanishingReport(
        SC, ft, bound, iso, trace, lambdas, gecc_phi, cc_phi, blowup, agreement
    )
