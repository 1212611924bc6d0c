"""Groebner-basis ideal arithmetic over the rationals.

The Buchberger loop works on integer-primitive term dictionaries
(fraction-free reduction, content stripped as it grows) with
Gebauer-Moeller pair pruning; reduced bases are normalized monic and
cached per monomial order on the owning Ideal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .polyring import (
    DEGREVLEX,
    ContextMismatch,
    MonomialOrder,
    Polynomial,
    VarContext,
    Variable,
    block_order,
    exp_div,
    exp_divides,
    exp_lcm,
    exp_mul,
)


class ResourceLimitExceeded(RuntimeError):
    """A configured computation budget ran out; no wrong answer is returned."""


class CertificationFailure(RuntimeError):
    """The engine could not certify a decomposition and refuses to guess."""


class NotZeroDimensional(RuntimeError):
    """Local-degree request at a point where the ideal is not finite."""


@dataclass
class EngineLimits:
    spair_budget: int = 1_000_000
    saturation_cap: int = 32
    madic_cap: int = 24
    vecdim_cap: int = 200_000


DEFAULT_LIMITS = EngineLimits()

# process-wide counters surfaced on CLI reports
ENGINE_COUNTERS = {"groebner_runs": 0, "spairs": 0}


def engine_counters() -> dict:
    return dict(ENGINE_COUNTERS)


# ---------------------------------------------------------------------------
# Integer term-dict kernel


def _content(terms: dict) -> int:
    g = 0
    for c in terms.values():
        g = math.gcd(g, abs(c))
        if g == 1:
            return 1
    return g or 1


def _strip(terms: dict) -> dict:
    g = _content(terms)
    if g > 1:
        return {e: c // g for e, c in terms.items()}
    return terms


def _to_int_poly(p: Polynomial) -> dict:
    denom = 1
    for c in p.terms.values():
        denom = denom * c.denominator // math.gcd(denom, c.denominator)
    terms = {e: int(c * denom) for e, c in p.terms.items()}
    return _strip(terms)


def _from_int_poly(ctx: VarContext, terms: dict) -> Polynomial:
    return Polynomial(ctx, {e: Fraction(c) for e, c in terms.items()})


def _lead(terms: dict, keyf):
    e = max(terms, key=keyf)
    return e, terms[e]


def _nf_int(p: dict, basis: list, keyf, full: bool = True) -> dict:
    """Normal form of integer poly dict against [(terms, lm, lc), ...].

    Fraction-free: the result is the true normal form up to a positive
    rational scalar, which every caller is insensitive to.
    """
    work = dict(p)
    remainder: dict = {}
    steps = 0
    while work:
        e = max(work, key=keyf)
        c = work.pop(e)
        if c == 0:
            continue
        hit = None
        for terms, lm, lc in basis:
            if exp_divides(lm, e):
                hit = (terms, lm, lc)
                break
        if hit is None:
            remainder[e] = c
            if not full:
                for k, v in work.items():
                    remainder[k] = remainder.get(k, 0) + v
                break
            continue
        terms, lm, lc = hit
        d = math.gcd(c, lc)
        a = lc // d      # scale everything by a
        b = c // d       # subtract b * shift * reducer
        shift = exp_div(e, lm)
        if a != 1:
            for k in work:
                work[k] *= a
            for k in remainder:
                remainder[k] *= a
        for k, v in terms.items():
            if k == lm:
                continue
            ke = exp_mul(k, shift)
            nv = work.get(ke, 0) - b * v
            if nv:
                work[ke] = nv
            else:
                work.pop(ke, None)
        steps += 1
        if steps % 32 == 0:
            g = math.gcd(_content(work), _content(remainder))
            if g > 1:
                work = {k: v // g for k, v in work.items()}
                remainder = {k: v // g for k, v in remainder.items()}
    return _strip({e: c for e, c in remainder.items() if c})


def _spoly_int(f: tuple, g: tuple, keyf) -> dict:
    (ft, flm, flc), (gt, glm, glc) = f, g
    lcm = exp_lcm(flm, glm)
    d = math.gcd(flc, glc)
    a, b = glc // d, flc // d
    sf, sg = exp_div(lcm, flm), exp_div(lcm, glm)
    terms: dict = {}
    for k, v in ft.items():
        terms[exp_mul(k, sf)] = a * v
    for k, v in gt.items():
        ke = exp_mul(k, sg)
        nv = terms.get(ke, 0) - b * v
        if nv:
            terms[ke] = nv
        else:
            terms.pop(ke, None)
    return _strip(terms)


def _normalize_int(terms: dict, keyf) -> dict:
    terms = _strip(terms)
    if terms:
        _, lc = _lead(terms, keyf)
        if lc < 0:
            terms = {e: -c for e, c in terms.items()}
    return terms


def _buchberger(gens: list, keyf, budget: int, stats: dict) -> list:
    """Reduced (up to scaling) Groebner basis of integer poly dicts."""
    G: list = []   # (terms, lm, lc)
    P: set = set()

    def update(f_terms: dict) -> None:
        # Gebauer-Moeller pair update.
        flm, flc = _lead(f_terms, keyf)
        t = len(G)
        nonlocal P
        P = {
            (i, j)
            for (i, j) in P
            if not exp_divides(flm, exp_lcm(G[i][1], G[j][1]))
            or exp_lcm(G[i][1], G[j][1]) == exp_lcm(G[i][1], flm)
            or exp_lcm(G[i][1], G[j][1]) == exp_lcm(G[j][1], flm)
        }
        lcms: dict = {}
        for i in range(t):
            lcms.setdefault(exp_lcm(G[i][1], flm), []).append(i)
        kept = []
        for L in sorted(lcms, key=keyf):
            if all(not exp_divides(K, L) for K in kept):
                kept.append(L)
        for L in kept:
            if any(exp_lcm(G[i][1], flm) == exp_mul(G[i][1], flm) for i in lcms[L]):
                continue  # product criterion
            P.add((min(lcms[L]), t))
        G.append((f_terms, flm, flc))

    for g in gens:
        g = _normalize_int(g, keyf)
        if g:
            if sum(_lead(g, keyf)[0]) == 0:
                return [{(0,) * _nvars(g): 1}]
            update(g)

    processed = 0
    while P:
        pair = min(P, key=lambda ij: keyf(exp_lcm(G[ij[0]][1], G[ij[1]][1])))
        P.discard(pair)
        processed += 1
        if processed > budget:
            raise ResourceLimitExceeded(
                f"S-pair budget {budget} exceeded during Groebner computation"
            )
        s = _spoly_int(G[pair[0]], G[pair[1]], keyf)
        r = _nf_int(s, G, keyf)
        if r:
            stats["nonzero_reductions"] = stats.get("nonzero_reductions", 0) + 1
            if sum(_lead(r, keyf)[0]) == 0:
                stats["spairs"] = stats.get("spairs", 0) + processed
                return [{next(iter(r)): 1}]
            update(_normalize_int(r, keyf))
    stats["spairs"] = stats.get("spairs", 0) + processed

    # minimalize
    order_sorted = sorted(range(len(G)), key=lambda i: keyf(G[i][1]))
    minimal: list = []
    for i in order_sorted:
        if all(not exp_divides(m[1], G[i][1]) for m in minimal):
            minimal.append(G[i])
    # interreduce tails
    reduced = []
    for i, (terms, lm, lc) in enumerate(minimal):
        others = [minimal[j] for j in range(len(minimal)) if j != i]
        r = _nf_int(terms, others, keyf)
        reduced.append(_normalize_int(r, keyf))
    stats["basis_size"] = len(reduced)
    return [g for g in reduced if g]


def _nvars(terms: dict) -> int:
    return len(next(iter(terms)))


# ---------------------------------------------------------------------------
# Ideals


class Ideal:
    """Ideal of Q[ctx], generators plus a per-order reduced-basis cache."""

    __slots__ = ("ctx", "generators", "_cache", "_stats", "_hash")

    def __init__(self, ctx: VarContext, generators: Iterable[Polynomial]):
        gens = []
        for g in generators:
            if g.ctx != ctx:
                raise ContextMismatch("generator context differs from ideal context")
            if not g.is_zero():
                gens.append(g)
        self.ctx = ctx
        self.generators = tuple(gens)
        self._cache: dict = {}
        self._stats: dict = {}
        self._hash = None

    # -- construction helpers

    @staticmethod
    def of(ctx: VarContext, *gens: Polynomial) -> "Ideal":
        return Ideal(ctx, gens)

    def with_extra(self, extra: Iterable[Polynomial]) -> "Ideal":
        return Ideal(self.ctx, self.generators + tuple(extra))

    # -- Groebner bases

    def groebner_basis(
        self, order: MonomialOrder = DEGREVLEX, limits: EngineLimits | None = None
    ) -> tuple:
        sig = order.signature()
        if sig in self._cache:
            return self._cache[sig]
        limits = limits or DEFAULT_LIMITS
        keyf = order.key_function(len(self.ctx))
        stats: dict = {}
        ints = [_to_int_poly(g) for g in self.generators]
        basis = _buchberger(ints, keyf, limits.spair_budget, stats)
        ENGINE_COUNTERS["groebner_runs"] += 1
        ENGINE_COUNTERS["spairs"] += stats.get("spairs", 0)
        polys = tuple(
            sorted(
                (_from_int_poly(self.ctx, g).monic(order) for g in basis),
                key=lambda p: keyf(p.leading(order)[0]),
            )
        ) if basis else ()
        self._cache[sig] = polys
        self._stats[sig] = stats
        return polys

    def gb_stats(self, order: MonomialOrder = DEGREVLEX) -> dict:
        return dict(self._stats.get(order.signature(), {}))

    def normal_form(self, p: Polynomial, order: MonomialOrder = DEGREVLEX) -> Polynomial:
        """Exact normal form against the reduced basis (canonical representative)."""
        gb = self.groebner_basis(order)
        return reduce_exact(p, gb, order)

    def contains(self, p: Polynomial) -> bool:
        if p.is_zero():
            return True
        return self.normal_form(p).is_zero()

    def __contains__(self, p: Polynomial) -> bool:
        return self.contains(p)

    def is_trivial(self) -> bool:
        gb = self.groebner_basis()
        return len(gb) == 1 and gb[0].total_degree() == 0

    def is_zero_ideal(self) -> bool:
        return not self.groebner_basis()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        if self.ctx != other.ctx:
            return False
        return self.groebner_basis() == other.groebner_basis()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ctx, self.groebner_basis()))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(str(g) for g in self.generators)
        return f"Ideal({inner})"

    def dimension(self, limits: EngineLimits | None = None) -> int:
        gb = self.groebner_basis(limits=limits)
        if self.is_trivial():
            return -1
        order = DEGREVLEX
        lms = [g.leading(order)[0] for g in gb]
        return _staircase_dimension(lms, len(self.ctx))


def reduce_exact(p: Polynomial, gb: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> Polynomial:
    """Full exact division remainder against monic reducers."""
    if not gb:
        return p
    ctx = p.ctx
    keyf = order.key_function(len(ctx))
    leads = [(g.leading(order)[0], g) for g in gb]
    work = dict(p.terms)
    remainder: dict = {}
    while work:
        e = max(work, key=keyf)
        c = work.pop(e)
        if not c:
            continue
        hit = None
        for lm, g in leads:
            if exp_divides(lm, e):
                hit = (lm, g)
                break
        if hit is None:
            remainder[e] = c
            continue
        lm, g = hit
        shift = exp_div(e, lm)
        lc = g.terms[lm]
        factor = c / lc
        for k, v in g.terms.items():
            if k == lm:
                continue
            ke = exp_mul(k, shift)
            nv = work.get(ke, Fraction(0)) - factor * v
            if nv:
                work[ke] = nv
            else:
                work.pop(ke, None)
    return Polynomial(ctx, remainder)


def _staircase_dimension(lms: list, n: int) -> int:
    """Krull dimension from leading monomials: largest independent variable set."""
    supports = [frozenset(i for i, x in enumerate(e) if x) for e in lms]
    if any(not s for s in supports):
        return -1
    best = -1
    vars_all = list(range(n))

    def rec(i: int, chosen: frozenset) -> None:
        nonlocal best
        if len(chosen) + (n - i) <= best:
            return
        if i == n:
            best = max(best, len(chosen))
            return
        cand = chosen | {i}
        if all(not s <= cand for s in supports):
            rec(i + 1, cand)
        rec(i + 1, chosen)

    rec(0, frozenset())
    return best


# ---------------------------------------------------------------------------
# Spec operations


def groebner_basis(I: Ideal, order: MonomialOrder = DEGREVLEX, limits: EngineLimits | None = None) -> tuple:
    return I.groebner_basis(order, limits)


def ideal_membership(p: Polynomial, I: Ideal) -> bool:
    return I.contains(p)


def selfcheck_groebner(gb: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> bool:
    """Every S-polynomial of the basis reduces to zero."""
    if not gb:
        return True
    ctx = gb[0].ctx
    keyf = order.key_function(len(ctx))
    ints = []
    for g in gb:
        t = _to_int_poly(g)
        lm, lc = _lead(t, keyf)
        ints.append((t, lm, lc))
    for f, g in itertools.combinations(ints, 2):
        s = _spoly_int(f, g, keyf)
        if _nf_int(s, ints, keyf):
            return False
    return True


def _extend_with(ctx: VarContext, name: str) -> tuple:
    fresh = name
    names = set(ctx.names())
    i = 0
    while fresh in names:
        i += 1
        fresh = f"{name}{i}"
    var = Variable(fresh, "base", len(ctx))
    return ctx.extend([var]), var


def intersect(I: Ideal, J: Ideal, limits: EngineLimits | None = None) -> Ideal:
    """I cap J via the scaling-variable trick."""
    if I.ctx != J.ctx:
        raise ContextMismatch("intersection requires a common context")
    ctx2, tv = _extend_with(I.ctx, "_t")
    t = ctx2.gen(tv)
    gens = [g.lift(ctx2) * t for g in I.generators]
    gens += [g.lift(ctx2) * (ctx2.one() - t) for g in J.generators]
    big = Ideal(ctx2, gens)
    drop_pos = ctx2.position(tv)
    order = block_order([drop_pos], len(ctx2))
    gb = big.groebner_basis(order, limits)
    keep = [g for g in gb if g.degree_in(tv) <= 0]
    return Ideal(I.ctx, [g.restrict(I.ctx) for g in keep])


def exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    """f / g when g divides f exactly."""
    order = DEGREVLEX
    keyf = order.key_function(len(f.ctx))
    q: dict = {}
    rem = dict(f.terms)
    glm, glc = g.leading(order)
    while rem:
        e = max(rem, key=keyf)
        c = rem.pop(e)
        if not c:
            continue
        if not exp_divides(glm, e):
            raise ValueError("division is not exact")
        shift = exp_div(e, glm)
        coeff = c / glc
        q[shift] = coeff
        for k, v in g.terms.items():
            if k == glm:
                continue
            ke = exp_mul(k, shift)
            nv = rem.get(ke, Fraction(0)) - coeff * v
            if nv:
                rem[ke] = nv
            else:
                rem.pop(ke, None)
    return Polynomial(f.ctx, q)


def ideal_quotient(I: Ideal, p: Polynomial, limits: EngineLimits | None = None) -> Ideal:
    """(I : p) for a single nonzero polynomial."""
    if p.is_zero():
        raise ValueError("quotient by the zero polynomial")
    if p.total_degree() == 0:
        return I
    meet = intersect(I, Ideal(I.ctx, [p]), limits)
    return Ideal(I.ctx, [exact_div(g, p) for g in meet.generators])


def quotient_by_ideal(I: Ideal, J: Ideal, limits: EngineLimits | None = None) -> Ideal:
    gens = [g for g in J.generators if not g.is_zero()]
    if not gens:
        raise ValueError("quotient by the zero ideal")
    result = ideal_quotient(I, gens[0], limits)
    for g in gens[1:]:
        result = intersect(result, ideal_quotient(I, g, limits), limits)
    return result


@dataclass
class SaturationResult:
    ideal: Ideal
    exponent: int


def saturate(I: Ideal, J: Ideal, limits: EngineLimits | None = None) -> SaturationResult:
    """(I : J^infinity) by iterated ideal quotients, reporting the exponent."""
    limits = limits or DEFAULT_LIMITS
    current = I
    for e in range(limits.saturation_cap + 1):
        nxt = quotient_by_ideal(current, J, limits)
        if nxt == current:
            return SaturationResult(current, e)
        current = nxt
    raise ResourceLimitExceeded(
        f"saturation did not stabilize within cap {limits.saturation_cap}"
    )


def saturate_element(I: Ideal, h: Polynomial, limits: EngineLimits | None = None) -> Ideal:
    """(I : h^infinity) via the auxiliary-variable trick (single elimination)."""
    if h.is_zero():
        raise ValueError("saturation by zero")
    if h.total_degree() == 0:
        return I
    ctx2, tv = _extend_with(I.ctx, "_s")
    t = ctx2.gen(tv)
    gens = [g.lift(ctx2) for g in I.generators]
    gens.append(ctx2.one() - t * h.lift(ctx2))
    big = Ideal(ctx2, gens)
    order = block_order([ctx2.position(tv)], len(ctx2))
    gb = big.groebner_basis(order, limits)
    keep = [g for g in gb if g.degree_in(tv) <= 0]
    return Ideal(I.ctx, [g.restrict(I.ctx) for g in keep])


def eliminate(
    I: Ideal,
    drop: Sequence[Variable | str],
    limits: EngineLimits | None = None,
    restrict: bool = False,
) -> Ideal:
    """I cap Q[ctx minus drop], via a block elimination order."""
    if not drop:
        return I if not restrict else I
    positions = [I.ctx.position(v) for v in drop]
    order = block_order(positions, len(I.ctx))
    gb = I.groebner_basis(order, limits)
    names = {I.ctx.variables[p].name for p in positions}
    keep = [g for g in gb if all(g.degree_in(n) <= 0 for n in names)]
    if not restrict:
        return Ideal(I.ctx, keep)
    small = VarContext([v for v in I.ctx.variables if v.name not in names])
    return Ideal(small, [g.restrict(small) for g in keep])


def dimension(I: Ideal, limits: EngineLimits | None = None) -> int:
    return I.dimension(limits)


def radical_contains(I: Ideal, p: Polynomial, limits: EngineLimits | None = None) -> bool:
    """p in sqrt(I), by the auxiliary-variable membership test."""
    if p.is_zero() or I.contains(p):
        return True
    ctx2, tv = _extend_with(I.ctx, "_r")
    t = ctx2.gen(tv)
    gens = [g.lift(ctx2) for g in I.generators]
    gens.append(ctx2.one() - t * p.lift(ctx2))
    return Ideal(ctx2, gens).is_trivial()


def variety_contained_in(I: Ideal, J: Ideal, limits: EngineLimits | None = None) -> bool:
    """V(I) subseteq V(J): every generator of J vanishes on V(I)."""
    return all(radical_contains(I, g, limits) for g in J.generators)


def translate(I: Ideal, point: Mapping[str, Fraction]) -> Ideal:
    """Move the given point to the origin: v -> v + p_v."""
    ctx = I.ctx
    assignment = {
        v.name: ctx.gen(v.name) + ctx.const(point.get(v.name, 0))
        for v in ctx.variables
    }
    return Ideal(ctx, [g.substitute(assignment) for g in I.generators])


def vector_space_dimension(I: Ideal, limits: EngineLimits | None = None) -> int | None:
    """Q-dimension of Q[ctx]/I; None when not zero-dimensional."""
    limits = limits or DEFAULT_LIMITS
    gb = I.groebner_basis(limits=limits)
    if I.is_trivial():
        return 0
    n = len(I.ctx)
    if not gb:
        return None
    lms = [g.leading(DEGREVLEX)[0] for g in gb]
    caps = [None] * n
    for e in lms:
        support = [i for i, x in enumerate(e) if x]
        if len(support) == 1:
            i = support[0]
            if caps[i] is None or e[i] < caps[i]:
                caps[i] = e[i]
    if any(c is None for c in caps):
        return None
    count = 0
    stack = [(0,) * n]
    seen = {(0,) * n}
    while stack:
        m = stack.pop()
        count += 1
        if count > limits.vecdim_cap:
            raise ResourceLimitExceeded("standard monomial count exceeded cap")
        for i in range(n):
            nm = list(m)
            nm[i] += 1
            nm = tuple(nm)
            if nm in seen or nm[i] >= caps[i] + 1:
                continue
            if any(exp_divides(lm, nm) for lm in lms):
                continue
            seen.add(nm)
            stack.append(nm)
    return count


def standard_monomials(I: Ideal, limits: EngineLimits | None = None) -> list | None:
    """Monomial basis of Q[ctx]/I when zero-dimensional, in degrevlex order."""
    limits = limits or DEFAULT_LIMITS
    gb = I.groebner_basis(limits=limits)
    if I.is_trivial():
        return []
    n = len(I.ctx)
    lms = [g.leading(DEGREVLEX)[0] for g in gb]
    if vector_space_dimension(I, limits) is None:
        return None
    out = []
    stack = [(0,) * n]
    seen = {(0,) * n}
    while stack:
        m = stack.pop()
        out.append(m)
        for i in range(n):
            nm = list(m)
            nm[i] += 1
            nm = tuple(nm)
            if nm in seen:
                continue
            if any(exp_divides(lm, nm) for lm in lms):
                continue
            seen.add(nm)
            stack.append(nm)
    keyf = DEGREVLEX.key_function(n)
    return sorted(out, key=keyf)


def local_degree(
    I: Ideal,
    point: Mapping[str, Fraction] | None = None,
    limits: EngineLimits | None = None,
) -> int:
    """Q-dimension of the local ring at the point (0 if point not on V(I)).

    m-adic stabilization, realized with pure variable powers for speed:
    join v^N for every variable; once every monomial of degree B+1 (B the
    top standard-monomial degree) reduces to zero and N >= B+2, the count
    equals the honest m-adic limit by the Krull intersection argument.
    """
    limits = limits or DEFAULT_LIMITS
    J = translate(I, point) if point else I
    for g in J.generators:
        if g.constant_term() != 0:
            return 0
    ctx = J.ctx
    n = len(ctx)
    for N in range(2, limits.madic_cap + 1):
        power_gens = [ctx.gen(v) ** N for v in ctx.variables]
        K = J.with_extra(power_gens)
        basis = standard_monomials(K, limits)
        if basis is None:
            continue
        D = len(basis)
        B = max((sum(e) for e in basis), default=0)
        if N < B + 2:
            continue
        gb = K.groebner_basis(limits=limits)
        certified = all(
            reduce_exact(Polynomial(ctx, {e: Fraction(1)}), gb).is_zero()
            for e in _exponents_of_degree(n, B + 1)
        )
        if certified:
            return D
    raise NotZeroDimensional(
        f"local counts did not stabilize within N={limits.madic_cap}; "
        "the ideal is not zero-dimensional at the point"
    )


def _exponents_of_degree(n: int, d: int) -> list:
    if n == 1:
        return [(d,)]
    out = []
    for k in range(d + 1):
        for rest in _exponents_of_degree(n - 1, d - k):
            out.append((k,) + rest)
    return out
