"""Explicit bias, proxy variables, factors of proxy discrimination and
bias under background knowledge."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError
from .explain import Explanation, enumerate_minimal_explanations
from .knowledge import ConstraintSet, check_real
from .logic import (
    FeatureSpace,
    Individual,
    Literal,
    codes,
    entails,
    extensions,
    literal_sets,
    satisfiable,
)
from .models import DecisionModel, ModelOverride

UNBIASED = "unbiased"
EXPLICIT = "explicit"
PROXY = "proxy-factor"
VACUOUS = "vacuous"


def _check_feature(m_or_k, p: int) -> None:
    if not 0 <= p < m_or_k.features.n:
        raise InputError(f"protected feature index {p} outside the feature set")


def is_biased_decision(m: DecisionModel, x: Individual, p: int) -> bool:
    """Would the decision change if only the protected feature changed?"""
    _check_feature(m, p)
    return m.decide(x.flip(p)) != m.decide(x)


def is_process_biased(m: DecisionModel, p: int) -> Individual | None:
    """Lowest-code individual whose decision is biased, if any."""
    _check_feature(m, p)
    n = m.n
    flipped = codes(n) ^ (1 << (n - 1 - p))
    hits = np.flatnonzero(m.table != m.table[flipped])
    return Individual.from_code(int(hits[0]), n) if hits.size else None


@dataclass(frozen=True)
class ProxyWitness:
    """``q`` is a proxy of ``p``: under ``context``, ``q = nu_q`` forces ``p = nu_p``."""

    protected: int
    proxy: int
    context: frozenset[Literal]
    nu_q: int
    nu_p: int

    def sort_key(self):
        lits = sorted(self.context)
        return (self.proxy, len(lits), [l.feature for l in lits], [l.positive for l in lits], self.nu_q, self.nu_p)

    def format(self, features: FeatureSpace) -> str:
        ctx = ", ".join(f"{features.names[l.feature]}={l.value}" for l in sorted(self.context)) or "TRUE"
        q = features.names[self.proxy]
        p = features.names[self.protected]
        return f"q={q} ctx=({ctx}) q:={self.nu_q} => p:={self.nu_p}  [{p}]"


def check_proxy_conditions(k: ConstraintSet, w: ProxyWitness) -> bool:
    """Conditions (iii)-(v) of a proxy witness, through the entailment oracle."""
    goal = Literal(w.protected, bool(w.nu_p))
    with_q = list(w.context) + [Literal(w.proxy, bool(w.nu_q))]
    return (
        not entails(k.constraints, w.context, goal)
        and entails(k.constraints, with_q, goal)
        and satisfiable(k.constraints, with_q)
    )


def find_proxies(k: ConstraintSet, p: int, max_context_arity: int = 2) -> list[ProxyWitness]:
    """Every (q, context, nu_q, nu_p) with the context a conjunction of at most
    ``max_context_arity`` literals over features other than ``p`` and ``q``.

    Works on the real-individual mask directly; ``check_proxy_conditions``
    is the entailment-based restatement used to cross-check it.
    """
    _check_feature(k, p)
    n = k.features.n
    if max_context_arity < 0:
        raise InputError("context arity must be non-negative")
    max_context_arity = min(max_context_arity, max(n - 2, 0))
    real = k.real_mask
    p_col = (codes(n) >> (n - 1 - p)) & 1
    out = []
    for q in range(n):
        if q == p:
            continue
        q_col = (codes(n) >> (n - 1 - q)) & 1
        others = [v for v in range(n) if v not in (p, q)]
        for ctx in literal_sets(others, max_context_arity):
            in_ctx = real & extensions(ctx, n)
            if not in_ctx.any():
                continue
            p_values_ctx = set(np.unique(p_col[in_ctx]).tolist())
            for nu_q in (0, 1):
                sel = in_ctx & (q_col == nu_q)
                if not sel.any():
                    continue
                p_values = np.unique(p_col[sel]).tolist()
                if len(p_values) != 1:
                    continue
                nu_p = p_values[0]
                # (iii): the context alone must leave p open
                if p_values_ctx == {nu_p}:
                    continue
                out.append(ProxyWitness(p, q, ctx, nu_q, nu_p))
    return sorted(out, key=ProxyWitness.sort_key)


@dataclass(frozen=True)
class ProxyFactor:
    """Outcome of the factor-of-proxy-discrimination test for one explanation."""

    nu: int | None
    vacuous: bool = False


def proxy_factor(xp: Explanation | frozenset[Literal], k: ConstraintSet | None, p: int) -> ProxyFactor:
    lits = xp.literals if isinstance(xp, Explanation) else frozenset(xp)
    if k is None or any(l.feature == p for l in lits):
        return ProxyFactor(None)
    if not satisfiable(k.constraints, lits):
        return ProxyFactor(None, vacuous=True)
    for nu in (1, 0):
        if entails(k.constraints, lits, Literal(p, bool(nu))):
            return ProxyFactor(nu)
    return ProxyFactor(None)


def is_factor_of_proxy_discrimination(
    xp: Explanation | frozenset[Literal], k: ConstraintSet | None, p: int
) -> int | None:
    """The protected value ``nu`` every real individual matching ``xp`` has, or None."""
    return proxy_factor(xp, k, p).nu


@dataclass(frozen=True)
class ExplanationEvidence:
    explanation: Explanation
    classification: str
    nu: int | None = None


@dataclass
class BiasVerdict:
    subject: Individual
    protected: int
    decision: int
    explicit_bias: bool
    explicit_evidence: list[ExplanationEvidence] = field(default_factory=list)
    bk_aware_bias: bool | None = None
    bk_evidence: list[ExplanationEvidence] = field(default_factory=list)


def _classify(e: Explanation, k: ConstraintSet | None, p: int) -> ExplanationEvidence:
    if p in e.features:
        return ExplanationEvidence(e, EXPLICIT)
    pf = proxy_factor(e, k, p)
    if pf.vacuous:
        return ExplanationEvidence(e, VACUOUS)
    if pf.nu is not None:
        return ExplanationEvidence(e, PROXY, pf.nu)
    return ExplanationEvidence(e, UNBIASED)


def audit_explicit_bias(m: DecisionModel, x: Individual, p: int) -> BiasVerdict:
    """Explicitly biased iff every minimal explanation mentions ``p``."""
    _check_feature(m, p)
    expls = enumerate_minimal_explanations(m, x)
    evidence = [_classify(e, None, p) for e in expls]
    return BiasVerdict(
        subject=x,
        protected=p,
        decision=m.decide(x),
        explicit_bias=all(ev.classification == EXPLICIT for ev in evidence),
        explicit_evidence=evidence,
    )


def audit_bk_aware_bias(m: DecisionModel, x: Individual, k: ConstraintSet, p: int) -> BiasVerdict:
    """Both the explicit verdict and the verdict under ``k``.

    Under ``k`` the decision is biased iff every minimal explanation computed
    under ``k`` mentions ``p`` or is a factor of proxy discrimination.
    Vacuous explanations count as neither.
    """
    if not check_real(k, x):
        raise DomainError("not a real individual: the individual violates the background knowledge")
    verdict = audit_explicit_bias(m, x, p)
    expls = enumerate_minimal_explanations(m, x, k)
    verdict.bk_evidence = [_classify(e, k, p) for e in expls]
    verdict.bk_aware_bias = all(ev.classification in (EXPLICIT, PROXY) for ev in verdict.bk_evidence)
    return verdict


def construct_biased_twin(m: DecisionModel, k: ConstraintSet, w: ProxyWitness) -> ModelOverride:
    """A model equal to ``m`` on every real individual that is biased.

    Takes the lowest-code real individual ``x0`` matching the witness context
    with ``q = nu_q``, and flips the decision on ``x0`` with ``p`` inverted,
    which is not real.
    """
    p = w.protected
    witness = is_process_biased(m, p)
    if witness is not None:
        raise DomainError(f"model is already biased (e.g. at {m.features.format_individual(witness)})")
    n = m.n
    sel = k.real_mask & extensions(list(w.context) + [Literal(w.proxy, bool(w.nu_q))], n)
    hits = np.flatnonzero(sel)
    if not hits.size:
        raise RuntimeError("proxy witness admits no real individual; it is not a valid witness")
    x0 = Individual.from_code(int(hits[0]), n)
    if x0[p] != w.nu_p:
        raise RuntimeError("proxy witness does not determine the protected value")
    twin_point = x0.flip(p)
    return ModelOverride(m, {twin_point: 1 - m.decide(twin_point)})
