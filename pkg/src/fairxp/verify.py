"""Golden checks of the reference bundle against the worked credit examples."""
from __future__ import annotations

from . import bundle
from .bias import audit_bk_aware_bias, check_proxy_conditions, find_proxies
from .errors import DomainError
from .explain import compute_explanation
from .fairness import audit_individual_fairness, check_mapping_consistency
from .knowledge import mine_forbidden_patterns

HAWA_PATTERN = (True, False, False, False, False, True, False, True, True, False)
HAWA_EXPLANATION = "A & B & !D & P"
YAHYA_EXPLANATION = "A & !S & !D & P & M"
YAHYA_COUNTERPART = "A & !G & !S & !D & !M"
YAHYA_ORDER = "G,J,H,B,C,A,S,D,P,M"
K1 = "forbid !G & P & M"


def verify_bundle() -> list[tuple[str, bool, str]]:
    m = bundle.model()
    f = m.features
    k = bundle.knowledge()
    hawa, yahya = bundle.hawa(), bundle.yahya()
    G = f.index("G")
    results = []

    e, trace = compute_explanation(m, hawa)
    pattern = tuple(s.flip_found for s in trace.steps)
    results.append((
        "Hawa trace (ascending order)",
        m.decide(hawa) == 1 and pattern == HAWA_PATTERN and e.format(f) == HAWA_EXPLANATION,
        e.format(f),
    ))

    try:
        compute_explanation(m, hawa, k=k)
        refused = False
    except DomainError:
        refused = True
    results.append(("Hawa refused under k1 (not a real individual)", refused, ""))

    order = [f.index(n) for n in YAHYA_ORDER.split(",")]
    e, _ = compute_explanation(m, yahya, order)
    results.append(("Yahya explanation", m.decide(yahya) == 1 and e.format(f) == YAHYA_EXPLANATION, e.format(f)))

    bias = audit_bk_aware_bias(m, yahya, k, G)
    fair = audit_individual_fairness(m, yahya, bundle.mapping(), bundle.partition(), k)
    ok = (
        not bias.explicit_bias
        and bias.bk_aware_bias is True
        and fair.fair
        and fair.criterion.format(f) == YAHYA_EXPLANATION
        and fair.counterpart.format(f) == YAHYA_COUNTERPART
    )
    detail = f"explicit={bias.explicit_bias} bk_aware={bias.bk_aware_bias} fair={fair.fair}"
    results.append(("Yahya audit", ok, detail))

    from .io import format_constraint

    mined = mine_forbidden_patterns(bundle.dataset(), 3)
    lines = [format_constraint(f, c) for c in mined.constraints]
    results.append(("k1 mined from the dataset", K1 in lines, "; ".join(lines)))

    witnesses = find_proxies(k, G, 1)
    M, P = f.index("M"), f.index("P")
    has = any(
        w.proxy == M and {(l.feature, l.value) for l in w.context} == {(P, 1)} and w.nu_q == 1 and w.nu_p == 1
        for w in witnesses
    )
    results.append((
        "M is a proxy of G in context P=1",
        has and all(check_proxy_conditions(k, w) for w in witnesses),
        f"{len(witnesses)} witnesses",
    ))

    rep = check_mapping_consistency(bundle.mapping(), bundle.partition(), k)
    results.append(("credit mapping consistent with k1", rep.consistent, ""))
    return results
