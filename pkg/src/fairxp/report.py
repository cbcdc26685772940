"""Report assembly.

A report body is a plain JSON-ready dict built only from inputs and
parameters, so the same invocation always serialises to the same bytes.
Timing lives outside the body.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Any

from .bias import BiasVerdict, ExplanationEvidence, ProxyWitness
from .explain import Explanation, ExplanationTrace, is_vacuous
from .fairness import FairnessVerdict, MappingReport
from .knowledge import ConstraintSet
from .logic import FeatureSpace, Individual

SCHEMA_NOTES = {
    "explicit": "explanation mentions the protected feature",
    "proxy-factor": "protected feature absent, but background knowledge and the explanation entail protected = nu",
    "vacuous": "no real individual satisfies the explanation; counted neither as bias nor as a proxy factor",
    "unbiased": "neither explicit nor a proxy factor",
    "bk_aware_bias": "every minimal explanation under the background knowledge is explicit or a proxy factor",
    "fair": "some minimal explanation maps to a counterpart that is sufficient for the same decision",
}


def digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def canonical(body: Any) -> str:
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


@dataclass
class AuditRun:
    command: str
    parameters: dict[str, Any]
    inputs: dict[str, dict[str, str]] = field(default_factory=dict)
    outputs: dict[str, Any] = field(default_factory=dict)
    started: float = field(default_factory=time.perf_counter)
    elapsed: float | None = None

    def add_input(self, role: str, path: str, raw: bytes) -> None:
        self.inputs[role] = {"path": path, "sha256": digest(raw)}

    def finish(self) -> None:
        self.elapsed = time.perf_counter() - self.started

    def body(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }

    def body_text(self) -> str:
        return canonical(self.body())

    def document(self) -> str:
        seconds = None if self.elapsed is None else round(self.elapsed, 6)
        return canonical({"report": self.body(), "timing": {"seconds": seconds}})


# ---------------------------------------------------------------------------
# fragments


def explanation_entry(features: FeatureSpace, e: Explanation, k: ConstraintSet | None = None) -> dict:
    out = {"literals": e.format(features), "size": len(e)}
    if k is not None and is_vacuous(e.literals, k):
        out["vacuous"] = True
    return out


def trace_entry(features: FeatureSpace, trace: ExplanationTrace) -> list[dict]:
    return [
        {
            "step": i,
            "feature": features.names[s.feature],
            "flip_found": s.flip_found,
            "kept": s.kept,
            "probe": features.format_literals(s.probe),
        }
        for i, s in enumerate(trace.steps, 1)
    ]


def _evidence(features: FeatureSpace, items: list[ExplanationEvidence]) -> list[dict]:
    out = []
    for ev in items:
        item = {"literals": ev.explanation.format(features), "class": ev.classification}
        if ev.nu is not None:
            item["nu"] = ev.nu
        out.append(item)
    return out


def bias_entry(features: FeatureSpace, verdict: BiasVerdict, flip_changes: bool) -> dict:
    out = {
        "explicit_bias": verdict.explicit_bias,
        "flip_changes_decision": flip_changes,
        "explanations": _evidence(features, verdict.explicit_evidence),
    }
    if verdict.bk_aware_bias is not None:
        out["bk_aware_bias"] = verdict.bk_aware_bias
        out["bk_explanations"] = _evidence(features, verdict.bk_evidence)
    return out


def fairness_entry(features: FeatureSpace, verdict: FairnessVerdict) -> dict:
    return {
        "fair": verdict.fair,
        "reason": verdict.reason,
        "criterion": verdict.criterion.format(features) if verdict.criterion else None,
        "counterpart": verdict.counterpart.format(features) if verdict.counterpart else None,
        "checked": [
            {
                "explanation": xp.format(features),
                "counterpart": cp.format(features) if cp else None,
                "outcome": outcome,
            }
            for xp, cp, outcome in verdict.checked
        ],
    }


def proxy_entries(features: FeatureSpace, witnesses: list[ProxyWitness]) -> list[dict]:
    return [
        {
            "proxy": features.names[w.proxy],
            "context": features.format_literals(w.context),
            "nu_q": w.nu_q,
            "nu_p": w.nu_p,
            "text": w.format(features),
        }
        for w in witnesses
    ]


def mapping_entry(features: FeatureSpace, rep: MappingReport, limit: int = 50) -> dict:
    return {
        "consistent": rep.consistent,
        "injective": rep.injective,
        "ambiguous_sources": ["{" + features.format_literals(s, ",") + "}" for s in rep.ambiguous],
        "collisions": [["{" + features.format_literals(s, ",") + "}" for s in group] for group in rep.collisions],
        "uncovered_count": len(rep.uncovered),
        "uncovered": [features.format_individual(x) for x in rep.uncovered[:limit]],
    }


def individual_label(features: FeatureSpace, x: Individual, row: int | None) -> dict:
    return {"individual": features.format_individual(x), "row": row}


# ---------------------------------------------------------------------------
# text rendering


def render_audit(outputs: dict) -> str:
    lines = []
    for entry in outputs.get("individuals", []):
        head = entry["individual"]
        if entry.get("row") is not None:
            head = f"row {entry['row']}: {head}"
        lines.append(f"== {head}")
        if "error" in entry:
            lines.append(f"   skipped: {entry['error']}")
            continue
        lines.append(f"   decision: {entry['decision']}")
        bias = entry["bias"]
        lines.append(f"   explicit_bias: {str(bias['explicit_bias']).lower()}")
        for ev in bias["explanations"]:
            lines.append(f"     - {ev['literals']}  [{ev['class']}]")
        if "bk_aware_bias" in bias:
            lines.append(f"   bk_aware_bias: {str(bias['bk_aware_bias']).lower()}")
            for ev in bias["bk_explanations"]:
                nu = f" nu={ev['nu']}" if "nu" in ev else ""
                lines.append(f"     - {ev['literals']}  [{ev['class']}{nu}]")
        if "fairness" in entry:
            fair = entry["fairness"]
            lines.append(f"   fair: {str(fair['fair']).lower()} ({fair['reason']})")
            if fair["criterion"]:
                lines.append(f"     criterion:   {fair['criterion']}")
                lines.append(f"     counterpart: {fair['counterpart']}")
    if outputs.get("proxies") is not None:
        lines.append("== proxies")
        for w in outputs["proxies"]:
            lines.append(f"   {w['text']}")
        if not outputs["proxies"]:
            lines.append("   (none)")
    summary = outputs.get("summary")
    if summary:
        lines.append("== summary")
        for key in sorted(summary):
            lines.append(f"   {key}: {summary[key]}")
    return "\n".join(lines) + "\n"
