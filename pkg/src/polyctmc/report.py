"""The machine-readable report and its text rendering.

Both output formats are produced from the same ``Report.to_dict()`` value;
the text renderer only formats what the dictionary already holds.  Error
messages go to standard error and are kept only in the JSON form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

import jsonschema

from . import __version__
from .chain import AssumptionReport, ChainSpec
from .classifier import ClassificationReport, ConditionSet

SCHEMA_VERSION = "1.0"
TOOL_NAME = "polyctmc"


@lru_cache(maxsize=1)
def load_schema() -> dict:
    text = resources.files("polyctmc").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(doc: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` does not fit the schema."""
    jsonschema.validate(doc, load_schema())


@dataclass
class Report:
    command: str
    model_text: str
    spec: Optional[ChainSpec] = None
    assumptions: Optional[AssumptionReport] = None
    parameters: Optional[object] = None
    conditions: Optional[ConditionSet] = None
    classification: Optional[ClassificationReport] = None
    simulation: Optional[dict] = None
    expansion: Optional[dict] = None
    seed: Optional[int] = None
    errors: tuple = ()

    def to_dict(self) -> dict:
        model = {"canonical": self.model_text}
        if self.spec is not None:
            model["label"] = self.spec.label
            model["absorbing"] = sorted(self.spec.absorbing_set)
            model["tail_threshold"] = self.spec.tail_threshold
            model["support_finite"] = self.spec.support_finite
        return {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": TOOL_NAME, "version": __version__},
            "command": self.command,
            "seed": self.seed,
            "model": model,
            "assumptions": None if self.assumptions is None else self.assumptions.to_dict(),
            "parameters": None if self.parameters is None else self.parameters.to_dict(),
            "conditions": None if self.conditions is None else self.conditions.to_dict(),
            "classification": None if self.classification is None else self.classification.to_dict(),
            "simulation": self.simulation,
            "expansion": self.expansion,
            "errors": list(self.errors),
        }

    def to_json(self) -> str:
        doc = self.to_dict()
        validate(doc)
        return json.dumps(doc, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# text rendering


def _assumption_lines(a: dict) -> list[str]:
    out = ["assumptions:"]
    for k in ("A1", "A2", "A3", "A4", "A5"):
        s = a[k]
        extra = [f"{f}={s[f]}" for f in ("bound", "witness") if f in s]
        if "note" in s:
            extra.append(s["note"])
        out.append(f"  {k}: {s['status']}" + (f" ({'; '.join(extra)})" if extra else ""))
    out.append(f"  positivity bound {a['positivity_bound']}, reach radius {a['reach_radius']}")
    if a["excluded_states"]:
        out.append("  excluded states: " + ", ".join(map(str, a["excluded_states"])))
    return out


def _bare(q) -> str:
    if q is None:
        return "n/a"
    return q[:-2] if q.endswith("/1") else q


def params_line(p: dict) -> str:
    return f"R={p['R']} alpha={_bare(p['alpha'])} beta={_bare(p['beta'])} gamma={_bare(p['gamma'])}"


def _classification_lines(c: dict, conds: dict) -> list[str]:
    fired = [k for k, v in conds.items() if v]
    out = [f"conditions fired: {', '.join(fired) or 'none'}"]
    out.append(f"classification ({c['theorem_set']} jump set):")
    for k, v in c.items():
        if not isinstance(v, dict) or "value" not in v:
            continue
        line = f"  {k.replace('_', ' ')}: {v['value']}"
        cited = ", ".join(v["conditions"])
        line += f"  [{v['theorem']}" + (f"; {cited}" if cited else "") + "]"
        if v.get("note"):
            line += f"  {v['note']}"
        out.append(line)
    if c["explosive_almost_surely"] is not None:
        out.append(f"  explosion almost sure: {c['explosive_almost_surely']}")
    mt = c["moment_thresholds"]
    if mt is not None:
        out.append(
            f"  hitting-time moments: finite below {_bare(mt['exists_below'])}, infinite above {_bare(mt['fails_above'])},"
            f" first moment {mt['first_moment_finite']}  [{mt['theorem']}]"
        )
        if mt["note"]:
            out.append(f"    {mt['note']}")
    if c["table1_cell"] is not None:
        out.append(f"  region: {c['table1_cell']}")
    return out


def _simulation_lines(s: dict) -> list[str]:
    out = [f"simulation: {s['trials']} trials, seed {s['seed']}"]
    reasons = ", ".join(f"{k}={v}" for k, v in s["end_reasons"].items() if v)
    out.append(f"  end reasons: {reasons}")
    out.append(f"  hit fraction: {s['hit_fraction']:.6g}")
    for k in ("mean_hitting_time", "median_hitting_time", "mean_final_time", "mean_jumps", "max_final_state"):
        v = s[k]
        out.append(f"  {k.replace('_', ' ')}: {'n/a' if v is None else format(v, '.6g')}")
    occ = s["occupation"]
    if occ.get("mean_state") is not None:
        out.append(f"  time-averaged state: {occ['mean_state']:.6g}")
    if s["neutral_stops"]:
        out.append(f"  {s['neutral_stops']} trials stopped in a state with total rate 0")
    return out


def _expansion_lines(e: dict) -> list[str]:
    out = [f"generator expansion, f = {e['family']} with delta = {e['delta']}:"]
    out.append(f"  {'x':>10}  {'Qf(x)':>14}  {'expansion':>14}  {'rel. error':>10}")
    for r in e["rows"]:
        rel = "n/a" if r["rel_error"] is None else f"{r['rel_error']:.3e}"
        line = f"  {r['x']:>10}  {r['exact']:>14.6e}  {r['expansion']:>14.6e}  {rel:>10}"
        if r["flagged"]:
            line += f"  flagged: both terms vanish, |Qf| / x^(R-3) scale = {r['order_ratio']:.3g}"
        out.append(line)
    return out


def render_text(doc: dict) -> str:
    """Human-readable rendering of a report dictionary."""
    out = []
    m = doc["model"]
    if "label" in m:
        out.append(f"model: {m['label'] or '(unnamed)'}  u={m['tail_threshold']}  absorbing={m['absorbing']}")
    if doc["assumptions"] is not None:
        out.extend(_assumption_lines(doc["assumptions"]))
    if doc["parameters"] is not None:
        p = doc["parameters"]
        line = params_line(p)
        if p["vartheta"] is not None:
            line += f" vartheta={_bare(p['vartheta'])}"
        if p["beta_informational"]:
            line += "  (beta informational: infinite jump set)"
        out.append(line)
    if doc["classification"] is not None:
        out.extend(_classification_lines(doc["classification"], doc["conditions"]))
    if doc["simulation"] is not None:
        out.extend(_simulation_lines(doc["simulation"]))
    if doc["expansion"] is not None:
        out.extend(_expansion_lines(doc["expansion"]))
    return "\n".join(out) + "\n"
