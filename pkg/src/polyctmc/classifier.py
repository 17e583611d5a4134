"""Threshold classification of the long-run dynamics.

The condition table C1..C21 is evaluated with exact sign tests on
(R, alpha, beta, gamma).  Chains with a finite jump set get the
biconditional theorems; chains with an infinite jump set only get the
one-sided sufficient conditions, and everything else comes back unknown.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .parameters import Parameters

HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"

BETA_CONDITIONS = frozenset({2, 6, 8, 9, 10, 12, 14, 15, 16, 18, 21})

# edges of the implication diagram among the conditions
IMPLICATIONS = (
    (1, 7),
    (19, 17),
    (17, 3),
    (20, 3),
    (20, 4),
    (11, 14),
    (12, 15),
    (13, 4),
    (14, 15),
    (15, 4),
    (15, 6),
    (10, 18),
    (18, 6),
    (9, 6),
    (16, 6),
    (21, 9),
    (16, 5),
    (21, 5),
    (2, 8),
)

GAP_NOTE = "gap cases that remain for QSDs (C11/C20/C21)"
INFINITE_NOTE = "infinite jump set: only sufficient conditions available"


def _sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class ConditionSet:
    """c[i] for i in 1..21; ``None`` marks a condition that needs an undefined beta."""

    values: tuple

    def __getitem__(self, i: int) -> Optional[bool]:
        return self.values[i - 1]

    def fired(self) -> list[int]:
        return [i for i in range(1, 22) if self[i]]

    def any(self, *idx: int) -> bool:
        return any(self[i] for i in idx)

    def to_dict(self) -> dict:
        return {f"C{i}": self[i] for i in range(1, 22)}


def evaluate_conditions(p: Parameters) -> ConditionSet:
    R = p.R
    a = _sign(p.alpha)
    g = _sign(p.gamma)
    b = None if p.beta is None else _sign(p.beta)

    def need_beta(expr):
        return None if b is None else expr()

    c = {
        1: a > 0 and R > 1,
        2: need_beta(lambda: a == 0 and b > 0 and R > 2),
        3: a < 0,
        4: R <= 1,
        5: a == 0 and R == 2,
        6: need_beta(lambda: a == 0 and b <= 0),
        7: a > 0,
        8: need_beta(lambda: a == 0 and b > 0),
        9: need_beta(lambda: a == 0 and b < 0 and R > 1),
        10: need_beta(lambda: a == 0 and b == 0 and R > 2),
        11: a == 0 and g < 0 and R == 1,
        12: need_beta(lambda: a == 0 and b <= 0 and g > 0 and R == 1),
        13: a == 0 and R == 0,
        14: need_beta(lambda: a == 0 and b < 0 and R == 1),
        15: need_beta(lambda: a == 0 and b <= 0 and R == 1),
        16: need_beta(lambda: a == 0 and b == 0 and R == 2),
        17: a < 0 and R >= 1,
        18: need_beta(lambda: a == 0 and b <= 0 and R > 2),
        19: a < 0 and R > 1,
        20: a < 0 and R <= 1,
        21: need_beta(lambda: a == 0 and b < 0 and R == 2),
    }
    return ConditionSet(tuple(c[i] for i in range(1, 22)))


@dataclass(frozen=True)
class Verdict:
    value: str
    conditions_fired: tuple = ()
    theorem: str = ""
    note: str = ""

    def to_dict(self) -> dict:
        out = {"value": self.value, "conditions": [f"C{i}" for i in self.conditions_fired], "theorem": self.theorem}
        if self.note:
            out["note"] = self.note
        return out


def _v(value: str, conds, theorem: str, note: str = "") -> Verdict:
    return Verdict(value, tuple(sorted(set(conds))), theorem, note)


@dataclass(frozen=True)
class MomentThresholds:
    """Finite moments E tau^eps for 0 < eps < exists_below, infinite for eps > fails_above.

    Endpoints are open: eps equal to either threshold is undecided.
    """

    exists_below: Union[Fraction, str, None] = None
    fails_above: Optional[Fraction] = None
    first_moment_finite: str = UNKNOWN
    theorem: str = ""
    note: str = ""

    def to_dict(self) -> dict:
        def q(v):
            if v is None or isinstance(v, str):
                return v
            return f"{v.numerator}/{v.denominator}"

        return {
            "exists_below": q(self.exists_below),
            "fails_above": q(self.fails_above),
            "first_moment_finite": self.first_moment_finite,
            "theorem": self.theorem,
            "note": self.note,
        }


@dataclass(frozen=True)
class ClassificationReport:
    has_absorbing: bool
    theorem_set: str
    explosive: Verdict
    explosive_almost_surely: Optional[bool]
    recurrent: Optional[Verdict] = None
    transient: Optional[Verdict] = None
    certain_absorption: Optional[Verdict] = None
    positive_recurrent: Optional[Verdict] = None
    null_recurrent: Optional[Verdict] = None
    exponentially_ergodic: Optional[Verdict] = None
    qsd: Optional[Verdict] = None
    implosive: Optional[Verdict] = None
    moment_thresholds: Optional[MomentThresholds] = None
    table1_cell: Optional[str] = None

    VERDICT_FIELDS = (
        "explosive",
        "recurrent",
        "transient",
        "certain_absorption",
        "positive_recurrent",
        "null_recurrent",
        "exponentially_ergodic",
        "qsd",
        "implosive",
    )

    def verdicts(self) -> dict:
        return {k: getattr(self, k) for k in self.VERDICT_FIELDS if getattr(self, k) is not None}

    def values(self) -> dict:
        return {k: v.value for k, v in self.verdicts().items()}

    def to_dict(self) -> dict:
        out = {
            "has_absorbing": self.has_absorbing,
            "theorem_set": self.theorem_set,
            "explosive_almost_surely": self.explosive_almost_surely,
            "table1_cell": self.table1_cell,
        }
        for k in self.VERDICT_FIELDS:
            v = getattr(self, k)
            out[k] = None if v is None else v.to_dict()
        out["moment_thresholds"] = None if self.moment_thresholds is None else self.moment_thresholds.to_dict()
        return out


def classify(p: Parameters, has_absorbing: bool) -> ClassificationReport:
    c = evaluate_conditions(p)
    if p.support_finite and p.beta is not None:
        return _classify_finite(p, c, has_absorbing)
    return _classify_infinite(p, c, has_absorbing)


def _fired(c: ConditionSet, *idx: int) -> list[int]:
    return [i for i in idx if c[i]]


def _classify_finite(p: Parameters, c: ConditionSet, absorbing: bool) -> ClassificationReport:
    th7 = "Thm th-7"
    if c.any(1, 2):
        explosive = _v(HOLDS, _fired(c, 1, 2), th7)
    else:
        explosive = _v(FAILS, [], th7, "neither C1 nor C2")
    a_s = (explosive.value == HOLDS) if not absorbing else None
    fields = dict(explosive=explosive, explosive_almost_surely=a_s, table1_cell=table1_cell(p))

    recurrent_cond = c.any(3, 6)
    pr_cond = c.any(3, 9, 10, 11)

    if absorbing:
        th8 = "Thm th-8(ii)"
        if recurrent_cond:
            fields["certain_absorption"] = _v(HOLDS, _fired(c, 3, 6), th8)
        else:
            fields["certain_absorption"] = _v(FAILS, [], th8, "neither C3 nor C6")
        th9 = "Thm th-9(ii)"
        if not recurrent_cond:
            fields["qsd"] = _v(FAILS, [], th9, "no certain absorption, hence no QSD")
        elif c.any(18, 19):
            fields["qsd"] = _v(HOLDS, _fired(c, 18, 19), th9, "unique uniformly exponentially ergodic QLD")
        elif not pr_cond:
            fields["qsd"] = _v(FAILS, [], th9, "none of C3, C9, C10, C11")
        else:
            fields["qsd"] = _v(UNKNOWN, _fired(c, 11, 20, 21), th9, GAP_NOTE)
        return ClassificationReport(True, "finite", **fields)

    th8 = "Thm th-8(i)"
    if recurrent_cond:
        fields["recurrent"] = _v(HOLDS, _fired(c, 3, 6), th8)
        fields["transient"] = _v(FAILS, _fired(c, 3, 6), th8)
    else:
        fields["recurrent"] = _v(FAILS, [], th8, "neither C3 nor C6")
        fields["transient"] = _v(HOLDS, [], th8, "neither C3 nor C6")

    th9 = "Thm th-9(i)"
    if not recurrent_cond:
        # the positive/null dichotomy presumes recurrence, so neither is emitted
        fields["exponentially_ergodic"] = _v(FAILS, [], th8, "transient: no stationary distribution")
    else:
        if pr_cond:
            fields["positive_recurrent"] = _v(HOLDS, _fired(c, 3, 9, 10, 11), th9)
            fields["null_recurrent"] = _v(FAILS, _fired(c, 3, 9, 10, 11), th9)
        else:
            fields["positive_recurrent"] = _v(FAILS, [], th9, "none of C3, C9, C10, C11")
            fields["null_recurrent"] = _v(HOLDS, [], th9, "none of C3, C9, C10, C11")
        if c.any(17, 18):
            fields["exponentially_ergodic"] = _v(HOLDS, _fired(c, 17, 18), th9)
        elif not pr_cond:
            fields["exponentially_ergodic"] = _v(FAILS, [], th9, "null recurrent: no stationary distribution")
        else:
            fields["exponentially_ergodic"] = _v(
                UNKNOWN, _fired(c, 3, 9, 11), th9, "positive recurrent but neither C17 nor C18: no rate statement"
            )

    th10 = "Thm th-10"
    if c.any(18, 19):
        fields["implosive"] = _v(HOLDS, _fired(c, 18, 19), th10)
    else:
        fields["implosive"] = _v(FAILS, [], th10, "neither C18 nor C19")

    fields["moment_thresholds"] = _moments_finite(p, c, recurrent_cond, pr_cond)
    return ClassificationReport(False, "finite", **fields)


def _moments_finite(p: Parameters, c: ConditionSet, recurrent: bool, positive: bool) -> MomentThresholds:
    th = "Thm th-11"
    if not recurrent:
        return MomentThresholds(
            None, Fraction(0), FAILS, "Thm th-8(i)", "transient: hitting times are infinite with positive probability"
        )
    exists = None
    fails = None
    notes = []
    if c.any(3, 9, 10):
        exists = "all"
    elif c[13]:
        exists, fails = Fraction(1, 2), Fraction(1)
    elif c[16]:
        exists, fails = Fraction(1), Fraction(1)
    else:
        ratio = p.beta / (p.beta - p.gamma) if c[15] else None
        if c[14]:
            exists = ratio
        if c[15]:
            fails = ratio
            if p.beta == 0:
                notes.append("beta = 0: the threshold beta/(beta-gamma) is 0")
        if c[11] and (exists is None or exists < 1):
            # E tau < oo gives every eps <= 1 by Jensen
            exists = Fraction(1)
    # finite expected hitting time of a finite set is equivalent to positive recurrence
    first = HOLDS if positive else FAILS
    if c[12]:
        notes.append("C12: E tau = infinity")
    return MomentThresholds(exists, fails, first, th, "; ".join(notes))


def _classify_infinite(p: Parameters, c: ConditionSet, absorbing: bool) -> ClassificationReport:
    note = INFINITE_NOTE
    th = "Thm th-7/cor-infinite-explosivity"
    if c[1]:
        explosive = _v(HOLDS, [1], th)
    elif c.any(3, 4, 5):
        explosive = _v(FAILS, _fired(c, 3, 4, 5), th)
    else:
        explosive = _v(UNKNOWN, [], th, note)
    a_s = None if absorbing else {HOLDS: True, FAILS: False}.get(explosive.value)
    fields = dict(explosive=explosive, explosive_almost_surely=a_s, table1_cell=None)

    if absorbing:
        th = "Thm th-8(ii)/cor-infinite-recurrence"
        if c[3]:
            fields["certain_absorption"] = _v(HOLDS, [3], th)
        elif c[7]:
            fields["certain_absorption"] = _v(FAILS, [7], th)
        else:
            fields["certain_absorption"] = _v(UNKNOWN, [], th, note)
        th = "Thm th-9(ii)/cor-infinite-ergodicity"
        if c[19]:
            fields["qsd"] = _v(HOLDS, [19], th, "unique uniformly exponentially ergodic QLD")
        elif c[7]:
            fields["qsd"] = _v(FAILS, [7], th)
        else:
            fields["qsd"] = _v(UNKNOWN, [], th, note)
        return ClassificationReport(True, "infinite", **fields)

    th = "Thm th-8(i)/cor-infinite-recurrence"
    if c[3]:
        fields["recurrent"] = _v(HOLDS, [3], th)
        fields["transient"] = _v(FAILS, [3], th)
    elif c[7]:
        fields["recurrent"] = _v(FAILS, [7], th)
        fields["transient"] = _v(HOLDS, [7], th)
    else:
        fields["recurrent"] = _v(UNKNOWN, [], th, note)
        fields["transient"] = _v(UNKNOWN, [], th, note)

    th = "Thm th-9(i)/cor-infinite-ergodicity"
    if c[3]:
        fields["positive_recurrent"] = _v(HOLDS, [3], th)
        fields["null_recurrent"] = _v(FAILS, [3], th)
    elif not c[7]:
        fields["positive_recurrent"] = _v(UNKNOWN, [], th, note)
        fields["null_recurrent"] = _v(UNKNOWN, [], th, note)
    if c[17]:
        fields["exponentially_ergodic"] = _v(HOLDS, [17], th)
    elif c[7]:
        fields["exponentially_ergodic"] = _v(FAILS, [7], "Thm th-8(i)/cor-infinite-recurrence", "transient")
    else:
        fields["exponentially_ergodic"] = _v(UNKNOWN, [], th, note)

    th = "Thm th-10/cor-infinite-implosivity"
    if c[19]:
        fields["implosive"] = _v(HOLDS, [19], th)
    elif c[7]:
        fields["implosive"] = _v(FAILS, [7], "Thm th-8(i)/cor-infinite-recurrence", "transient")
    else:
        fields["implosive"] = _v(UNKNOWN, [], th, note)

    th = "Thm th-11/cor-infinite-passagetime"
    if c[3]:
        mt = MomentThresholds(Fraction(1), None, HOLDS, th, "positive recurrent (C3)")
    elif c[7]:
        mt = MomentThresholds(None, Fraction(0), FAILS, "Thm th-8(i)/cor-infinite-recurrence", "transient")
    else:
        mt = MomentThresholds(None, None, UNKNOWN, th, note)
    fields["moment_thresholds"] = mt
    return ClassificationReport(False, "infinite", **fields)


# ---------------------------------------------------------------------------
# the region table

NOT_POSSIBLE = "not possible"


def alpha_zero_column(beta_sign: int, gamma_sign: int) -> Optional[str]:
    """Column of the alpha = 0 block, or None for a sign pattern violating beta < gamma."""
    if gamma_sign < 0:
        return "gamma<0" if beta_sign < 0 else None
    if gamma_sign == 0:
        return "gamma=0" if beta_sign < 0 else None
    return {-1: "beta<0<gamma", 0: "beta=0", 1: "beta>0"}[beta_sign]


def table1_cell(p: Parameters) -> Optional[str]:
    """Region label for (R, sign alpha, sign beta, sign gamma); None for infinite jump sets."""
    if not p.support_finite or p.beta is None:
        return None
    return region_label(p.R, _sign(p.alpha), _sign(p.beta), _sign(p.gamma))


def region_label(R: int, a: int, b: int, g: int) -> str:
    if a == 0:
        col = alpha_zero_column(b, g)
        if col is None:
            return NOT_POSSIBLE
    else:
        col = "alpha<0" if a < 0 else "alpha>0"
    row = "R=0" if R == 0 else "R=1" if R == 1 else "R=2" if R == 2 else "R>2"
    return _TABLE[row][col]


_TABLE = {
    "R=0": {
        "alpha<0": "red",
        "gamma<0": NOT_POSSIBLE,
        "gamma=0": "blue",
        "beta<0<gamma": NOT_POSSIBLE,
        "beta=0": NOT_POSSIBLE,
        "beta>0": NOT_POSSIBLE,
        "alpha>0": "green",
    },
    "R=1": {
        "alpha<0": "red (ES)",
        "gamma<0": "red",
        "gamma=0": "blue (NS/NQ)",
        "beta<0<gamma": "blue (NS/NQ)",
        "beta=0": "blue (NS/NQ)",
        "beta>0": "green (NS/NQ)",
        "alpha>0": "green (NS/NQ)",
    },
    "R=2": {
        "alpha<0": "pink",
        "gamma<0": "red",
        "gamma=0": "red",
        "beta<0<gamma": "red",
        "beta=0": "blue",
        "beta>0": "green",
        "alpha>0": "yellow",
    },
    "R>2": {
        "alpha<0": "pink (ES/UQ)",
        "gamma<0": "pink (ES/UQ)",
        "gamma=0": "pink (ES/UQ)",
        "beta<0<gamma": "pink (ES/UQ)",
        "beta=0": "pink (ES/UQ)",
        "beta>0": "yellow (NS/NQ)",
        "alpha>0": "yellow (NS/NQ)",
    },
}
