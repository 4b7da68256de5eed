"""Dimension rules, minimal-multiple searches, and bound composition.

Two rules produce dimension witnesses for the image of the map attached
to |-mK|:

  * nonvanishing: h0(-mK) >= 2 gives a nonconstant map, so dim >= 1;
  * the Matsusaka-Maehara test: h0(-mK) > m^r (-K)^5 + r gives dim > r.

The composition rule then says: if |-rK| is nonempty for every r >= r0
(with r0 >= 3) and dim >= i is witnessed at r_i for i = 1, 2, 3, the map
is birational for all m >= r0 + r1 + r2 + r3.

Searches run in three modes sharing one interface: worst case (over a
constraint system in (a, b)), concrete Chern data, and an h0 oracle.
Every solve produces a Certificate whose steps the independent verifier
in certs can replay.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .exact import AffineForm, rat_str, to_rat
from .hilbert import ChernData, p_affine, p_eval
from . import certs
from .derive import (
    ConstraintSystem,
    DEFAULT_M_CERT,
    Fact,
    InfeasibleSystemError,
    MinimizeResult,
    MonotoneReport,
    axiom_system,
    derive_lower_bound,
    fact_to_constraint,
    fm_minimize,
    geometry_system,
    interpolate_model,
    merge_branch_facts,
    monotone_from,
    oracle_monotone,
    point_with_value_below,
    split_on_p1,
    strengthen_integral,
)

DEFAULT_M_MAX = 32
DEFAULT_LMAX = 3
LEMMA2_R_CAP = 4


class CertificationError(Exception):
    """A solve step failed; the message names the failing step."""


class SearchExhaustedError(CertificationError):
    """No witness within the search budget m_max."""


@dataclass(frozen=True)
class DimWitness:
    """Evidence that the image of the map at multiple m has dimension at
    least target_dim, with the exact positive margin of the inequality."""

    target_dim: int
    m: int
    rule: str  # "nonvanishing" | "lemma2"
    margin: Fraction
    r_used: Optional[int] = None

    def __post_init__(self) -> None:
        if self.margin <= 0:
            raise ValueError("a witness needs a positive margin")
        if self.rule == "nonvanishing" and self.target_dim != 1:
            raise ValueError("nonvanishing only witnesses dimension 1")


def nonvanishing_rule(fact: Fact) -> Optional[DimWitness]:
    """A pencil rule: P(m) >= 2 means the map at m is nonconstant."""
    bound = fact.bound if not fact.strict else fact.bound + 1
    if bound >= 2:
        return DimWitness(1, fact.m, "nonvanishing", bound - 1)
    return None


def lemma2_threshold(m: int, r: int, d5: int) -> int:
    """The section count to beat: m^r * D^5 + r for D = -K with D^5 = d5."""
    if m < 1 or r < 0 or d5 < 1:
        raise ValueError("need m >= 1, r >= 0, d5 >= 1")
    return m**r * d5 + r


def lemma2_check(h0: int, m: int, r: int, d5: int) -> Optional[DimWitness]:
    """Strict dimension test on exact values: h0 > threshold gives
    dim >= r + 1; the boundary is not a pass."""
    t = lemma2_threshold(m, r, d5)
    if h0 > t:
        return DimWitness(r + 1, m, "lemma2", Fraction(h0 - t), r_used=r)
    return None


def lemma2_slack_form(m: int, r: int) -> AffineForm:
    """P(m) - (m^r * 720a + r): positive exactly when the test passes with
    (-K)^5 expressed as 720a."""
    return p_affine(m) - AffineForm.of(720 * m**r, 0, r)


def lemma2_worstcase(cs: ConstraintSystem, m: int, r: int) -> Optional[DimWitness]:
    """Worst-case dimension test: passes when the slack form has a positive
    minimum over the system."""
    res = fm_minimize(cs, lemma2_slack_form(m, r))
    if res.status == "minimum" and res.value > 0:
        return DimWitness(r + 1, m, "lemma2", res.value, r_used=r)
    return None


def compose_bound(r0: int, rs: Sequence[int]) -> int:
    """The composition rule's bound r0 + r1 + r2 + r3."""
    if len(rs) != 3:
        raise ValueError("need the three dimension multiples r1, r2, r3")
    return r0 + sum(rs)


# ---------------------------------------------------------------------------
# Search sources
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleSource:
    """An exact h0 oracle: the bundle it came from, the convention, the
    value function, and the intersection number (-K)^5."""

    bundle: tuple[int, ...]
    convention: str
    h0: Callable[[int], int]
    d5: int


Source = Union[ConstraintSystem, ChernData, OracleSource]


@dataclass(frozen=True)
class SearchOutcome:
    m: int
    witness: DimWitness
    selected: dict
    attempts: tuple[dict, ...]


def _source_value(source: Source, m: int) -> int:
    if isinstance(source, ChernData):
        return p_eval(source, m)
    return source.h0(m)


def _worst_case_dim1_attempt(cs: ConstraintSystem, m: int) -> Optional[dict]:
    """Evidence that no pencil is certified at m, or None when it is.

    A feasible point with P(m) <= 1 is exact evidence: the strongest
    derivable integral bound is then at most 1, below the pencil rule.
    """
    res = fm_minimize(cs, p_affine(m))
    if res.status == "infeasible":
        raise InfeasibleSystemError("search system is contradictory")
    point = None
    if res.status == "minimum":
        fact = strengthen_integral(Fact(m, res.value, res.strict), cs)
        if fact.bound >= 2:
            return None
        if res.attained and res.value <= 1:
            point = res.point
    if point is None:
        point = point_with_value_below(cs, p_affine(m), Fraction(1))
    assert point is not None
    return {
        "m": m,
        "r": None,
        "point": certs.ser_point(point),
        "value": rat_str(p_affine(m).evaluate(*point)),
    }


def _worst_case_lemma2_attempt(cs: ConstraintSystem, m: int, r: int) -> Optional[dict]:
    """Evidence that the worst-case test fails at (m, r), or None on a pass."""
    slack = lemma2_slack_form(m, r)
    res = fm_minimize(cs, slack)
    if res.status == "infeasible":
        raise InfeasibleSystemError("search system is contradictory")
    if res.status == "minimum" and res.value > 0:
        return None
    if res.status == "minimum" and res.attained and res.value <= 0:
        point = res.point
    else:
        point = point_with_value_below(cs, slack, Fraction(0))
    if point is None:
        raise CertificationError(
            f"test at m={m}, r={r} is inconclusive (boundary infimum)"
        )
    return {
        "m": m,
        "r": r,
        "point": certs.ser_point(point),
        "value": rat_str(slack.evaluate(*point)),
    }


def minimal_r(
    source: Source,
    target_dim: int,
    m_max: int = DEFAULT_M_MAX,
    m_start: int = 1,
) -> SearchOutcome:
    """Smallest m <= m_max carrying a dimension witness for target_dim.

    Dimension 1 uses the pencil rule; dimensions 2 and 3 try the strict
    test for every exponent r in [target_dim - 1, 4] and keep any pass.
    Deterministic tie-break: smallest m, then smallest r.
    """
    if target_dim not in (1, 2, 3):
        raise ValueError("target dimension must be 1, 2, or 3")
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    attempts: list[dict] = []
    r_options = [None] if target_dim == 1 else list(range(target_dim - 1, LEMMA2_R_CAP + 1))
    for m in range(m_start, m_max + 1):
        for r in r_options:
            if isinstance(source, ConstraintSystem):
                if r is None:
                    fail = _worst_case_dim1_attempt(source, m)
                    if fail is None:
                        res = fm_minimize(source, p_affine(m))
                        fact = strengthen_integral(Fact(m, res.value, res.strict), source)
                        witness = nonvanishing_rule(fact)
                        assert witness is not None
                        selected = {
                            "rule": "nonvanishing",
                            "m": m,
                            "r": None,
                            "raw_min": rat_str(res.value),
                            "raw_strict": res.strict,
                            "farkas": certs.ser_farkas(res.farkas),
                            "bound": rat_str(fact.bound),
                            "strengthened": fact.bound != res.value,
                            "margin": rat_str(witness.margin),
                        }
                        return SearchOutcome(m, witness, selected, tuple(attempts))
                    attempts.append(fail)
                else:
                    fail = _worst_case_lemma2_attempt(source, m, r)
                    if fail is None:
                        res = fm_minimize(source, lemma2_slack_form(m, r))
                        witness = DimWitness(r + 1, m, "lemma2", res.value, r_used=r)
                        selected = {
                            "rule": "lemma2",
                            "m": m,
                            "r": r,
                            "raw_min": rat_str(res.value),
                            "farkas": certs.ser_farkas(res.farkas),
                            "margin": rat_str(res.value),
                        }
                        return SearchOutcome(m, witness, selected, tuple(attempts))
                    attempts.append(fail)
            else:
                value = _source_value(source, m)
                d5 = source.k5 if isinstance(source, ChernData) else source.d5
                if r is None:
                    witness = nonvanishing_rule(Fact(m, Fraction(value)))
                    if witness is not None:
                        selected = {
                            "rule": "nonvanishing",
                            "m": m,
                            "r": None,
                            "value": value,
                            "margin": rat_str(witness.margin),
                        }
                        return SearchOutcome(m, witness, selected, tuple(attempts))
                    attempts.append({"m": m, "r": None, "value": value})
                else:
                    witness = lemma2_check(value, m, r, d5)
                    if witness is not None:
                        selected = {
                            "rule": "lemma2",
                            "m": m,
                            "r": r,
                            "value": value,
                            "threshold": lemma2_threshold(m, r, d5),
                            "margin": rat_str(witness.margin),
                        }
                        return SearchOutcome(m, witness, selected, tuple(attempts))
                    attempts.append(
                        {
                            "m": m,
                            "r": r,
                            "value": value,
                            "threshold": lemma2_threshold(m, r, d5),
                        }
                    )
    raise SearchExhaustedError(
        f"no dimension-{target_dim} witness up to m = {m_max}"
    )


# ---------------------------------------------------------------------------
# Nonemptiness of |-rK| for all r >= r0
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class R0Certification:
    r0: int
    nonempty_bound: Fraction
    nonempty_res: Optional[MinimizeResult]  # worst-case only
    monotone: MonotoneReport


def certify_r0(
    source: Source, r0: int, m_cert: int = DEFAULT_M_CERT
) -> R0Certification:
    """Certify h0(-rK) >= 1 for every r >= r0: a bound at r0 itself plus
    strictly increasing values from r0 on (per-multiple range and ray tail).

    The composition rule requires r0 >= 3; smaller values are rejected.
    """
    if r0 < 3:
        raise ValueError("the composition rule needs r0 >= 3")
    if isinstance(source, ConstraintSystem):
        fact = derive_lower_bound(source, r0)
        if fact.bound < 1:
            raise CertificationError(
                f"certify_r0: only P({r0}) >= {fact.bound} derivable, need >= 1"
            )
        res = fm_minimize(source, p_affine(r0))
        report = monotone_from(source, r0, m_cert)
        return R0Certification(r0, fact.bound, res, report)
    if isinstance(source, ChernData):
        v = p_eval(source, r0)
        if v < 1:
            raise CertificationError(f"certify_r0: P({r0}) = {v} < 1")
        report = monotone_from(source, r0, m_cert)
        return R0Certification(r0, Fraction(v), None, report)
    v = source.h0(r0)
    if v < 1:
        raise CertificationError(f"certify_r0: h0 at {r0} is {v} < 1")
    model = interpolate_model(source.h0, list(range(1, 7)))
    if model.degree > 5:
        raise CertificationError("certify_r0: oracle model degree exceeds 5")
    for m in range(1, m_cert + 2):
        if model(m) != source.h0(m):
            raise CertificationError(
                f"certify_r0: oracle is not polynomial at m = {m}; "
                "the tail cannot be certified"
            )
    report = oracle_monotone(source.h0, r0, m_cert, model)
    return R0Certification(r0, Fraction(v), None, report)


# ---------------------------------------------------------------------------
# Certificate assembly
# ---------------------------------------------------------------------------

class _StepWriter:
    def __init__(self) -> None:
        self.steps: list[dict] = []
        self._next = 1

    def add(self, rule: str, inputs: list, claim: str, witness: dict) -> int:
        sid = self._next
        self._next += 1
        self.steps.append(
            {"id": sid, "rule": rule, "inputs": inputs, "claim": claim, "witness": witness}
        )
        return sid


def _ser_system(cs: ConstraintSystem) -> list[dict]:
    return [certs.ser_constraint(c) for c in cs.constraints]


def _fm_bound_step(
    w: _StepWriter, cs: ConstraintSystem, m: int, fact: Fact, res: MinimizeResult
) -> int:
    return w.add(
        "fm_lower_bound",
        [{"m": m, "system": cs.label, "constraints": _ser_system(cs)}],
        f"P({m}) >= {rat_str(fact.bound)}",
        {
            "raw_min": rat_str(res.value),
            "raw_strict": res.strict,
            "farkas": certs.ser_farkas(res.farkas),
            "attained": res.attained,
            "point": certs.ser_point(res.point),
            "bound": rat_str(fact.bound),
            "strengthened": fact.bound != res.value,
        },
    )


def _monotone_steps(
    w: _StepWriter,
    report: MonotoneReport,
    mode: str,
    cs: Optional[ConstraintSystem] = None,
    values_step: Optional[int] = None,
    model_step: Optional[int] = None,
) -> None:
    if mode == "worst_case":
        checks = [
            {"m": c.m, "min": rat_str(c.min_value), "farkas": certs.ser_farkas(c.farkas)}
            for c in report.checks
        ]
        inputs = [
            {
                "m0": report.m0,
                "m_cert": report.m_cert,
                "mode": mode,
                "constraints": _ser_system(cs),
            }
        ]
    else:
        checks = [{"m": c.m, "delta": int(c.min_value)} for c in report.checks]
        inputs = [
            {"m0": report.m0, "m_cert": report.m_cert, "mode": mode, "values_step": values_step}
        ]
    w.add(
        "monotone_range",
        inputs,
        f"P(m+1) > P(m) for {report.m0} <= m <= {report.m_cert}",
        {"checks": checks},
    )
    tail = report.tail
    tail_inputs: dict = {"m_start": tail.m_start, "mode": tail.mode}
    if tail.mode == "worst_case":
        tail_inputs["b_constraint"] = tail.b_constraint
        tail_inputs["a_constraint"] = tail.a_constraint
        tail_inputs["constraints"] = _ser_system(cs)
    elif tail.mode == "oracle":
        tail_inputs["model_step"] = model_step
    w.add(
        "monotone_tail",
        [tail_inputs],
        f"P(m+1) - P(m) > 0 for m >= {tail.m_start}",
        {
            "q_poly": certs.ser_poly(tail.q_poly),
            "q_shifted": [rat_str(c) for c in tail.q_poly.shift(tail.m_start).coeffs],
        },
    )


def _dim_search_steps(
    w: _StepWriter,
    source: Source,
    m_max: int,
    values_step: Optional[int] = None,
    dim1_start: int = 1,
) -> list[int]:
    rs = []
    for target in (1, 2, 3):
        m_start = dim1_start if target == 1 else 1
        outcome = minimal_r(source, target, m_max, m_start=m_start)
        inputs: dict = {"target_dim": target, "m_max": m_max, "m_start": m_start}
        if isinstance(source, ConstraintSystem):
            inputs["mode"] = "worst_case"
            inputs["system"] = source.label
            inputs["constraints"] = _ser_system(source)
        else:
            inputs["mode"] = "concrete" if isinstance(source, ChernData) else "oracle"
            inputs["values_step"] = values_step
            inputs["d5"] = source.k5 if isinstance(source, ChernData) else source.d5
        w.add(
            "dim_search",
            [inputs],
            f"dim >= {target} at m = {outcome.m}",
            {"attempts": list(outcome.attempts), "selected": outcome.selected},
        )
        rs.append(outcome.m)
    return rs


def _compose_step(w: _StepWriter, r0: int, rs: list[int]) -> int:
    bound = compose_bound(r0, rs)
    w.add(
        "compose",
        [{"r0": r0, "r": rs}],
        f"birational for all m >= {bound}",
        {"bound": bound},
    )
    return bound


WORST_CASE_AXIOMS = ["A1", "A2", "A3", "A4", "A5"]
CONCRETE_AXIOMS = ["A3", "A4"]
ORACLE_AXIOMS = ["O1", "O2"]


def solve_worst_case(
    a5: bool = True,
    lmax: int = DEFAULT_LMAX,
    m_max: int = DEFAULT_M_MAX,
    m_cert: int = DEFAULT_M_CERT,
) -> certs.Certificate:
    """Derive the bound valid for every 5-fold with -K nef and big.

    The chain: case split on P(1), per-branch lower bounds for P(3), merge,
    convert the merged bound into an affine constraint, search minimal
    multiples for dimensions 1..3, certify nonemptiness from r0, compose.
    """
    w = _StepWriter()
    axioms = [a for a in WORST_CASE_AXIOMS if a5 or a != "A5"]
    base = axiom_system(a5=a5)
    w.add(
        "axioms",
        [{"a5": a5, "horizon": max(c.params[0] for c in base.constraints if c.kind == "vanishing")}],
        "axiom set fixed",
        {"constraints": _ser_system(base)},
    )
    branches = split_on_p1(base, lmax)
    w.add(
        "split_p1",
        [{"lmax": lmax}],
        f"P(1) cases 0..{lmax} and >= {lmax + 1} cover",
        {"labels": [br.label for br in branches], "coverage": branches[0].coverage_note},
    )
    branch_refs = []
    branch_facts = []
    for br in branches:
        res = fm_minimize(br.system, p_affine(3))
        if res.status != "minimum":
            raise CertificationError(f"branch {br.label}: no finite bound for P(3)")
        fact = strengthen_integral(Fact(3, res.value, res.strict), br.system)
        sid = _fm_bound_step(w, br.system, 3, fact, res)
        branch_refs.append({"label": br.label, "step": sid, "bound": rat_str(fact.bound)})
        branch_facts.append(fact)
    merged = merge_branch_facts(branch_facts)
    w.add(
        "merge_min",
        [{"m": 3, "branches": branch_refs}],
        f"P(3) >= {rat_str(merged.bound)} on the union of branches",
        {"bound": rat_str(merged.bound)},
    )
    geom_fact = fact_to_constraint(merged)
    geom = geometry_system([merged])
    w.add(
        "fact_to_constraint",
        [{"m": 3, "bound": rat_str(merged.bound), "strict": merged.strict}],
        f"{certs.format_form(geom_fact.form)} >= 0",
        {
            "constraint": certs.ser_constraint(geom_fact),
            "scale": rat_str(to_rat(geom_fact.params[2])),
        },
    )
    rs = _dim_search_steps(w, geom, m_max)
    r0cert = certify_r0(geom, 3, m_cert)
    _monotone_steps(w, r0cert.monotone, "worst_case", cs=geom)
    bound = _compose_step(w, 3, rs)
    return certs.Certificate(
        mode=certs.WORST_CASE,
        axioms=axioms,
        steps=w.steps,
        r0=3,
        r=rs,
        bound=bound,
    )


def solve_concrete(
    chern: ChernData, m_max: int = DEFAULT_M_MAX, m_cert: int = DEFAULT_M_CERT
) -> certs.Certificate:
    """Bound for one concrete 5-fold given its Chern intersection numbers."""
    w = _StepWriter()
    table_max = max(m_cert + 2, m_max)
    values = [p_eval(chern, m) for m in range(table_max + 1)]
    w.add(
        "axioms",
        [{"a5": False, "horizon": 0}],
        "axiom set fixed",
        {"constraints": []},
    )
    values_step = w.add(
        "eval_p",
        [{"m_max": table_max}],
        f"P(0..{table_max}) evaluated exactly",
        {"values": values},
    )
    r0cert = None
    last_err: Optional[Exception] = None
    for r0 in range(3, m_max + 1):
        try:
            r0cert = certify_r0(chern, r0, m_cert)
            break
        except CertificationError as exc:
            last_err = exc
    if r0cert is None:
        raise CertificationError(f"certify_r0 failed up to m_max: {last_err}")
    w.add(
        "value_at_least",
        [{"m": r0cert.r0, "values_step": values_step}],
        f"P({r0cert.r0}) >= 1",
        {"value": values[r0cert.r0], "bound": 1},
    )
    _monotone_steps(w, r0cert.monotone, "concrete", values_step=values_step)
    rs = _dim_search_steps(w, chern, m_max, values_step)
    bound = _compose_step(w, r0cert.r0, rs)
    return certs.Certificate(
        mode=certs.CONCRETE,
        axioms=list(CONCRETE_AXIOMS),
        steps=w.steps,
        r0=r0cert.r0,
        r=rs,
        bound=bound,
        chern=chern,
    )


def solve_oracle(
    source: OracleSource,
    m_max: int = DEFAULT_M_MAX,
    m_cert: int = DEFAULT_M_CERT,
    dim1_start: int = 1,
) -> certs.Certificate:
    """Bound from an exact section-count oracle.

    dim1_start pins where the dimension-1 search begins; the faithful
    replay of the published example starts it at 3 to reproduce the
    printed multiple selection.
    """
    w = _StepWriter()
    table_max = max(m_cert + 2, m_max)
    values = [source.h0(m) for m in range(1, table_max + 1)]
    w.add(
        "axioms",
        [{"a5": False, "horizon": 0}],
        "axiom set fixed",
        {"constraints": []},
    )
    values_step = w.add(
        "oracle_values",
        [
            {
                "bundle": list(source.bundle),
                "convention": source.convention,
                "m_max": table_max,
                "d5": source.d5,
            }
        ],
        f"h0(-mK) for m = 1..{table_max} under the {source.convention} convention",
        {"values": values},
    )
    r0cert = None
    last_err: Optional[Exception] = None
    for r0 in range(3, m_max + 1):
        try:
            r0cert = certify_r0(source, r0, m_cert)
            break
        except CertificationError as exc:
            last_err = exc
    if r0cert is None:
        raise CertificationError(f"certify_r0 failed up to m_max: {last_err}")
    model = interpolate_model(source.h0, list(range(1, 7)))
    model_step = w.add(
        "oracle_model",
        [{"values_step": values_step, "m_lo": 1, "m_hi": m_cert + 1}],
        f"oracle values match a degree-{max(model.degree, 0)} polynomial on [1, {m_cert + 1}]",
        {"coeffs": certs.ser_poly(model)},
    )
    w.add(
        "value_at_least",
        [{"m": r0cert.r0, "values_step": values_step}],
        f"P({r0cert.r0}) >= 1",
        {"value": values[r0cert.r0 - 1], "bound": 1},
    )
    _monotone_steps(
        w, r0cert.monotone, "oracle", values_step=values_step, model_step=model_step
    )
    rs = _dim_search_steps(w, source, m_max, values_step, dim1_start=dim1_start)
    bound = _compose_step(w, r0cert.r0, rs)
    return certs.Certificate(
        mode=certs.CONCRETE,
        axioms=list(ORACLE_AXIOMS),
        steps=w.steps,
        r0=r0cert.r0,
        r=rs,
        bound=bound,
    )


def solve(
    mode: str,
    chern: Optional[ChernData] = None,
    oracle: Optional[OracleSource] = None,
    m_max: int = DEFAULT_M_MAX,
    m_cert: int = DEFAULT_M_CERT,
    dim1_start: int = 1,
) -> certs.Certificate:
    """End-to-end entry point covering the three input modes."""
    if mode == certs.WORST_CASE:
        return solve_worst_case(m_max=m_max, m_cert=m_cert)
    if mode == certs.CONCRETE:
        if (chern is None) == (oracle is None):
            raise ValueError("concrete mode takes exactly one of chern or oracle")
        if chern is not None:
            return solve_concrete(chern, m_max=m_max, m_cert=m_cert)
        return solve_oracle(oracle, m_max=m_max, m_cert=m_cert, dim1_start=dim1_start)
    raise ValueError(f"unknown mode {mode!r}")
