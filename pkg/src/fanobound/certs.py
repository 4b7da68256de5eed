"""Certificates of birationality bounds and their independent verifier.

A certificate is a JSON document recording every derivation step with
enough exact witnesses (Farkas multipliers, optimal points, polynomial
shifts, oracle values) that the claimed bound can be re-checked by
substitution and sign tests alone.  The verifier here never calls the
prover's search machinery: it rebuilds each recorded inequality from its
descriptor, replays the arithmetic, and rejects on the first mismatch.

Schema (field names are part of the external interface):

    {"version": 1,
     "mode": "worst_case" | "concrete",
     "chern": {"k5": int, "k3c2": int} | null,
     "axioms": [string, ...],
     "steps": [{"id": int, "rule": string, "inputs": [...],
                "claim": string, "witness": {...}}, ...],
     "r0": int, "r": [int, int, int], "bound": int}

Rationals serialize as "p/q" strings with the sign on the numerator;
integers omit the "/1".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from .exact import AffineForm, Poly, rat_str, to_rat
from .hilbert import ChernData, p_affine, p_eval
from .derive import constraint_form

CERT_VERSION = 1

WORST_CASE = "worst_case"
CONCRETE = "concrete"

# refuse pathological ranges instead of looping on crafted input
MAX_TABLE = 512
MAX_SEARCH = 128


class MalformedCertificateError(ValueError):
    """The document is not a structurally valid certificate."""


@dataclass
class Certificate:
    mode: str
    axioms: list[str]
    steps: list[dict]
    r0: int
    r: list[int]
    bound: int
    chern: Optional[ChernData] = None
    version: int = CERT_VERSION

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "mode": self.mode,
            "chern": (
                {"k5": self.chern.k5, "k3c2": self.chern.k3c2}
                if self.chern is not None
                else None
            ),
            "axioms": list(self.axioms),
            "steps": self.steps,
            "r0": self.r0,
            "r": list(self.r),
            "bound": self.bound,
        }

    def to_json_bytes(self) -> bytes:
        return (
            json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"
        ).encode("utf-8")


def from_json_dict(doc: Any) -> Certificate:
    if not isinstance(doc, dict):
        raise MalformedCertificateError("certificate must be a JSON object")
    required = {"version", "mode", "chern", "axioms", "steps", "r0", "r", "bound"}
    missing = required - set(doc)
    if missing:
        raise MalformedCertificateError(f"missing fields: {sorted(missing)}")
    if not isinstance(doc["steps"], list) or not all(
        isinstance(s, dict) for s in doc["steps"]
    ):
        raise MalformedCertificateError("steps must be a list of objects")
    if not isinstance(doc["r"], list) or len(doc["r"]) != 3:
        raise MalformedCertificateError("r must be a list of three integers")
    for key in ("version", "r0", "bound"):
        if not isinstance(doc[key], int):
            raise MalformedCertificateError(f"{key} must be an integer")
    chern = None
    if doc["chern"] is not None:
        try:
            chern = ChernData(int(doc["chern"]["k5"]), int(doc["chern"]["k3c2"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedCertificateError(f"bad chern field: {exc}") from exc
    return Certificate(
        mode=doc["mode"],
        axioms=list(doc["axioms"]),
        steps=list(doc["steps"]),
        r0=doc["r0"],
        r=[int(x) for x in doc["r"]],
        bound=doc["bound"],
        chern=chern,
        version=doc["version"],
    )


def from_json_bytes(data: bytes) -> Certificate:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedCertificateError(f"not valid JSON: {exc}") from exc
    return from_json_dict(doc)


# ---------------------------------------------------------------------------
# Shared serialization helpers (prover writes, verifier reads)
# ---------------------------------------------------------------------------

def ser_param(p: Any) -> Any:
    if isinstance(p, bool) or isinstance(p, int):
        return p
    if isinstance(p, Fraction):
        return rat_str(p)
    return p


def ser_form(f: AffineForm) -> list[str]:
    return [rat_str(f.coeff_a), rat_str(f.coeff_b), rat_str(f.const)]


def ser_constraint(c) -> dict:
    return {
        "cid": c.cid,
        "kind": c.kind,
        "params": [ser_param(p) for p in c.params],
        "form": ser_form(c.form),
        "strict": c.strict,
    }


def ser_poly(p: Poly) -> list[str]:
    return [rat_str(c) for c in p.coeffs]


def ser_farkas(farkas) -> list[list[str]]:
    return [[cid, rat_str(v)] for cid, v in farkas]


def ser_point(point) -> Optional[list[str]]:
    if point is None:
        return None
    return [rat_str(point[0]), rat_str(point[1])]


def format_form(f: AffineForm) -> str:
    parts = []
    for coeff, name in ((f.coeff_a, "a"), (f.coeff_b, "b")):
        if coeff == 0:
            continue
        if coeff == 1:
            parts.append(name)
        elif coeff == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{rat_str(coeff)}{name}")
    if f.const != 0 or not parts:
        parts.append(rat_str(f.const))
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


# ---------------------------------------------------------------------------
# Verifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    step_id: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:  # pragma: no cover - convenience
        return self.ok


class _Fail(Exception):
    def __init__(self, step_id: Optional[int], reason: str):
        self.step_id = step_id
        self.reason = reason
        super().__init__(reason)


def _parse_form(data: Any) -> AffineForm:
    try:
        ca, cb, k = data
        return AffineForm.of(to_rat(ca), to_rat(cb), to_rat(k))
    except (TypeError, ValueError) as exc:
        raise _Fail(None, f"bad affine form {data!r}: {exc}")


_AXIOM_KINDS = {"k5_floor": "A1", "vanishing": "A4", "mono12": "A5"}
_BRANCH_KINDS = {"p1_eq_lo", "p1_eq_hi", "p1_tail"}


def _check_constraints(
    step_id: int,
    cons: Any,
    established: dict,
    axioms: list[str],
    branch_ok: bool = False,
) -> tuple[dict, bool]:
    """Validate a serialized constraint list.

    Every form must regenerate from its descriptor; axiom constraints must
    be covered by the certificate's declared axiom set; derived-fact
    constraints must match a fact established by an earlier step; case
    hypotheses on P(1) are legal only where branch_ok says so.  Returns
    (cid -> (form, strict), whether any branch hypothesis is present).
    """
    if not isinstance(cons, list):
        raise _Fail(step_id, "constraints must be a list")
    table: dict[str, tuple[AffineForm, bool]] = {}
    has_hypothesis = False
    for entry in cons:
        try:
            cid = entry["cid"]
            kind = entry["kind"]
            params = tuple(entry["params"])
            recorded = _parse_form(entry["form"])
            strict = bool(entry["strict"])
        except (KeyError, TypeError) as exc:
            raise _Fail(step_id, f"bad constraint entry: {exc}")
        if kind in _AXIOM_KINDS:
            if _AXIOM_KINDS[kind] not in axioms:
                raise _Fail(
                    step_id, f"constraint {cid} uses undeclared axiom {_AXIOM_KINDS[kind]}"
                )
        elif kind in _BRANCH_KINDS:
            if not branch_ok:
                raise _Fail(step_id, f"case hypothesis {cid} outside a branch step")
            has_hypothesis = True
        elif kind != "from_fact":
            raise _Fail(step_id, f"constraint kind {kind!r} not allowed in certificates")
        try:
            rebuilt, rebuilt_strict = constraint_form(kind, params)
        except (ValueError, TypeError) as exc:
            raise _Fail(step_id, f"constraint {cid}: {exc}")
        if rebuilt != recorded or rebuilt_strict != strict:
            raise _Fail(step_id, f"constraint {cid} does not match its descriptor")
        if kind == "from_fact":
            m, bound, _scale, f_strict = params
            key = (int(m), to_rat(bound), bool(f_strict))
            if key not in established:
                raise _Fail(
                    step_id,
                    f"constraint {cid} cites a fact P({m}) >= {bound} "
                    "not established by an earlier step",
                )
        table[cid] = (recorded, strict)
    return table, has_hypothesis


def _check_farkas(
    step_id: int,
    farkas: Any,
    table: dict,
    objective: AffineForm,
    value: Fraction,
) -> bool:
    """Replay a Farkas combination: nonnegative multipliers over recorded
    constraints summing exactly to objective - value.  Returns whether the
    combination proves a strict bound."""
    if not isinstance(farkas, list):
        raise _Fail(step_id, "farkas witness must be a list")
    acc = AffineForm.constant(0)
    strict = False
    for item in farkas:
        try:
            cid, mult = item
            mult = to_rat(mult)
        except (TypeError, ValueError) as exc:
            raise _Fail(step_id, f"bad farkas entry {item!r}: {exc}")
        if mult < 0:
            raise _Fail(step_id, f"negative farkas multiplier on {cid}")
        if cid not in table:
            raise _Fail(step_id, f"farkas cites unknown constraint {cid}")
        form, c_strict = table[cid]
        acc = acc + form.scale(mult)
        if mult > 0 and c_strict:
            strict = True
    if acc != objective - AffineForm.constant(value):
        raise _Fail(step_id, "farkas combination does not reproduce the bound")
    return strict


def _check_point(step_id: int, point: Any, table: dict) -> tuple[Fraction, Fraction]:
    try:
        a, b = (to_rat(x) for x in point)
    except (TypeError, ValueError) as exc:
        raise _Fail(step_id, f"bad point {point!r}: {exc}")
    for cid, (form, strict) in table.items():
        v = form.evaluate(a, b)
        if v < 0 or (v == 0 and strict):
            raise _Fail(step_id, f"witness point violates constraint {cid}")
    return a, b


def _strengthen_ok(raw: Fraction, raw_strict: bool, bound: Fraction) -> bool:
    import math

    if raw_strict:
        return bound == math.floor(raw) + 1
    if raw.denominator != 1:
        return bound == math.ceil(raw)
    return bound == raw


def _single_input(step_id: int, step: dict) -> dict:
    inputs = step.get("inputs")
    if not isinstance(inputs, list) or len(inputs) != 1 or not isinstance(inputs[0], dict):
        raise _Fail(step_id, "inputs must be a one-element list holding an object")
    return inputs[0]


def _witness(step_id: int, step: dict) -> dict:
    w = step.get("witness")
    if not isinstance(w, dict):
        raise _Fail(step_id, "missing witness")
    return w


def _lemma2_slack_form(m: int, r: int) -> AffineForm:
    # h0 threshold in worst-case mode: m^r * (-K)^5 + r with (-K)^5 = 720a
    return p_affine(m) - AffineForm.of(720 * m**r, 0, r)


def _difference_polys_formula() -> tuple[Poly, Poly, Poly]:
    from .hilbert import coefficient_polys

    fa, fb, fc = coefficient_polys()
    return fa.shift(1) - fa, fb.shift(1) - fb, fc.shift(1) - fc


def _model_from_step(step_id: int, steps_by_id: dict, model_step: Any) -> Poly:
    ms = steps_by_id.get(model_step)
    if ms is None or ms.get("rule") != "oracle_model":
        raise _Fail(step_id, "model_step does not reference an oracle_model step")
    coeffs = ms.get("witness", {}).get("coeffs")
    if not isinstance(coeffs, list):
        raise _Fail(step_id, "referenced model has no coefficients")
    return Poly([to_rat(c) for c in coeffs])


def _oracle_values_from_step(step_id: int, steps_by_id: dict, values_step: Any) -> list[int]:
    vs = steps_by_id.get(values_step)
    if vs is None or vs.get("rule") not in ("oracle_values", "eval_p"):
        raise _Fail(step_id, "values_step does not reference a value table step")
    values = vs.get("witness", {}).get("values")
    if not isinstance(values, list):
        raise _Fail(step_id, "referenced value table is missing")
    return [int(v) for v in values]


def _value_at(step_id: int, rule: str, values: list[int], m: int) -> int:
    # eval_p tables start at m = 0, oracle tables at m = 1
    idx = m if rule == "eval_p" else m - 1
    if idx < 0 or idx >= len(values):
        raise _Fail(step_id, f"value table has no entry for m = {m}")
    return values[idx]


def verify(cert: Certificate) -> VerifyResult:
    """Replay every step of a certificate by arithmetic alone.

    Valid means: all recorded constraints regenerate from their descriptors,
    all Farkas combinations and witness points check out, value tables
    recompute exactly, polynomial tails have the certified sign pattern,
    selections are minimal over their recorded search ranges, and the final
    bound equals the recomposed sum.
    """
    progress: list = [None]
    try:
        _verify_inner(cert, progress)
    except _Fail as f:
        sid = f.step_id if f.step_id is not None else progress[0]
        return VerifyResult(False, sid, f.reason)
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        return VerifyResult(False, progress[0], f"malformed step data: {exc!r}")
    return VerifyResult(True)


# every certificate sticks to one derivation flavor; mixing would let a
# step about an unrelated object justify the composed bound
_FLAVOR_RULES = {
    "worst_case": {
        "axioms", "split_p1", "fm_lower_bound", "merge_min",
        "fact_to_constraint", "dim_search", "monotone_range",
        "monotone_tail", "compose",
    },
    "concrete": {
        "axioms", "eval_p", "value_at_least", "dim_search",
        "monotone_range", "monotone_tail", "compose",
    },
    "oracle": {
        "axioms", "oracle_values", "oracle_model", "value_at_least",
        "dim_search", "monotone_range", "monotone_tail", "compose",
    },
}


def _verify_inner(cert: Certificate, progress: list) -> None:
    if cert.version != CERT_VERSION:
        raise _Fail(None, f"unsupported version {cert.version}")
    if cert.mode not in (WORST_CASE, CONCRETE):
        raise _Fail(None, f"unknown mode {cert.mode!r}")
    if cert.mode == WORST_CASE:
        flavor = "worst_case"
    elif cert.chern is not None:
        flavor = "concrete"
    else:
        flavor = "oracle"
    allowed_rules = _FLAVOR_RULES[flavor]

    steps_by_id: dict[int, dict] = {}
    last_id = 0
    for step in cert.steps:
        sid = step.get("id")
        if not isinstance(sid, int) or sid <= last_id:
            raise _Fail(sid if isinstance(sid, int) else None, "step ids must increase")
        last_id = sid
        steps_by_id[sid] = step

    established: dict = {}  # facts available to later steps
    searches: dict[int, dict] = {}  # target_dim -> selected
    monotone_range_step: Optional[dict] = None
    monotone_tail_step: Optional[dict] = None
    compose_step: Optional[dict] = None
    split_lmax: Optional[int] = None

    for step in cert.steps:
        sid = step["id"]
        progress[0] = sid
        rule = step.get("rule")
        if rule not in allowed_rules:
            if rule in {r for rules in _FLAVOR_RULES.values() for r in rules}:
                raise _Fail(sid, f"rule {rule!r} does not belong to a {flavor} certificate")
            raise _Fail(sid, f"unknown rule {rule!r}")
        if rule in ("dim_search", "monotone_range", "monotone_tail"):
            inner_mode = _single_input(sid, step).get("mode")
            if inner_mode != flavor:
                raise _Fail(sid, f"step mode {inner_mode!r} contradicts the {flavor} flavor")
        if rule == "axioms":
            _witness(sid, step)
            cons = step["witness"].get("constraints", [])
            _check_constraints(sid, cons, established, cert.axioms)

        elif rule == "split_p1":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            lmax = int(inp.get("lmax", -1))
            if lmax < 0:
                raise _Fail(sid, "split needs lmax >= 0")
            labels = w.get("labels")
            want = [f"P(1)={l}" for l in range(lmax + 1)] + [f"P(1)>={lmax + 1}"]
            if labels != want:
                raise _Fail(sid, "branch labels do not cover the split")
            split_lmax = lmax

        elif rule == "fm_lower_bound":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            m = int(inp["m"])
            table, conditional = _check_constraints(
                sid, inp.get("constraints", []), established, cert.axioms, branch_ok=True
            )
            raw = to_rat(w["raw_min"])
            raw_strict = bool(w.get("raw_strict", False))
            proved_strict = _check_farkas(sid, w.get("farkas", []), table, p_affine(m), raw)
            if raw_strict and not proved_strict:
                raise _Fail(sid, "strict bound claimed without a strict combination")
            if bool(w.get("attained")) != (w.get("point") is not None):
                raise _Fail(sid, "attainment flag disagrees with the witness point")
            if w.get("attained"):
                if proved_strict:
                    raise _Fail(sid, "attained minimum proved by a strict combination")
                a, b = _check_point(sid, w.get("point"), table)
                if p_affine(m).evaluate(a, b) != raw:
                    raise _Fail(sid, "witness point does not attain the minimum")
            bound = to_rat(w["bound"])
            if bool(w.get("strengthened")) != (bound != raw):
                raise _Fail(sid, "strengthening flag disagrees with the bounds")
            if w.get("strengthened"):
                if "A3" not in cert.axioms:
                    raise _Fail(sid, "strengthening uses undeclared integrality axiom")
                if not _strengthen_ok(raw, raw_strict, bound):
                    raise _Fail(sid, "integral strengthening is wrong")
            if step.get("claim") != f"P({m}) >= {rat_str(bound)}":
                raise _Fail(sid, "claim text does not match the witness")
            if not conditional:
                # bounds proved under case hypotheses stay branch-local;
                # only the merge step may promote them
                established[(m, bound, False)] = sid

        elif rule == "merge_min":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            m = int(inp["m"])
            branches = inp.get("branches")
            if not isinstance(branches, list) or not branches:
                raise _Fail(sid, "merge needs branch references")
            if split_lmax is None:
                raise _Fail(sid, "merge without a prior split")
            want_labels = [f"P(1)={l}" for l in range(split_lmax + 1)] + [
                f"P(1)>={split_lmax + 1}"
            ]
            got_labels = [br.get("label") for br in branches]
            if got_labels != want_labels:
                raise _Fail(sid, "merged branches do not cover the split")
            bounds = []
            for br in branches:
                ref = steps_by_id.get(br.get("step"))
                if ref is None or ref.get("rule") != "fm_lower_bound":
                    raise _Fail(sid, f"branch {br.get('label')} cites no bound step")
                bound_br = to_rat(br.get("bound"))
                if ref.get("claim") != f"P({m}) >= {rat_str(bound_br)}":
                    raise _Fail(sid, f"branch {br.get('label')} bound mismatch")
                ref_inp = _single_input(sid, ref)
                cids = {c.get("cid") for c in ref_inp.get("constraints", [])}
                if br["label"].startswith("P(1)>="):
                    tail_l = int(br["label"].split(">=")[1])
                    if f"H.P1>={tail_l}" not in cids:
                        raise _Fail(sid, f"branch {br['label']} lacks its hypothesis")
                else:
                    l = int(br["label"].split("=")[1])
                    if not {f"H.P1={l}.lo", f"H.P1={l}.hi"} <= cids:
                        raise _Fail(sid, f"branch {br['label']} lacks its hypothesis")
                bounds.append(bound_br)
            merged = to_rat(w["bound"])
            if merged != min(bounds):
                raise _Fail(sid, "merged bound is not the branch minimum")
            if step.get("claim") != f"P({m}) >= {rat_str(merged)} on the union of branches":
                raise _Fail(sid, "claim text does not match the witness")
            established[(m, merged, False)] = sid

        elif rule == "fact_to_constraint":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            m = int(inp["m"])
            bound = to_rat(inp["bound"])
            strict = bool(inp.get("strict", False))
            if (m, bound, strict) not in established:
                raise _Fail(sid, f"fact P({m}) >= {bound} was not established")
            entry = w.get("constraint")
            table, _ = _check_constraints(sid, [entry], established, cert.axioms)
            (form, form_strict), = table.values()
            scale = to_rat(w.get("scale", 1))
            if scale <= 0:
                raise _Fail(sid, "scale must be positive")
            if form.scale(scale) != p_affine(m) - AffineForm.constant(bound):
                raise _Fail(sid, "constraint does not rescale to the fact")
            if form_strict != strict:
                raise _Fail(sid, "strictness mismatch")

        elif rule == "eval_p":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            if cert.chern is None:
                raise _Fail(sid, "eval_p requires chern data")
            m_max = int(inp["m_max"])
            if not 0 <= m_max <= MAX_TABLE:
                raise _Fail(sid, "value table exceeds verifier limits")
            values = w.get("values")
            if not isinstance(values, list) or len(values) != m_max + 1:
                raise _Fail(sid, "value table has the wrong length")
            for m, v in enumerate(values):
                if p_eval(cert.chern, m) != int(v):
                    raise _Fail(sid, f"recorded P({m}) differs from evaluation")

        elif rule == "oracle_values":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            from . import bundle as bundle_mod

            twists = inp.get("bundle")
            conv = inp.get("convention")
            m_max = int(inp["m_max"])
            if not 1 <= m_max <= MAX_TABLE:
                raise _Fail(sid, "value table exceeds verifier limits")
            try:
                sb = bundle_mod.SplitBundle(tuple(int(e) for e in twists))
            except (TypeError, ValueError) as exc:
                raise _Fail(sid, f"bad bundle: {exc}")
            values = w.get("values")
            if not isinstance(values, list) or len(values) != m_max:
                raise _Fail(sid, "value table has the wrong length")
            for i, v in enumerate(values):
                m = i + 1
                if bundle_mod.h0_anti(sb, m, conv) != int(v):
                    raise _Fail(sid, f"recorded h0 at m={m} differs from recomputation")
            d5 = inp.get("d5")
            if d5 is not None and bundle_mod.k5_geometric(sb) != int(d5):
                raise _Fail(sid, "recorded (-K)^5 differs from intersection theory")

        elif rule == "oracle_model":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            values = _oracle_values_from_step(sid, steps_by_id, inp.get("values_step"))
            vrule = steps_by_id[inp["values_step"]]["rule"]
            model = Poly([to_rat(c) for c in w.get("coeffs", [])])
            if model.degree > 5:
                raise _Fail(sid, "model degree exceeds 5")
            m_lo, m_hi = int(inp["m_lo"]), int(inp["m_hi"])
            if not 1 <= m_lo <= m_hi <= MAX_TABLE:
                raise _Fail(sid, "model range exceeds verifier limits")
            if m_hi - m_lo < 5:
                # six agreeing points pin a degree-5 polynomial
                raise _Fail(sid, "model range too short to pin the polynomial")
            for m in range(m_lo, m_hi + 1):
                if model(m) != _value_at(sid, vrule, values, m):
                    raise _Fail(sid, f"model disagrees with values at m = {m}")

        elif rule == "value_at_least":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            m = int(inp["m"])
            values = _oracle_values_from_step(sid, steps_by_id, inp.get("values_step"))
            vrule = steps_by_id[inp["values_step"]]["rule"]
            value = _value_at(sid, vrule, values, m)
            bound = int(w["bound"])
            if int(w.get("value", value)) != value:
                raise _Fail(sid, "recorded value differs from the table")
            if value < bound:
                raise _Fail(sid, f"P({m}) = {value} is below the claimed bound {bound}")
            established[(m, Fraction(bound), False)] = sid

        elif rule == "dim_search":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            _verify_dim_search(cert, sid, inp, w, steps_by_id, established, searches)
            claim = step.get("claim")
            sel = w["selected"]
            want = f"dim >= {int(inp['target_dim'])} at m = {int(sel['m'])}"
            if claim != want:
                raise _Fail(sid, "claim text does not match the selection")

        elif rule == "monotone_range":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            monotone_range_step = step
            _verify_monotone_range(cert, sid, inp, w, steps_by_id, established)

        elif rule == "monotone_tail":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            monotone_tail_step = step
            _verify_monotone_tail(cert, sid, inp, w, steps_by_id, established)

        elif rule == "compose":
            inp = _single_input(sid, step)
            w = _witness(sid, step)
            compose_step = step
            r0 = int(inp["r0"])
            rs = [int(x) for x in inp["r"]]
            if r0 < 3:
                raise _Fail(sid, "r0 must be >= 3")
            total = r0 + sum(rs)
            if int(w.get("bound", -1)) != total:
                raise _Fail(sid, "composed bound is not the sum")
            if cert.bound != total or cert.r0 != r0 or cert.r != rs:
                raise _Fail(sid, "certificate header disagrees with composition")
            for target in (1, 2, 3):
                sel = searches.get(target)
                if sel is None:
                    raise _Fail(sid, f"no dimension-{target} witness step")
                if int(sel["m"]) != rs[target - 1]:
                    raise _Fail(sid, f"r{target} does not match its witness step")
            if not any(m == r0 and q >= 1 and not s for (m, q, s) in established):
                raise _Fail(sid, f"P({r0}) >= 1 was never established")
            if monotone_range_step is None or monotone_tail_step is None:
                raise _Fail(sid, "monotonicity steps are missing")
            mr_inp = _single_input(sid, monotone_range_step)
            mt_inp = _single_input(sid, monotone_tail_step)
            if int(mr_inp["m0"]) > r0:
                raise _Fail(sid, "monotone range does not start at r0")
            if int(mt_inp["m_start"]) != int(mr_inp["m_cert"]) + 1:
                raise _Fail(sid, "tail does not continue the per-multiple range")
            if step.get("claim") != f"birational for all m >= {total}":
                raise _Fail(sid, "claim text does not match the composition")

        else:
            raise _Fail(sid, f"unknown rule {rule!r}")

    if compose_step is None:
        raise _Fail(None, "certificate has no compose step")


def _verify_dim_search(
    cert: Certificate,
    sid: int,
    inp: dict,
    w: dict,
    steps_by_id: dict,
    established: dict,
    searches: dict,
) -> None:
    target = int(inp["target_dim"])
    if target not in (1, 2, 3):
        raise _Fail(sid, "target dimension must be 1, 2, or 3")
    m_max = int(inp["m_max"])
    if not 1 <= m_max <= MAX_SEARCH:
        raise _Fail(sid, "search range exceeds verifier limits")
    m_start = int(inp.get("m_start", 1))
    mode = inp.get("mode")
    sel = w.get("selected")
    if not isinstance(sel, dict):
        raise _Fail(sid, "missing selection")
    sel_m = int(sel["m"])
    sel_r = sel.get("r")
    if sel_m > m_max or sel_m < m_start:
        raise _Fail(sid, "selected multiple is outside the search range")
    if target >= 2 and (sel.get("rule") != "lemma2" or sel_r is None):
        raise _Fail(sid, "dimension >= 2 needs a lemma2 selection with an exponent")

    r_options = [None] if target == 1 else list(range(target - 1, 5))

    # minimality: every (m, r) preceding the selection must appear as a
    # checked failing attempt
    expect: list[tuple[int, Optional[int]]] = []
    for m in range(m_start, sel_m + 1):
        for r in r_options:
            if m == sel_m and (r is None or (sel_r is not None and r >= int(sel_r))):
                break
            expect.append((m, r))
    attempts = w.get("attempts", [])
    got = [(int(a["m"]), None if a.get("r") is None else int(a["r"])) for a in attempts]
    if got != expect:
        raise _Fail(sid, "failed attempts do not enumerate the search order")

    if mode == "worst_case":
        table, _ = _check_constraints(sid, inp.get("constraints", []), established, cert.axioms)
        for a in attempts:
            point = _check_point(sid, a.get("point"), table)
            value = to_rat(a["value"])
            m, r = int(a["m"]), a.get("r")
            if r is None:
                # P <= 1 at a feasible point caps the derivable integral bound
                form = p_affine(m)
                if form.evaluate(*point) != value or value > 1:
                    raise _Fail(sid, f"attempt at m={m} does not fail nonvanishing")
            else:
                form = _lemma2_slack_form(m, int(r))
                if form.evaluate(*point) != value or value > 0:
                    raise _Fail(sid, f"attempt at m={m}, r={r} does not fail the test")
        raw = to_rat(sel["raw_min"])
        if sel.get("rule") == "nonvanishing":
            if target != 1:
                raise _Fail(sid, "nonvanishing only witnesses dimension 1")
            proved_strict = _check_farkas(
                sid, sel.get("farkas", []), table, p_affine(sel_m), raw
            )
            raw_strict = bool(sel.get("raw_strict", False))
            if raw_strict and not proved_strict:
                raise _Fail(sid, "strict bound claimed without a strict combination")
            bound = to_rat(sel["bound"])
            if sel.get("strengthened"):
                if "A3" not in cert.axioms:
                    raise _Fail(sid, "strengthening uses undeclared integrality axiom")
                if not _strengthen_ok(raw, raw_strict, bound):
                    raise _Fail(sid, "integral strengthening is wrong")
            elif bound != raw:
                raise _Fail(sid, "selection bound differs from the minimum")
            if bound < 2:
                raise _Fail(sid, "a pencil needs P(m) >= 2")
            if to_rat(sel["margin"]) != bound - 1:
                raise _Fail(sid, "nonvanishing margin must be bound - 1")
        else:
            r = int(sel_r)
            form = _lemma2_slack_form(sel_m, r)
            _check_farkas(sid, sel.get("farkas", []), table, form, raw)
            if raw <= 0:
                raise _Fail(sid, "worst-case slack minimum is not positive")
            if to_rat(sel["margin"]) != raw:
                raise _Fail(sid, "margin must equal the slack minimum")
            if r + 1 < target:
                raise _Fail(sid, "lemma instance too weak for the target dimension")
    else:
        values = _oracle_values_from_step(sid, steps_by_id, inp.get("values_step"))
        vrule = steps_by_id[inp["values_step"]]["rule"]
        d5 = inp.get("d5")
        if d5 is not None:
            d5 = int(d5)
            if cert.chern is not None:
                if d5 != cert.chern.k5:
                    raise _Fail(sid, "d5 differs from the chern data")
            else:
                vs_inp = _single_input(sid, steps_by_id[inp["values_step"]])
                if vs_inp.get("d5") is None or int(vs_inp["d5"]) != d5:
                    raise _Fail(sid, "d5 differs from the verified value table")
        for a in attempts:
            m, r = int(a["m"]), a.get("r")
            value = _value_at(sid, vrule, values, m)
            if int(a["value"]) != value:
                raise _Fail(sid, f"attempt value at m={m} differs from the table")
            if r is None:
                if value >= 2:
                    raise _Fail(sid, f"attempt at m={m} does not fail nonvanishing")
            else:
                threshold = int(m) ** int(r) * int(d5) + int(r)
                if int(a.get("threshold", -1)) != threshold or value > threshold:
                    raise _Fail(sid, f"attempt at m={m}, r={r} does not fail the test")
        value = _value_at(sid, vrule, values, sel_m)
        if int(sel.get("value", -1)) != value:
            raise _Fail(sid, "selected value differs from the table")
        if sel.get("rule") == "nonvanishing":
            if target != 1 or value < 2:
                raise _Fail(sid, "a pencil needs P(m) >= 2")
            if to_rat(sel["margin"]) != value - 1:
                raise _Fail(sid, "nonvanishing margin must be value - 1")
        else:
            r = int(sel_r)
            threshold = sel_m**r * int(d5) + r
            if int(sel.get("threshold", -1)) != threshold:
                raise _Fail(sid, "selection threshold is wrong")
            if value <= threshold:
                raise _Fail(sid, "value does not clear the threshold strictly")
            if to_rat(sel["margin"]) != value - threshold:
                raise _Fail(sid, "margin must be value - threshold")
            if r + 1 < target:
                raise _Fail(sid, "lemma instance too weak for the target dimension")

    searches[target] = sel


def _verify_monotone_range(
    cert: Certificate, sid: int, inp: dict, w: dict, steps_by_id: dict, established: dict
) -> None:
    m0, m_cert = int(inp["m0"]), int(inp["m_cert"])
    if not 1 <= m0 <= m_cert <= MAX_TABLE:
        raise _Fail(sid, "monotone range exceeds verifier limits")
    mode = inp.get("mode")
    checks = w.get("checks")
    if not isinstance(checks, list) or [int(c["m"]) for c in checks] != list(
        range(m0, m_cert + 1)
    ):
        raise _Fail(sid, "per-multiple checks do not cover [m0, m_cert]")
    if mode == "worst_case":
        table, _ = _check_constraints(sid, inp.get("constraints", []), established, cert.axioms)
        for c in checks:
            m = int(c["m"])
            form = p_affine(m + 1) - p_affine(m)
            val = to_rat(c["min"])
            _check_farkas(sid, c.get("farkas", []), table, form, val)
            if val <= 0:
                raise _Fail(sid, f"difference at m={m} not certified positive")
    else:
        values = _oracle_values_from_step(sid, steps_by_id, inp.get("values_step"))
        vrule = steps_by_id[inp["values_step"]]["rule"]
        for c in checks:
            m = int(c["m"])
            delta = _value_at(sid, vrule, values, m + 1) - _value_at(sid, vrule, values, m)
            if int(c["delta"]) != delta or delta <= 0:
                raise _Fail(sid, f"difference at m={m} is not positive")


def _verify_monotone_tail(
    cert: Certificate, sid: int, inp: dict, w: dict, steps_by_id: dict, established: dict
) -> None:
    m_start = int(inp["m_start"])
    mode = inp.get("mode")
    q = Poly([to_rat(c) for c in w.get("q_poly", [])])
    da, db, dk = _difference_polys_formula()
    if mode == "worst_case":
        table, _ = _check_constraints(sid, inp.get("constraints", []), established, cert.axioms)
        bcid, acid = inp.get("b_constraint"), inp.get("a_constraint")
        if bcid not in table or acid not in table:
            raise _Fail(sid, "tail cites constraints outside the recorded system")
        bform, bstrict = table[bcid]
        aform, astrict = table[acid]
        if bstrict or astrict:
            raise _Fail(sid, "tail substitution requires non-strict constraints")
        if bform.coeff_b <= 0:
            raise _Fail(sid, "cited constraint gives no lower bound for b")
        if aform.coeff_b != 0 or aform.coeff_a <= 0:
            raise _Fail(sid, "cited constraint gives no lower bound for a")
        if not all(c >= 0 for c in db.shift(m_start).coeffs):
            raise _Fail(sid, "b-substitution is not minimizing on the ray")
        ratio_a = bform.coeff_a / bform.coeff_b
        ratio_k = bform.const / bform.coeff_b
        subst_a = da - db.scale(ratio_a)
        subst_k = dk - db.scale(ratio_k)
        if not all(c >= 0 for c in subst_a.shift(m_start).coeffs):
            raise _Fail(sid, "a-substitution is not minimizing on the ray")
        a_floor = -aform.const / aform.coeff_a
        if q != subst_a.scale(a_floor) + subst_k:
            raise _Fail(sid, "tail polynomial does not match the substitutions")
    elif mode == "concrete":
        if cert.chern is None:
            raise _Fail(sid, "concrete tail requires chern data")
        want = da.scale(cert.chern.a) + db.scale(cert.chern.b) + dk
        if q != want:
            raise _Fail(sid, "tail polynomial does not match the chern data")
    elif mode == "oracle":
        model = _model_from_step(sid, steps_by_id, inp.get("model_step"))
        if q != model.shift(1) - model:
            raise _Fail(sid, "tail polynomial does not match the model difference")
    else:
        raise _Fail(sid, f"unknown tail mode {mode!r}")

    shifted = q.shift(m_start).coeffs
    recorded = [to_rat(c) for c in w.get("q_shifted", [])]
    if list(shifted) != recorded:
        raise _Fail(sid, "recorded shift differs from recomputation")
    if not shifted or any(c < 0 for c in shifted) or shifted[0] <= 0:
        raise _Fail(sid, "shifted tail is not certified positive")
