"""Validation harness: run both deciders over the corpus and check invariants."""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .catalog_io import COPRIME_PAIRS, CorpusManifest, build_group, builtin_corpus, data_file, model_from_file
from .certify import recheck_class_witness, recheck_embedding
from .errors import OracleDisagreement
from .group_core import (
    DEFAULT_SUBGROUP_CAP,
    GroupTable,
    factorize,
    is_normal,
    quotient,
    subgroup_table,
    subgroups_of,
    sylow,
)
from .lattice_core import PATTERN_NAMES, build_lattice
from .pattern_detect import ABSENT, TIMEOUT, DEFAULT_BUDGET_SECS, Embedding, freeness_profile
from .structure_classify import ModelViolation, class_l_membership, fl4_model, is_q8

REPORT_SCHEMA = "latsieve.report/1"
MODEL_FILE = "fl4_example.grp"


@dataclass
class GroupRow:
    id: str
    order: int
    subgroups: int
    profile: dict[str, str]
    modular: bool
    l9_free: bool | None
    verdict: str
    type: dict | None
    reasons: list[str]
    agree: bool
    problems: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def as_dict(self, stable: bool = False) -> dict:
        d = dict(self.__dict__)
        if stable:
            d["timings"] = {k: 0.0 for k in self.timings}
        return d


@dataclass
class ValidationReport:
    corpus_version: str
    rows: list[GroupRow]
    global_problems: list[str]
    model: dict

    @property
    def timeouts(self) -> int:
        return sum(1 for r in self.rows if "TIMEOUT" in r.profile.values())

    @property
    def inconclusive(self) -> int:
        return sum(1 for r in self.rows if r.verdict == "INCONCLUSIVE")

    @property
    def ok(self) -> bool:
        return (all(r.agree and not r.problems for r in self.rows) and not self.global_problems
                and self.timeouts == 0 and self.inconclusive == 0 and self.model.get("ok", False))

    def first_failure(self) -> str | None:
        for r in self.rows:
            if not r.agree:
                return f"{r.id}: L9-free={r.l9_free} but verdict {r.verdict}"
            if r.problems:
                return f"{r.id}: {r.problems[0]}"
            if "TIMEOUT" in r.profile.values() or r.verdict == "INCONCLUSIVE":
                return f"{r.id}: timeout or inconclusive"
        if self.global_problems:
            return self.global_problems[0]
        if not self.model.get("ok", False):
            return f"model: {self.model}"
        return None

    def as_dict(self, stable: bool = False) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "corpus_version": self.corpus_version,
            "groups": [r.as_dict(stable) for r in self.rows],
            "totals": {
                "groups": len(self.rows),
                "agree": sum(r.agree for r in self.rows),
                "l9_free": sum(bool(r.l9_free) for r in self.rows),
                "in_class": sum(r.verdict == "IN_CLASS" for r in self.rows),
            },
            "zero_timeouts": self.timeouts == 0,
            "zero_inconclusive": self.inconclusive == 0,
            "global_problems": list(self.global_problems),
            "model": self.model,
            "ok": self.ok,
        }

    def to_json(self, stable: bool = False) -> str:
        return json.dumps(self.as_dict(stable), indent=2, sort_keys=True) + "\n"


def _summary(res) -> str:
    if res is ABSENT:
        return "FREE"
    if res is TIMEOUT:
        return "TIMEOUT"
    return "WITNESS"


def describe_type(w) -> dict | None:
    if not w.in_class:
        return None
    c = w.type
    return {
        "N": c.N.order,
        "K": c.K.order,
        "battens": [b.describe() for b in c.battens],
        "avoidance": sorted({f"{cert.batten.describe()}@{cert.p}:{cert.type}" for cert in c.certificates}),
    }


def group_invariants(g: GroupTable, prof, w) -> list[str]:
    """Per-group consequences of the theory that must hold on every corpus group."""
    probs = []
    lat = prof.lattice
    try:
        lat.verify()
    except AssertionError as exc:
        probs.append(f"lattice: {exc}")
    l5 = prof.results.get("L5")
    if l5 is not None and l5 is not TIMEOUT and prof.modular != (l5 is ABSENT):
        probs.append("modular but L5 embeds, or non-modular and L5-free")
    fac = factorize(g.order)
    if len(fac) == 1 and all(k in prof.results for k in ("L5", "L9", "L10")):
        vals = {prof.modular, prof.is_free("L5"), prof.is_free("L9"), prof.is_free("L10")}
        if len(vals) != 1:
            probs.append("p-group: modular, L5-free, L9-free, L10-free are not equivalent")
    for name, res in prof.results.items():
        if isinstance(res, Embedding):
            probs += [f"{name} witness: {m}" for m in recheck_embedding(res)]
    if isinstance(prof.direct_l9, Embedding):
        probs += [f"direct L9 witness: {m}" for m in recheck_embedding(prof.direct_l9)]
    if prof.results.get("L9") is ABSENT:
        normal_sylow = [p for p in fac if len(sylow(g, p)) == 1]
        if g.order > 1 and not normal_sylow:
            probs.append("L9-free but no normal Sylow subgroup")
        if len(fac) == 2 and len(normal_sylow) == 1:
            (q,) = [x for x in fac if x != normal_sylow[0]]
            Q = sylow(g, q)[0]
            if not (Q.is_cyclic() or is_q8(g, Q)):
                probs.append(f"non-nilpotent L9-free {{p,q}}-group with Sylow {q} neither cyclic nor Q8")
    if w.in_class:
        probs += [f"certificate: {m}" for m in recheck_class_witness(g, w)]
    return probs


def analyze_group(g: GroupTable, gid: str | None = None, patterns=PATTERN_NAMES,
                  budget_secs: float | None = DEFAULT_BUDGET_SECS,
                  max_subgroups: int = DEFAULT_SUBGROUP_CAP) -> GroupRow:
    t0 = time.perf_counter()
    lat = build_lattice(g, max_subgroups=max_subgroups)
    t1 = time.perf_counter()
    problems = []
    try:
        prof = freeness_profile(lat, patterns, budget_secs)
    except OracleDisagreement as exc:
        problems.append(f"oracle disagreement: {exc}")
        prof = freeness_profile(lat, [p for p in patterns if p != "L9"], budget_secs)
    t2 = time.perf_counter()
    w = class_l_membership(g, lat.nodes)
    t3 = time.perf_counter()
    l9 = prof.results.get("L9")
    l9_free = None if l9 is None or l9 is TIMEOUT else l9 is ABSENT
    problems += group_invariants(g, prof, w)
    return GroupRow(
        id=gid or g.name,
        order=g.order,
        subgroups=lat.size,
        profile={k: _summary(v) for k, v in prof.results.items()},
        modular=prof.modular,
        l9_free=l9_free,
        verdict=w.verdict,
        type=describe_type(w),
        reasons=[] if w.in_class else w.reasons(),
        agree=l9_free is not None and l9_free == w.in_class,
        problems=problems,
        timings={"lattice": t1 - t0, "patterns": t2 - t1, "classify": t3 - t2},
    )


def _row_for(gid: str) -> GroupRow:
    return analyze_group(build_group(gid), gid)


def select(manifest: CorpusManifest, selector: str | None) -> list[str]:
    """``None``/``all``, ``tag:<tag>`` or a comma-separated id list."""
    if selector in (None, "", "all"):
        return manifest.ids()
    if selector.startswith("tag:"):
        return [e.id for e in manifest.tagged(selector[4:])]
    ids = [s.strip() for s in selector.split(",") if s.strip()]
    for gid in ids:
        manifest[gid]
    return ids


def coprime_product_problems(rows: dict[str, GroupRow]) -> list[str]:
    probs = []
    for pid, a, b in COPRIME_PAIRS:
        if pid in rows and a in rows and b in rows:
            if rows[pid].l9_free != (rows[a].l9_free and rows[b].l9_free):
                probs.append(f"{pid}: L9-free does not match the factors {a}, {b}")
    return probs


def check_model(path=None) -> dict:
    sys_ = model_from_file(path or data_file(MODEL_FILE))
    res = fl4_model(sys_)
    if isinstance(res, ModelViolation):
        return {"result": "Violation", "pi": sorted(res.pi), "ok": res.pi == frozenset({3}),
                "detail": {k: v for k, v in sorted(res.detail.items())}}
    return {"result": "Holds", "ok": False}


def run_validate(selector: str | None = None, jobs: int | None = None,
                 manifest: CorpusManifest | None = None, model_path=None) -> ValidationReport:
    manifest = manifest or builtin_corpus()
    ids = select(manifest, selector)
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row_for, ids))
    else:
        rows = [_row_for(gid) for gid in ids]
    by_id = {r.id: r for r in rows}
    global_problems = coprime_product_problems(by_id)
    return ValidationReport(manifest.version, rows, global_problems, _jsonable(check_model(model_path)))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in items]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def render_report(rep: ValidationReport) -> str:
    lines = [f"corpus {rep.corpus_version}: {len(rep.rows)} groups"]
    for r in rep.rows:
        flag = "ok  " if r.agree and not r.problems else "FAIL"
        lines.append(f"{flag} {r.id:24s} |G|={r.order:<5d} subgroups={r.subgroups:<5d} "
                     f"L9-free={str(r.l9_free):5s} {r.verdict}")
        lines.extend(f"       {p}" for p in r.problems)
    lines.extend(f"FAIL {p}" for p in rep.global_problems)
    lines.append(f"model: {rep.model.get('result')} pi={rep.model.get('pi')}")
    lines.append("all rows agree" if rep.ok else f"first failure: {rep.first_failure()}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# heredity


def heredity_problems(g: GroupTable, budget_secs: float | None = DEFAULT_BUDGET_SECS) -> list[str]:
    """For an L9-free ``g``: every subgroup and every quotient must be L9-free and in the class.

    Subgroups are taken up to conjugacy; results are memoised by table digest.
    """
    subs = subgroups_of(g)
    probs = []
    seen_classes: set[tuple] = set()
    memo: dict[str, tuple[bool, bool]] = {}

    def verdicts(t: GroupTable) -> tuple[bool, bool]:
        if t.digest not in memo:
            lat = build_lattice(t)
            prof = freeness_profile(lat, ["L9"], budget_secs)
            memo[t.digest] = (prof.l9_free, class_l_membership(t, lat.nodes).in_class)
        return memo[t.digest]

    from .group_core import conjugacy_orbit

    for s in subs:
        if s.members in seen_classes or s.order in (1, g.order):
            continue
        for c in conjugacy_orbit(g, s):
            seen_classes.add(c.members)
        free, inc = verdicts(subgroup_table(g, s))
        if not (free and inc):
            probs.append(f"subgroup of order {s.order}: L9-free={free}, in class={inc}")
    for m in subs:
        if m.order in (1, g.order) or not is_normal(g, m):
            continue
        free, inc = verdicts(quotient(g, m))
        if not (free and inc):
            probs.append(f"quotient by normal subgroup of order {m.order}: L9-free={free}, in class={inc}")
    return probs
