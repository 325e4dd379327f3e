"""Report serialisation (``"report_version": 1``) and verdict exit codes."""

from __future__ import annotations

import json
from fractions import Fraction

from ..lpcore import FeasVerdict, LinFeasProblem
from ..ratlin import rat_str

REPORT_VERSION = 1
EXIT = {"Holds": 0, "Fails": 1, "Indeterminate": 2}


def exit_code(verdict: str | None) -> int:
    """Holds -> 0, Fails -> 1, Indeterminate / non-certificate -> 2."""
    return EXIT.get(verdict, 0 if verdict is None else 2)


def rs(v):
    """Rational (or vector of rationals) to strings."""
    if isinstance(v, (list, tuple)):
        return [rs(x) for x in v]
    return rat_str(Fraction(v))


def problem_json(p: LinFeasProblem) -> dict:
    return {"dim": p.dim, "rows": [rs(r) for r in p.rows], "rhs": rs(p.rhs),
            "kinds": ["eq" if k else "ge" for k in p.kinds]}


def verdict_json(v: FeasVerdict) -> dict:
    d = {"status": v.status}
    if v.witness is not None:
        d["witness"] = rs(v.witness)
    if v.farkas is not None:
        d["farkas"] = rs(v.farkas)
    return d


def occult_json(cert) -> dict:
    subs = []
    for s in cert.o3_subproblems:
        item = {"index": list(s.index)}
        if s.problem is None:
            item["pruned"] = s.pruned
        else:
            item["problem"] = problem_json(s.problem)
            item["certificate"] = verdict_json(s.verdict)
        subs.append(item)
    d = {
        "verdict": cert.verdict,
        "mode": cert.mode,
        "failed_at": cert.failed_at,
        "o1": cert.o1,
        "o2": cert.o2,
        "signs": list(cert.signs),
        "o3_subproblems": subs,
    }
    if cert.counterexample_covector is not None:
        d["counterexample_covector"] = rs(cert.counterexample_covector)
        d["counterexample_hyperplane"] = rs(cert.counterexample_hyperplane.rep)
    return d


def replay_report(doc: dict) -> tuple:
    """Re-check every LP certificate found anywhere in a report.

    Returns
    -------
    (int, int)
        Number of certificates checked and number that failed.
    """
    checked = failed = 0

    def walk(x):
        nonlocal checked, failed
        if isinstance(x, dict):
            if "problem" in x and "certificate" in x:
                checked += 1
                if not _replay_one(x["problem"], x["certificate"]):
                    failed += 1
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)

    walk(doc)
    return checked, failed


def _replay_one(p: dict, c: dict) -> bool:
    rel = {("ge", "0"): ">=0", ("ge", "1"): ">=1", ("eq", "0"): "=0"}
    cons = [(row, rel[(k, b)]) for row, k, b in zip(p["rows"], p["kinds"], p["rhs"])]
    prob = LinFeasProblem(p["dim"], cons)
    w = tuple(Fraction(x) for x in c["witness"]) if "witness" in c else None
    y = tuple(Fraction(x) for x in c["farkas"]) if "farkas" in c else None
    return FeasVerdict(c["status"], w, y).replay(prob)


def report(command: str, verdict: str | None = None, **fields) -> dict:
    d = {"report_version": REPORT_VERSION, "command": command, "verdict": verdict}
    d.update(fields)
    return d


def emit_report(rep: dict, fmt: str = "json") -> bytes:
    """Serialise a report; ``text`` gives a short human-readable summary."""
    if fmt == "json":
        return (json.dumps(rep, indent=2) + "\n").encode()
    lines = [f"{rep.get('command', '')}: {rep.get('verdict') or 'done'}"]
    for k, v in rep.items():
        if k in ("report_version", "command", "verdict") or isinstance(v, dict):
            continue
        if isinstance(v, list):
            if not all(isinstance(x, (str, int)) for x in v):
                continue
            v = "[" + " : ".join(str(x) for x in v) + "]" if k.endswith("hyperplane") else " ".join(map(str, v))
        lines.append(f"  {k}: {v}")
    return ("\n".join(lines) + "\n").encode()
