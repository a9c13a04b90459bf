"""
JSON documents for super-linearizations and reports.

A system document looks like::

    {
      "format_version": "1",
      "n": 2,
      "m": 1,
      "A": [[-1.0, 0.0], [0.0, -1.0]],
      "G": [[1.0], [0.0]],
      "H": [[0.0, 0.0]],
      "M": [[-2.0]],
      "B": [1.0, 0.0],
      "C": [0.0],
      "D": [0.0, 0.0],
      "E": [0.0],
      "observables": [
        [{"exps": [0, 2], "coef": 1.0}]
      ]
    }

``C``, ``D`` and ``E`` may be omitted and then default to zero.
:func:`emit_system` writes a canonical form (fixed key order, graded-lex
monomial order, shortest round-trip floats) so that
``emit_system(parse_system(text))`` is stable byte for byte.
"""
import json
import numbers

import numpy as np

from .embedding import Check, Classification, SuperLinearization, ValidationReport
from .poly import MultiPoly, ObservableMap
from .transform import ReductionReport, StepRecord
from .verify import CosimReport

FORMAT_VERSION = "1"
_MATRICES = ("A", "G", "H", "M")
_VECTORS = ("B", "C", "D", "E")
_OPTIONAL = ("C", "D", "E")


class DocumentError(ValueError):
    """Malformed or inconsistent document; the message names the location."""


def _num(v, where):
    if isinstance(v, bool) or not isinstance(v, numbers.Real):
        raise DocumentError(f"{where}: expected a number, got {v!r}")
    v = float(v)
    if not np.isfinite(v):
        raise DocumentError(f"{where}: number must be finite")
    return v


def _int(v, where):
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise DocumentError(f"{where}: expected a non-negative integer, got {v!r}")
    return v


def _matrix(doc, name, rows, cols):
    val = doc[name]
    if not isinstance(val, list):
        raise DocumentError(f"{name}: expected a list of rows")
    if rows == 0 or cols == 0:
        # [] or a list of empty rows are both accepted for empty blocks
        if val == [] or (all(r == [] for r in val) and len(val) == rows):
            return np.zeros((rows, cols))
    if len(val) != rows or any(not isinstance(r, list) or len(r) != cols for r in val):
        got = (len(val), len(val[0]) if val and isinstance(val[0], list) else 0)
        raise DocumentError(f"{name}: expected shape ({rows}, {cols}), got {got}")
    return np.array([[_num(v, f"{name}[{i}][{j}]") for j, v in enumerate(r)]
                     for i, r in enumerate(val)]).reshape(rows, cols)


def _vector(doc, name, k):
    val = doc[name]
    if not isinstance(val, list) or len(val) != k:
        got = len(val) if isinstance(val, list) else type(val).__name__
        raise DocumentError(f"{name}: expected a list of length {k}, got {got}")
    return np.array([_num(v, f"{name}[{i}]") for i, v in enumerate(val)])


def terms_from_json(terms, n, where="polynomial"):
    if not isinstance(terms, list):
        raise DocumentError(f"{where}: expected a list of terms")
    out = {}
    for k, t in enumerate(terms):
        loc = f"{where}[{k}]"
        if not isinstance(t, dict) or set(t) != {"exps", "coef"}:
            raise DocumentError(f'{loc}: expected {{"exps": [...], "coef": c}}')
        exps = t["exps"]
        if not isinstance(exps, list) or len(exps) != n:
            raise DocumentError(f"{loc}.exps: expected {n} exponents")
        exps = tuple(_int(e, f"{loc}.exps") for e in exps)
        out[exps] = out.get(exps, 0.0) + _num(t["coef"], f"{loc}.coef")
    return MultiPoly(n, out)


def terms_to_json(q):
    return [{"exps": list(e), "coef": c + 0.0} for e, c in q.items()]


def map_to_json(p):
    return [terms_to_json(q) for q in p]


def map_from_json(val, n, where="observables"):
    if not isinstance(val, list):
        raise DocumentError(f"{where}: expected a list")
    return ObservableMap(n, [terms_from_json(t, n, f"{where}[{j}]") for j, t in enumerate(val)])


def parse_system(text):
    """Parse a system document into a :class:`SuperLinearization`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise DocumentError("top level: expected a JSON object")
    if "format_version" not in doc:
        raise DocumentError("format_version: missing")
    if doc["format_version"] != FORMAT_VERSION:
        raise DocumentError(f"format_version: unsupported version {doc['format_version']!r}")
    required = ("n", "m") + _MATRICES + ("B", "observables")
    for key in required:
        if key not in doc:
            raise DocumentError(f"{key}: missing")
    unknown = set(doc) - set(required) - set(_OPTIONAL) - {"format_version"}
    if unknown:
        raise DocumentError(f"{sorted(unknown)[0]}: unknown field")
    n, m = _int(doc["n"], "n"), _int(doc["m"], "m")
    shapes = {"A": (n, n), "G": (n, m), "H": (m, n), "M": (m, m)}
    blocks = {k: _matrix(doc, k, *shapes[k]) for k in _MATRICES}
    sizes = {"B": n, "C": m, "D": n, "E": m}
    for k in _VECTORS:
        blocks[k] = _vector(doc, k, sizes[k]) if k in doc else np.zeros(sizes[k])
    p = map_from_json(doc["observables"], n)
    if p.m != m:
        raise DocumentError(f"observables: expected {m} entries, got {p.m}")
    return SuperLinearization(p=p, **blocks)


def _dump(v):
    return json.dumps(v, separators=(", ", ": "))


def _clean(a):
    # canonical zeros: drop the sign of -0.0
    return (np.asarray(a, dtype=float) + 0.0).tolist()


def emit_system(L):
    """Canonical JSON text for ``L``."""
    lines = [f'  "format_version": {_dump(FORMAT_VERSION)}',
             f'  "n": {L.n}', f'  "m": {L.m}']
    for k in _MATRICES + _VECTORS:
        lines.append(f'  "{k}": {_dump(_clean(getattr(L, k)))}')
    obs = map_to_json(L.p)
    if obs:
        body = ",\n".join(f"    {_dump(t)}" for t in obs)
        lines.append(f'  "observables": [\n{body}\n  ]')
    else:
        lines.append('  "observables": []')
    return "{\n" + ",\n".join(lines) + "\n}\n"


def load_system(path):
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())


def save_system(L, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_system(L))


def report_to_dict(rep):
    """Plain-JSON form of a validation, classification, reduction or co-simulation report."""
    if isinstance(rep, ValidationReport):
        return {"kind": "validation", "passed": rep.passed, "checks": [
            {"name": c.name, "passed": c.passed, "residual": c.residual,
             "detail": c.detail,
             "residual_poly": None if c.residual_poly is None else {
                 "n": c.residual_poly.n, "entries": map_to_json(c.residual_poly)}}
            for c in rep.checks]}
    if isinstance(rep, Classification):
        return {"kind": "classification", "visible": list(rep.visible_idx),
                "hidden": list(rep.hidden_idx), "m_v": rep.m_v, "m_h": rep.m_h}
    if isinstance(rep, ReductionReport):
        return {"kind": "reduction", "m_v_star": rep.m_v_star, "steps": [
            {"name": s.name, "dims_in": list(s.dims_in), "dims_out": list(s.dims_out),
             "rank_in": s.rank_in, "rank_out": s.rank_out,
             "mv_mh_in": list(s.mv_mh_in), "mv_mh_out": list(s.mv_mh_out)}
            for s in rep.steps]}
    if isinstance(rep, CosimReport):
        return {"kind": "cosimulation", "max_state_gap": rep.max_state_gap,
                "max_gp_gap": rep.max_gp_gap, "h": rep.h, "T": rep.T,
                "truncated": rep.truncated, "t_end": rep.t_end}
    raise TypeError(f"not a report: {type(rep).__name__}")


def report_from_dict(d):
    kind = d.get("kind")
    if kind == "validation":
        checks = []
        for c in d["checks"]:
            rp = c["residual_poly"]
            poly = None if rp is None else map_from_json(rp["entries"], rp["n"])
            checks.append(Check(c["name"], c["passed"], c["residual"], c["detail"], poly))
        return ValidationReport(tuple(checks))
    if kind == "classification":
        return Classification(tuple(d["visible"]), tuple(d["hidden"]))
    if kind == "reduction":
        steps = [StepRecord(s["name"], tuple(s["dims_in"]), tuple(s["dims_out"]),
                            s["rank_in"], s["rank_out"], tuple(s["mv_mh_in"]),
                            tuple(s["mv_mh_out"])) for s in d["steps"]]
        return ReductionReport(steps, d["m_v_star"])
    if kind == "cosimulation":
        return CosimReport(d["max_state_gap"], d["max_gp_gap"], d["h"], d["T"],
                           d["truncated"], d["t_end"])
    raise DocumentError(f"kind: unknown report kind {kind!r}")


def emit_report(rep):
    return json.dumps(report_to_dict(rep), indent=2) + "\n"


def parse_report(text):
    try:
        return report_from_dict(json.loads(text))
    except json.JSONDecodeError as e:
        raise DocumentError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
