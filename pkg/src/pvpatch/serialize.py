"""JSON wire format ("schema": "pvpatch/1").

Matrix entries are one of
    "num / den"                     an element of F (text form of BiRatFunc)
    {"special": "logP"}             a special element (logP, logU, expP, expU)
    {"series": {...}}               F0 data given by its truncated expansion
    {"p_series": {...}}, {"u_poly": {...}}   side-tagged atoms
and a series is {"t_prec": N, "rows": [{"t_exp": i, "x_lo": e, "coeffs": [...]}]}.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import SCHEMA
from .config import RunConfig
from .diamond import SPECIAL_KINDS, DiamondElem
from .errors import SchemaError
from .matrices import Mat
from .scalars import BiRatFunc, TruncatedSeries, XLaurent, parse_biratfunc, to_fmpq


def _coeff_text(c) -> str:
    f = Fraction(int(c.p), int(c.q))
    return str(f)


def series_to_json(s: TruncatedSeries) -> dict:
    rows = []
    for i, r in s.items():
        if r.known_zero() and r.exact:
            continue
        coeffs = [_coeff_text(r.poly[k]) for k in range(r.poly.length())]
        row = {"t_exp": i, "x_lo": r.lo, "coeffs": coeffs}
        if r.prec is not None:
            row["x_prec"] = r.prec
        rows.append(row)
    return {"t_prec": s.t_prec, "rows": rows}


def series_from_json(doc, x_window) -> TruncatedSeries:
    try:
        t_prec = int(doc["t_prec"])
        rows = {}
        for row in doc["rows"]:
            coeffs = [to_fmpq(Fraction(str(c))) for c in row["coeffs"]]
            rows[int(row["t_exp"])] = XLaurent.from_coeffs(int(row["x_lo"]), coeffs, row.get("x_prec"))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as ex:
        raise SchemaError(f"malformed series: {ex}") from ex
    return TruncatedSeries.from_rows(rows, t_prec, x_window)


def birat_from_json(v) -> BiRatFunc:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return BiRatFunc.const(Fraction(str(v)))
    if not isinstance(v, str):
        raise SchemaError(f"expected a rational function text, got {v!r}")
    try:
        return parse_biratfunc(v)
    except Exception as ex:  # sympy raises a zoo of parse errors
        raise SchemaError(f"cannot parse {v!r}: {ex}") from ex


def entry_from_json(v, t_prec: int, x_window) -> DiamondElem:
    if isinstance(v, dict):
        if "special" in v:
            kind = v["special"]
            if kind not in SPECIAL_KINDS:
                raise SchemaError(f"unknown special element {kind!r}")
            return DiamondElem.special(kind, t_prec, x_window)
        for key, make in (("series", DiamondElem.data), ("p_series", DiamondElem.p_series),
                          ("u_poly", DiamondElem.u_poly)):
            if key in v:
                s = series_from_json(v[key], x_window)
                if s.t_prec != t_prec:
                    s = TruncatedSeries.from_rows(dict(s.items()), t_prec, x_window)
                return make(s)
        raise SchemaError(f"unknown matrix entry {v!r}")
    return DiamondElem.from_F(birat_from_json(v), t_prec, x_window)


def entry_to_json(e) -> object:
    if isinstance(e, BiRatFunc):
        return e.to_text()
    specials = sorted(a for a in e.atoms if a in SPECIAL_KINDS)
    return {"tag": e.tag.value, "atoms": sorted(e.atoms), "special": specials[0] if len(specials) == 1 else None,
            "series": series_to_json(e.value)}


def _rows(doc, what: str):
    if not isinstance(doc, list) or not doc or not all(isinstance(r, list) for r in doc):
        raise SchemaError(f"{what} must be a non-empty list of rows")
    n = len(doc[0])
    if any(len(r) != n for r in doc):
        raise SchemaError(f"{what} is ragged")
    return doc


def matrix_from_json(doc, t_prec: int, x_window, what: str = "matrix") -> Mat:
    return Mat([[entry_from_json(v, t_prec, x_window) for v in row] for row in _rows(doc, what)])


def birat_matrix_from_json(doc, what: str = "matrix") -> Mat:
    return Mat([[birat_from_json(v) for v in row] for row in _rows(doc, what)])


def matrix_to_json(M: Mat) -> list:
    return [[entry_to_json(e) for e in row] for row in M.rows]


def birat_matrix_to_text(M: Mat) -> list:
    return [[e.to_text() for e in row] for row in M.rows]


# ---------------------------------------------------------------------------
# documents
# ---------------------------------------------------------------------------


def load_document(text: str, kinds: tuple[str, ...] | None = None) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as ex:
        raise SchemaError(f"malformed JSON: {ex}") from ex
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    if doc.get("schema") != SCHEMA:
        raise SchemaError(f"expected \"schema\": \"{SCHEMA}\", got {doc.get('schema')!r}")
    if kinds is not None and doc.get("kind") not in kinds:
        raise SchemaError(f"expected kind in {list(kinds)}, got {doc.get('kind')!r}")
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


def _cfg_prec(doc: dict, cfg: RunConfig) -> tuple[int, tuple]:
    return int(doc.get("t_prec", cfg.t_prec)), tuple(doc.get("x_window", cfg.x_window))


def problem_from_json(doc: dict, cfg: RunConfig):
    from .diamond import FieldTag
    from .groups import get_group
    from .patching import Patch, PatchingProblem, sl2_problem, trivial_problem

    prec, window = _cfg_prec(doc, cfg)
    preset = doc.get("preset")
    if preset == "sl2":
        return sl2_problem(prec, window)
    if preset == "sl2-literal":
        return sl2_problem(prec, window, literal=True)
    if preset == "trivial":
        return trivial_problem(get_group(doc.get("group", "SL2")), prec, window)
    if preset is not None:
        raise SchemaError(f"unknown problem preset {preset!r}")
    try:
        G = get_group(doc["group"])
        patches = []
        for k, side in ((1, FieldTag.F1), (2, FieldTag.F2)):
            p = doc[f"patch{k}"]
            patches.append(Patch(get_group(p["subgroup"]), matrix_from_json(p["Z"], prec, window, "Z"),
                                 matrix_from_json(p["A"], prec, window, "A"), side, p.get("label", "")))
    except KeyError as ex:
        raise SchemaError(f"patching problem lacks {ex}") from ex
    return PatchingProblem(G, patches[0], patches[1], prec, window, label=doc.get("label", ""))


def problem_to_json(problem) -> dict:
    out = {"schema": SCHEMA, "kind": "patching-problem", "group": problem.group.name,
           "t_prec": problem.t_prec, "x_window": list(problem.x_window), "label": problem.label}
    for k, p in ((1, problem.patch1), (2, problem.patch2)):
        out[f"patch{k}"] = {"subgroup": p.subgroup.name, "side": p.side.value, "label": p.label,
                            "Z": matrix_to_json(p.Z), "A": matrix_to_json(p.A)}
    return out


def _pv_from_json(doc: dict, prec: int, window):
    from .diamond import FieldTag
    from .ebp import PVPresentation

    try:
        level = FieldTag(doc.get("level", "F"))
        A = matrix_from_json(doc["A"], prec, window, "A")
        W = matrix_from_json(doc["witness"], prec, window, "witness")
        A_F = birat_matrix_from_json(doc["A_F"]) if "A_F" in doc else None
        return PVPresentation(doc["group"], level, A, W, doc.get("label", ""), A_F)
    except KeyError as ex:
        raise SchemaError(f"PV presentation lacks {ex}") from ex
    except ValueError as ex:
        raise SchemaError(str(ex)) from ex


def ebp_from_json(doc: dict, cfg: RunConfig):
    from .ebp import SplitEBP, borel_ebp, gm_inverse, inverse_split, n_trivial_ebp, reject_non_split, trivial_split
    from .groups import get_group, semidirect

    reject_non_split(doc)
    prec, window = _cfg_prec(doc, cfg)
    preset = doc.get("preset")
    presets = {"borel-ebp": borel_ebp, "gm-inverse": gm_inverse, "gm-n-trivial": n_trivial_ebp}
    if preset is not None:
        if preset not in presets:
            raise SchemaError(f"unknown EBP preset {preset!r}")
        return presets[preset](prec, window)
    try:
        mode = doc.get("mode", "semidirect")
        if mode == "semidirect":
            sd = semidirect(get_group(doc["G"]))
        elif mode == "inverse":
            sd = inverse_split(doc["G"])
        elif mode == "n-trivial":
            sd = trivial_split(doc["G"])
        else:
            raise SchemaError(f"unknown split mode {mode!r}")
        R = _pv_from_json(doc["R"], prec, window) if doc.get("R") else None
        R1 = _pv_from_json(doc["R1"], prec, window) if doc.get("R1") else None
    except KeyError as ex:
        raise SchemaError(f"split EBP lacks {ex}") from ex
    return SplitEBP(sd, R, R1, prec, window, doc.get("label", ""))


def solution_to_json(sol) -> dict:
    return {
        "A": birat_matrix_to_text(sol.A),
        "reconstruction_modes": list(sol.reconstruction_modes),
        "certificates": _plain(sol.certificates),
        "t_prec": sol.t_prec,
        "M1_tags": [[e.tag.value for e in row] for row in sol.M1.rows],
        "M2_tags": [[e.tag.value for e in row] for row in sol.M2.rows],
        "Z_tags": [[e.tag.value for e in row] for row in sol.Z.rows],
    }


def _plain(v):
    """Make certificate payloads JSON-safe."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, float) and v in (float("inf"), float("-inf")):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return str(v)


plain = _plain
