"""Pipelines behind the CLI verbs. Each returns a report envelope."""

from __future__ import annotations

from . import SCHEMA
from .config import RunConfig
from .serialize import birat_matrix_to_text, plain, series_to_json, solution_to_json


def check(name: str, ok: bool, **bounds) -> dict:
    return {"name": name, "verdict": "pass" if ok else "fail", "bounds": plain(bounds)}


def envelope(command: list, cfg: RunConfig, checks: list, certificates: dict, exit_code: int | None = None) -> dict:
    ok = all(c["verdict"] == "pass" for c in checks)
    code = (0 if ok else 1) if exit_code is None else exit_code
    return {"schema": SCHEMA, "command": command, "config": cfg.to_json(), "checks": checks,
            "certificates": plain(certificates), "status": "pass" if code == 0 else "fail", "exit_code": code}


def error_report(command: list, cfg: RunConfig | None, ex) -> dict:
    return {"schema": SCHEMA, "command": command, "config": None if cfg is None else cfg.to_json(),
            "checks": [], "certificates": {}, "status": "error", "exit_code": ex.exit_code,
            "error": {"type": type(ex).__name__, "message": str(ex)}}


# ---------------------------------------------------------------------------
# factorize
# ---------------------------------------------------------------------------


def run_factorize(A, cfg: RunConfig, command: list) -> dict:
    from .factorization import factorize, reassembly_residual

    vals = A.map(lambda e: getattr(e, "value", e))
    prec = min(cfg.t_prec, min(e.t_prec for _, _, e in vals.entries()))
    window = tuple(vals[0, 0].x_window)
    fz = factorize(A, prec, window)
    res = reassembly_residual(fz, A)
    checks = [
        check("reassembly A2^-1 A1 = A", res >= prec, t_prec=prec, x_window=list(window),
              x_verified=fz.x_verified),
        check("side audit (A1 over F1, A2 over F2)", fz.audit()),
    ]
    cert = {"Lambda": list(fz.Lambda), "residual": res, "cap": fz.cap, "notes": fz.notes,
            "A1": [[series_to_json(e.value) for e in row] for row in fz.A1.rows],
            "A2": [[series_to_json(e.value) for e in row] for row in fz.A2.rows]}
    return envelope(command, cfg, checks, cert)


# ---------------------------------------------------------------------------
# patching
# ---------------------------------------------------------------------------


def run_patch(problem, cfg: RunConfig, command: list, A_override=None) -> dict:
    from .patching import patch, verify_solution

    sol = patch(problem, cfg.t_prec, cfg.bounds)
    rep = verify_solution(sol, problem, 2, cfg.const_bounds, cfg.degree_cap, A=A_override)
    checks = [
        check("gauge coherence M1 Z1 = M2 Z2", sol.certificates["gauge_coherent_to"] >= cfg.t_prec,
              t_prec=cfg.t_prec),
        check("entries of A reconstruct over F", len(sol.reconstruction_modes) == sol.A.n * sol.A.m,
              bounds=list(cfg.bounds)),
        check("verification report", rep.ok, const_deg=2, const_bounds=list(cfg.const_bounds),
              degree_cap=cfg.degree_cap),
    ]
    cert = {"solution": solution_to_json(sol), "verification": rep.to_json(),
            "trace_zero": sol.A.trace().is_zero()}
    if A_override is not None:
        cert["verified_A"] = birat_matrix_to_text(A_override)
    return envelope(command, cfg, checks, cert)


def run_ebp(ebp, cfg: RunConfig, command: list) -> dict:
    from .ebp import solve_split_ebp

    deg = min(2, cfg.degree_cap)
    sol = solve_split_ebp(ebp, cfg.t_prec, cfg.bounds, deg, cfg.const_bounds, cfg.degree_cap)
    rec = sol.recovery
    checks = [
        check("patched solution verifies", sol.report.ok, t_prec=cfg.t_prec, const_bounds=list(cfg.const_bounds)),
        check("S^N recovers R (generators, co-action, derivation)", rec.ok, deg=deg),
    ]
    cert = {"preconditions": sol.preconditions, "solution": solution_to_json(sol.solution),
            "verification": sol.report.to_json(), "recovery": rec.to_json(), "label": ebp.label}
    return envelope(command, cfg, checks, cert)


# ---------------------------------------------------------------------------
# invariants and friends
# ---------------------------------------------------------------------------


def run_invariants(doc: dict, cfg: RunConfig, command: list) -> dict:
    from .errors import SchemaError
    from .groups import get_group, invariants_bounded, right_translation, twisted_translation

    op = doc.get("op", "invariants")
    deg = int(doc.get("deg", min(3, cfg.degree_cap)))
    if op == "invariants":
        G, H = get_group(doc["group"]), get_group(doc.get("subgroup", doc["group"]))
        act = (twisted_translation if doc.get("action") == "twisted" else right_translation)(G, H)
        B = invariants_bounded(act, deg, cfg.degree_cap)
        cert = {"dim": B.dim, "invariants": [str(p) for p in B.polys], "only_constants": B.only_constants()}
        return envelope(command, cfg, [check("invariants computed", True, deg=deg)], cert)
    if op == "quotient":
        from .induction import quotient_by_normal
        from .torsors import make_trivial_torsor

        q = quotient_by_normal(make_trivial_torsor(get_group(doc["group"])), get_group(doc["N"]), deg,
                               degree_cap=cfg.degree_cap)
        c = q.certificate
        ok = c.get("invariants_are_constants", False) if q.is_point else (
            c["invariant"] and c["generates"] and c["coaction_restricts"])
        return envelope(command, cfg, [check("quotient generator audit", ok, deg=deg)], q.to_json())
    if op == "induce":
        from .induction import canonical_embedding_surjective, induce
        from .torsors import TorsorPresentation

        ind = induce(TorsorPresentation(get_group(doc["H"]), prefix="y"), get_group(doc["G"]))
        surj = canonical_embedding_surjective(ind, min(2, cfg.degree_cap))
        checks = [check("generators invariant under the twist", ind.audit["invariant"]),
                  check("canonical embedding surjective", surj, deg=min(2, cfg.degree_cap)),
                  check("co-action square commutes", ind.equivariance_square())]
        return envelope(command, cfg, checks, ind.to_json())
    if op == "ind-identities":
        from .induction import verify_ind_identities

        r = verify_ind_identities(doc.get("group", "Borel"), deg, cfg.degree_cap)
        return envelope(command, cfg, [check("(Ind_N R)^N = K[H]", r.quotient_is_KH, deg=deg),
                                       check("(Ind_H R)^N = R", r.quotient_recovers_R, deg=deg)], r.to_json())
    raise SchemaError(f"unknown invariants op {op!r}")


# ---------------------------------------------------------------------------
# named demos
# ---------------------------------------------------------------------------


def demo(name: str, cfg: RunConfig, command: list) -> dict:
    from .errors import SchemaError

    if name == "sl2":
        from .patching import sl2_problem

        return run_patch(sl2_problem(cfg.t_prec, cfg.x_window), cfg, command)
    if name == "sl2-literal":
        from .patching import sl2_problem

        return run_patch(sl2_problem(cfg.t_prec, cfg.x_window, literal=True), cfg, command)
    if name == "borel-ebp":
        from .ebp import borel_ebp

        return run_ebp(borel_ebp(cfg.t_prec, cfg.x_window), cfg, command)
    if name == "gm-inverse":
        from .ebp import gm_inverse

        return run_ebp(gm_inverse(cfg.t_prec, cfg.x_window), cfg, command)
    raise SchemaError(f"unknown demo {name!r}")


def suite_report(cfg: RunConfig, command: list, only=None) -> dict:
    from .suite import run_suite

    results = run_suite(cfg, only)
    checks = [check(f"criterion {r.number}: {r.name}", r.passed, **r.bounds) for r in results]
    return envelope(command, cfg, checks, {"criteria": [r.to_json() for r in results]})
