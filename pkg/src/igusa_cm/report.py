"""Serialization of run records: results.json, report.txt, primes.csv, figures.

Everything downstream of :func:`record_to_dict` works from the plain
dictionary, so ``igusa-cm report results.json`` can re-render a saved run.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .classpoly import format_poly
from .pipeline import FieldResult, RunRecord, frac_str

FORMAT = "igusa-cm-results"
VERSION = 1


def _fz(fz) -> list:
    return [{"p": str(p), "e": e, "certified": c} for (p, e), c in zip(fz.factors, fz.certified)]


def _prime(r) -> dict:
    return {
        "q": str(r.q),
        "sources": list(r.sources),
        "property1_d": r.property1_d,
        "witness_d": r.witness_d,
        "property1_d0": r.property1_d0,
        "witness_d0": r.witness_d0,
        "bounded_by_d": r.bounded_by_d,
    }


def field_to_dict(r: FieldResult) -> dict:
    out = {
        "field": {"a": r.spec.a, "b": r.spec.b, "label": r.spec.label},
        "status": r.status,
        "error": r.error,
        "summary": {k: (str(v) if isinstance(v, int) and abs(v) > 2**53 else v) for k, v in r.summary.items()},
        "class_number": r.class_number,
        "period_matrices": r.period_matrices,
        "branches": [vars(b) for b in r.branches],
        "ladder": [vars(x) for x in r.ladder],
        "j_values": [[[z.real, z.imag] for z in t] for t in r.j_values],
        "timings": r.timings,
        "warnings": r.warnings,
    }
    if r.polys:
        out["polynomials"] = {
            "h1": [frac_str(c) for c in r.polys.h1],
            "h2": [frac_str(c) for c in r.polys.h2],
            "h3": [frac_str(c) for c in r.polys.h3],
            "precision_used": r.polys.precision_used,
            "stable": r.polys.stable,
            "residual": r.polys.residual,
            "max_imag": r.polys.max_imag,
        }
    if r.disc:
        out["discriminants"] = {
            "values": [frac_str(x) for x in r.disc.discs],
            "denominators": [str(x) for x in r.disc.denominators],
            "factored": [_fz(f) for f in r.disc.factored],
            "coefficient_denominators": [str(x) for x in r.disc.coeff_denominators],
            "coefficient_factored": [_fz(f) for f in r.disc.coeff_factored],
        }
    if r.report:
        rep = r.report
        out["denominator_report"] = {
            "d": str(rep.d),
            "d0": str(rep.d0),
            "discriminant_primes": [_prime(p) for p in rep.discriminant_primes],
            "coefficient_primes": [_prime(p) for p in rep.coefficient_primes],
            "verdict_discriminant": rep.verdict_discriminant,
            "verdict_coefficient": rep.verdict_coefficient,
            "counterexamples": [_prime(p) for p in rep.counterexamples],
            "notes": list(rep.notes),
        }
    return out


def record_to_dict(rec: RunRecord) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "config": rec.config,
        "cache_hits": rec.cache_hits,
        "fields": [field_to_dict(r) for r in rec.fields],
    }


def exact_outputs(doc: dict) -> list:
    """The parts of a results document that must be reproducible bit for bit."""
    keep = ("field", "status", "class_number", "period_matrices", "polynomials", "discriminants", "denominator_report")
    out = []
    for f in doc["fields"]:
        g = {k: f.get(k) for k in keep}
        if g["polynomials"]:
            g["polynomials"] = {k: g["polynomials"][k] for k in ("h1", "h2", "h3", "stable")}
        out.append(g)
    return out


# ------------------------------------------------------------ text


def _poly_text(coeffs: list[str]) -> str:
    from fractions import Fraction

    return format_poly([Fraction(c) for c in coeffs])


def _fz_text(fz: list) -> str:
    if not fz:
        return "1"
    parts = []
    for t in fz:
        s = t["p"] if t["e"] == 1 else f"{t['p']}^{t['e']}"
        parts.append(s + ("" if t["certified"] else "(prp)"))
    return " * ".join(parts)


def _prime_lines(rows: list, out: list) -> None:
    for p in rows:
        w_d = p["witness_d"] if p["property1_d"] else "-"
        w_d0 = p["witness_d0"] if p["property1_d0"] else "-"
        flag = "" if (p["property1_d"] and p["property1_d0"] and p["bounded_by_d"]) else "  <-- COUNTEREXAMPLE"
        out.append(
            f"    q={p['q']:>8}  d-x^2: {str(p['property1_d']):5} (x={w_d})  "
            f"d0-x^2: {str(p['property1_d0']):5} (x={w_d0})  q<=d: {p['bounded_by_d']}  "
            f"[{', '.join(p['sources'])}]{flag}"
        )


def render_text(doc: dict) -> str:
    out = [f"igusa-cm report (format {doc['format']} v{doc['version']})", ""]
    cfg = doc["config"]
    out.append(
        f"precision start {cfg['precision_start']} bits, max doublings {cfg['max_doublings']}, "
        f"CM types: {cfg['cm_type_scope']}"
    )
    out.append("")
    for f in doc["fields"]:
        out.append(f"===== field {f['field']['label']} =====")
        if f["status"] != "ok":
            out.append(f"  FAILED: {f['error']}")
            out.append("")
            continue
        s = f["summary"]
        out.append(
            f"  K = Q[x]/(x^4 + {s['a']}x^2 + {s['b']})  type {s['galois_type']}  "
            f"d = {s['d']}  d_K0 = {s['d_K0']}  d0 = {s['d0']}  K0 = Q(sqrt({s['D0']}))"
        )
        out.append(f"  class number {f['class_number']}, period matrices {f['period_matrices']}")
        for b in f["branches"]:
            if b["skipped"]:
                out.append(f"    class {b['cls']} type {b['cm_type']}: skipped ({b['skipped']})")
        ladder = ", ".join(f"{x['bits']}{'+' if x['reconstructed'] else '-'}" for x in f["ladder"])
        out.append(f"  precision ladder: {ladder}")
        P = f.get("polynomials")
        if P:
            out.append(f"  stable: {P['stable']}  (precision used {P['precision_used']} bits)")
            out.append("  ---- class polynomials ----")
            for k in ("h1", "h2", "h3"):
                out.append(f"  {k}(x) = {_poly_text(P[k])}")
        D = f.get("discriminants")
        if D:
            out.append("  ---- discriminants ----")
            for i, k in enumerate(("h1", "h2", "h3")):
                out.append(f"  disc {k}: denominator = {_fz_text(D['factored'][i])}")
            for i, k in enumerate(("h1", "h2", "h3")):
                out.append(f"  coeffs {k}: denominator lcm = {_fz_text(D['coefficient_factored'][i])}")
        R = f.get("denominator_report")
        if R:
            out.append("  ---- denominator primes: discriminants ----")
            _prime_lines(R["discriminant_primes"], out)
            out.append("  ---- denominator primes: coefficients (extension) ----")
            _prime_lines(R["coefficient_primes"], out)
            out.append(
                f"  verdict (discriminants): {'holds' if R['verdict_discriminant'] else 'COUNTEREXAMPLE'}; "
                f"(coefficients): {'holds' if R['verdict_coefficient'] else 'COUNTEREXAMPLE'}"
            )
            for n in R["notes"]:
                out.append(f"  note: {n}")
        for w in f["warnings"]:
            out.append(f"  warning: {w}")
        out.append(f"  time {f['timings'].get('total', 0):.2f} s")
        out.append("")
    return "\n".join(out) + "\n"


def write_primes_csv(doc: dict, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["field", "d", "d0", "section", "q", "sources", "property1_d", "witness_d", "property1_d0", "witness_d0", "bounded_by_d"])
        for f in doc["fields"]:
            R = f.get("denominator_report")
            if not R:
                continue
            for section in ("discriminant", "coefficient"):
                for p in R[f"{section}_primes"]:
                    w.writerow(
                        [f["field"]["label"], R["d"], R["d0"], section, p["q"], ";".join(p["sources"]),
                         p["property1_d"], p["witness_d"], p["property1_d0"], p["witness_d0"], p["bounded_by_d"]]
                    )


# ------------------------------------------------------------ figures


def render_figures(doc: dict, outdir: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    made = []
    ok = [f for f in doc["fields"] if f["status"] == "ok"]

    fig, ax = plt.subplots(figsize=(6, 4))
    for f in ok:
        xs = [x["bits"] for x in f["ladder"]]
        ys = [math.log2(x["max_imag"]) if x["max_imag"] > 0 else -x["bits"] for x in f["ladder"]]
        ax.plot(xs, ys, marker="o", label=f["field"]["label"])
    ax.set_xscale("log", base=2)
    ax.set_xlabel("working precision (bits)")
    ax.set_ylabel("log2 max |Im coefficient|")
    ax.set_title("Precision ladder")
    if ok:
        ax.legend(fontsize="small")
    fig.tight_layout()
    p = outdir / "precision_ladder.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    made.append(p)

    fig, ax = plt.subplots(figsize=(6, 4))
    for f in ok:
        R = f.get("denominator_report")
        if not R:
            continue
        for section, marker in (("discriminant", "o"), ("coefficient", "x")):
            for q in R[f"{section}_primes"]:
                good = q["property1_d0"] and q["bounded_by_d"]
                ax.scatter(float(R["d0"]), float(q["q"]), marker=marker, c="tab:green" if good else "tab:red")
    lim = max([float(f["denominator_report"]["d0"]) for f in ok if f.get("denominator_report")] + [10.0])
    ax.plot([1, lim], [1, lim], "k:", lw=0.8)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("d0")
    ax.set_ylabel("denominator prime q")
    ax.set_title("Denominator primes (green: q | d0 - x^2 for some x^2 <= d0)")
    fig.tight_layout()
    p = outdir / "denominator_primes.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    made.append(p)

    fig, ax = plt.subplots(figsize=(6, 4))
    for k, f in enumerate(ok):
        for t in f["j_values"]:
            for i, (re, im) in enumerate(t):
                v = math.hypot(re, im)
                ax.scatter(k + 0.15 * (i - 1), math.log10(v) if v > 0 else -20, c=f"C{i}", s=12)
    ax.set_xticks(range(len(ok)))
    ax.set_xticklabels([f["field"]["label"] for f in ok], rotation=45, fontsize="small")
    ax.set_ylabel("log10 |j_k|  (j1, j2, j3)")
    ax.set_title("Absolute Igusa invariants")
    fig.tight_layout()
    p = outdir / "j_values.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    made.append(p)
    return made


def write_document(doc: dict, out: str | Path) -> dict[str, Path]:
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {"results": outdir / "results.json", "report": outdir / "report.txt", "primes": outdir / "primes.csv"}
    paths["results"].write_text(json.dumps(doc, indent=2) + "\n")
    paths["report"].write_text(render_text(doc))
    write_primes_csv(doc, paths["primes"])
    for p in render_figures(doc, outdir):
        paths[p.stem] = p
    return paths


def write_outputs(rec: RunRecord, out: str | Path) -> dict[str, Path]:
    return write_document(record_to_dict(rec), out)


def load_document(path: str | Path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT:
        raise ValueError(f"{path} is not an {FORMAT} document")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported results version {doc.get('version')}")
    return doc
