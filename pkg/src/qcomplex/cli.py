"""Command-line front end: ``qc <command> --l L --m M [options]``.

Every command prints a JSON document (or CSV where noted).  Exit status is 0
on success, 1 when a verification fails and 2 on usage errors.
"""

from __future__ import annotations

import json
import sys
from math import factorial

import click

from . import complex as cx
from . import homology as hm
from . import invariants as inv
from . import lex_shelling as ls
from . import partitioning as pt
from .chain_model import (
    Params,
    ResourceGuardError,
    enumerate_facets,
    flag_face,
    format_face,
    format_word,
    parse_face,
)

FAIL = 1


def _emit(obj, fmt: str = "json") -> None:
    if fmt == "csv":
        for row in obj:
            click.echo(",".join(str(x) for x in row))
    else:
        click.echo(json.dumps(obj, sort_keys=True, indent=2))


def _ranks(s) -> str:
    return ",".join(str(r) for r in s)


def common(f):
    f = click.option("--threads", type=click.IntRange(1), default=1, show_default=True,
                     help="Worker threads; output does not depend on it.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")(f)
    f = click.option("--young", is_flag=True, help="Quotient by S_l x ... x S_l only.")(f)
    f = click.option("--m", "m", type=click.IntRange(1), required=True, help="Number of rows.")(f)
    f = click.option("--l", "l", type=click.IntRange(1), required=True, help="Row length.")(f)
    return f


def face_options(f):
    f = click.option("--link", "link_name", type=click.Choice(["flag"]), default=None,
                     help="Named face: 'flag' has support {m, 2m, ..., (l-1)m}.")(f)
    f = click.option("--face", "face_text", default=None,
                     help='Face as row profiles, e.g. "2,2;1,3".')(f)
    return f


def _params(l, m, young) -> Params:
    return Params(l, m, symmetrize=not young)


def _face(params, face_text, link_name):
    if link_name and face_text is not None:
        raise click.UsageError("give --face or --link, not both")
    if link_name == "flag":
        return flag_face(params)
    if face_text is None:
        return None
    try:
        return parse_face(face_text, params)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--face") from None


def _complex(params, face=None):
    c = cx.build(params)
    if face is None or not face.support:
        return c
    if not c.is_cell(face):
        raise click.BadParameter(f"{format_face(face)!r} is not a face", param_hint="--face")
    return cx.link(c, face)


def _need_wreath(params, what):
    if not params.symmetrize:
        raise click.UsageError(f"{what} needs the wreath quotient (drop --young)")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Quotient complexes of Boolean algebras by wreath products."""


@cli.command()
@common
def enum(l, m, young, fmt, threads):
    """Count facets and faces."""
    params = _params(l, m, young)
    c = cx.build(params)
    n = params.n
    formula = factorial(n) // (factorial(l) ** m * (factorial(m) if params.symmetrize else 1))
    _emit({
        "l": l, "m": m, "symmetrize": params.symmetrize,
        "facets": len(c.facets), "facet_formula": formula,
        "faces": sum(len(x) for x in c.cells) - 1,
        "f_vector": list(c.f_vector()),
    })
    return 0 if len(c.facets) == formula else FAIL


@cli.command()
@common
def facets(l, m, young, fmt, threads):
    """List facet words in lexicographic order."""
    params = _params(l, m, young)
    words = [format_word(w) for w in enumerate_facets(params)]
    if fmt == "csv":
        _emit([[w] for w in words], "csv")
    else:
        _emit({"count": len(words), "facets": words})
    return 0


def _complex_report(c, cells: bool) -> dict:
    fv = c.flag_vectors()
    out = {
        "f_vector": list(c.f_vector()),
        "euler_characteristic": c.euler_characteristic(),
        "flag_f": {_ranks(k): v for k, v in fv.flag_f.items()},
        "flag_h": {_ranks(k): v for k, v in fv.flag_h.items()},
    }
    if cells:
        layers = {}
        for d in range(0, c.dim + 1):
            pos = {x: i for i, x in enumerate(c.layer(d - 1))}
            layers[str(d)] = [
                {
                    "face": format_face(x),
                    "support": list(c.rel_support(x)),
                    "boundary": [[pos[f], s] for f, s in c.boundary(x)] if d > 0 else [],
                }
                for x in c.layer(d)
            ]
        out["cells"] = layers
    return out


@cli.command("complex")
@common
@click.option("--cells", is_flag=True, help="Also list cells with boundaries.")
def complex_cmd(l, m, young, fmt, threads, cells):
    """f-vector, Euler characteristic and flag vectors of the complex."""
    c = cx.build(_params(l, m, young))
    _emit(_complex_report(c, cells))
    return 0


@cli.command()
@common
@face_options
@click.option("--cells", is_flag=True)
def link(l, m, young, fmt, threads, face_text, link_name, cells):
    """Link of a face."""
    params = _params(l, m, young)
    face = _face(params, face_text, link_name)
    if face is None:
        raise click.UsageError("link needs --face or --link")
    out = _complex_report(_complex(params, face), cells)
    out["face"] = format_face(face)
    _emit(out)
    return 0


def _coeff(text):
    try:
        return hm.parse_coefficients(text)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--coeff") from None


@cli.command()
@common
@face_options
@click.option("--coeff", default="z", show_default=True, help="z, q or p:<prime>.")
def homology(l, m, young, fmt, threads, face_text, link_name, coeff):
    """Reduced homology of the complex or of a link."""
    params = _params(l, m, young)
    code = _coeff(coeff)
    c = _complex(params, _face(params, face_text, link_name))
    h = hm.homology(c, code)
    _emit({"coefficients": h.coefficients, "homology": h.report()})
    return 0


@cli.command("torsion-scan")
@common
@click.option("--coeff", default="z", show_default=True)
@click.option("--bound", type=int, default=None, help="Largest face dimension scanned.")
def torsion_scan(l, m, young, fmt, threads, coeff, bound):
    """Faces whose links have homology below the top dimension."""
    code = _coeff(coeff)
    c = cx.build(_params(l, m, young))
    flagged = hm.torsion_scan(c, bound, code, threads=threads)
    _emit({
        "coefficients": hm.coefficient_name(code),
        "flagged": [
            {"face": format_face(e.face), "dims": e.dims, "homology": e.homology.report()}
            for e in flagged
        ],
    })
    return 0


@cli.command()
@common
@face_options
@click.option("--search", is_flag=True, help="Search all facet orders instead of lex order.")
@click.option("--budget", type=int, default=1_000_000, show_default=True)
def shelling(l, m, young, fmt, threads, face_text, link_name, search, budget):
    """Check the lexicographic shelling, or search for any shelling."""
    params = _params(l, m, young)
    c = _complex(params, _face(params, face_text, link_name))
    if search:
        try:
            res = ls.search_shelling(c, budget=budget, max_facets=max(12, len(c.facets)))
        except ls.BudgetExceeded as exc:
            _emit({"found": None, "inconclusive": str(exc)})
            return FAIL
        _emit({
            "found": res.found,
            "order": [format_word(w) for w in res.order] if res.order else None,
            "states": res.states,
            "exhaustive": res.exhaustive,
        })
        return 0 if res.found else FAIL
    rep = ls.verify_shelling(c)
    _emit({
        "ok": rep.ok,
        "steps": [
            {"word": format_word(s.word),
             "minimal_face": list(s.minimal_face) if s.minimal_face is not None else None,
             "new_minimal": [list(x) for x in s.new_minimal]}
            for s in rep.steps
        ],
        "failure": format_word(rep.order[rep.failure]) if rep.failure is not None else None,
    })
    return 0 if rep.ok else FAIL


@cli.command()
@common
@face_options
@click.option("--search", is_flag=True, help="Also run the elementary-collapse search.")
@click.option("--budget", type=int, default=200_000, show_default=True)
def collapse(l, m, young, fmt, threads, face_text, link_name, search, budget):
    """Cone-point certificate for collapsibility (and optional collapse search)."""
    params = _params(l, m, young)
    face = _face(params, face_text, link_name)
    out = {}
    ok = True
    if face is None or not face.support:
        _need_wreath(params, "the cone-point certificate")
        full = cx.build(params)
        cert = ls.verify_collapsibility_lex(params, full)
        target = full
    else:
        full = cx.build(params)
        target = _complex(params, face)
        if ls.single_interval(face, params) and ls.has_repeated_letter(face, params):
            cert = ls.verify_link_collapsibility(full, face)
        else:
            cert = None
    if cert is not None:
        ok = cert.ok
        out["cone_points"] = {
            "ok": cert.ok,
            "steps": [
                {"word": format_word(s.word), "cone_rank": s.cone_rank, "ok": s.ok,
                 "maximal_faces": [list(x) for x in s.maximal_faces]}
                for s in cert.steps
            ],
        }
    if search or cert is None:
        res = ls.elementary_collapse_search(target, budget=budget)
        out["collapse_search"] = {
            "ok": res.ok, "length": len(res.sequence), "states": res.states,
            "exhaustive": res.exhaustive,
        }
        ok = ok and res.ok
    _emit(out)
    return 0 if ok else FAIL


def _partitioning(params, link_name):
    _need_wreath(params, "the partitioning")
    if link_name == "flag":
        c = cx.link(cx.build(params), flag_face(params))
        return c, pt.partition_flag_link(params)
    c = cx.build(params)
    return c, pt.partition(c)


def link_option(f):
    return click.option("--link", "link_name", type=click.Choice(["flag"]), default=None,
                        help="Use the link of the flag face instead of the whole complex.")(f)


@cli.command()
@common
@link_option
def partition(l, m, young, fmt, threads, link_name):
    """Descent sets and minimal faces of every facet."""
    _, part = _partitioning(_params(l, m, young), link_name)
    recs = part.records()
    if fmt == "csv":
        _emit([[r["word"], " ".join(map(str, r["descents"])), r["minimal_face"]] for r in recs], "csv")
    else:
        _emit(recs)
    return 0


@cli.command("verify-partition")
@common
@link_option
def verify_partition(l, m, young, fmt, threads, link_name):
    """Check that the intervals cover every face exactly once."""
    c, part = _partitioning(_params(l, m, young), link_name)
    chk = pt.verify_partition(c, part)
    _emit(chk.certificate())
    return 0 if chk.ok else FAIL


@cli.command()
@common
@click.option("--face", "face_text", required=True)
def locate(l, m, young, fmt, threads, face_text):
    """Find the interval [G, F] containing a face."""
    params = _params(l, m, young)
    _need_wreath(params, "locate")
    face = _face(params, face_text, None)
    tr = pt.locate_face(face, params)
    _emit({
        "face": format_face(face),
        "extension": format_word(tr.extension),
        "relabeled": format_word(tr.relabeled),
        "facet": format_word(tr.facet),
        "descents": list(tr.descents),
        "minimal_face": format_face(tr.minimal_face),
        "minimal_face_is_face": tr.minimal_face == face,
    })
    return 0


@cli.command()
@common
@link_option
@click.option("--det", "want_det", is_flag=True, help="Report the determinant.")
@click.option("--rank-mod", "rank_mod", type=int, default=None, help="Also report the rank mod p.")
def incidence(l, m, young, fmt, threads, link_name, want_det, rank_mod):
    """Incidence matrix of the partitioning (rows facets, columns minimal faces)."""
    _, part = _partitioning(_params(l, m, young), link_name)
    M = pt.incidence(part)
    if fmt == "csv" and not want_det and rank_mod is None:
        _emit(M, "csv")
        return 0
    out = {}
    if want_det:
        d = pt.determinant(M)
        out["det"] = str(abs(d))
        out["signed_det"] = str(d)
    if rank_mod is not None:
        try:
            out["rank_mod_p"] = {"p": rank_mod, "rank": pt.rank_mod_p(M, rank_mod), "size": len(M)}
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--rank-mod") from None
    if not out:
        out["matrix"] = M
    _emit(out)
    return 0


@cli.command()
@common
@click.option("--degree", type=click.IntRange(0), default=12, show_default=True)
def molien(l, m, young, fmt, threads, degree):
    """Molien series of the acting group, to a degree bound."""
    s = inv.molien(_params(l, m, young), degree)
    _emit({"coeffs": s.to_list()})
    return 0


@cli.command("series-compare")
@common
@click.option("--degree", type=click.IntRange(0), default=12, show_default=True)
def series_compare(l, m, young, fmt, threads, degree):
    """Compare the partitioning Hilbert series with the Molien series."""
    params = _params(l, m, young)
    _, part = _partitioning(params, None)
    cmp = inv.compare_series(part, params, degree)
    out = cmp.report()
    out["coeffs"] = out["hilbert"]
    _emit(out)
    return 0 if cmp.equal else FAIL


@cli.command()
@click.option("--n", "n", type=click.IntRange(1), required=True, help="Ground set size.")
@click.option("--set", "sets", multiple=True, required=True,
              help='Subset with optional exponent, e.g. "1,4,5" or "1,2^3".')
def transfer(n, sets):
    """Apply the transfer map to a multichain of subsets."""
    items = []
    for text in sets:
        body, _, exp = text.partition("^")
        try:
            s = [int(x) for x in body.split(",") if x.strip()]
            items.append((s, int(exp) if exp else 1))
        except ValueError:
            raise click.BadParameter(f"cannot parse {text!r}", param_hint="--set") from None
    try:
        mc = inv.Multichain(n, items)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--set") from None
    e = inv.transfer(mc)
    _emit({"exponents": list(e), "degree": sum(e)})
    return 0


@cli.command("basic-set")
@common
@click.option("--degree", type=click.IntRange(0, 10), default=8, show_default=True)
@click.option("--coeff", default="q", show_default=True, help="q or p:<prime>.")
def basic_set(l, m, young, fmt, threads, degree, coeff):
    """Low-degree spanning check for the transferred minimal faces."""
    params = _params(l, m, young)
    code = _coeff(coeff)
    if code == 0:
        raise click.BadParameter("use q or a prime", param_hint="--coeff")
    _, part = _partitioning(params, None)
    reps = inv.verify_basic_set_low_degree(part, params, degree, None if code < 0 else code)
    _emit({
        "coefficients": hm.coefficient_name(code),
        "degrees": [
            {"degree": r.degree, "invariants": r.invariant_dim, "products": r.products,
             "rank": r.rank, "spans": r.spans}
            for r in reps
        ],
        "spans": all(r.spans for r in reps),
    })
    return 0


def run(argv=None) -> int:
    """Run the CLI and return its exit status."""
    try:
        rv = cli.main(args=argv, prog_name="qc", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 2
    except (ResourceGuardError, ValueError) as exc:
        click.echo(f"Error: {exc}", err=True)
        return 2
    return rv if isinstance(rv, int) else 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
