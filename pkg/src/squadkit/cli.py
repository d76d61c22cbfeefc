"""Command-line front end.

Exit codes: 0 success, 1 a mathematical check failed (a witness is printed),
2 malformed input.
"""

from __future__ import annotations

import json
import sys
from typing import Any, Dict

import click

from .errors import CheckFailure, SchemaError
from .squad import SquadPresentation
from .waldcat import (ExactFunctorData, FiniteWaldhausenCategory, NaturalWeakEquivalence, check_tau,
                      d_star, d_star_homotopy)


def _read_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None


def _category(path: str) -> FiniteWaldhausenCategory:
    return FiniteWaldhausenCategory.from_json(_read_json(path), name=path)


def _presentation(path: str) -> SquadPresentation:
    return SquadPresentation.from_json(_read_json(path))


def _emit(ctx: click.Context, payload: Dict[str, Any], text: str) -> None:
    if ctx.obj["format"] == "json":
        click.echo(json.dumps(payload, indent=1, sort_keys=True))
    else:
        click.echo(text)


def _group_payload(G) -> Dict[str, Any]:
    return {"invariant_factors": list(G.invariant_factors), "describe": G.describe()}


@click.group()
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--jobs", type=click.IntRange(1, 64), default=1, show_default=True,
              help="Worker threads for table scans; results do not depend on it.")
@click.option("-v", "--verbose", is_flag=True, help="Print extra diagnostics to stderr.")
@click.pass_context
def cli(ctx: click.Context, fmt: str, jobs: int, verbose: bool) -> None:
    """Stable quadratic modules of finite Waldhausen categories."""
    ctx.ensure_object(dict)
    ctx.obj.update(format=fmt, jobs=jobs, verbose=verbose)


@cli.command()
@click.argument("cat", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def validate(ctx, cat):
    """Check the Waldhausen axioms of a category file."""
    C = _category(cat)
    rep = C.validate()
    lines = [f"{C.name}: {'valid' if rep.ok else 'INVALID'}"]
    lines += [f"  violation: {v}" for v in rep.violations]
    lines += [f"  note: {n}" for n in rep.notes]
    _emit(ctx, rep.to_json(), "\n".join(lines))
    if not rep.ok:
        raise CheckFailure(rep.violations[0], rep.violations[0])


@cli.command()
@click.argument("cat", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False, writable=True), help="Write the presentation JSON here.")
@click.pass_context
def dstar(ctx, cat, out):
    """Build the presentation of D+ of a category."""
    P = d_star(_category(cat), jobs=ctx.obj["jobs"])
    data = P.to_json()
    if out:
        with open(out, "w") as fh:
            json.dump(data, fh, indent=1)
            fh.write("\n")
    counts = {}
    for r in P.relators:
        counts[r.relation] = counts.get(r.relation, 0) + 1
    summary = {"e0": len(P.free.E0), "e1": len(P.free.E1), "r0": len(P.R0), "r1": len(P.R1),
               "relations": {k: counts[k] for k in sorted(counts)}, "consistent": P.is_consistent()}
    text = [f"generators: {summary['e0']} in degree 0, {summary['e1']} in degree 1",
            f"relators: {summary['r0']} in degree 0, {summary['r1']} in degree 1"]
    text += [f"  relation ({k}): {v}" for k, v in summary["relations"].items()]
    if out is None and ctx.obj["format"] == "json":
        summary["presentation"] = data
    _emit(ctx, summary, "\n".join(text))


def _load_pres(path: str, presentation: bool, jobs: int) -> SquadPresentation:
    return _presentation(path) if presentation else d_star(_category(path), jobs=jobs)


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--presentation", is_flag=True, help="PATH is a presentation file, not a category.")
@click.pass_context
def k0(ctx, path, presentation):
    """pi0 of D+, i.e. K0."""
    G = _load_pres(path, presentation, ctx.obj["jobs"]).pi0()
    _emit(ctx, {"pi0": _group_payload(G)}, f"pi0: {G.describe()}")


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--presentation", is_flag=True, help="PATH is a presentation file, not a category.")
@click.pass_context
def k1(ctx, path, presentation):
    """pi1 of D+, i.e. K1."""
    P = _load_pres(path, presentation, ctx.obj["jobs"])
    G = P.pi1()
    reps = [P.free.dump1(r) for r in G.representatives]
    _emit(ctx, {"pi1": dict(_group_payload(G), representatives=reps)}, f"pi1: {G.describe()}")


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--presentation", is_flag=True, help="PATH is a presentation file, not a category.")
@click.pass_context
def kinv(ctx, path, presentation):
    """The k-invariant pi0 (x) Z/2 -> pi1 (action of the Hopf map)."""
    P = _load_pres(path, presentation, ctx.obj["jobs"])
    k = P.k_invariant()
    payload = {"pi0": _group_payload(k.pi0), "pi1": _group_payload(k.pi1), "rows": k.matrix(),
               "source_indices": list(k.source_indices), "zero": k.is_zero(), "surjective": k.is_surjective()}
    text = [f"pi0: {k.pi0.describe()}", f"pi1: {k.pi1.describe()}"]
    text += [f"  generator {i}: {list(r)}" for i, r in zip(k.source_indices, k.rows)]
    text.append(f"surjective: {k.is_surjective()}")
    _emit(ctx, payload, "\n".join(text))


@cli.command("check-tau")
@click.argument("cat", type=click.Path(exists=True, dir_okay=False))
@click.option("--object", "obj", required=True, help="Object A; the swap of A v A is compared with <[A],[A]>.")
@click.option("--additive", is_flag=True, help="Also compare with [-1_A].")
@click.pass_context
def check_tau_cmd(ctx, cat, obj, additive):
    """Check [tau_{A,A}] = <[A],[A]> (and = [-1_A])."""
    C = _category(cat)
    if obj not in C.objects:
        raise SchemaError(f"unknown object {obj!r}")
    res = check_tau(C, obj, additive=additive)
    _emit(ctx, dict(res, object=obj), "\n".join(f"{k}: {'holds' if v else 'FAILS'}" for k, v in res.items()))
    failed = [k for k, v in res.items() if not v]
    if failed:
        raise CheckFailure(f"{failed[0]} identity fails at {obj}", obj)


@cli.command("nerve-compare")
@click.argument("cat", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def nerve_compare(ctx, cat):
    """Compare D+ with the presentation read off the nerve of wS."""
    from .totalcx import identify
    rep = identify(_category(cat), jobs=ctx.obj["jobs"])
    _emit(ctx, rep.to_json(), rep.to_text())
    if not rep.ok:
        raise CheckFailure(rep.first_mismatch or "presentations differ", rep.first_mismatch)


@cli.command()
@click.argument("cat_c", type=click.Path(exists=True, dir_okay=False))
@click.argument("cat_d", type=click.Path(exists=True, dir_okay=False))
@click.argument("cat_e", type=click.Path(exists=True, dir_okay=False))
@click.option("--pairing", required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def product(ctx, cat_c, cat_d, cat_e, pairing):
    """Verify a biexact pairing and print the induced K-theory products."""
    from .sqg import BiexactFunctorData, Pairing
    C, D, E = _category(cat_c), _category(cat_d), _category(cat_e)
    pr = Pairing(BiexactFunctorData.from_json(_read_json(pairing), C, D, E))
    bad = pr.verify()
    if bad:
        _emit(ctx, {"ok": False, "failures": bad}, "\n".join(bad))
        raise CheckFailure(bad[0], bad[0])
    prods = pr.k_products()
    names = {"00": "K0 x K0 -> K0", "01": "K0 x K1 -> K1", "10": "K1 x K0 -> K1"}
    payload = {"ok": True, "products": {k: {f"{i},{j}": list(v) for (i, j), v in sorted(tab.items())}
                                        for k, tab in prods.items()}}
    text = ["cells: all hold"]
    for k in ("00", "01", "10"):
        text.append(names[k] + ":")
        text += [f"  ({i},{j}) -> {list(v)}" for (i, j), v in sorted(prods[k].items())]
    _emit(ctx, payload, "\n".join(text))


@cli.command("homotopy-check")
@click.argument("cat_c", type=click.Path(exists=True, dir_okay=False))
@click.argument("cat_d", type=click.Path(exists=True, dir_okay=False))
@click.option("--functors", required=True, help="Two functor files f,g separated by a comma.")
@click.option("--transformation", required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def homotopy_check(ctx, cat_c, cat_d, functors, transformation):
    """Check that a natural weak equivalence induces a homotopy of D+ morphisms."""
    parts = functors.split(",")
    if len(parts) != 2:
        raise SchemaError("--functors expects two paths separated by a comma")
    C, D = _category(cat_c), _category(cat_d)
    F = ExactFunctorData.from_json(_read_json(parts[0]), C, D)
    G = ExactFunctorData.from_json(_read_json(parts[1]), C, D)
    eps = NaturalWeakEquivalence.from_json(_read_json(transformation), F, G)
    h = d_star_homotopy(eps)
    f, g = h.f, h.g
    same0 = f.induced_pi0() == g.induced_pi0()
    same1 = f.induced_pi1() == g.induced_pi1()
    payload = {"homotopy": True, "pi0_f": f.induced_pi0(), "pi0_g": g.induced_pi0(),
               "pi1_f": f.induced_pi1(), "pi1_g": g.induced_pi1(), "induced_equal": same0 and same1}
    _emit(ctx, payload, "\n".join([
        "homotopy laws: hold",
        f"pi0: f* = {payload['pi0_f']}, g* = {payload['pi0_g']}",
        f"pi1: f* = {payload['pi1_f']}, g* = {payload['pi1_g']}"]))
    if not (same0 and same1):
        raise CheckFailure("homotopic morphisms induce different maps", "pi0" if not same0 else "pi1")


def run(argv=None) -> int:
    """Run the CLI and return its exit code."""
    try:
        cli.main(args=argv, prog_name="squadkit", standalone_mode=False)
    except CheckFailure as exc:
        click.echo(f"check failed: {exc}", err=True)
        if exc.witness is not None:
            click.echo(f"witness: {exc.witness}", err=True)
        return 1
    except SchemaError as exc:
        click.echo(f"input error: {exc}", err=True)
        return 2
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
