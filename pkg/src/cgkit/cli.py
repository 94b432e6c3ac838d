"""Command line interface and the verification suite.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage error,
3 internal invariant breach (for example a non-integral CG coefficient).
"""

from __future__ import annotations

import functools
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import click

from . import __version__
from . import cgvariety as cv
from . import invariants as inv
from . import quiver as qv
from . import reference, stability as st, zcompare as zc
from .exactnum import ONE, ZERO, Cyclotomic, Diverges, Matrix, is_zero, to_rational
from .reptheory import (InternalError, KleinianGroup, cg_closed_form, cg_table, character,
                        decomposition, inner_product)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

A_RANGE = range(1, 13)
D_RANGE = range(4, 11)


# ---------------------------------------------------------------------------
# reports


@dataclass
class CheckResult:
    name: str
    family: str
    n: int
    status: str  # pass | fail | diverges | skipped
    elapsed: float = 0.0
    track: str = "exact"
    detail: dict = field(default_factory=dict)

    @property
    def key(self):
        return (self.family, self.n, self.name)


@dataclass
class RunReport:
    version: str
    groups: list
    seed: int
    selector: str
    checks: list

    @property
    def failed(self) -> bool:
        return any(c.status == "fail" for c in self.checks)

    def to_json(self, stable: bool = False) -> dict:
        checks = []
        for c in sorted(self.checks, key=lambda c: c.key):
            d = asdict(c)
            if stable:
                d.pop("elapsed")
            checks.append(d)
        out = {"version": self.version, "selector": self.selector, "seed": self.seed,
               "groups": [list(g) for g in self.groups], "checks": checks,
               "status": "fail" if self.failed else "pass"}
        if not stable:
            out["generated"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        return out


def _jsonable(x):
    if isinstance(x, Cyclotomic):
        return str(x)
    if isinstance(x, Matrix):
        return [[_jsonable(e) for e in r] for r in x.rows]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


# ---------------------------------------------------------------------------
# individual checks.  Each returns (ok, detail) or (status, detail).


def _gauges(G, seed, trials):
    rng = random.Random(f"{seed}-{G.name}")
    return [cv.random_gauge(G, rng) for _ in range(trials)]


def check_irreps(G, ctx):
    dims = sum(G.dim(lab) ** 2 for lab in G.labels())
    ortho = all(
        inner_product(G, lambda g, a=a: character(G, G.irrep(a), g),
                      lambda g, b=b: character(G, G.irrep(b), g)) == (ONE if a == b else ZERO)
        for a in G.labels() for b in G.labels())
    closed = cg_closed_form(G) == cg_table(G)
    return dims == G.order and ortho and closed, {"sum_dim2": dims, "order": G.order,
                                                  "orthogonal": ortho, "closed_form": closed}


def check_phi0(G, ctx):
    rep = cv.check_equivariance(cv.phi0(G))
    bad = [k for k, v in rep.items() if not (v["equivariant"] and v["invertible"])]
    return not bad, {"bad_blocks": bad}


def check_coherence(G, ctx):
    phi = cv.phi0(G)
    direct = cv.verify_coherence(phi)
    batch = cv.verify_coherence_batch(phi, _gauges(G, ctx["seed"], ctx["trials"]))
    return not direct and not batch, {"phi0_failures": direct, "gauge_failures": batch[:10],
                                      "trials": ctx["trials"]}


def check_symmetry(G, ctx):
    phi = cv.phi0(G)
    direct = cv.verify_symmetry(phi)
    batch = cv.verify_symmetry_batch(phi, _gauges(G, ctx["seed"], ctx["trials"]))
    return not direct and not batch, {"phi0_failures": direct, "gauge_failures": batch[:10],
                                      "trials": ctx["trials"]}


def check_gamma_table(G, ctx):
    if (G.family, G.n) != ("D", 4):
        return "skipped", {}
    tab = cv.coherence_table(G)
    ref = reference.published_gamma_table()
    bad = [k for k, M in ref.items() if not tab[k].matrix == M]
    return not bad, {"mismatched_triples": bad, "compared": len(ref)}


def check_preprojective(G, ctx):
    x = qv.x_symbolic()
    phi = cv.phi0(G)
    bad = []
    for t, g in enumerate([None] + _gauges(G, ctx["seed"], min(ctx["trials"], 50))):
        psi = phi if g is None else cv.gauge_act(g, phi)
        if not qv.check_preprojective(qv.comparison_R(psi, x))["ok"]:
            bad.append(t)
    return not bad, {"failing_trials": bad}


def check_rmap_figure(G, ctx):
    diff = reference.rmap_differences(G, qv.comparison_R(cv.phi0(G), qv.x_symbolic()))
    return not diff, {"differing_arrows": diff}


def check_invariants(G, ctx):
    r = inv.check_stage3(G)
    ok = all(r["match"].values()) and r["relation_zero"] and inv.check_kleinian_relation(G)
    return ok, {"match": r["match"], "relation_zero": r["relation_zero"]}


def check_stabilizer(G, ctx):
    S = inv.stabilizer(G)
    order = len(S.elements)
    rel = inv.stabilizer_relations_hold(S)
    emb = inv.action_matches_embedding(S)
    return order == G.order and rel and emb, {"order": order, "expected": G.order,
                                              "relations": rel, "embedding": emb}


def check_f0(G, ctx):
    phi = cv.phi0(G)
    base = cv.f0(phi)
    th = cv.theta1(G)
    gauges = _gauges(G, ctx["seed"], ctx["trials"])
    values = cv.f0_batch(phi, gauges)
    bad = [t for t, (g, v) in enumerate(zip(gauges, values))
           if not v == cv.character_value(g, th) ** G.order * base]
    # the batched translates against the direct gauge action on a few trials
    routes = all(v == cv.f0(cv.gauge_act(g, phi)) for g, v in list(zip(gauges, values))[:3])
    ident = cv.f0_weight_identity(G)
    blocks = cv.f0_weight_from_blocks(G)
    weights = all(l == r == blocks[v] for v, (l, r) in ident.items())
    return not bad and routes and weights, {"semiinvariance_failures": bad, "routes_agree": routes,
                                            "weight_identity": weights}


def check_destabilizer(G, ctx):
    if G.family != "A":
        return "skipped", {}
    rng = random.Random(f"{ctx['seed']}-destab-{G.n}")
    mism, ineq, cases = [], [], {}
    for t in range(ctx["trials"]):
        phi, x = st.random_planted_an(G.n, rng)
        semistable, _ = qv.is_theta2_semistable(qv.comparison_R(phi, x))
        alpha, case = st.destabilizer_exponents_an(phi, x)
        s = cv.OneParamSubgroup(G, {f"U{i}": (a,) for i, a in enumerate(alpha, start=1)})
        cert = st.hm_check(s, phi, x, cv.theta2(G)).certificate
        if semistable == cert:
            mism.append(t)
        if not semistable:
            cases[case] = cases.get(case, 0) + 1
            ineq.extend(st.key_inequality_violations(phi, alpha))
    return not mism and not ineq, {"mismatches": mism, "inequality_violations": ineq, "cases": cases}


def check_nullcone(G, ctx):
    if G.family == "D":
        if G.n not in st.DN_SUPPORTED:
            return "skipped", {"reason": f"matrices listed for n in {st.DN_SUPPORTED}"}
        fam = st.nullcone_dn(G.n, a=2)
        div = st.nullcone_dn(G.n, a=2, exponents="displayed").notes["diverging_arrows"]
        lim_ok = fam.notes["datum_limit_exists"] and is_zero(cv.f0(fam.limit))
        return fam.matches and lim_ok, {"deviation": fam.deviation, "track": fam.notes["track"],
                                        "displayed_exponents_diverge_on": div}
    rng = random.Random(f"{ctx['seed']}-null-{G.n}")
    bad = []
    for k in range(1, G.n + 2):
        a = Cyclotomic.rational(rng.choice([1, 2, 3, -1, -5]))
        b = Cyclotomic.rational(rng.choice([1, 2, 7, -3]))
        fam = st.nullcone_an(G.n, k, a, b)
        if isinstance(fam.limit, Diverges) or not fam.matches or not cv.f0(fam.limit) == 0:
            bad.append(k)
            continue
        pat = st.nullcone_pattern_an(G.n, k)
        got = {"phi_i1": [0 if st.an_value(fam.limit, i, 1) == 0 else 1 for i in range(1, G.n + 1)],
               "phi_in": [0 if st.an_value(fam.limit, i, G.n) == 0 else 1 for i in range(1, G.n + 1)]}
        if got != pat:
            bad.append(k)
    return not bad, {"failing_families": bad}


def check_fq(G, ctx):
    if G.family != "A":
        return "skipped", {}
    bad = [q for q in range(G.n + 1) if not st.check_fq_restriction(G.n, q)]
    return not bad, {"failing_q": bad}


def check_reynolds(G, ctx):
    if G.family != "A":
        return "skipped", {}
    bound = ctx.get("reynolds_bound", 20)
    got = st.reynolds_image(G.n, bound)
    return got == st.reynolds_expected(G.n, bound), {"degree_bound": bound, "monomials": len(got)}


def check_catalogue(G, ctx):
    if (G.family, G.n) != ("D", 4):
        return "skipped", {}
    reps = {c: st.d4_catalogue_check(c) for c in st.CASE_IDS}
    return all(r.passed for r in reps.values()), {"cases": {c: r.passed for c, r in reps.items()}}


def check_zcompare(G, ctx):
    if (G.family, G.n) != ("D", 4):
        return "skipped", {}
    out = zcompare_checks(ctx["trials"], ctx["seed"])
    return all(v["ok"] for v in out.values()), {k: v["ok"] for k, v in out.items()}


CHECKS = {
    "stage1": [("irreps", check_irreps), ("phi0-regular", check_phi0), ("coherence", check_coherence),
               ("symmetry", check_symmetry), ("gamma-table", check_gamma_table)],
    "stage2": [("preprojective", check_preprojective), ("rmap-figure", check_rmap_figure)],
    "stage3": [("invariants", check_invariants)],
    "stage4": [("stabilizer", check_stabilizer)],
    "stage5": [("f0", check_f0)],
    "stage6": [("destabilizer", check_destabilizer), ("nullcone", check_nullcone), ("fq", check_fq),
               ("reynolds", check_reynolds), ("d4-catalogue", check_catalogue), ("zcompare", check_zcompare)],
}
SELECTORS = tuple(CHECKS) + ("all", "appendixA", "appendixB")


def _run_one(job):
    family, n, name, ctx = job
    fn = dict(c for stage in CHECKS.values() for c in stage)[name]
    G = KleinianGroup(family, n)
    t0 = time.perf_counter()
    try:
        res, detail = fn(G, ctx)
    except InternalError:
        raise
    except Exception as exc:  # a crash inside a check is a failed check
        res, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    status = res if isinstance(res, str) else ("pass" if res else "fail")
    track = detail.get("track", "exact") if isinstance(detail, dict) else "exact"
    return CheckResult(name, family, n, status, round(time.perf_counter() - t0, 3), track, _jsonable(detail))


def run_suite(selector: str, groups: list[tuple[str, int]], seed: int = 0, trials: int = 100,
              jobs: int = 1, reynolds_bound: int = 20) -> RunReport:
    if selector not in SELECTORS:
        raise click.UsageError(f"unknown selector {selector!r}; choose from {', '.join(SELECTORS)}")
    if not groups:
        raise click.UsageError("empty family list")
    if selector == "appendixA":
        groups = [g for g in groups if g[0] == "A"]
    elif selector == "appendixB":
        groups = [g for g in groups if g[0] == "D"]
    stages = list(CHECKS) if selector in ("all", "appendixA", "appendixB") else [selector]
    ctx = {"seed": seed, "trials": trials, "reynolds_bound": reynolds_bound}
    work = [(f, n, name, ctx) for f, n in groups for s in stages for name, _ in CHECKS[s]]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))
    else:
        results = [_run_one(w) for w in work]
    return RunReport(__version__, list(groups), seed, selector, sorted(results, key=lambda c: c.key))


# ---------------------------------------------------------------------------
# zcompare checks shared by the suite and the subcommand


def zcompare_checks(trials: int = 100, seed: int = 0, which=None) -> dict:
    out = {}
    which = which or ("membership", "psi", "commutativity", "nonextension")
    p = zc.example_point()
    if "membership" in which:
        r = zc.z_membership(p)
        rng = random.Random(f"{seed}-zmem")
        moved = [zc.z_membership(zc.gauge_act_z(cv.random_gauge(zc.D4, rng), p)).ok for _ in range(trials)]
        out["membership"] = {"ok": r.ok and r.det == 2 and all(moved), "E1": r.E1, "E2": r.E2, "E3": r.E3,
                             "det": str(r.det), "wedge": _jsonable(r.wedge), "gauge_translates": trials}
    if "psi" in which:
        same = zc.psi_circ(cv.phi0(zc.D4)) == p
        rng = random.Random(f"{seed}-zpsi")
        eq = []
        for _ in range(trials):
            g, phi = zc.random_regular(rng)
            eq.append(zc.psi_circ(phi) == zc.gauge_act_z(g, p))
        out["psi"] = {"ok": same and all(eq), "phi0_maps_to_example": same, "equivariant": all(eq)}
    if "commutativity" in which:
        x = qv.x_symbolic()
        rng = random.Random(f"{seed}-zcomm")
        bad = [t for t in range(trials) if not zc.commutativity_check(zc.random_regular(rng)[1], x)]
        out["commutativity"] = {"ok": not bad, "failing_trials": bad, "trials": trials}
    if "nonextension" in which:
        rep = zc.non_extension_witness()
        out["nonextension"] = {"ok": rep.ok, "samples": [[str(a), str(b)] for a, b, _ in rep.samples],
                               "limits_match": rep.limits_match, "doubling": rep.doubling}
    return out


# ---------------------------------------------------------------------------
# argument helpers


def parse_n_range(spec: str) -> list[int]:
    out = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _group(family: str, n: int) -> KleinianGroup:
    family = family.upper()
    ok = (family == "A" and n in A_RANGE) or (family == "D" and n in D_RANGE)
    if not ok:
        raise click.UsageError(f"unsupported group {family}_{n} (A: 1..12, D: 4..10)")
    return KleinianGroup(family, n)


def _scalar(text: str) -> Cyclotomic:
    from fractions import Fraction
    return Cyclotomic.rational(to_rational(Fraction(text)))


def _parse_x(text: str | None):
    if text is None:
        return qv.x_symbolic()
    parts = text.split(",")
    if len(parts) != 2:
        raise click.UsageError("--x takes two comma separated rationals")
    return tuple(_scalar(p) for p in parts)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise click.UsageError(f"cannot read {path}: {exc}")


def _resolve_group(family: str | None, n: int | None, path: str | None = None) -> KleinianGroup:
    """The group from --family/--n, or from the file given by --datum/--rep."""
    if path is not None:
        data = _read_json(path)
        G = _group(str(data.get("family", "")), int(data.get("n", 0)))
        if (family is not None and family.upper() != G.family) or (n is not None and n != G.n):
            raise click.UsageError(f"{path} is for {G.name}, not {(family or '?').upper()}_{n}")
        return G
    if family is None or n is None:
        raise click.UsageError("give --family and --n (or a --datum/--rep file)")
    return _group(family, n)


def _load_datum(path: str | None, G: KleinianGroup) -> cv.CGDatum:
    if path is None:
        return cv.phi0(G)
    try:
        phi = cv.CGDatum.from_json(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise click.UsageError(f"{path} is not a datum: {exc}")
    if phi.group != G:
        raise click.UsageError(f"datum is for {phi.group.name}, not {G.name}")
    return phi


def _load_rep(path: str) -> qv.QuiverRep:
    try:
        return qv.QuiverRep.from_json(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise click.UsageError(f"{path} is not a representation: {exc}")


def _write_json(path: str, data: dict):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)


def _emit(ctx, payload: dict, text_lines: list[str], ok: bool = True):
    if ctx.obj["json"]:
        click.echo(json.dumps(_jsonable(payload), indent=2, sort_keys=True))
    else:
        for line in text_lines:
            click.echo(line)
    ctx.exit(EXIT_OK if ok else EXIT_FAIL)


family_opt = click.option("--family", type=click.Choice(["A", "D"], case_sensitive=False), required=True)
n_opt = click.option("--n", "n", type=int, required=True)
family_opt_file = click.option("--family", type=click.Choice(["A", "D"], case_sensitive=False), default=None,
                               help="Optional when a --datum/--rep file names the group.")
n_opt_file = click.option("--n", "n", type=int, default=None)


def _set_precision(precision):
    if precision is not None:
        if precision < 64:
            raise click.BadParameter("precision must be at least 64", param_hint="--precision")
        os.environ["CGKIT_PRECISION"] = str(precision)


def global_options(f):
    """Accept the global flags after the subcommand name as well."""
    @click.option("--json", "sub_json", is_flag=True, default=False, help="Machine readable output.")
    @click.option("--seed", "sub_seed", type=int, default=None)
    @click.option("--precision", "sub_precision", type=int, default=None, help="Bits for the approximate track.")
    @click.option("--stable", "sub_stable", is_flag=True, default=False)
    @functools.wraps(f)
    def wrapper(*args, sub_json, sub_seed, sub_precision, sub_stable, **kwargs):
        obj = click.get_current_context().obj
        obj["json"] = obj["json"] or sub_json
        obj["stable"] = obj["stable"] or sub_stable
        if sub_seed is not None:
            obj["seed"] = sub_seed
        _set_precision(sub_precision)
        return f(*args, **kwargs)
    return wrapper


# ---------------------------------------------------------------------------
# commands


@click.group()
@click.version_option(__version__)
@click.option("--json", "as_json", is_flag=True, help="Machine readable output.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--precision", type=int, default=None, help="Bits for the approximate track.")
@click.option("--stable", is_flag=True, help="Omit timestamps and timings from reports.")
@click.pass_context
def cgkit(ctx, as_json, seed, precision, stable):
    """Clebsch-Gordan varieties for Kleinian groups of type A and D."""
    _set_precision(precision)
    ctx.obj = {"json": as_json, "seed": seed, "stable": stable}


@cgkit.command()
@family_opt
@n_opt
@global_options
@click.pass_context
def irreps(ctx, family, n):
    """Irreducible representations with their generator images."""
    G = _group(family, n)
    rows = [{"label": r.label, "dim": r.dim,
             "generators": {nm: M for nm, M in zip(G.generator_names(), r.generator_images)}}
            for r in G.irreps()]
    lines = [f"{G.name}: order {G.order}"]
    for r in rows:
        gens = "  ".join(f"{k} = {v}" for k, v in r["generators"].items())
        lines.append(f"  {r['label']} (dim {r['dim']}): {gens}")
    _emit(ctx, {"group": G.name, "order": G.order, "irreps": rows}, lines)


@cgkit.command("cg-table")
@family_opt
@n_opt
@global_options
@click.pass_context
def cg_table_cmd(ctx, family, n):
    """Decompositions U_i (x) U_j from characters, checked against the closed form."""
    G = _group(family, n)
    ok = cg_closed_form(G) == cg_table(G)
    table = {f"{i}x{j}": [f"{k}^{c}" if c > 1 else k for k, c in decomposition(G, i, j)]
             for i in G.labels() for j in G.labels()}
    lines = [f"{k} = {' + '.join(v)}" for k, v in table.items()]
    lines.append(f"closed form agrees: {ok}")
    _emit(ctx, {"group": G.name, "table": table, "closed_form_agrees": ok}, lines, ok)


@cgkit.command()
@family_opt
@n_opt
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the datum JSON here.")
@global_options
@click.pass_context
def phi0(ctx, family, n, out_path):
    """The canonical regular datum phi0."""
    G = _group(family, n)
    phi = cv.phi0(G)
    if out_path:
        _write_json(out_path, phi.to_json())
    lines = [f"phi0_{{{i},{j}}} = {M}" for (i, j), M in phi.blocks.items()]
    if out_path:
        lines.append(f"written to {out_path}")
    _emit(ctx, phi.to_json(), lines)


@cgkit.command()
@click.argument("kind", type=click.Choice(["coherence", "symmetry", "equivariance", "preprojective"]))
@family_opt_file
@n_opt_file
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--datum", type=click.Path(exists=True), default=None, help="JSON datum (default phi0).")
@click.option("--rep", "rep_path", type=click.Path(exists=True), default=None,
              help="preprojective only: check this representation JSON instead.")
@global_options
@click.pass_context
def verify(ctx, kind, family, n, trials, datum, rep_path):
    """Verify one property of phi0 (or a given datum) and random gauge translates."""
    if rep_path is not None:
        if kind != "preprojective":
            raise click.UsageError("--rep only applies to 'verify preprojective'")
        rho = _load_rep(rep_path)
        res = qv.check_preprojective(rho)
        G = rho.quiver.group
        _emit(ctx, {"group": G.name, "check": kind, "ok": res["ok"], "failing_vertices": res["failing_vertices"]},
              [f"preprojective relations on {rep_path}: {'pass' if res['ok'] else 'FAIL'}",
               f"  failing vertices: {res['failing_vertices']}"], res["ok"])
        return
    G = _resolve_group(family, n, datum)
    phi = _load_datum(datum, G)
    gauges = _gauges(G, ctx.obj["seed"], trials)
    if kind == "coherence":
        direct = cv.verify_coherence(phi)
        batch = cv.verify_coherence_batch(phi, gauges)
        ok, detail = not direct and not batch, {"datum_failures": direct, "gauge_failures": batch[:20]}
    elif kind == "symmetry":
        direct = cv.verify_symmetry(phi)
        batch = cv.verify_symmetry_batch(phi, gauges)
        ok, detail = not direct and not batch, {"datum_failures": direct, "gauge_failures": batch[:20]}
    elif kind == "equivariance":
        rep = cv.check_equivariance(phi)
        bad = [k for k, v in rep.items() if not (v["equivariant"] and v["invertible"])]
        ok, detail = not bad, {"bad_blocks": bad}
    else:
        x = qv.x_symbolic()
        bad = [t for t, g in enumerate(gauges[:50])
               if not qv.check_preprojective(qv.comparison_R(cv.gauge_act(g, phi), x))["ok"]]
        direct = qv.check_preprojective(qv.comparison_R(phi, x))["failing_vertices"]
        ok, detail = not bad and not direct, {"datum_failing_vertices": direct, "gauge_failures": bad}
    _emit(ctx, {"group": G.name, "check": kind, "ok": ok, **detail},
          [f"{kind} on {G.name}: {'pass' if ok else 'FAIL'}", f"  {detail}"], ok)


@cgkit.command()
@family_opt_file
@n_opt_file
@click.option("--x", "x_text", default=None, help="x1,x2 (default symbolic X, Y).")
@click.option("--datum", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the representation JSON here (needs a numeric --x).")
@global_options
@click.pass_context
def rmap(ctx, family, n, x_text, datum, out_path):
    """The representation R(phi, x)."""
    G = _resolve_group(family, n, datum)
    if out_path and x_text is None:
        raise click.UsageError("--out needs a numeric --x")
    rho = qv.comparison_R(_load_datum(datum, G), _parse_x(x_text))
    if out_path:
        _write_json(out_path, rho.to_json())
    payload = {"group": G.name, "arrows": {a.name: str(rho[a.name]) for a in rho.quiver.arrows}}
    lines = [f"{a.name}: {a.tail} -> {a.head}  {rho[a.name]}" for a in rho.quiver.arrows]
    _emit(ctx, payload, lines)


def _parse_exponents(text: str, G: KleinianGroup) -> dict:
    out = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        lab, vals = part.split("=")
        lab = lab.strip()
        if lab not in G.nontrivial_labels():
            raise click.UsageError(f"unknown vertex {lab}")
        ex = tuple(int(v) for v in vals.split(","))
        if len(ex) != G.dim(lab):
            raise click.UsageError(f"{lab} needs {G.dim(lab)} exponents")
        out[lab] = ex
    return out


@cgkit.command()
@click.argument("mode", type=click.Choice(["king", "hm"]))
@family_opt_file
@n_opt_file
@click.option("--x", "x_text", default="1,0", show_default=True)
@click.option("--datum", type=click.Path(exists=True), default=None)
@click.option("--rep", "rep_path", type=click.Path(exists=True), default=None,
              help="king mode: test this representation JSON instead of R(phi, x).")
@click.option("--exponents", default=None, help="hm mode: 'U1=1;U2=0' or 'O1=0,1;E2=1'.")
@global_options
@click.pass_context
def stability(ctx, mode, family, n, x_text, datum, rep_path, exponents):
    """King theta_2-semistability of R(phi, x), or a Hilbert-Mumford test."""
    if rep_path is not None:
        if mode != "king":
            raise click.UsageError("--rep only applies to king mode")
        rho = _load_rep(rep_path)
        ok, dims = qv.is_theta2_semistable(rho)
        _emit(ctx, {"group": rho.quiver.group.name, "semistable": ok, "generated_dims": dims},
              [f"theta_2-semistable: {ok}", f"  subrepresentation from the special vertex: {dims}"])
        return
    G = _resolve_group(family, n, datum)
    phi = _load_datum(datum, G)
    x = _parse_x(x_text)
    if mode == "king":
        ok, dims = qv.is_theta2_semistable(qv.comparison_R(phi, x))
        _emit(ctx, {"group": G.name, "semistable": ok, "generated_dims": dims},
              [f"theta_2-semistable: {ok}", f"  subrepresentation from the special vertex: {dims}"])
        return
    if exponents is None:
        raise click.UsageError("hm mode needs --exponents")
    s = cv.OneParamSubgroup(G, _parse_exponents(exponents, G))
    r = st.hm_check(s, phi, x, cv.theta2(G))
    payload = {"group": G.name, "pairing": r.pairing, "limit_exists": r.limit_exists,
               "certificate": r.certificate, "diverging_block": r.diverging_block}
    _emit(ctx, payload, [f"pairing {r.pairing}, limit exists {r.limit_exists}, certificate {r.certificate}"])


@cgkit.command()
@click.option("--n", "n", type=int, default=None, help="Optional when --datum is given.")
@click.option("--datum", type=click.Path(exists=True), default=None)
@click.option("--x", "x_text", default=None, help="x1,x2; with no datum a random planted point is drawn.")
@global_options
@click.pass_context
def destabilize(ctx, n, datum, x_text):
    """Destabilizing one-parameter subgroup for a non-semistable A_n point."""
    G = _resolve_group("A", n, datum)
    n = G.n
    if datum is None:
        rng = random.Random(ctx.obj["seed"])
        for _ in range(1000):
            phi, x = st.random_planted_an(n, rng)
            if not qv.is_theta2_semistable(qv.comparison_R(phi, x))[0]:
                break
    else:
        phi = _load_datum(datum, G)
        x = _parse_x(x_text or "1,0")
    try:
        s = st.destabilize_an(phi, x)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    alpha, case = st.destabilizer_exponents_an(phi, x)
    r = st.hm_check(s, phi, x, cv.theta2(G))
    payload = {"group": G.name, "x": [str(v) for v in x], "alpha": list(alpha), "case": case,
               "pairing": r.pairing, "certificate": r.certificate}
    _emit(ctx, payload, [f"alpha = {alpha} ({case}), pairing {r.pairing}, certificate {r.certificate}"],
          r.certificate)


@cgkit.command()
@family_opt
@n_opt
@click.option("--k", "k", type=int, default=None, help="A_n family index 1..n+1 (default all).")
@click.option("--a", "a_text", default="1")
@click.option("--b", "b_text", default="1")
@click.option("--exponents", type=click.Choice(["corrected", "displayed"]), default="corrected")
@global_options
@click.pass_context
def nullcone(ctx, family, n, k, a_text, b_text, exponents):
    """Nullcone families: A_n all k, D_n (n = 4, 5, 6) the E2-socle family."""
    G = _group(family, n)
    a = _scalar(a_text)
    if G.family == "D":
        if n not in st.DN_SUPPORTED:
            raise click.UsageError(f"D_n nullcone needs n in {st.DN_SUPPORTED}")
        fam = st.nullcone_dn(n, a, exponents=exponents)
        payload = {"group": G.name, "matches": fam.matches, "deviation": fam.deviation,
                   "diverging_arrows": fam.notes["diverging_arrows"], "track": fam.notes["track"],
                   "g_inverse": fam.notes["g_inverse"]}
        _emit(ctx, payload, [f"{G.name} E2-socle family ({exponents} exponents): matches {fam.matches}, "
                             f"deviation {fam.deviation}, diverging {fam.notes['diverging_arrows']}"],
              fam.matches)
        return
    b = _scalar(b_text)
    ks = [k] if k is not None else list(range(1, n + 2))
    res = {kk: st.nullcone_an(n, kk, a, b) for kk in ks}
    ok = all(f.matches for f in res.values())
    payload = {"group": G.name, "families": {kk: {"exponents": st.nullcone_exponents_an(n, kk), "matches": f.matches}
                                             for kk, f in res.items()}}
    _emit(ctx, payload, [f"k = {kk}: exponents {st.nullcone_exponents_an(n, kk)}, matches {f.matches}"
                         for kk, f in res.items()], ok)


@cgkit.command()
@family_opt
@n_opt
@click.option("--variant", type=click.Choice(["normalized", "displayed"]), default="normalized")
@click.option("--verify", "verify_flag", is_flag=True,
              help="Exit 1 unless the pull-backs equal the plane generators and satisfy the relation.")
@global_options
@click.pass_context
def invariants(ctx, family, n, variant, verify_flag):
    """Pull-backs of the invariant generators to {phi0} x C^2."""
    G = _group(family, n)
    try:
        r = inv.check_stage3(G, variant)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    ok = all(r["match"].values()) and r["relation_zero"] if verify_flag else True
    lines = [f"{nm}: {p} (expected {e})" for nm, p, e in zip(r["match"], r["pulled_back"], r["expected"])]
    lines.append(f"Kleinian relation vanishes: {r['relation_zero']}")
    _emit(ctx, {"group": G.name, "variant": variant, "match": r["match"], "relation_zero": r["relation_zero"],
                "pulled_back": [str(p) for p in r["pulled_back"]]}, lines, ok)


@cgkit.command()
@family_opt
@n_opt
@global_options
@click.pass_context
def stabilizer(ctx, family, n):
    """The stabilizer of phi0 and its action on C^2."""
    G = _group(family, n)
    ok, detail = check_stabilizer(G, {})
    _emit(ctx, {"group": G.name, **detail}, [f"{G.name}: {detail}"], ok)


def _catalogue_id(text: str) -> str:
    """Case label (any letter case) or its subfigure letter a, b, c, ..."""
    by_name = {c.lower(): c for c in st.CASE_IDS}
    by_letter = {chr(ord("a") + t): c for t, c in enumerate(st.CASE_IDS)}
    key = text.lower()
    if key in by_name:
        return by_name[key]
    if key in by_letter:
        return by_letter[key]
    raise click.UsageError(f"unknown case {text!r}; known: {', '.join(st.CASE_IDS)} or letters a..{chr(ord('a') + len(st.CASE_IDS) - 1)}")


@cgkit.command("d4-catalogue")
@click.option("--case", "case_id", default=None,
              help=f"One of {', '.join(st.CASE_IDS)}, a subfigure letter, or all (default).")
@global_options
@click.pass_context
def d4_catalogue(ctx, case_id):
    """Hilbert-Mumford certificates for the D4 non-semistable catalogue."""
    ids = list(st.CASE_IDS) if case_id in (None, "all") else [_catalogue_id(case_id)]
    reps = [st.d4_catalogue_check(c) for c in ids]
    ok = all(r.passed for r in reps)
    _emit(ctx, {"cases": [asdict(r) for r in reps], "ok": ok},
          [f"{r.case_id:>4}: {'pass' if r.passed else 'FAIL'}  pairing={r.pairing} limit={r.limit_exists} "
           f"control_diverges={r.control_diverges}" + (f" contradiction={r.contradiction}" if r.contradiction else "")
           for r in reps], ok)


@cgkit.command()
@click.option("--check", "which", type=click.Choice(["membership", "psi", "commutativity", "nonextension", "all"]),
              default="all", show_default=True)
@click.option("--trials", type=int, default=100, show_default=True)
@global_options
@click.pass_context
def zcompare(ctx, which, trials):
    """Comparison with the variety Z of triples (beta, A, B) for D4."""
    sel = None if which == "all" else (which,)
    out = zcompare_checks(trials, ctx.obj["seed"], sel)
    ok = all(v["ok"] for v in out.values())
    _emit(ctx, out, [f"{k}: {'pass' if v['ok'] else 'FAIL'}" for k, v in out.items()], ok)


@cgkit.command("verify-all")
@click.option("--family", "families", multiple=True, type=click.Choice(["A", "D"], case_sensitive=False))
@click.option("--n", "n_spec", default=None, help="e.g. 2..8 or 4,6 (default: every supported n).")
@click.option("--selector", type=click.Choice(SELECTORS), default="all", show_default=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the JSON report here.")
@global_options
@click.pass_context
def verify_all(ctx, families, n_spec, selector, trials, jobs, out_path):
    """Run the verification suite and report every check."""
    if not families:
        raise click.UsageError("give at least one --family")
    groups = []
    for fam in families:
        fam = fam.upper()
        ns = parse_n_range(n_spec) if n_spec else list(A_RANGE if fam == "A" else D_RANGE)
        for n in ns:
            _group(fam, n)
            groups.append((fam, n))
    report = run_suite(selector, groups, ctx.obj["seed"], trials, jobs)
    data = report.to_json(ctx.obj["stable"])
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
    if ctx.obj["json"]:
        click.echo(json.dumps(data, indent=2, sort_keys=True))
    else:
        for c in report.checks:
            click.echo(f"{c.family}{c.n:<3} {c.name:<14} {c.status}")
        click.echo(f"overall: {data['status']}")
    ctx.exit(EXIT_FAIL if report.failed else EXIT_OK)


def main(argv=None):
    try:
        code = cgkit.main(args=argv, prog_name="cgkit", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        return sys.exit(EXIT_USAGE)
    except click.exceptions.Abort:
        return sys.exit(EXIT_USAGE)
    except InternalError as exc:
        click.echo(f"internal invariant breach: {exc}", err=True)
        return sys.exit(EXIT_INTERNAL)
    sys.exit(code or EXIT_OK)


if __name__ == "__main__":
    main()
