"""Command-line surface.

Subcommands read chain or pair JSON, dispatch to the library, and write
a JSON report (stdout or --output) plus optional OFF/OBJ meshes.  All
runs are deterministic for a fixed argument vector: seeds default to 0
and every report is emitted with sorted keys.

Exit codes: 0 on success, 2 on malformed input or violated
preconditions, 3 when a solver could certify only an upper bound and
--require-exact was given.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import io_formats as iof
from .deformation import DeformConfig, deform_chain
from .dipolyhedra import (
    Dipolyhedron,
    boundary_dip,
    clamp_dip,
    cone_dip,
    default_directions,
    energy,
    pushforward_dip,
    restrict_dip,
    spanning_check,
)
from .flatnorm import SolverConfig, energy_flat_norm, flat_norm, natural_norm_upper
from .grid import BoxRegion, GridChain, GridSpec, boundary_grid, mass_grid, restrict_grid
from .plateau import diagnostics as plateau_diagnostics
from .plateau import minimize_weight, plateau_problem
from .simplicial import (
    PLMap,
    SimplicialChain,
    boundary_simplicial,
    clamp_to_cube,
    cone,
    embed_grid_chain,
    mass_simplicial,
    pushforward,
    restrict_simplicial,
)


def _fracs(text: str, n: int, what: str) -> list[Fraction]:
    parts = text.split(",")
    if len(parts) != n:
        raise ValueError(f"{what}: expected {n} comma-separated rationals")
    return [Fraction(p) for p in parts]


def _emit(args, payload, op: str) -> None:
    doc = iof.to_jsonable(payload)
    if isinstance(doc, dict):
        doc.setdefault("op", op)
        doc.setdefault("schema", iof.SCHEMA)
    text = iof.dumps_json(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    return iof.parse_input(iof.load_document(path))


def _chain_mass(obj):
    if isinstance(obj, GridChain):
        return mass_grid(obj)
    return mass_simplicial(obj)


def _solver_config(args) -> SolverConfig:
    cfg = SolverConfig()
    if getattr(args, "node_budget", None) is not None:
        cfg.node_budget = args.node_budget
    if getattr(args, "exhaustive_limit", None) is not None:
        cfg.exhaustive_limit = args.exhaustive_limit
    return cfg


def _status_exit(args, status: str) -> int:
    if status != "exact" and getattr(args, "require_exact", False):
        return 3
    return 0


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_mass(args) -> int:
    obj = _load(args.input)
    if isinstance(obj, Dipolyhedron):
        split = energy(obj)
        _emit(args, {"value": split.energy, "split": split}, "mass")
    else:
        _emit(args, {"value": _chain_mass(obj)}, "mass")
    return 0


def _cmd_boundary(args) -> int:
    obj = _load(args.input)
    if isinstance(obj, Dipolyhedron):
        _emit(args, boundary_dip(obj), "boundary")
    elif isinstance(obj, GridChain):
        _emit(args, boundary_grid(obj), "boundary")
    else:
        _emit(args, boundary_simplicial(obj), "boundary")
    return 0


def _cmd_flatnorm(args) -> int:
    obj = _load(args.input)
    if not isinstance(obj, GridChain):
        raise ValueError("flatnorm expects a grid chain")
    cert = flat_norm(obj, method=args.method, config=_solver_config(args))
    _emit(args, cert, "flatnorm")
    return _status_exit(args, cert.status)


def _cmd_eflat(args) -> int:
    obj = _load(args.input)
    if not isinstance(obj, Dipolyhedron):
        raise ValueError("eflat expects a dipolyhedron")
    cert = energy_flat_norm(obj, method=args.method, config=_solver_config(args))
    _emit(args, cert, "eflat")
    return _status_exit(args, cert.status)


def _cmd_cone(args) -> int:
    obj = _load(args.input)
    apex = tuple(_fracs(args.apex, 3, "--apex"))
    if isinstance(obj, Dipolyhedron):
        _emit(args, cone_dip(apex, obj), "cone")
    else:
        if isinstance(obj, GridChain):
            obj = embed_grid_chain(obj)
        _emit(args, cone(apex, obj), "cone")
    return 0


def _cmd_clamp(args) -> int:
    obj = _load(args.input)
    r = Fraction(args.radius)
    if isinstance(obj, Dipolyhedron):
        _emit(args, clamp_dip(r, obj), "clamp")
    else:
        if isinstance(obj, GridChain):
            obj = embed_grid_chain(obj)
        _emit(args, clamp_to_cube(obj, r), "clamp")
    return 0


def _cmd_pushforward(args) -> int:
    obj = _load(args.input)
    m = _fracs(args.matrix, 9, "--matrix")
    matrix = (tuple(m[0:3]), tuple(m[3:6]), tuple(m[6:9]))
    offset = tuple(_fracs(args.offset, 3, "--offset"))
    f = PLMap.affine(matrix, offset, Fraction(args.lipschitz))
    if isinstance(obj, Dipolyhedron):
        _emit(args, pushforward_dip(f, obj), "pushforward")
    else:
        if isinstance(obj, GridChain):
            obj = embed_grid_chain(obj)
        _emit(args, pushforward(f, obj), "pushforward")
    return 0


def _auto_grid(chain: SimplicialChain, eps: Fraction) -> GridSpec:
    los = [min(v[a] for s in chain.simplices for v in s) for a in range(3)]
    his = [max(v[a] for s in chain.simplices for v in s) for a in range(3)]
    base = [int((lo / eps).__floor__()) - 1 for lo in los]
    tops = [int((hi / eps).__ceil__()) + 1 for hi in his]
    return GridSpec(
        origin=tuple(eps * b for b in base),
        epsilon=eps,
        dims=tuple(t - b for t, b in zip(tops, base)),
    )


def _cmd_deform(args) -> int:
    obj = _load(args.input)
    if isinstance(obj, Dipolyhedron):
        raise ValueError("deform expects a chain; pairs go through the plateau pipeline")
    eps = Fraction(args.eps)
    if isinstance(obj, GridChain):
        obj = embed_grid_chain(obj)
    if obj.is_zero_presentation():
        raise ValueError("deform expects a nonempty chain")
    if args.origin and args.dims:
        grid = GridSpec(
            origin=tuple(_fracs(args.origin, 3, "--origin")),
            epsilon=eps,
            dims=tuple(int(d) for d in args.dims.split(",")),
        )
    else:
        grid = _auto_grid(obj, eps)
    cfg = DeformConfig(
        epsilon=eps,
        candidate_centers=args.centers,
        tau=Fraction(args.tau),
        seed=args.seed,
        c_max=args.cmax,
    )
    result = deform_chain(obj, grid, cfg)
    _emit(args, result, "deform")
    if args.mesh_prefix:
        stages = [("P", result.P if not isinstance(result.P, GridChain) else embed_grid_chain(result.P))]
        stages.append(("Q", result.Q))
        stages.append(("R", result.R))
        for name, chain in stages:
            if chain.k == 2:
                iof.write_off(chain, f"{args.mesh_prefix}-{name}.off")
            elif chain.k == 1:
                iof.write_obj(chain, f"{args.mesh_prefix}-{name}.obj")
    return 0


def _cmd_span_check(args) -> int:
    obj = _load(args.input)
    if not isinstance(obj, Dipolyhedron):
        raise ValueError("span-check expects a dipolyhedron")
    curve = _load(args.curve)
    if isinstance(curve, Dipolyhedron):
        raise ValueError("--curve must be a chain")
    if obj.rep == "simplicial" and isinstance(curve, GridChain):
        curve = embed_grid_chain(curve)
    dirs = default_directions(args.seed, args.dirs)
    _emit(args, spanning_check(obj, curve, dirs), "span-check")
    return 0


def _cmd_plateau(args) -> int:
    curve = _load(args.curve)
    if not isinstance(curve, GridChain):
        raise ValueError("plateau expects a grid 1-chain curve")
    if args.eps is not None and Fraction(args.eps) != curve.grid.epsilon:
        raise ValueError(
            f"--eps {args.eps} disagrees with the curve grid spacing {curve.grid.epsilon}"
        )
    lam = Fraction(args.lam) if args.lam is not None else None
    dirs = default_directions(args.seed, args.dirs)
    problem = plateau_problem(curve, lam=lam, dirs=dirs, seed=args.seed)
    solution = minimize_weight(problem, method=args.method, node_budget=args.node_budget)
    _emit(args, solution, "plateau")
    if args.mesh_prefix:
        parent = os.path.dirname(args.mesh_prefix)
        if parent:
            os.makedirs(parent, exist_ok=True)
        iof.write_off(solution.pair.B, f"{args.mesh_prefix}-B.off")
        iof.write_obj(solution.pair.C, f"{args.mesh_prefix}-C.obj")
        iof.write_obj(curve, f"{args.mesh_prefix}-gamma.obj")
    return _status_exit(args, solution.optimality)


def _cmd_restrict(args) -> int:
    obj = _load(args.input)
    vals = args.box.split(",")
    if len(vals) != 6:
        raise ValueError("--box: expected lo1,lo2,lo3,hi1,hi2,hi3")
    if isinstance(obj, Dipolyhedron) and obj.rep == "grid" or isinstance(obj, GridChain):
        lo = tuple(int(v) for v in vals[:3])
        hi = tuple(int(v) for v in vals[3:])
        box = BoxRegion(lo, hi)
    else:
        lo = tuple(Fraction(v) for v in vals[:3])
        hi = tuple(Fraction(v) for v in vals[3:])
        box = (lo, hi)
    if isinstance(obj, Dipolyhedron):
        inside, report = restrict_dip(obj, box)
        _emit(args, {"inside": inside, "report": report}, "restrict")
    else:
        if isinstance(obj, GridChain):
            inside, outside = restrict_grid(obj, box)
        else:
            inside, outside = restrict_simplicial(obj, lo, hi)
        _emit(
            args,
            {
                "inside": inside,
                "outside": outside,
                "mass_inside": _chain_mass(inside),
                "mass_outside": _chain_mass(outside),
            },
            "restrict",
        )
    return 0


def _cmd_natural_norm(args) -> int:
    obj = _load(args.input)
    if not isinstance(obj, GridChain):
        raise ValueError("natural-norm expects a grid chain")
    decomp = natural_norm_upper(obj, args.levels, translation_radius=args.radius)
    _emit(args, decomp, "natural-norm")
    return _status_exit(args, decomp.status)


def _cmd_diagnostics(args) -> int:
    obj = _load(args.input)
    if not isinstance(obj, Dipolyhedron):
        raise ValueError("diagnostics expects a dipolyhedron")
    _emit(args, plateau_diagnostics(obj), "diagnostics")
    return 0


# ---------------------------------------------------------------------------
# parser


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="filmlab",
        description="mod-2 films, flat norms, deformation, and Plateau search",
    )
    sub = top.add_subparsers(dest="subcommand", required=True)

    def add(name, handler, help_text, with_input=True):
        p = sub.add_parser(name, help=help_text)
        if with_input:
            p.add_argument("input", help="chain or dipolyhedron JSON file")
        p.add_argument("-o", "--output", help="report path (default stdout)")
        p.add_argument("--require-exact", action="store_true",
                       help="exit 3 unless the result is certified exact")
        p.set_defaults(handler=handler)
        return p

    add("mass", _cmd_mass, "mass of a chain or energy of a pair")
    add("boundary", _cmd_boundary, "boundary chain/pair")

    p = add("flatnorm", _cmd_flatnorm, "flat norm of a grid chain with certificate")
    p.add_argument("--method", choices=("exhaustive", "bnb"), default="exhaustive")
    p.add_argument("--node-budget", type=int)
    p.add_argument("--exhaustive-limit", type=int)

    p = add("eflat", _cmd_eflat, "energy flat norm of a grid pair with certificate")
    p.add_argument("--method", choices=("exhaustive", "bnb"), default="exhaustive")
    p.add_argument("--node-budget", type=int)
    p.add_argument("--exhaustive-limit", type=int)

    p = add("cone", _cmd_cone, "cone from an apex")
    p.add_argument("--apex", default="0,0,0", help="rational point x,y,z")

    p = add("clamp", _cmd_clamp, "clamp onto the cube |x|_sup <= r")
    p.add_argument("--radius", required=True, help="rational half-side r")

    p = add("pushforward", _cmd_pushforward, "affine image with verified stretch bound")
    p.add_argument("--matrix", required=True, help="nine rationals, row major")
    p.add_argument("--offset", default="0,0,0")
    p.add_argument("--lipschitz", required=True, help="declared bound (rational)")

    p = add("deform", _cmd_deform, "push a chain onto a grid with certified residue")
    p.add_argument("--eps", required=True, help="grid spacing (rational)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--centers", type=int, default=16, help="candidate centers per cell")
    p.add_argument("--tau", default="1/8", help="clearance fraction in (0, 1/2)")
    p.add_argument("--cmax", type=int, default=100, help="constant ceiling for the report")
    p.add_argument("--origin", help="grid origin x,y,z (default: fit the chain)")
    p.add_argument("--dims", help="grid cell counts a,b,c")
    p.add_argument("--mesh-prefix", help="write PREFIX-P/Q/R meshes")

    p = add("span-check", _cmd_span_check, "shadow-spanning verdict for a pair")
    p.add_argument("--curve", required=True, help="closed curve JSON")
    p.add_argument("--dirs", type=int, default=10, help="extra oblique directions")
    p.add_argument("--seed", type=int, default=0)

    p = add("plateau", _cmd_plateau, "least-weight spanning film", with_input=False)
    p.add_argument("--curve", required=True, help="grid 1-cycle JSON")
    p.add_argument("--lambda", dest="lam", help="energy budget (default: twice cone energy)")
    p.add_argument("--eps", help="expected grid spacing; errors if it disagrees")
    p.add_argument("--method", choices=("exhaustive", "bnb", "local"), default="exhaustive")
    p.add_argument("--dirs", type=int, default=10, help="extra oblique directions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--node-budget", type=int)
    p.add_argument("--mesh-prefix", help="write PREFIX-B.off, PREFIX-C.obj, PREFIX-gamma.obj")

    p = add("restrict", _cmd_restrict, "part inside an axis box, with measures")
    p.add_argument("--box", required=True,
                   help="lo1,lo2,lo3,hi1,hi2,hi3 (lattice for grid, world otherwise)")

    p = add("natural-norm", _cmd_natural_norm, "translation-structured cost bound")
    p.add_argument("--levels", type=int, default=0, help="merge levels r (0..3)")
    p.add_argument("--radius", type=int, default=2, help="translation radius in cells")

    add("diagnostics", _cmd_diagnostics, "loop decomposition and film components")
    return top


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.handler(args)
    except (iof.SchemaError, ValueError, OSError) as exc:
        print(f"filmlab {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
