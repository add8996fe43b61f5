"""Command-line front end.

Subcommands: invariants, heights, lfun-check, scenario, generate, oracle.
Reports are deterministic (byte-identical for identical inputs and seeds)
and every verdict line carries the algebraic identity it checked plus a
witness.  Exit codes: 0 all-pass, 1 check failure, 2 validation or schema
error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from iwaheights.errors import (
    EnumerationCapError,
    InstanceInvalidError,
    IwaheightsError,
    PrecisionError,
    SchemaError,
)
from iwaheights.heights import (
    BlockPairing,
    HeightPairing,
    derived_height,
)
from iwaheights.instancefile import InstanceFile, parse_instance, render_generated
from iwaheights.lambdamod import (
    ElementaryShape,
    FiniteLevelModule,
    infer_invariants,
    shape_dims,
)
from iwaheights.lfun import build_synthetic, main_theorem_check, order_of_vanishing
from iwaheights.reports import Report
from iwaheights.scenarios import (
    POLARIZED,
    ScenarioInput,
    anticyclotomic_prediction,
    degeneracy_floor,
    parity_check,
)

ANCHOR_DIMS = "dim^(r) = e_r + e_(r+1) + ... + e_inf"
ANCHOR_E = "e_r = dim(S^(r)/S^(r+1)); e_inf = dim S^(inf)"
ANCHOR_PARITY = "e_r = 0 mod 2 for even r (polarized)"
ANCHOR_KERNEL = "ker h^(r) = Y^(r+1) on both sides"
ANCHOR_WELLDEF = "h computed at gamma and gamma^2 agree"
ANCHOR_SIGNS = "h^(r)(x,y) = (-1)^(r+parity) h^(r)(y,x)"
ANCHOR_GLOBAL_KERNEL = "ker h = universal norms"
ANCHOR_PRED = "e_1 = 2 min(s+,s-); e_2 = |s+ - s-| - 1"
ANCHOR_CONSISTENCY = "s+ + s- = 1 + e_1 + e_2"
ANCHOR_FLOOR = "dim ker h^(1) >= |s+ - s-|"
ANCHOR_ORACLE = "enumeration oracle agrees with the fast path"


def _load(args) -> InstanceFile:
    if not args.input:
        raise SchemaError("--input PATH is required for this command")
    text = Path(args.input).read_text()
    return parse_instance(text)


def _build_module(inst: InstanceFile, max_size: int) -> FiniteLevelModule:
    mod = inst.module
    return FiniteLevelModule(
        inst.ring,
        inst.level,
        mod["generators"],
        mod["relations"],
        enum_cap=max_size,
    )


def _build_pairing(inst: InstanceFile, max_size: int) -> BlockPairing:
    blocks = inst.pairing["blocks"]
    level = max([inst.level] + [b.level for b in blocks])
    return BlockPairing(inst.ring, blocks, enum_cap=max_size, level=level)


def _dims_from_module(M: FiniteLevelModule, r_max: int) -> list[int]:
    p = M.spec.p
    dims = []
    for r in range(1, r_max + 1):
        order = M.filtration_stage(r).order()
        e = 0
        while order > 1:
            order //= p
            e += 1
        dims.append(e)
    return dims


def cmd_invariants(args) -> Report:
    inst = _load(args)
    rep = Report("invariants")
    if inst.shape is None and inst.module is None:
        raise SchemaError("invariants needs a shape or module record")
    if inst.shape is not None:
        sh = inst.shape
        for f in sh["coprime"]:
            if not f or f[0] % inst.ring.p == 0:
                raise SchemaError(
                    "coprime shape entries need a unit constant coefficient"
                )
        shape = ElementaryShape(sh["e_infinity"], sh["j_blocks"], sh["coprime"])
        r_max = max(args.max_r, shape.max_block() + 2)
        dims = shape_dims(shape, r_max)
        prof = infer_invariants(dims)
        rep.add("dimension sequence", ANCHOR_DIMS, True, {"dims": dims})
        rep.add(
            "invariant extraction",
            ANCHOR_E,
            all(
                prof.multiplicity(i) == shape.multiplicity(i)
                for i in range(1, r_max)
            )
            and prof.e_infinity == shape.e_infinity,
            {"e": list(prof.e), "e_infinity": prof.e_infinity},
        )
        parity = parity_check(
            [shape.multiplicity(i) for i in range(1, r_max + 1)], POLARIZED
        )
        rep.add(
            "parity of even multiplicities",
            ANCHOR_PARITY,
            parity.ok,
            {"flagged": list(parity.flagged)},
        )
    if inst.module is not None:
        M = _build_module(inst, args.max_size)
        dims = _dims_from_module(M, args.max_r)
        rep.add(
            "module stage dimensions",
            ANCHOR_DIMS,
            True,
            {"log_p_stage_orders": dims},
        )
        if len(dims) >= 2 and dims[-1] == dims[-2]:
            prof = infer_invariants(dims)
            rep.add(
                "module invariants",
                ANCHOR_E,
                True,
                {"e": list(prof.e), "e_infinity": prof.e_infinity},
            )
    return rep


def cmd_heights(args) -> Report:
    inst = _load(args)
    if inst.pairing is None:
        raise SchemaError("heights needs a pairing record")
    pairing = _build_pairing(inst, args.max_size)
    try:
        pairing.validate()
    except IwaheightsError as e:
        raise InstanceInvalidError(str(e)) from None
    h1 = HeightPairing(pairing, u=1, validate=False)
    h2 = HeightPairing(pairing, u=2, validate=False)
    M = h1.module_left
    rep = Report(
        "heights",
        meta={
            "blocks": [
                {"level": b.level, "unit": b.unit, "swapped": b.swapped, "dead": b.dead}
                for b in pairing.blocks
            ],
            "symmetry": pairing.declared_symmetry(),
        },
    )

    basis = [[int(c == a) for c in range(M.dim)] for a in range(M.dim)]
    rep.add(
        "generator independence",
        ANCHOR_WELLDEF,
        all(h1.coeff(x, y) == h2.coeff(x, y) for x in basis for y in basis),
        None,
    )

    sym = pairing.declared_symmetry()
    parity = {"iota_antisymmetric": 1, "zero": 1, "iota_symmetric": 0}.get(sym)

    for r in range(1, args.max_r + 1):
        d = derived_height(h1, r)
        stage_next = {tuple(v) for v in M.filtration_stage(r + 1).elements()}
        left = d.left_kernel_elements()
        right = d.right_kernel_elements()
        gens = d.left_stage.gens()
        matrix = [[d.value(x, y).coeff for y in d.right_stage.gens()] for x in gens]
        rep.add(
            f"kernel chain r={r}",
            ANCHOR_KERNEL,
            left == stage_next and right == stage_next,
            {
                "stage_order": d.left_stage.order(),
                "kernel_order": len(left),
                "height_matrix": matrix,
            },
        )
        if parity is not None:
            ok = True
            for x in d.left_stage.gens():
                for y in d.right_stage.gens():
                    lhs = d.value(x, y).coeff
                    rhs = ((-1) ** (r + parity) * d.value(y, x).coeff) % M.spec.modulus
                    ok = ok and lhs == rhs
            rep.add(f"sign law r={r}", ANCHOR_SIGNS, ok, {"parity": parity})

    rep.add(
        "global kernel",
        ANCHOR_GLOBAL_KERNEL,
        h1.left_kernel() == M.universal_norms()
        and h1.right_kernel() == M.universal_norms(),
        {"kernel_order": h1.left_kernel().order()},
    )
    return rep


def _instance_from_file(inst_file: InstanceFile, max_size: int):
    rec = inst_file.lfun
    if rec["form"] == "builder":
        return build_synthetic(
            rec["seed"],
            p=inst_file.ring.p,
            k=inst_file.ring.k,
            global_levels=rec.get("global_levels"),
            target_ord=rec["target_ord"],
            enum_cap=max_size,
        )
    if inst_file.pairing is None:
        raise SchemaError("an explicit lfun record needs a pairing record")
    from iwaheights.lfun import instance_from_data

    duality = rec["duality"]
    return instance_from_data(
        inst_file.ring,
        inst_file.level,
        inst_file.pairing["blocks"],
        rec["local_levels"],
        rec["l_z"],
        rec["z0"],
        rec["strict"],
        duality_table=None if duality == "canonical" else duality,
        enum_cap=max_size,
    )


def cmd_lfun_check(args) -> Report:
    if args.input:
        inst_file = _load(args)
        if inst_file.lfun is None:
            raise SchemaError("lfun-check needs an lfun record or --seed/--ord")
        built = _instance_from_file(inst_file, args.max_size)
    else:
        built = build_synthetic(
            args.seed,
            p=args.p,
            k=args.k,
            target_ord=args.ord,
            enum_cap=args.max_size,
        )
    ordv = order_of_vanishing(built)
    rep = Report(
        "lfun-check",
        meta={
            "ord": "inf(>=cap)" if ordv is math.inf else int(ordv),
            "params": {k: v for k, v in sorted(built.meta.items())},
        },
    )
    rep.extend_raw(main_theorem_check(built, args.max_r))
    return rep


def cmd_scenario(args) -> Report:
    if args.input:
        inst = _load(args)
        if inst.scenario is None:
            raise SchemaError("scenario needs a scenario record or flags")
        sp, sm = inst.scenario["s_plus"], inst.scenario["s_minus"]
    else:
        if args.s_plus is None or args.s_minus is None:
            raise SchemaError("scenario needs --s-plus and --s-minus")
        sp, sm = args.s_plus, args.s_minus
    try:
        pred = anticyclotomic_prediction(ScenarioInput(sp, sm))
    except ValueError as e:
        raise InstanceInvalidError(str(e)) from None
    rep = Report("scenario", meta={"s_plus": sp, "s_minus": sm})
    e1 = pred.shape.multiplicity(1)
    e2 = pred.shape.multiplicity(2)
    rep.add(
        "predicted shape",
        ANCHOR_PRED,
        True,
        {"e_infinity": 1, "e_1": e1, "e_2": e2},
    )
    rep.add(
        "consistency identity",
        ANCHOR_CONSISTENCY,
        pred.consistency_ok and sp + sm == 1 + e1 + e2,
        {"s_total": pred.s_total},
    )
    dims = shape_dims(pred.shape, 4)
    prof = infer_invariants(dims)
    rep.add(
        "round trip through dimensions",
        ANCHOR_E,
        prof.multiplicity(1) == e1
        and prof.multiplicity(2) == e2
        and prof.e_infinity == 1,
        {"dims": dims},
    )
    rep.add(
        "degeneracy floor",
        ANCHOR_FLOOR,
        True,
        {"floor": degeneracy_floor(ScenarioInput(sp, sm))},
    )
    return rep


def cmd_generate(args) -> int:
    built = build_synthetic(
        args.seed, p=args.p, k=args.k, target_ord=args.ord, enum_cap=args.max_size
    )
    text = render_generated(built)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_oracle(args) -> Report:
    inst = _load(args)
    rep = Report("oracle")
    ran_any = False

    if inst.module is not None:
        M = _build_module(inst, args.max_size)
        if M.size > args.max_size:
            raise EnumerationCapError(
                f"module has {M.size} elements, above --max-size {args.max_size}"
            )
        ran_any = True
        els = M.elements()
        tcl = M.T_class()
        fast = {tuple(v) for v in M.torsion(tcl).elements()}
        brute = {tuple(v) for v in els if not any(M.act(tcl, v))}
        rep.add("torsion vs enumeration", ANCHOR_ORACLE, fast == brute, {"order": len(brute)})

        norms_fast = {tuple(v) for v in M.universal_norms().elements()}
        inter = set(map(tuple, els))
        from iwaheights.poles import norm_class

        n = 1
        while n <= M.level + M.spec.k + 2:
            img = {tuple(M.act(norm_class(M.spec, n, M.level), v)) for v in els}
            inter &= img
            n += 1
        rep.add(
            "universal norms vs enumeration",
            ANCHOR_ORACLE,
            norms_fast == inter,
            {"order": len(inter)},
        )

    if inst.pairing is not None:
        pairing = _build_pairing(inst, args.max_size)
        if pairing.module_left.size > args.max_size:
            raise EnumerationCapError(
                f"pairing module has {pairing.module_left.size} elements, above --max-size"
            )
        ran_any = True
        h = HeightPairing(pairing, u=1)
        M = h.module_left
        for r in range(1, args.max_r + 1):
            d = derived_height(h, r)
            stage_next = {tuple(v) for v in M.filtration_stage(r + 1).elements()}
            rep.add(
                f"h^({r}) kernels vs filtration",
                ANCHOR_ORACLE,
                d.left_kernel_elements() == stage_next
                and d.right_kernel_elements() == stage_next,
                None,
            )
        rep.add(
            "global kernel vs universal norms",
            ANCHOR_ORACLE,
            h.left_kernel() == M.universal_norms(),
            None,
        )

    if inst.lfun is not None:
        ran_any = True
        built = _instance_from_file(inst, args.max_size)
        rep.extend_raw(main_theorem_check(built, args.max_r))

    if not ran_any:
        raise SchemaError("oracle needs a module, pairing, or lfun record")
    return rep


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="instance file (strict JSON)")
    common.add_argument(
        "--format", choices=("text", "json"), default="text", help="report format"
    )
    common.add_argument("--seed", type=int, default=0, help="deterministic seed")
    common.add_argument(
        "--max-size", type=int, default=3**10, help="element cap for enumeration"
    )
    common.add_argument(
        "--max-r", type=int, default=4, help="largest derived degree to check"
    )

    parser = argparse.ArgumentParser(
        prog="iwaheights",
        description="Exact height-pairing and L-function consistency checks "
        "over Z/p^k coefficient rings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_inv = sub.add_parser("invariants", parents=[common], help="shape/module invariants")
    p_inv.set_defaults(func=cmd_invariants)

    p_h = sub.add_parser("heights", parents=[common], help="derived-height suite")
    p_h.set_defaults(func=cmd_heights)

    p_l = sub.add_parser("lfun-check", parents=[common], help="L-function consistency")
    p_l.add_argument("--ord", type=int, default=1, help="target order of vanishing")
    p_l.add_argument("--p", type=int, default=3)
    p_l.add_argument("--k", type=int, default=1)
    p_l.set_defaults(func=cmd_lfun_check)

    p_s = sub.add_parser("scenario", parents=[common], help="sign-twisted scenario")
    p_s.add_argument("--s-plus", type=int, default=None)
    p_s.add_argument("--s-minus", type=int, default=None)
    p_s.set_defaults(func=cmd_scenario)

    p_g = sub.add_parser("generate", parents=[common], help="emit a synthetic instance file")
    p_g.add_argument("--ord", type=int, default=1)
    p_g.add_argument("--p", type=int, default=3)
    p_g.add_argument("--k", type=int, default=1)
    p_g.add_argument("--output", help="write to a file instead of stdout")
    p_g.set_defaults(func=cmd_generate)

    p_o = sub.add_parser("oracle", parents=[common], help="oracle vs fast-path comparison")
    p_o.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except (EnumerationCapError, PrecisionError) as e:
        sys.stderr.write(f"resource cap: {e}\n")
        return 3
    except (SchemaError, InstanceInvalidError, ValueError) as e:
        sys.stderr.write(f"invalid input: {e}\n")
        return 2
    except IwaheightsError as e:
        sys.stderr.write(f"validation error: {e}\n")
        return 2
    if isinstance(out, int):
        return out
    sys.stdout.write(out.render(args.format) + "\n")
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
