"""Command-line front-end: partition, splits, maximal-abelian, decompose, verify.

Artifacts are JSON (or a text table mirroring the construction figures);
writes are atomic (temp file + rename). Exit codes: 0 success, 1 verification
failure, 2 invalid input, 3 internal decomposition failure. Log level comes
from the CARTAN_KAK_LOG environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from typing import List, Optional

from . import serialize
from .cartan import (
    build_cartan_split,
    build_decomposition_sequence,
    enumerate_maximal_abelian,
    enumerate_t_choices,
)
from .errors import CartanKakError, DecompositionError, InvalidMatrixError
from .kak import recursive_decompose
from .partition import (
    AbelianSpace,
    QuotientAlgebra,
    build_quotient_algebra,
    standard_basis,
    standard_word_center,
    verify_closure,
)

log = logging.getLogger("cartankak")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_DECOMPOSITION_FAILED = 3


def _setup_logging():
    level = os.environ.get("CARTAN_KAK_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cartankak-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, output: Optional[str]):
    if output:
        _atomic_write(output, text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        with open(path) as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidMatrixError(f"cannot read JSON from {path}: {exc}") from exc


def _center_space(spec: str, dim: int) -> AbelianSpace:
    if spec == "intrinsic":
        return standard_word_center(dim)
    obj = _load_json(spec)
    items = obj["generators"] if isinstance(obj, dict) else obj
    return serialize.space_from_json(items)


def _build_qa(dim: int, center_spec: str) -> QuotientAlgebra:
    from .errors import NotAbelianError, NotMaximalError
    from .partition import standard_quotient_algebra

    if center_spec == "intrinsic":
        # Falls back to the lambda representation for dimensions whose word
        # basis is not closed (two or more odd-prime sites).
        return standard_quotient_algebra(dim)
    center = _center_space(center_spec, dim)
    try:
        center.validate(1e-10)
        return build_quotient_algebra(center, standard_basis(dim))
    except NotAbelianError as exc:
        raise NotAbelianError(f"center not abelian: {exc}") from exc
    except NotMaximalError as exc:
        raise NotMaximalError(f"center not maximal: {exc}") from exc


def _qa_table(qa: QuotientAlgebra) -> str:
    lines = [
        f"quotient algebra of su({qa.dim}): {len(qa.pairs)} conjugate pairs, "
        f"center of {len(qa.center)} generators",
        "center:",
    ]
    for g in qa.center.generators:
        lines.append(f"    {g.label_str or '<matrix>'}")
    for pair in qa.pairs:
        lab = pair.binary_label or "?"
        width = max(len(g.label_str or "<matrix>") for g in pair.w.generators)
        width = max(width, len(f"W_{lab}")) + 1
        lines.append(f"{f'W_{lab}':<{width + 4}}| W^_{lab}")
        for gw, gh in zip(pair.w.generators, pair.w_hat.generators):
            left = gw.label_str or "<matrix>"
            right = gh.label_str or "<matrix>"
            lines.append(f"    {left:<{width}}|     {right}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_partition(args) -> int:
    qa = _build_qa(args.dim, args.center)
    report = verify_closure(qa)
    if not report.passed:
        log.error("constructed algebra failed closure (max residual %.2e)",
                  report.max_residual)
        return EXIT_VERIFY_FAILED
    if args.format == "table":
        _emit(_qa_table(qa), args.output)
    else:
        _emit(serialize.dumps(serialize.qa_to_json(qa)), args.output)
    log.info("partition: %d pairs, closure residual %.2e",
             len(qa.pairs), report.max_residual)
    return EXIT_OK


def cmd_splits(args) -> int:
    qa = _build_qa(args.dim, args.center)
    if args.choice_bits:
        split = build_cartan_split(qa, args.choice_bits)
        payload = serialize.split_to_json(split)
    else:
        payload = []
        for bits in enumerate_t_choices(qa):
            split = build_cartan_split(qa, bits)
            payload.append(serialize.split_to_json(split))
        log.info("enumerated %d splits", len(payload))
    _emit(serialize.dumps(payload), args.output)
    return EXIT_OK


def cmd_maximal_abelian(args) -> int:
    members = enumerate_maximal_abelian(args.dim, args.shells)
    payload = [
        {"index": i, "generators": serialize.space_to_json(m)}
        for i, m in enumerate(members)
    ]
    _emit(serialize.dumps({"dim": args.dim, "shells": args.shells,
                           "count": len(members), "members": payload}), args.output)
    print(f"maximal abelian subalgebras of su({args.dim}) "
          f"within {args.shells} shells: {len(members)}", file=sys.stderr)
    return EXIT_OK


def _sequence_for(args, qa: QuotientAlgebra):
    if args.sequence and args.sequence != "default":
        return serialize.sequence_from_json(_load_json(args.sequence), qa)
    choices = None
    if args.choice_bits:
        choices = args.choice_bits.split(",")
    return build_decomposition_sequence(qa, choices)


def cmd_decompose(args) -> int:
    if not args.input:
        log.error("decompose needs --input with a unitary matrix JSON")
        return EXIT_INVALID_INPUT
    u = serialize.matrix_from_json(_load_json(args.input))
    qa = _build_qa(args.dim, args.center)
    seq = _sequence_for(args, qa)
    try:
        fact = recursive_decompose(u, seq, seed=args.seed)
    except DecompositionError as exc:
        log.error("decomposition failed: %s", exc)
        return EXIT_DECOMPOSITION_FAILED
    _emit(serialize.dumps(serialize.factorization_to_json(fact)), args.output)
    print(
        f"factors={len(fact.factors)} local={fact.local_count()} "
        f"nonlocal={fact.nonlocal_count()} "
        f"reconstruction_error={fact.reconstruction_error:.3e}",
        file=sys.stderr,
    )
    return EXIT_OK if fact.reconstruction_error < 1e-8 else EXIT_DECOMPOSITION_FAILED


def cmd_verify(args) -> int:
    if not args.input:
        log.error("verify needs --input with a quotient-algebra JSON")
        return EXIT_INVALID_INPUT
    qa = serialize.qa_from_json(_load_json(args.input))
    report = verify_closure(qa)
    payload = {
        "passed": report.passed,
        "max_residual": report.max_residual,
        "failures": [
            {"kind": c.kind, "left": c.left, "right": c.right,
             "target": c.target, "residual": c.residual}
            for c in report.failures()
        ],
        "cartan_splits": [],
    }
    splits_ok = True
    if qa.labeled:
        for bits in enumerate_t_choices(qa):
            try:
                build_cartan_split(qa, bits).validate()
                payload["cartan_splits"].append({"choice_bits": bits, "ok": True})
            except CartanKakError as exc:
                splits_ok = False
                payload["cartan_splits"].append(
                    {"choice_bits": bits, "ok": False, "error": str(exc)}
                )
    _emit(serialize.dumps(payload), args.output)
    return EXIT_OK if report.passed and splits_ok else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cartankak",
        description="Quotient algebras of su(N) and recursive KAK gate factorization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_dim=True):
        if needs_dim:
            p.add_argument("--dim", type=int, required=True, help="dimension N of su(N)")
        p.add_argument("--center", default="intrinsic",
                       help="'intrinsic' or a JSON file with center generators")
        p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
        p.add_argument("--input", help="input file (matrix or algebra JSON)")
        p.add_argument("--output", help="output file (atomic write); stdout otherwise")
        p.add_argument("--format", choices=("json", "table"), default="json")

    p = sub.add_parser("partition", help="construct a quotient algebra")
    common(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("splits", help="enumerate or build Cartan splits")
    common(p)
    p.add_argument("--choice-bits", help="selector bits; all splits when omitted")
    p.set_defaults(func=cmd_splits)

    p = sub.add_parser("maximal-abelian", help="shell-extend maximal abelian subalgebras")
    common(p)
    p.add_argument("--shells", type=int, default=2, help="number of extension shells")
    p.set_defaults(func=cmd_maximal_abelian)

    p = sub.add_parser("decompose", help="factor a unitary into gate exponentials")
    common(p)
    p.add_argument("--sequence", default="default",
                   help="'default' or a decomposition-sequence JSON file")
    p.add_argument("--choice-bits",
                   help="comma-separated per-level selector bits, e.g. 000,00,0")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="check closure and Cartan conditions")
    common(p, needs_dim=False)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CartanKakError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input ({exc})", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
