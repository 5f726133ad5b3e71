"""Command-line front end.

Exit status: 0 on success, 1 on I/O or parse failure, 2 when the input
violates a precondition (not normal, not idempotent, ...) or when ``verify``
finds a failing check.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
from typing import Callable

import numpy as np

from . import density as dens
from . import factorization as fz
from .errors import MatrixParseError, TooManyRoots, ValidationError
from .gates import GATE_NAMES, Frame, build_from_frame, gate
from .idempotent import SymmetricIdempotent, decompose_pure, rank_of
from .matfile import parse_matrix
from .numkit import ToleranceModel, as_matrix, classify, fro
from .report import Report, ReportWriter

COMMANDS = ("classify", "factor", "pinv", "power", "roots", "idem-decompose", "density", "gate", "build-frame", "verify")


def _read_matrix(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def _write_input(w: ReportWriter, A: np.ndarray) -> None:
    w.record("size", A.shape[0], A.shape[1])
    w.matrix("input", A)


def _factor_block(w: ReportWriter, A: np.ndarray, F: fz.CanonicalFactorization) -> None:
    w.factorization(F)
    w.record("reconstruction_residual", fro(fz.reconstruct(F) - A))


def cmd_classify(args, tol, w):
    A = as_matrix(_read_matrix(args.input), square=True)
    w.header("classify")
    _write_input(w, A)
    w.flags(classify(A, tol))


def cmd_factor(args, tol, w):
    A = as_matrix(_read_matrix(args.input), square=True)
    F = fz.factor_normal(A, tol)
    w.header("factor")
    _write_input(w, A)
    w.flags(F.class_hint)
    _factor_block(w, A, F)


def cmd_pinv(args, tol, w):
    A = as_matrix(_read_matrix(args.input), square=True)
    F = fz.factor_normal(A, tol)
    w.header("pinv")
    _write_input(w, A)
    w.flags(F.class_hint)
    _factor_block(w, A, F)
    w.matrix("pinv_row", fz.pseudo_inverse(F))


def cmd_power(args, tol, w):
    if args.m is None or args.m < 1:
        raise ValidationError("power needs --m with a positive integer")
    A = as_matrix(_read_matrix(args.input), square=True)
    F = fz.factor_normal(A, tol)
    P = fz.power(F, args.m)
    w.header("power")
    _write_input(w, A)
    w.record("exponent", args.m)
    w.factorization(P)
    w.matrix("result_row", fz.reconstruct(P))


def cmd_roots(args, tol, w):
    if args.n is None or args.n < 1:
        raise ValidationError("roots needs --n with a positive integer")
    A = as_matrix(_read_matrix(args.input), square=True)
    F = fz.factor_normal(A, tol)
    roots = fz.all_nth_roots(F, args.n, args.max_roots)
    w.header("roots")
    _write_input(w, A)
    w.record("order", args.n)
    w.factorization(F)
    w.record("root_count", len(roots))
    for idx, (sel, R) in enumerate(roots):
        w.comment(f"root {idx}: branches {' '.join(map(str, sel.branch_indices)) or '-'} residual {sel.residual_index}")
        w.record("root", idx, len(sel.branch_indices), *sel.branch_indices, sel.residual_index)
        w.factorization(R, "root_", idx)
        w.matrix("root_row", fz.reconstruct(R), idx)


def cmd_idem(args, tol, w):
    E = SymmetricIdempotent(_read_matrix(args.input), tol)
    d = decompose_pure(E)
    w.header("idem-decompose")
    _write_input(w, E.matrix)
    w.record("rank", rank_of(E))
    for j, (p, st) in enumerate(zip(d.parts, d.st_indices)):
        w.record("part", j, st)
        w.matrix("part_row", p.matrix, j)


def cmd_density(args, tol, w):
    rho = dens.DensityMatrix(_read_matrix(args.input), tol)
    form = dens.canonical_density(rho)
    w.header("density")
    _write_input(w, rho.matrix)
    for j, (p, block) in enumerate(zip(form.weights, form.blocks)):
        w.record("weight", j, p, len(block))
        for k, (part, st) in enumerate(zip(block.parts, block.st_indices)):
            w.record("block_part", j, k, st)
            w.matrix("block_part_row", part.matrix, j, k)
    w.record("kernel", rank_of(form.residual))
    w.matrix("kernel_row", form.residual.matrix)
    w.record("weight_rank_sum", dens.weight_rank_sum(form))
    w.matrix("pinv_row", dens.density_pseudo_inverse(rho))


def cmd_gate(args, tol, w):
    if not args.gate:
        raise ValidationError(f"gate needs --gate NAME (one of {', '.join(GATE_NAMES)})")
    params = {} if args.theta is None else {"theta": args.theta}
    g = gate(args.gate, params, tol)
    w.header("gate")
    w.record("gate", g.name)
    for k, v in g.parameters.items():
        w.record("param", k, v)
    _write_input(w, g.matrix)
    w.flags(classify(g.matrix, tol))
    _factor_block(w, g.matrix, g.published_factorization)


def cmd_build_frame(args, tol, w):
    M = _read_matrix(args.input)
    if M.shape[0] < 2:
        raise ValidationError("frame file needs an eigenvalue row followed by at least one vector row")
    alphas = tuple(complex(a) for a in M[0])
    vectors = tuple(M[1:, j].copy() for j in range(M.shape[1]))
    F = build_from_frame(Frame(vectors, alphas), tol)
    A = fz.reconstruct(F)
    w.header("build-frame")
    _write_input(w, A)
    w.flags(classify(A, tol))
    _factor_block(w, A, F)


# ---------------------------------------------------------------- verify


class Checks:
    def __init__(self):
        self.results: list[tuple[str, bool, str]] = []

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.results.append((name, bool(ok), detail))

    def guard(self, name: str, fn: Callable[[], tuple[bool, str]]) -> None:
        try:
            ok, detail = fn()
        except (ValidationError, MatrixParseError, ValueError, KeyError, IndexError) as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        self.add(name, ok, detail)

    @property
    def ok(self) -> bool:
        return all(r[1] for r in self.results)


def _bound(A: np.ndarray, tol: ToleranceModel) -> float:
    return 10 * tol.eps_struct * max(1.0, fro(A))


def _residual(name, value, bound):
    return value <= bound, f"{name} {value:.3e} <= {bound:.3e}"


def moore_penrose(A: np.ndarray, P: np.ndarray) -> list[float]:
    """Residuals of the four Moore-Penrose identities."""
    return [
        fro(A @ P @ A - A),
        fro(P @ A @ P - P),
        fro((A @ P).conj().T - A @ P),
        fro((P @ A).conj().T - P @ A),
    ]


def _mp_bound(A, P, tol):
    return 10 * tol.eps_struct * max(1.0, fro(A), fro(P)) * max(1.0, fro(A) * fro(P))


def _check_factorization(c: Checks, rep: Report, A: np.ndarray, tol: ToleranceModel, prefix="", scope=(), label=""):
    holder = {}

    def parse():
        holder["F"] = rep.factorization(prefix, *scope, tol=tol)
        return True, f"{len(holder['F'].factors)} factors"

    c.guard(f"{label}parse_factorization", parse)
    if "F" not in holder:
        return None
    F = holder["F"]
    n = F.size
    c.guard(f"{label}reconstruction", lambda: _residual("|sum a_j E_j + F0 - A|", fro(fz.reconstruct(F) - A), _bound(A, tol)))
    c.guard(f"{label}product_form", lambda: _residual("|prod(I - E_j + a_j E_j) - A|", fro(fz.product_form(F) - A), _bound(A, tol)))

    def family():
        Es = [f.idempotent.matrix for f in F.factors] + [F.residual.matrix]
        worst = max((fro(Es[i] @ Es[j]) for i, j in itertools.combinations(range(len(Es)), 2)), default=0.0)
        total = fro(sum(Es) - np.eye(n))
        ranks = sum(rank_of(f.idempotent) for f in F.factors) + rank_of(F.residual)
        ok = worst <= _bound(np.eye(n), tol) and total <= _bound(np.eye(n), tol) and ranks == n
        return ok, f"max |E_i E_j| {worst:.3e}, |sum E - I| {total:.3e}, rank sum {ranks}/{n}"

    c.guard(f"{label}complete_orthogonal_family", family)

    def distinct():
        vals = F.eigenvalues
        scale = max([1.0] + [abs(a) for a in vals])
        gaps = [abs(a - b) for a, b in itertools.combinations(vals, 2)]
        ones = [abs(a - 1) for a in vals]
        ok = all(g > tol.eps_cluster * scale for g in gaps) and all(d > tol.eps_cluster * scale for d in ones)
        return ok, f"{len(vals)} eigenvalues, none equal to 1"

    c.guard(f"{label}distinct_eigenvalues", distinct)

    def action():
        worst = max([fro(A @ f.idempotent.matrix - f.eigenvalue * f.idempotent.matrix) for f in F.factors]
                    + [fro(A @ F.residual.matrix - F.residual.matrix)])
        return _residual("max |A E_j - a_j E_j|", worst, _bound(A, tol))

    c.guard(f"{label}action_law", action)

    def mp():
        P = fz.pseudo_inverse(F)
        res = moore_penrose(A, P)
        return max(res) <= _mp_bound(A, P, tol), "Moore-Penrose residuals " + " ".join(f"{r:.3e}" for r in res)

    c.guard(f"{label}moore_penrose", mp)
    return F


def verify_report(rep: Report, tol: ToleranceModel | None = None) -> Checks:
    tol = tol or rep.tol()
    c = Checks()
    A = rep.matrix("input")
    cmd = rep.command
    if cmd == "classify":
        def flags():
            got = {name: bool(int(v)) for name, v in rep.get("flag")}
            want = classify(A, tol).as_dict()
            return got == want, f"recorded {got}"
        c.guard("flags", flags)
    elif cmd in ("factor", "pinv", "gate", "build-frame"):
        F = _check_factorization(c, rep, A, tol)
        if cmd == "pinv" and F is not None:
            def pinv():
                P = rep.matrix("pinv_row")
                res = moore_penrose(A, P)
                return max(res) <= _mp_bound(A, P, tol), "recorded pinv residuals " + " ".join(f"{r:.3e}" for r in res)
            c.guard("recorded_pinv", pinv)
    elif cmd == "power":
        m = int(rep.scalar("exponent")[0])
        Am = np.linalg.matrix_power(A, m)
        _check_factorization(c, rep, Am, tol, label="power_")
        c.guard("result_matches_A^m", lambda: _residual("|result - A^m|", fro(rep.matrix("result_row") - Am),
                                                        10 * m * tol.eps_struct * max(1.0, fro(A)) ** m))
    elif cmd == "roots":
        n = int(rep.scalar("order")[0])
        _check_factorization(c, rep, A, tol)
        count = int(rep.scalar("root_count")[0])
        F = rep.factorization(tol=tol)
        expected = fz.count_roots(F, n)
        c.add("root_count", count == expected, f"{count} roots, expected {expected}")
        mats = []
        for idx in range(count):
            R = rep.matrix("root_row", str(idx))
            mats.append(R)
            _check_factorization(c, rep, R, tol, "root_", (str(idx),), f"root{idx}_")
            c.guard(f"root{idx}_power", lambda R=R: _residual(
                f"|R^{n} - A|", fro(np.linalg.matrix_power(R, n) - A), 1e-7 * max(1.0, fro(A))))
        worst = min((fro(a - b) for a, b in itertools.combinations(mats, 2)), default=math.inf)
        c.add("roots_distinct", worst > tol.eps_cluster, f"min pairwise distance {worst:.3e}")
    elif cmd == "idem-decompose":
        parts = [(int(st), rep.matrix("part_row", j)) for j, st in rep.get("part")]
        n = A.shape[0]
        total = sum((p for _, p in parts), np.zeros_like(A))
        c.guard("sum_of_parts", lambda: _residual("|sum parts - E|", fro(total - A), _bound(A, tol)))
        c.add("rank", len(parts) == int(rep.scalar("rank")[0]) == round(np.trace(A).real),
              f"{len(parts)} parts, trace {np.trace(A).real:.12g}")

        def rank_one():
            worst = max((max(fro(p @ p - p), fro(p - p.conj().T), abs(np.trace(p) - 1)) for _, p in parts), default=0.0)
            return _residual("max rank-1 projector defect", worst, _bound(np.eye(n), tol))

        c.guard("rank_one_projectors", rank_one)
        sts = [st for st, _ in parts]
        c.add("st_increasing", all(a < b for a, b in zip(sts, sts[1:])), f"st indices {sts}")

        def st_match():
            actual = []
            for _, p in parts:
                norms = np.linalg.norm(p, axis=0)
                actual.append(int(np.flatnonzero(norms > tol.eps_cluster)[0]))
            return actual == sts, f"leading zero columns {actual}"

        c.guard("st_matches_parts", st_match)
        c.guard("pairwise_orthogonal", lambda: _residual(
            "max |E_i E_j|",
            max((fro(a @ b) for (_, a), (_, b) in itertools.combinations(parts, 2)), default=0.0),
            _bound(np.eye(n), tol)))
    elif cmd == "density":
        n = A.shape[0]
        blocks = []
        for j, p, cnt in rep.get("weight"):
            parts = [(int(st), rep.matrix("block_part_row", j, k)) for jj, k, st in rep.get("block_part") if jj == j]
            blocks.append((float(p), parts))
        total = sum((p * sum(m for _, m in parts) for p, parts in blocks), np.zeros_like(A))
        c.guard("reconstruction", lambda: _residual("|sum p_j F_j - rho|", fro(total - A), _bound(A, tol)))
        wsum = sum(p * len(parts) for p, parts in blocks)
        c.add("weight_rank_sum", abs(wsum - 1) <= 10 * tol.eps_struct * n, f"sum p_j rank F_j = {wsum:.17g}")
        ws = [p for p, _ in blocks]
        c.add("weights_descending", all(a > b for a, b in zip(ws, ws[1:])), f"weights {ws}")
        c.add("st_increasing", all(all(a < b for a, b in zip(s, s[1:])) for s in ([st for st, _ in parts] for _, parts in blocks)),
              "st indices strictly increase in every block")

        def action():
            worst = max((fro(A @ sum(m for _, m in parts) - p * sum(m for _, m in parts)) for p, parts in blocks), default=0.0)
            return _residual("max |rho F_j - p_j F_j|", worst, _bound(A, tol))

        c.guard("action_law", action)

        def pinv():
            P = rep.matrix("pinv_row")
            res = moore_penrose(A, P)
            return max(res) <= _mp_bound(A, P, tol), "Moore-Penrose residuals " + " ".join(f"{r:.3e}" for r in res)

        c.guard("moore_penrose", pinv)
    else:
        c.add("known_command", False, f"cannot verify a {cmd!r} report")
    return c


def cmd_verify(args, tol, w):
    with open(args.input, encoding="utf-8") as fh:
        rep = Report.parse(fh.read())
    override = args.tol_struct is not None or args.tol_cluster is not None
    checks = verify_report(rep, tol if override else None)
    w.header("verify")
    w.record("verified", rep.command)
    for name, ok, detail in checks.results:
        w.lines.append(f"{'PASS' if ok else 'FAIL'} {name}" + (f" # {detail}" if detail else ""))
    w.record("summary", sum(r[1] for r in checks.results), len(checks.results))
    return 0 if checks.ok else 2


HANDLERS = {
    "classify": cmd_classify,
    "factor": cmd_factor,
    "pinv": cmd_pinv,
    "power": cmd_power,
    "roots": cmd_roots,
    "idem-decompose": cmd_idem,
    "density": cmd_density,
    "gate": cmd_gate,
    "build-frame": cmd_build_frame,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="basicfactor", description="Basic-matrix factorization of normal matrices.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="matrix file (or report file for verify)")
    p.add_argument("--n", type=int, help="root order for 'roots'")
    p.add_argument("--m", type=int, help="exponent for 'power'")
    p.add_argument("--gate", help="catalog gate name for 'gate'")
    p.add_argument("--theta", type=float, help="angle parameter (radians) for phase/rotation gates")
    p.add_argument("--tol-struct", type=float, dest="tol_struct")
    p.add_argument("--tol-cluster", type=float, dest="tol_cluster")
    p.add_argument("--max-roots", type=int, default=fz.DEFAULT_MAX_ROOTS, dest="max_roots")
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        tol = ToleranceModel(
            args.tol_struct if args.tol_struct is not None else 1e-10,
            args.tol_cluster if args.tol_cluster is not None else 1e-7,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    if args.command != "gate" and not args.input:
        print(f"error: {args.command} needs --input FILE", file=stderr)
        return 1
    w = ReportWriter(args.format, tol)
    try:
        status = HANDLERS[args.command](args, tol, w) or 0
    except OSError as exc:
        print(f"error: cannot read input: {exc}", file=stderr)
        return 1
    except MatrixParseError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    except TooManyRoots as exc:
        print(f"error: TooManyRoots: {exc.count} roots exceed --max-roots {exc.cap}", file=stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 2
    stdout.write(w.text())
    return status


if __name__ == "__main__":
    sys.exit(main())
