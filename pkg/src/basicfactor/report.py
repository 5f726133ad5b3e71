"""Line-oriented report format shared by every CLI command.

One record per line: a keyword followed by fields. Complex numbers are two
fields (real, imaginary). ``text`` separates fields with spaces and prints
values below ``eps_struct`` as 0; ``tsv`` uses tabs and keeps every digit.
Lines starting with ``#`` are comments. Reports carry the input matrix, so
``verify`` needs nothing else.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from .errors import MatrixParseError
from .factorization import BasicFactor, CanonicalFactorization, principal_arg
from .idempotent import SymmetricIdempotent
from .numkit import DEFAULT_TOL, ToleranceModel


class ReportWriter:
    def __init__(self, fmt: str = "text", tol: ToleranceModel = DEFAULT_TOL):
        if fmt not in ("text", "tsv"):
            raise ValueError(f"unknown format {fmt!r}")
        self.fmt = fmt
        self.tol = tol
        self.lines: list[str] = []

    def _num(self, x: float) -> str:
        x = float(x)
        if self.fmt == "text" and abs(x) < self.tol.eps_struct:
            x = 0.0
        if x == 0.0:
            x = 0.0  # drop the sign of -0.0
        return f"{x:.17g}"

    def _field(self, v) -> list[str]:
        if isinstance(v, (bool, np.bool_)):
            return [str(int(v))]
        if isinstance(v, (int, np.integer)):
            return [str(int(v))]
        if isinstance(v, (complex, np.complexfloating)):
            return [self._num(v.real), self._num(v.imag)]
        if isinstance(v, (float, np.floating)):
            return [self._num(v)]
        return [str(v)]

    def comment(self, text: str) -> None:
        self.lines.append(f"# {text}")

    def record(self, key: str, *values) -> None:
        fields = [key]
        for v in values:
            fields.extend(self._field(v))
        sep = " " if self.fmt == "text" else "\t"
        self.lines.append(sep.join(fields))

    def matrix(self, key: str, M, *scope) -> None:
        M = np.asarray(M, dtype=complex)
        for i, row in enumerate(M):
            self.record(key, *scope, i, *[complex(z) for z in row])

    def header(self, command: str) -> None:
        self.comment(f"basicfactor {command} report")
        self.record("report", command)
        self.record("tolerance", self.tol.eps_struct, self.tol.eps_cluster)

    def flags(self, report) -> None:
        for name, value in report.as_dict().items():
            self.record("flag", name, value)

    def factorization(self, F: CanonicalFactorization, prefix: str = "", *scope) -> None:
        self.record(prefix + "factor_count", *scope, len(F.factors))
        for j, f in enumerate(F.factors):
            a = complex(f.eigenvalue)
            arg = principal_arg(a) if a != 0 else 0.0
            self.record(prefix + "factor", *scope, j, a, abs(a), arg, f.rank)
            self.matrix(prefix + "factor_row", f.idempotent.matrix, *scope, j)
        self.record(prefix + "residual", *scope, F.residual_rank)
        self.matrix(prefix + "residual_row", F.residual.matrix, *scope)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


class Report:
    """Parsed report: records grouped by keyword, in file order."""

    def __init__(self, records: dict[str, list[list[str]]]):
        self.records = records

    @classmethod
    def parse(cls, text: str) -> "Report":
        records: dict[str, list[list[str]]] = defaultdict(list)
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, *fields = line.split()
            records[key].append(fields)
        if "report" not in records:
            raise MatrixParseError("not a report: missing 'report' record")
        return cls(dict(records))

    @property
    def command(self) -> str:
        return self.records["report"][0][0]

    def tol(self) -> ToleranceModel:
        if "tolerance" not in self.records:
            return DEFAULT_TOL
        s, c = self.records["tolerance"][0]
        return ToleranceModel(float(s), float(c))

    def get(self, key: str) -> list[list[str]]:
        return self.records.get(key, [])

    def scalar(self, key: str, *scope: str) -> list[str]:
        for fields in self.get(key):
            if fields[: len(scope)] == list(scope):
                return fields[len(scope):]
        raise MatrixParseError(f"missing record {key!r} {' '.join(scope)}")

    def matrix(self, key: str, *scope: str) -> np.ndarray:
        rows = {}
        k = len(scope)
        for fields in self.get(key):
            if fields[:k] != list(scope):
                continue
            idx = int(fields[k])
            nums = [float(x) for x in fields[k + 1:]]
            if len(nums) % 2:
                raise MatrixParseError(f"record {key!r} has an odd number of numeric fields")
            rows[idx] = [complex(nums[i], nums[i + 1]) for i in range(0, len(nums), 2)]
        if not rows:
            raise MatrixParseError(f"missing matrix {key!r} {' '.join(scope)}")
        if sorted(rows) != list(range(len(rows))):
            raise MatrixParseError(f"matrix {key!r} has missing rows")
        return np.array([rows[i] for i in range(len(rows))], dtype=complex)

    def factor_records(self, prefix: str = "", *scope: str) -> list[tuple[complex, np.ndarray, int]]:
        out = []
        k = len(scope)
        for fields in self.get(prefix + "factor"):
            if fields[:k] != list(scope):
                continue
            j = fields[k]
            re_, im = float(fields[k + 1]), float(fields[k + 2])
            rank = int(fields[k + 5])
            out.append((complex(re_, im), self.matrix(prefix + "factor_row", *scope, j), rank))
        return out

    def factorization(self, prefix: str = "", *scope: str, tol: ToleranceModel | None = None) -> CanonicalFactorization:
        """Rebuild the factorization exactly as recorded (no re-clustering)."""
        tol = tol or self.tol()
        residual = self.matrix(prefix + "residual_row", *scope)
        factors = tuple(
            BasicFactor(SymmetricIdempotent(0.5 * (E + E.conj().T), _loose(tol)), a)
            for a, E, _ in self.factor_records(prefix, *scope)
        )
        return CanonicalFactorization(
            residual.shape[0], factors, SymmetricIdempotent(0.5 * (residual + residual.conj().T), _loose(tol)), None, tol
        )


def _loose(tol: ToleranceModel) -> ToleranceModel:
    # text reports round sub-eps_struct entries to 0; allow for that when re-reading
    return ToleranceModel(min(10 * tol.eps_struct, tol.eps_cluster / 2), tol.eps_cluster)
