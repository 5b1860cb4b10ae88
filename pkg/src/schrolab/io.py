"""Plain-text tables, ``key = value`` run configs, and deterministic CSV/JSON output."""

from __future__ import annotations

import ast
import json
import math
import operator as _op
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import InvalidArgument


class TableError(InvalidArgument):
    pass


class ConfigError(InvalidArgument):
    pass


@dataclass(frozen=True, eq=False)
class Table:
    x: np.ndarray
    y: np.ndarray

    def periodic(self, period: float):
        """Linear interpolant extended with the given period."""
        x, y = self.x, self.y

        def f(t):
            return np.interp(np.asarray(t, dtype=float), x, y, period=period)
        return f

    def clamped(self):
        x, y = self.x, self.y

        def f(t):
            return np.interp(np.asarray(t, dtype=float), x, y)
        return f


def load_table(path) -> Table:
    """Two whitespace-separated numeric columns, >= 2 rows, strictly increasing x.

    Blank lines and ``#`` comments are skipped.
    """
    xs, ys = [], []
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TableError(f"{path}: cannot read table ({exc.strerror})") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TableError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise TableError(f"{path}:{lineno}: non-numeric entry in {line!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise TableError(f"{path}:{lineno}: non-finite entry")
        if xs and x <= xs[-1]:
            raise TableError(f"{path}:{lineno}: abscissae must increase strictly")
        xs.append(x)
        ys.append(y)
    if len(xs) < 2:
        raise TableError(f"{path}: need at least two rows")
    return Table(np.array(xs), np.array(ys))


# ---------------------------------------------------------------------------
# config

_BINOPS = {ast.Add: _op.add, ast.Sub: _op.sub, ast.Mult: _op.mul, ast.Div: _op.truediv,
           ast.Pow: _op.pow}
_CONSTS = {"pi": math.pi, "e": math.e}


def parse_number(text: str) -> float:
    """Evaluate a numeric literal or simple arithmetic in ``pi`` and ``e``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _CONSTS:
            return _CONSTS[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ConfigError(f"not a number: {text!r}")

    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise ConfigError(f"not a number: {text!r}") from None
    return ev(tree)


def _floats(text):
    return tuple(parse_number(t) for t in text.split(",") if t.strip())


def _ints(text):
    out = []
    for v in _floats(text):
        if v != int(v):
            raise ConfigError(f"expected integers, got {text!r}")
        out.append(int(v))
    return tuple(out)


def _int(text):
    (v,) = _ints(text) or (None,)
    if v is None:
        raise ConfigError("empty integer")
    return v


def _float(text):
    return parse_number(text)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _word(text):
    return text.strip()


@dataclass
class RunConfig:
    manifold: str = "circle"
    lengths: tuple = (1.0,)
    n: tuple = (128,)
    coupling: str = "square"
    kappa0: float = 2 * math.pi
    alpha: float = 0.25
    alphas: tuple = ()
    eps: tuple = (0.04, 0.02, 0.01)
    estimate_eps: float | None = None
    deltas: tuple = (0.2, 0.1, 0.05, 0.025)
    count: int = 4
    q: str = "v1"
    potential: str = "constant"
    amplitude: float = 0.0
    delta: float = 0.1
    smooth: bool = True
    kmax: int = 4
    trials: int = 1
    j: int = 0
    steps: int = 50
    step_size: float = 1e-3
    step_rule: str = "armijo"
    check_gradient: bool = True
    discretization: str = "fourier"
    seed: int = 0
    base_dir: str = field(default=".", metadata={"internal": True})

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def validate(self) -> "RunConfig":
        if self.manifold not in ("circle", "torus"):
            raise ConfigError(f"manifold must be circle or torus, got {self.manifold!r}")
        want = 1 if self.manifold == "circle" else 2
        if len(self.lengths) == 1 and want == 2:
            self.lengths = self.lengths * 2
        if len(self.n) == 1 and want == 2:
            self.n = self.n * 2
        if len(self.lengths) != want or len(self.n) != want:
            raise ConfigError(f"{self.manifold} needs {want} length(s) and point count(s)")
        if self.discretization not in ("fourier", "fd2"):
            raise ConfigError(f"unknown discretization {self.discretization!r}")
        for name in ("alphas", "eps", "deltas"):
            vals = np.asarray(getattr(self, name), dtype=float)
            if vals.size > 1 and not (np.all(np.diff(vals) > 0) or np.all(np.diff(vals) < 0)):
                raise ConfigError(f"{name} must be strictly monotone")
        if self.count < 1 or self.trials < 0 or self.steps < 0 or self.kmax < 1:
            raise ConfigError("count, kmax must be >= 1 and trials, steps >= 0")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        return self


_PARSERS = {
    "manifold": _word, "lengths": _floats, "n": _ints, "coupling": _word, "kappa0": _float,
    "alpha": _float, "alphas": _floats, "eps": _floats, "estimate_eps": _float,
    "deltas": _floats, "count": _int, "q": _word, "potential": _word, "amplitude": _float,
    "delta": _float, "smooth": _bool, "kmax": _int, "trials": _int, "j": _int,
    "steps": _int, "step_size": _float, "step_rule": _word, "check_gradient": _bool,
    "discretization": _word, "seed": _int,
}
_ALIASES = {"length": "lengths", "N": "n", "epsilon": "eps", "epsilons": "eps"}
assert set(_PARSERS) == {f.name for f in fields(RunConfig)} - {"base_dir"}


def parse_config(text: str, base_dir=".") -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return RunConfig(base_dir=str(base_dir), **values)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return parse_config(text, path.parent)


# ---------------------------------------------------------------------------
# output

def format_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def write_csv(path, columns, rows) -> None:
    lines = [",".join(columns)]
    lines += [",".join(format_cell(c) for c in row) for row in rows]
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path, payload) -> None:
    text = json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text + "\n")
