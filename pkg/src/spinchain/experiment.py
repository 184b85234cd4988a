"""Experiment files: an INI-like grammar with line/column diagnostics.

Example::

    [chain]
    n = 4
    topology = linear
    alpha = 1, 1, 1

    [walk]
    kind = continuous
    tau = 0.5
    steps = 3
    initial = 1

Sections are ``[chain]``, ``[walk]``, ``[circuit]``, ``[output]`` and
``[verify]``. Lists are comma separated, complex literals look like
``0.5-2i``, and ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import gates as _gates
from .linalg import unitarity_residual

MAX_DIAGNOSTICS = 20
UNITARY_TOL = 1e-10

SECTIONS = ("chain", "walk", "circuit", "output", "verify")
KEYS = {
    "chain": ("n", "topology", "hamiltonian", "axis", "alpha", "beta", "delta"),
    "walk": ("kind", "n", "tau", "steps", "coin", "boundary", "initial"),
    "circuit": ("layer",),
    "output": ("format", "path", "index"),
    "verify": ("max_n", "tol"),
}
CHOICES = {
    ("chain", "topology"): ("linear", "ring"),
    ("chain", "hamiltonian"): ("spec", "adjacency", "perfect_transfer"),
    ("chain", "axis"): ("x", "y", "z"),
    ("walk", "kind"): ("continuous", "coined", "circuit"),
    ("walk", "boundary"): ("cyclic", "reflecting"),
    ("output", "format"): ("csv", "json"),
    ("output", "index"): ("position", "scalar"),
}
GATE_ARITY = {"swap": 0, "signed_swap": 0, "xy": 1, "chiral": 1, "phase_z": 2, "unitary": 16}
NAMED_COINS = {
    "hadamard": ((1 / np.sqrt(2), 1 / np.sqrt(2)), (1 / np.sqrt(2), -1 / np.sqrt(2))),
    "identity": ((1, 0), (0, 1)),
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    line: int
    column: int
    message: str
    expected: tuple[str, ...] = ()

    def __str__(self) -> str:
        exp = f" (expected: {', '.join(self.expected)})" if self.expected else ""
        return f"{self.line}:{self.column}: {self.code}: {self.message}{exp}"


class ExperimentError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("\n".join(map(str, diagnostics)))
        self.diagnostics = diagnostics

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


@dataclass(frozen=True)
class ChainConfig:
    n: int
    topology: str = "linear"
    hamiltonian: Optional[str] = None
    axis: str = "x"
    alpha: tuple[float, ...] = ()
    beta: tuple[float, ...] = ()
    delta: tuple[float, ...] = ()


@dataclass(frozen=True)
class WalkSection:
    kind: str = "continuous"
    n: Optional[int] = None
    tau: float = 1.0
    steps: int = 1
    coin: str | tuple[complex, ...] = "hadamard"
    boundary: str = "cyclic"
    initial: tuple[int, ...] = ()


@dataclass(frozen=True)
class GateSpec:
    name: str
    params: tuple[complex, ...]
    position: int

    def matrix(self) -> np.ndarray:
        if self.name == "unitary":
            return np.array(self.params, dtype=complex).reshape(4, 4)
        return _gates.builtin_gate(self.name, *(p.real for p in self.params))


@dataclass(frozen=True)
class OutputSection:
    format: str = "csv"
    path: Optional[str] = None
    index: str = "position"


@dataclass(frozen=True)
class VerifySection:
    max_n: int = 10
    tol: float = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    chain: Optional[ChainConfig] = None
    walk: WalkSection = field(default_factory=WalkSection)
    circuit: tuple[tuple[GateSpec, ...], ...] = ()
    output: OutputSection = field(default_factory=OutputSection)
    verify: Optional[VerifySection] = None

    @property
    def source(self) -> str:
        return self.walk.kind

    @property
    def n(self) -> int:
        if self.walk.kind == "coined" and self.walk.n is not None:
            return self.walk.n
        return self.chain.n  # type: ignore[union-attr]

    def coin_matrix(self) -> np.ndarray:
        coin = self.walk.coin
        if isinstance(coin, str):
            return np.array(NAMED_COINS[coin], dtype=complex)
        return np.array(coin, dtype=complex).reshape(2, 2)


# ---------------------------------------------------------------- literals

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"^(?:(?P<re>{_NUM})(?P<im>[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i"
    rf"|(?P<pure>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i"
    rf"|(?P<real>{_NUM}))$"
)


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi`` (``i`` alone is 1i)."""
    s = text.strip().replace(" ", "")
    m = _COMPLEX_RE.match(s)
    if not m or not s:
        raise ValueError(f"not a complex literal: {text!r}")

    def coef(part: str) -> float:
        return float(part + "1") if part in ("", "+", "-") else float(part)

    if m.group("real") is not None:
        return complex(float(m.group("real")), 0.0)
    if m.group("pure") is not None:
        return complex(0.0, coef(m.group("pure")))
    return complex(float(m.group("re")), coef(m.group("im")))


def format_float(x: float) -> str:
    return repr(float(x))


def format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return format_float(z.real)
    sign = "-" if z.imag < 0 else "+"
    return f"{format_float(z.real)}{sign}{format_float(abs(z.imag))}i"


# ---------------------------------------------------------------- parser


@dataclass
class _Entry:
    key: str
    value: str
    line: int
    col: int  # column of the value
    key_col: int


def _split_items(value: str, start_col: int) -> list[tuple[str, int]]:
    """Split on top-level commas, returning (item, column) pairs."""
    items, depth, cur, cur_col = [], 0, [], None
    for i, ch in enumerate(value):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append(("".join(cur), cur_col if cur_col is not None else start_col + i))
            cur, cur_col = [], None
            continue
        if cur_col is None and not ch.isspace():
            cur_col = start_col + i
        cur.append(ch)
    items.append(("".join(cur), cur_col if cur_col is not None else start_col + len(value)))
    return [(s.strip(), c) for s, c in items]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.diags: list[Diagnostic] = []
        self.sections: dict[str, dict[str, _Entry]] = {}
        self.section_lines: dict[str, int] = {}
        self.layers: list[_Entry] = []

    def error(self, code: str, line: int, col: int, message: str, expected=()) -> None:
        if len(self.diags) < MAX_DIAGNOSTICS:
            self.diags.append(Diagnostic(code, line, col, message, tuple(expected)))

    # -- lexical pass
    def scan(self) -> None:
        current: Optional[str] = None
        skipping = False
        for lineno, raw in enumerate(self.text.splitlines(), start=1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            indent = len(line) - len(line.lstrip())
            stripped = line.strip()
            if stripped.startswith("["):
                m = re.fullmatch(r"\[\s*([A-Za-z_]+)\s*\]", stripped)
                if not m:
                    self.error("E-SYNTAX", lineno, indent + 1, f"malformed section header {stripped!r}", ["[name]"])
                    current, skipping = None, True
                    continue
                name = m.group(1)
                if name not in SECTIONS:
                    self.error("E-SECTION", lineno, indent + 2, f"unknown section [{name}]", SECTIONS)
                    current, skipping = None, True
                    continue
                if name in self.sections:
                    self.error("E-DUPLICATE", lineno, indent + 2, f"section [{name}] appears twice")
                current, skipping = name, False
                self.sections.setdefault(name, {})
                self.section_lines.setdefault(name, lineno)
                continue
            if skipping:
                continue
            if current is None:
                self.error("E-SYNTAX", lineno, indent + 1, "key outside of any section", ["[section]"])
                skipping = True
                continue
            if "=" not in line:
                self.error("E-SYNTAX", lineno, indent + 1, f"expected 'key = value', got {stripped!r}", ["="])
                continue
            key_part, value_part = line.split("=", 1)
            key = key_part.strip()
            value = value_part.strip()
            value_col = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
            if key not in KEYS[current]:
                self.error("E-KEY", lineno, indent + 1, f"unknown key {key!r} in [{current}]", KEYS[current])
                continue
            entry = _Entry(key, value, lineno, value_col, indent + 1)
            if current == "circuit":
                self.layers.append(entry)
                continue
            if key in self.sections[current]:
                self.error("E-DUPLICATE", lineno, indent + 1, f"key {key!r} repeated in [{current}]")
                continue
            self.sections[current][key] = entry

    # -- typed accessors; each returns None after recording a diagnostic
    def _get(self, section: str, key: str) -> Optional[_Entry]:
        return self.sections.get(section, {}).get(key)

    def integer(self, section: str, key: str, default=None, minimum=None):
        e = self._get(section, key)
        if e is None:
            return default
        try:
            v = int(e.value)
        except ValueError:
            self.error("E-NUMBER", e.line, e.col, f"{key} must be an integer, got {e.value!r}", ["integer"])
            return None
        if minimum is not None and v < minimum:
            self.error("E-RANGE", e.line, e.col, f"{key} = {v} is below the minimum {minimum}", [f">= {minimum}"])
            return None
        return v

    def real(self, section: str, key: str, default=None, positive=False):
        e = self._get(section, key)
        if e is None:
            return default
        try:
            v = float(e.value)
        except ValueError:
            self.error("E-NUMBER", e.line, e.col, f"{key} must be a real number, got {e.value!r}", ["real"])
            return None
        if not np.isfinite(v):
            self.error("E-NUMBER", e.line, e.col, f"{key} must be finite", ["finite real"])
            return None
        if positive and v <= 0:
            self.error("E-RANGE", e.line, e.col, f"{key} must be positive", ["> 0"])
            return None
        return v

    def choice(self, section: str, key: str, default=None):
        e = self._get(section, key)
        if e is None:
            return default
        options = CHOICES[(section, key)]
        if e.value not in options:
            self.error("E-VALUE", e.line, e.col, f"invalid {key} {e.value!r}", options)
            return None
        return e.value

    def reals(self, section: str, key: str):
        e = self._get(section, key)
        if e is None:
            return None
        out, ok = [], True
        for item, col in _split_items(e.value, e.col):
            try:
                v = float(item)
                if not np.isfinite(v):
                    raise ValueError
                out.append(v)
            except ValueError:
                self.error("E-NUMBER", e.line, col, f"non-numeric entry {item!r} in {key}", ["real"])
                ok = False
        return tuple(out) if ok else False

    def ints(self, section: str, key: str):
        e = self._get(section, key)
        if e is None:
            return None
        out, ok = [], True
        for item, col in _split_items(e.value, e.col):
            try:
                out.append(int(item))
            except ValueError:
                self.error("E-NUMBER", e.line, col, f"non-integer entry {item!r} in {key}", ["integer"])
                ok = False
        return tuple(out) if ok else False

    def arity(self, e: _Entry, key: str, got: int, want: int, what: str) -> bool:
        if got != want:
            self.error("E-ARITY", e.line, e.col, f"{key} has {got} entries, expected {want} ({what})", [str(want)])
            return False
        return True

    # -- sections
    def chain(self) -> Optional[ChainConfig]:
        if "chain" not in self.sections:
            return None
        line = self.section_lines["chain"]
        before = len(self.diags)
        n = self.integer("chain", "n", minimum=2)
        if self._get("chain", "n") is None:
            self.error("E-MISSING", line, 1, "[chain] requires key 'n'", ["n"])
        topology = self.choice("chain", "topology", "linear")
        axis = self.choice("chain", "axis", "x")
        alpha = self.reals("chain", "alpha")
        beta = self.reals("chain", "beta")
        delta = self.reals("chain", "delta")
        ham = self.choice("chain", "hamiltonian", "spec" if alpha else None)
        if n is None or len(self.diags) > before:
            return None
        links = n - 1 if topology == "linear" else n
        if ham == "spec":
            if alpha is None:
                self.error("E-MISSING", line, 1, "hamiltonian = spec requires 'alpha'", ["alpha"])
                return None
        ok = all(v is not False for v in (alpha, beta, delta))
        for key, vals, want in (("alpha", alpha, links), ("beta", beta, links), ("delta", delta, n)):
            if vals:
                e = self._get("chain", key)
                ok &= self.arity(e, key, len(vals), want, f"{topology} chain, n={n}")
        if ham == "perfect_transfer" and topology == "ring":
            e = self._get("chain", "topology")
            self.error("E-VALUE", e.line, e.col, "perfect_transfer is defined on linear chains", ["linear"])
            ok = False
        if not ok:
            return None
        return ChainConfig(
            n,
            topology,
            ham,
            axis,
            alpha or (),
            beta or (0.0,) * links if ham == "spec" else beta or (),
            delta or (0.0,) * n if ham == "spec" else delta or (),
        )

    def coin(self):
        e = self._get("walk", "coin")
        if e is None:
            return "hadamard"
        if e.value in NAMED_COINS:
            return e.value
        items = _split_items(e.value, e.col)
        vals = []
        for item, col in items:
            try:
                vals.append(parse_complex(item))
            except ValueError:
                self.error(
                    "E-NUMBER", e.line, col, f"coin entry {item!r} is not a complex literal",
                    ["a+bi", *NAMED_COINS],
                )
                return None
        if not self.arity(e, "coin", len(vals), 4, "2x2 matrix, row-major"):
            return None
        res = unitarity_residual(np.array(vals).reshape(2, 2))
        if res > UNITARY_TOL:
            self.error("E-UNITARY", e.line, e.col, f"coin is not unitary (residual {res:.3e})", ["unitary 2x2"])
            return None
        return tuple(vals)

    def walk(self) -> Optional[WalkSection]:
        kind = self.choice("walk", "kind", "continuous")
        n = self.integer("walk", "n", minimum=2)
        tau = self.real("walk", "tau", 1.0)
        steps = self.integer("walk", "steps", 1, minimum=0)
        boundary = self.choice("walk", "boundary", "cyclic")
        coin = self.coin()
        initial = self.ints("walk", "initial")
        if None in (kind, tau, steps, boundary, coin) or initial is False:
            return None
        if self._get("walk", "n") is not None and n is None:
            return None
        return WalkSection(kind, n, tau, steps, coin, boundary, initial or ())

    def gate(self, item: str, line: int, col: int) -> Optional[GateSpec]:
        m = re.fullmatch(r"([a-z_]+)\s*(?:\((.*)\))?\s*@\s*(\S+)", item)
        if not m:
            self.error("E-SYNTAX", line, col, f"malformed gate {item!r}", ["name(params)@position"])
            return None
        name, args, pos = m.group(1), m.group(2), m.group(3)
        if name not in GATE_ARITY:
            self.error("E-GATE", line, col, f"unknown gate {name!r}", tuple(GATE_ARITY))
            return None
        params = []
        if args is not None and args.strip():
            for a, acol in _split_items(args, col + item.index("(") + 1):
                try:
                    params.append(parse_complex(a))
                except ValueError:
                    self.error("E-NUMBER", line, acol, f"gate parameter {a!r} is not numeric", ["real", "a+bi"])
                    return None
        if len(params) != GATE_ARITY[name]:
            self.error(
                "E-ARITY", line, col, f"gate {name} takes {GATE_ARITY[name]} parameter(s), got {len(params)}",
                [str(GATE_ARITY[name])],
            )
            return None
        if name != "unitary" and any(p.imag != 0 for p in params):
            self.error("E-NUMBER", line, col, f"gate {name} takes real parameters", ["real"])
            return None
        try:
            position = int(pos)
        except ValueError:
            self.error("E-NUMBER", line, col + item.index("@") + 1, f"gate position {pos!r} is not an integer", ["integer"])
            return None
        spec = GateSpec(name, tuple(params), position)
        g = spec.matrix()
        res = unitarity_residual(g)
        if res > UNITARY_TOL:
            self.error("E-UNITARY", line, col, f"gate {name} is not unitary (residual {res:.3e})", ["unitary 4x4"])
            return None
        cls = _gates.classify_gate(g)
        if cls is not _gates.GateClass.ADMISSIBLE_MATCHGATE:
            self.error(
                "E-ADMISSIBLE", line, col, f"gate {name} is {cls.value}, only admissible matchgates can be simulated",
                [_gates.GateClass.ADMISSIBLE_MATCHGATE.value],
            )
            return None
        return spec

    def circuit(self, n: Optional[int]):
        layers = []
        for e in self.layers:
            layer, used = [], set()
            for item, col in _split_items(e.value, e.col):
                g = self.gate(item, e.line, col)
                if g is None:
                    continue
                if n is not None and not 1 <= g.position <= n - 1:
                    self.error("E-RANGE", e.line, col, f"gate position {g.position} outside 1..{n - 1}", [f"1..{n - 1}"])
                    continue
                if {g.position, g.position + 1} & used:
                    self.error("E-OVERLAP", e.line, col, f"gate at {g.position} overlaps another gate in this layer")
                    continue
                used |= {g.position, g.position + 1}
                layer.append(g)
            layers.append(tuple(layer))
        return tuple(layers)

    def output(self) -> OutputSection:
        fmt = self.choice("output", "format", "csv")
        index = self.choice("output", "index", "position")
        e = self._get("output", "path")
        path = e.value if e is not None and e.value not in ("", "-") else None
        return OutputSection(fmt or "csv", path, index or "position")

    def verify(self) -> Optional[VerifySection]:
        if "verify" not in self.sections:
            return None
        max_n = self.integer("verify", "max_n", 10, minimum=1)
        tol = self.real("verify", "tol", 1e-9, positive=True)
        return VerifySection(max_n or 10, tol or 1e-9)

    # -- cross-section checks
    def check_source(self, cfg: ExperimentConfig) -> None:
        kind = cfg.walk.kind
        kind_entry = self._get("walk", "kind")
        line, col = (kind_entry.line, kind_entry.col) if kind_entry else (self.section_lines.get("walk", 1), 1)
        chain = cfg.chain
        has_ham = chain is not None and chain.hamiltonian is not None
        has_circuit = any(cfg.circuit)
        sources = {"continuous": has_ham, "circuit": has_circuit, "coined": kind == "coined"}
        active = [k for k, v in sources.items() if v]
        if kind == "continuous" and not has_ham:
            self.error("E-SOURCE", line, col, "continuous walk needs a [chain] Hamiltonian (alpha or hamiltonian = ...)")
        elif kind == "circuit" and not has_circuit:
            self.error("E-SOURCE", line, col, "kind = circuit needs at least one [circuit] layer")
        elif len(active) != 1:
            self.error(
                "E-SOURCE", line, col,
                f"exactly one evolution source required, found: {', '.join(active)}", ("continuous", "circuit", "coined"),
            )

    def check_initial(self, cfg: ExperimentConfig) -> None:
        e = self._get("walk", "initial")
        line = self.section_lines.get("walk", 1)
        if e is None:
            self.error("E-MISSING", line, 1, "[walk] requires key 'initial'", ["initial"])
            return
        init = cfg.walk.initial
        if cfg.walk.kind == "coined":
            if self.arity(e, "initial", len(init), 2, "coin value, position"):
                c, k = init
                if c not in (0, 1) or not 0 <= k < cfg.n:
                    self.error("E-RANGE", e.line, e.col, f"coined start ({c}, {k}) out of range", ["0|1", f"0..{cfg.n - 1}"])
            return
        n = cfg.n
        if not init:
            self.error("E-ARITY", e.line, e.col, "initial needs at least one node", [">= 1"])
        for k in init:
            if not 1 <= k <= n:
                self.error("E-RANGE", e.line, e.col, f"initial node {k} outside 1..{n}", [f"1..{n}"])
        if len(set(init)) != len(init) or list(init) != sorted(init):
            self.error("E-VALUE", e.line, e.col, "initial nodes must be strictly increasing", ["k1 < k2 < ..."])

    def run(self) -> ExperimentConfig:
        self.scan()
        chain = self.chain()
        walk = self.walk()
        n = chain.n if chain is not None else None
        circuit = self.circuit(n)
        output = self.output()
        verify = self.verify()
        if walk is not None:
            if walk.kind == "coined" and walk.n is None:
                self.error("E-MISSING", self.section_lines.get("walk", 1), 1, "coined walk requires [walk] n", ["n"])
            elif walk.kind != "coined" and chain is None and "chain" not in self.sections:
                self.error("E-MISSING", self.section_lines.get("walk", 1), 1, "a [chain] section with n is required", ["[chain]"])
        if self.diags:
            raise ExperimentError(self.diags)
        cfg = ExperimentConfig(chain, walk, circuit, output, verify)  # type: ignore[arg-type]
        self.check_source(cfg)
        if not self.diags:
            self.check_initial(cfg)
        if self.diags:
            raise ExperimentError(self.diags)
        return cfg


def parse_experiment(text: str) -> ExperimentConfig:
    """Parse and validate an experiment file; raises ``ExperimentError``."""
    return _Parser(text).run()


def format_experiment(cfg: ExperimentConfig) -> str:
    """Canonical text form; ``parse_experiment`` of the result equals ``cfg``."""
    out = []
    if cfg.chain is not None:
        c = cfg.chain
        out += ["[chain]", f"n = {c.n}", f"topology = {c.topology}"]
        if c.hamiltonian is not None:
            out.append(f"hamiltonian = {c.hamiltonian}")
        out.append(f"axis = {c.axis}")
        for key in ("alpha", "beta", "delta"):
            vals = getattr(c, key)
            if vals:
                out.append(f"{key} = {', '.join(map(format_float, vals))}")
        out.append("")
    w = cfg.walk
    out += ["[walk]", f"kind = {w.kind}"]
    if w.n is not None:
        out.append(f"n = {w.n}")
    out += [f"tau = {format_float(w.tau)}", f"steps = {w.steps}"]
    coin = w.coin if isinstance(w.coin, str) else ", ".join(map(format_complex, w.coin))
    out += [f"coin = {coin}", f"boundary = {w.boundary}"]
    if w.initial:
        out.append(f"initial = {', '.join(map(str, w.initial))}")
    out.append("")
    if cfg.circuit:
        out.append("[circuit]")
        for layer in cfg.circuit:
            items = []
            for g in layer:
                args = ""
                if g.params:
                    fmt = format_complex if g.name == "unitary" else (lambda p: format_float(p.real))
                    args = "(" + ", ".join(fmt(p) for p in g.params) + ")"
                items.append(f"{g.name}{args}@{g.position}")
            out.append(f"layer = {', '.join(items)}")
        out.append("")
    o = cfg.output
    out += ["[output]", f"format = {o.format}", f"index = {o.index}"]
    if o.path is not None:
        out.append(f"path = {o.path}")
    if cfg.verify is not None:
        out += ["", "[verify]", f"max_n = {cfg.verify.max_n}", f"tol = {format_float(cfg.verify.tol)}"]
    return "\n".join(out) + "\n"


def with_verify(cfg: ExperimentConfig, max_n: Optional[int], tol: Optional[float]) -> ExperimentConfig:
    v = cfg.verify or VerifySection()
    return replace(
        cfg,
        verify=VerifySection(max_n if max_n is not None else v.max_n, tol if tol is not None else v.tol),
    )
