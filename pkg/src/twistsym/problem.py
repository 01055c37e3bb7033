"""Problem files and the task runner behind the command line.

A problem file is a line-oriented block format::

    # comments start with '#'
    [context]
    q = 1
    p = 1
    n = 2
    params = c

    [vectorfields]
    X = xi: 0 | phi: 1

    [twist]
    kind = lambda
    lambda = c

    [gauge]
    beta = x
    Gamma =
        1 ; x
        0 ; 1

    [equations]
    u_[2] = c*u_[1] + (u_[1] - c*u)^2

    [oracle]
    seed = 0

    [tasks]
    check-symmetry X
    reduce X eta=x zeta="u_[1] - c*u"

Matrices are written with an empty right-hand side followed by indented
rows whose entries are separated by ';'.
"""

from __future__ import annotations

import os
import shlex
from dataclasses import dataclass, field, replace

from .expr import ZERO, Expr, to_text
from .fields import (
    InvolutionError,
    ReconstructionError,
    VectorField,
    check_involution,
)
from .gauge import (
    GaugeError,
    verify_chi_diagram,
    verify_gauge_lambda,
    verify_gauge_mu,
    verify_gauge_sigma,
)
from .jet import JetContext, JetError, OdeSystem, SolvedSystem, TruncationError
from .matrix import MatrixExpr, ShapeError
from .numeric import DEFAULT, EqualityConfig, SingularOnBox
from .parser import ParseDiagnostic, parse_expression
from .prolong import (
    CompatibilityError,
    NotApplicable,
    check_maurer_cartan,
    commutator_identity_report,
    prolong,
    prolong_chi,
    prolong_lambda,
    prolong_mu,
    prolong_sigma,
)
from .reduction import (
    IBDPError,
    InvariantChain,
    ReductionError,
    check_strong_symmetry,
    check_symmetry,
    find_first_invariants,
    ibdp_next,
    reduce_adapted,
    reduce_by_invariants,
)

VERBS = (
    "prolong",
    "check-symmetry",
    "check-strong",
    "check-mc",
    "gauge-verify",
    "invariants",
    "ibdp-extend",
    "reduce",
    "involution",
    "commutator-identity",
)
SECTIONS = ("context", "vectorfields", "twist", "gauge", "equations", "oracle", "tasks")
TWIST_KINDS = ("standard", "lambda", "mu", "sigma", "chi")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

# outcomes of a task that are verdicts rather than crashes
DOMAIN_ERRORS = (
    JetError,
    TruncationError,
    ShapeError,
    ReductionError,
    IBDPError,
    InvolutionError,
    ReconstructionError,
    GaugeError,
    CompatibilityError,
    NotApplicable,
    SingularOnBox,
    ZeroDivisionError,
)


class TaskInputError(ValueError):
    """A task refers to something the problem does not declare."""


@dataclass
class Line:
    text: str
    offset: int  # offset of the first character in the file
    number: int


@dataclass
class Task:
    verb: str
    positional: list
    options: dict
    text: str
    line: int


@dataclass
class Problem:
    source: str
    name: str
    ctx: JetContext
    fields: dict = field(default_factory=dict)
    twist_kind: str = "standard"
    twist: dict = field(default_factory=dict)
    gauge: dict = field(default_factory=dict)
    system: object = None
    tasks: list = field(default_factory=list)
    oracle: EqualityConfig = DEFAULT


# -- file parsing --------------------------------------------------------------------


def _diag(source: str, offset: int, message: str, expected=()) -> ParseDiagnostic:
    return ParseDiagnostic(message, offset, source, expected)


def _split_lines(source: str) -> list[Line]:
    out = []
    off = 0
    for k, raw in enumerate(source.split("\n")):
        text = raw.split("#", 1)[0].rstrip()
        out.append(Line(text, off, k + 1))
        off += len(raw) + 1
    return out


def _sections(source: str) -> dict:
    sections: dict = {}
    current = None
    for ln in _split_lines(source):
        stripped = ln.text.strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise _diag(source, ln.offset + len(ln.text), "expected ']'", {"]"})
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise _diag(source, ln.offset + ln.text.index("["), f"unknown section [{name}]", SECTIONS)
            if name in sections:
                raise _diag(source, ln.offset, f"duplicate section [{name}]")
            current = sections[name] = []
            continue
        if current is None:
            raise _diag(source, ln.offset, "content before the first section header", {"["})
        current.append(ln)
    return sections


def _key_value(source: str, ln: Line):
    if "=" not in ln.text:
        raise _diag(source, ln.offset + len(ln.text), "expected '='", {"="})
    k, v = ln.text.split("=", 1)
    key = k.strip()
    vstart = ln.text.index("=") + 1
    vstart += len(v) - len(v.lstrip())
    return key, v.strip(), ln.offset + vstart


def _expr(source: str, text: str, offset: int, ctx: JetContext) -> Expr:
    # keep offsets exact: the text is a slice of the source starting at offset
    try:
        return parse_expression(text, ctx)
    except ParseDiagnostic as d:
        raise _diag(source, offset + d.offset, d.message, d.expected) from None


def _pieces(text: str, sep: str, offset: int):
    """Split on a separator, keeping the file offset of each stripped piece."""
    out = []
    pos = 0
    for part in text.split(sep):
        lead = len(part) - len(part.lstrip())
        out.append((part.strip(), offset + pos + lead))
        pos += len(part) + 1
    return out


def _block_values(source: str, lines: list[Line], ctx: JetContext) -> dict:
    """name = expr, or name = followed by indented matrix rows."""
    out = {}
    i = 0
    while i < len(lines):
        ln = lines[i]
        if ln.text[:1].isspace():
            raise _diag(source, ln.offset, "unexpected indented line")
        key, val, voff = _key_value(source, ln)
        i += 1
        if val:
            out[key] = (val, voff)
            continue
        rows = []
        while i < len(lines) and lines[i].text[:1].isspace():
            r = lines[i]
            lead = len(r.text) - len(r.text.lstrip())
            rows.append([_expr(source, t, o, ctx) for t, o in _pieces(r.text.strip(), ";", r.offset + lead)])
            i += 1
        if not rows:
            raise _diag(source, voff, f"matrix {key!r} has no rows")
        if any(len(r) != len(rows[0]) for r in rows):
            raise _diag(source, voff, f"matrix {key!r} is not rectangular")
        out[key] = MatrixExpr.of(rows)
    return out


def _parse_context(source: str, lines) -> JetContext:
    vals = {}
    for ln in lines:
        k, v, off = _key_value(source, ln)
        vals[k] = (v, off)
    for req in ("q", "p", "n"):
        if req not in vals:
            raise _diag(source, 0, f"[context] needs {req}")
    nums = {}
    for k in ("q", "p", "n"):
        v, off = vals[k]
        if not v.isdigit() or int(v) < 1:
            raise _diag(source, off, f"{k} must be a positive integer", {"integer"})
        nums[k] = int(v)
    params = ()
    if "params" in vals:
        v, off = vals["params"]
        params = tuple(s for s in v.replace(",", " ").split() if s)
    unknown = set(vals) - {"q", "p", "n", "params"}
    if unknown:
        k = sorted(unknown)[0]
        raise _diag(source, vals[k][1], f"unknown context key {k!r}", {"q", "p", "n", "params"})
    try:
        return JetContext(nums["q"], nums["p"], nums["n"], params)
    except JetError as e:
        raise _diag(source, vals.get("params", ("", 0))[1], str(e)) from None


def _parse_field(source: str, ln: Line, ctx: JetContext):
    name, val, voff = _key_value(source, ln)
    parts = {}
    for chunk, coff in _pieces(val, "|", voff):
        if ":" not in chunk:
            raise _diag(source, coff, "expected 'xi:' or 'phi:'", {"xi:", "phi:"})
        label, body = chunk.split(":", 1)
        label = label.strip()
        if label not in ("xi", "phi"):
            raise _diag(source, coff, f"unknown component {label!r}", {"xi", "phi"})
        boff = coff + chunk.index(":") + 1
        parts[label] = [(_expr(source, t, o, ctx), o) for t, o in _pieces(body, ";", boff)]
    xi = parts.get("xi", [(ZERO, voff)] * ctx.q)
    phi = parts.get("phi", [(ZERO, voff)] * ctx.p)
    if len(xi) != ctx.q:
        raise _diag(source, voff, f"field {name} needs {ctx.q} xi component(s)")
    if len(phi) != ctx.p:
        raise _diag(source, voff, f"field {name} needs {ctx.p} phi component(s)")
    for e, o in xi + phi:
        if ctx.order_of(e) >= ctx.n:
            raise _diag(source, o, "coefficient order leaves no room below the truncation order")
    return name, VectorField(ctx, tuple(e for e, _ in xi), tuple(e for e, _ in phi), name)


def _parse_equations(source: str, lines, ctx: JetContext):
    eqs = []
    for ln in lines:
        lhs, rhs, roff = _key_value(source, ln)
        loff = ln.offset + len(ln.text) - len(ln.text.lstrip())
        c = ctx.coordinate(lhs)
        if c is None or c[0] != "u" or sum(c[2]) == 0 or ctx.canonical_name(lhs) != lhs:
            raise _diag(source, loff, "left-hand side must be a derivative coordinate", {"u_[k]"})
        F = _expr(source, rhs, roff, ctx)
        eqs.append((c[1], c[2], F, roff))
    if not eqs:
        return None
    ctx_e = ctx.at_least(max(sum(J) for _, J, _, _ in eqs))
    comps = [a for a, _, _, _ in eqs]
    try:
        if ctx.q == 1 and sorted(comps) == list(range(ctx.p)):
            by = {a: (J[0], F) for a, J, F, _ in eqs}
            return OdeSystem(ctx_e, tuple(by[a][1] for a in range(ctx.p)), tuple(by[a][0] for a in range(ctx.p)))
        return SolvedSystem(ctx_e, tuple((a, J, F) for a, J, F, _ in eqs))
    except JetError as e:
        raise _diag(source, eqs[0][3], str(e)) from None


def _parse_oracle(source: str, lines) -> EqualityConfig:
    kw = {}
    types = {"samples": int, "seed": int, "rtol": float, "atol": float, "half_width": float}
    for ln in lines:
        k, v, off = _key_value(source, ln)
        if k not in types:
            raise _diag(source, ln.offset, f"unknown oracle key {k!r}", set(types))
        try:
            kw[k] = types[k](v)
        except ValueError:
            raise _diag(source, off, f"invalid value for {k}") from None
    try:
        return EqualityConfig(**kw)
    except ValueError as e:
        raise _diag(source, lines[0].offset if lines else 0, str(e)) from None


def _parse_tasks(source: str, lines) -> list[Task]:
    tasks = []
    for ln in lines:
        off = ln.offset + len(ln.text) - len(ln.text.lstrip())
        try:
            words = shlex.split(ln.text)
        except ValueError as e:
            raise _diag(source, off, f"cannot split task line: {e}") from None
        if words[0] not in VERBS:
            raise _diag(source, off, f"unknown task {words[0]!r}", VERBS)
        pos, opts = [], {}
        for w in words[1:]:
            if "=" in w:
                k, v = w.split("=", 1)
                opts[k] = v
            else:
                pos.append(w)
        tasks.append(Task(words[0], pos, opts, " ".join(words), ln.number))
    return tasks


def parse_problem(source: str, name: str = "<problem>") -> Problem:
    """Parse and validate a problem file; raises ParseDiagnostic."""
    secs = _sections(source)
    if "context" not in secs:
        raise _diag(source, 0, "missing [context] section", {"[context]"})
    ctx = _parse_context(source, secs["context"])
    prob = Problem(source, name, ctx)
    for ln in secs.get("vectorfields", []):
        fname, X = _parse_field(source, ln, ctx)
        if fname in prob.fields:
            raise _diag(source, ln.offset, f"duplicate field {fname!r}")
        prob.fields[fname] = X
    tw = _block_values(source, secs.get("twist", []), ctx)
    kind = tw.pop("kind", ("standard", 0))
    if isinstance(kind, MatrixExpr) or kind[0] not in TWIST_KINDS:
        raise _diag(source, 0 if isinstance(kind, MatrixExpr) else kind[1], "unknown twist kind", TWIST_KINDS)
    prob.twist_kind = kind[0]
    prob.twist = {k: v if isinstance(v, MatrixExpr) else _expr(source, v[0], v[1], ctx) for k, v in tw.items()}
    g = _block_values(source, secs.get("gauge", []), ctx)
    prob.gauge = {k: v if isinstance(v, MatrixExpr) else _expr(source, v[0], v[1], ctx) for k, v in g.items()}
    prob.system = _parse_equations(source, secs.get("equations", []), ctx)
    prob.oracle = _parse_oracle(source, secs.get("oracle", []))
    prob.tasks = _parse_tasks(source, secs.get("tasks", []))
    _validate_twist(source, prob)
    return prob


def _validate_twist(source: str, prob: Problem):
    ctx = prob.ctx
    t = prob.twist

    def need(key, shape=None):
        if key not in t:
            raise _diag(source, 0, f"twist kind {prob.twist_kind} needs {key!r}")
        if shape and (not isinstance(t[key], MatrixExpr) or t[key].shape != shape):
            raise _diag(source, 0, f"{key} must be a {shape[0]}x{shape[1]} matrix")

    if prob.twist_kind == "lambda":
        need("lambda")
    elif prob.twist_kind == "mu":
        for k in _mu_keys(ctx):
            need(k, (ctx.p, ctx.p))
    elif prob.twist_kind in ("sigma", "chi"):
        need("sigma")
        if prob.twist_kind == "chi":
            need("Lambda", (ctx.p, ctx.p))


def _mu_keys(ctx: JetContext) -> list[str]:
    return ["Lambda"] if ctx.q == 1 else [f"Lambda{i + 1}" for i in range(ctx.q)]


# -- task execution -------------------------------------------------------------------------------


def _fields_arg(prob: Problem, task: Task) -> list[VectorField]:
    names = []
    for p in task.positional:
        if p == "standard":
            continue
        names += [s for s in p.split(",") if s]
    if not names:
        raise TaskInputError("task needs at least one vector field")
    out = []
    for n in names:
        if n not in prob.fields:
            raise TaskInputError(f"unknown vector field {n!r}")
        out.append(prob.fields[n])
    return out


def _int_opt(task: Task, key: str, default: int) -> int:
    v = task.options.get(key)
    if v is None:
        return default
    if not v.isdigit():
        raise TaskInputError(f"{key} must be a non-negative integer")
    return int(v)


def _expr_opt(prob: Problem, task: Task, key: str) -> Expr:
    if key not in task.options:
        raise TaskInputError(f"task needs {key}=<expression>")
    try:
        return parse_expression(task.options[key], prob.ctx)
    except ParseDiagnostic as d:
        raise TaskInputError(f"{key}: {d}") from None


def _twist_of(prob: Problem, task: Task):
    """(kind, payload) from the task options, else from the [twist] block."""
    if "standard" in task.positional:
        return "standard", None
    if "lambda" in task.options:
        lam = _expr_opt(prob, task, "lambda")
        # a zero twist is the standard prolongation, reported as such
        return ("standard", None) if lam == ZERO else ("lambda", lam)
    kind = task.options.get("twist", prob.twist_kind)
    if kind not in TWIST_KINDS:
        raise TaskInputError(f"unknown twist {kind!r}")
    t = prob.twist
    if kind == "standard":
        return kind, None
    if kind == "lambda":
        if "lambda" not in t:
            raise TaskInputError("no lambda declared in [twist]")
        return kind, t["lambda"]
    if kind == "mu":
        keys = _mu_keys(prob.ctx)
        if any(k not in t for k in keys):
            raise TaskInputError("no Lambda matrices declared in [twist]")
        return kind, [t[k] for k in keys]
    if "sigma" not in t or (kind == "chi" and "Lambda" not in t):
        raise TaskInputError(f"twist {kind} payload missing in [twist]")
    return kind, (t.get("Lambda"), t["sigma"])


def _prolong_all(fields, kind, payload, n, cfg):
    if kind == "standard":
        return [prolong(X, n, verify_paths=cfg) for X in fields]
    if kind == "lambda":
        return [prolong_lambda(X, payload, n) for X in fields]
    if kind == "mu":
        return [prolong_mu(X, payload, n, cfg=cfg) for X in fields]
    if kind == "sigma":
        return prolong_sigma(fields, payload[1], n)
    return prolong_chi(fields, payload[0], payload[1], n)


def _default_n(prob: Problem) -> int:
    return prob.system.order if prob.system is not None else min(prob.ctx.n, 2)


def _need_system(prob: Problem):
    if prob.system is None:
        raise TaskInputError("task needs an [equations] block")
    return prob.system


def _gauge(prob: Problem, key: str):
    if key not in prob.gauge:
        raise TaskInputError(f"no {key!r} declared in [gauge]")
    return prob.gauge[key]


def run_task(prob: Problem, task: Task, cfg: EqualityConfig) -> tuple[str, dict]:
    """Execute one task; returns (status, result) with status pass/fail/ok."""
    v = task.verb
    task = replace(task, positional=list(task.positional), options=dict(task.options))
    if v == "check-mc":
        keys = _mu_keys(prob.ctx)
        if any(k not in prob.twist for k in keys):
            raise TaskInputError("no Lambda matrices declared in [twist]")
        rep = check_maurer_cartan(prob.ctx, [prob.twist[k] for k in keys], cfg)
        return ("pass" if rep else "fail"), rep.to_dict()
    if v == "reduce" and "adapted" in task.positional:
        system = _need_system(prob)
        if not isinstance(system, OdeSystem):
            raise TaskInputError("adapted reduction needs an ODE system")
        red = reduce_adapted(system, _int_opt(task, "v", 1) - 1, cfg)
        return "pass", red.to_dict()
    if v == "gauge-verify":
        kind = task.options.get("kind", "lambda")
        direction = task.options.get("direction", "forward")
        if direction not in ("forward", "inverse"):
            raise TaskInputError("direction must be forward or inverse")
        fields = _fields_arg(prob, task)
        n = _int_opt(task, "n", _default_n(prob))
        if kind == "lambda":
            reps = [verify_gauge_lambda(X, _gauge(prob, "beta"), n, direction, cfg) for X in fields]
        elif kind == "mu":
            reps = [verify_gauge_mu(X, _gauge(prob, "A"), n, direction, cfg) for X in fields]
        elif kind == "sigma":
            reps = [verify_gauge_sigma(fields, _gauge(prob, "Gamma"), n, direction, cfg)]
        elif kind == "chi":
            reps = [verify_chi_diagram(fields, _gauge(prob, "A"), _gauge(prob, "B"), n, cfg)]
        else:
            raise TaskInputError(f"unknown gauge kind {kind!r}")
        ok = all(reps)
        return ("pass" if ok else "fail"), {"kind": kind, "direction": direction, "reports": [r.to_dict() for r in reps]}

    fields = _fields_arg(prob, task)
    if v == "involution":
        try:
            sysm = check_involution(fields, cfg)
        except InvolutionError as e:
            return "fail", {"error": str(e)}
        return "pass", sysm.to_dict()

    kind, payload = _twist_of(prob, task)
    n_default = _default_n(prob)
    if v == "ibdp-extend":
        # the last element of the chain has order ord(zeta) + steps
        zeta_order = prob.ctx.order_of(_expr_opt(prob, task, "zeta"))
        n_default = max(n_default, zeta_order + _int_opt(task, "steps", 1))
    n = _int_opt(task, "n", n_default)
    Ys = _prolong_all(fields, kind, payload, n, cfg)
    names = [X.name for X in fields]
    if v == "prolong":
        out = {"twist": kind, "n": n, "fields": {nm: Y.to_dict() for nm, Y in zip(names, Ys)}}
        checks = [Y.path_check for Y in Ys if Y.path_check is not None]
        if checks:
            out["paths_consistent"] = all(checks)
        return ("ok" if all(checks) else "fail"), out
    if v in ("check-symmetry", "check-strong"):
        system = _need_system(prob)
        fn = check_symmetry if v == "check-symmetry" else check_strong_symmetry
        sv = fn(system, Ys, cfg)
        return ("pass" if sv else "fail"), sv.to_dict()
    if v == "commutator-identity":
        rep = commutator_identity_report(Ys, _int_opt(task, "basket", 10), cfg)
        return ("pass" if rep else "fail"), rep.to_dict()
    if v == "invariants":
        fi = find_first_invariants(Ys, _int_opt(task, "degree", 1), _int_opt(task, "param_degree", 1), cfg)
        return "ok", fi.to_dict()
    if v == "ibdp-extend":
        eta = _expr_opt(prob, task, "eta")
        zeta = _expr_opt(prob, task, "zeta")
        steps = _int_opt(task, "steps", 1)
        chain = [zeta]
        for _ in range(steps):
            chain.append(ibdp_next(Ys, eta, chain[-1], cfg))
        return "pass", {"eta": to_text(eta), "chain": [to_text(z) for z in chain]}
    if v == "reduce":
        system = _need_system(prob)
        if not isinstance(system, OdeSystem):
            raise TaskInputError("reduction needs an ODE system")
        if "eta" in task.options:
            zetas = [_expr_opt(prob, task, k) for k in sorted(task.options) if k.startswith("zeta")]
            chain = InvariantChain(Ys, _expr_opt(prob, task, "eta"), [zetas])
        else:
            chain = find_first_invariants(Ys, _int_opt(task, "degree", 1), 1, cfg).chain(Ys)
        red = reduce_by_invariants(system, chain, _int_opt(task, "fit_degree", 3), 1, cfg)
        return "pass", red.to_dict()
    raise TaskInputError(f"unknown task {v!r}")  # pragma: no cover


@dataclass
class TaskResult:
    index: int
    command: str
    status: str  # ok | pass | fail | input-error | internal-error
    result: dict = field(default_factory=dict)
    error: str = ""

    def to_dict(self) -> dict:
        d = {"index": self.index, "command": self.command, "status": self.status}
        if self.result:
            d["result"] = self.result
        if self.error:
            d["error"] = self.error
        return d


@dataclass
class RunReport:
    problem: str
    oracle: EqualityConfig
    results: list

    @property
    def exit_code(self) -> int:
        st = {r.status for r in self.results}
        if "internal-error" in st:
            return EXIT_INTERNAL
        if "input-error" in st:
            return EXIT_INPUT
        if "fail" in st:
            return EXIT_FAIL
        return EXIT_OK

    def to_dict(self) -> dict:
        o = self.oracle
        return _sanitize(
            {
                "problem": self.problem,
                "oracle": {
                    "samples": o.samples,
                    "seed": o.seed,
                    "rtol": o.rtol,
                    "atol": o.atol,
                    "half_width": o.half_width,
                },
                "tasks": [r.to_dict() for r in self.results],
                "exit_code": self.exit_code,
            }
        )

    def text(self) -> str:
        o = self.oracle
        lines = [
            f"problem: {self.problem}",
            f"seed: {o.seed}  samples: {o.samples}  rtol: {o.rtol:g}  atol: {o.atol:g}",
        ]
        for r in self.results:
            lines.append(f"[{r.index}] {r.command}: {r.status}")
            if r.error:
                lines.append(f"    error: {r.error}")
            for k, v in sorted(_sanitize(r.result).items()):
                lines.extend(_render(k, v, 1))
        counts = {s: sum(1 for r in self.results if r.status == s) for s in ("ok", "pass", "fail")}
        errors = sum(1 for r in self.results if r.status.endswith("error"))
        lines.append(
            f"summary: {len(self.results)} tasks, {counts['pass']} pass, {counts['fail']} fail, "
            f"{counts['ok']} ok, {errors} error; exit {self.exit_code}"
        )
        return "\n".join(lines) + "\n"


def _sanitize(v):
    """Render floats with fixed precision so reports are byte-stable."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return f"{v:.3e}"
    if isinstance(v, dict):
        return {str(k): _sanitize(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_sanitize(x) for x in v]
    return str(v)


def _render(key, value, depth) -> list[str]:
    pad = "    " * depth
    if isinstance(value, dict):
        out = [f"{pad}{key}:"]
        for k, v in sorted(value.items()):
            out.extend(_render(k, v, depth + 1))
        return out
    if isinstance(value, list) and any(isinstance(x, (dict, list)) for x in value):
        out = [f"{pad}{key}:"]
        for i, v in enumerate(value):
            out.extend(_render(f"- {i + 1}", v, depth + 1))
        return out
    if isinstance(value, list):
        return [f"{pad}{key}: [" + ", ".join(str(x) for x in value) + "]"]
    return [f"{pad}{key}: {value}"]


def run_problem(prob: Problem, cfg: EqualityConfig | None = None, tasks=None) -> RunReport:
    """Run the tasks of a problem (or the given ones) in order."""
    cfg = cfg or prob.oracle
    results = []
    for i, task in enumerate(prob.tasks if tasks is None else tasks):
        try:
            status, res = run_task(prob, task, cfg)
            results.append(TaskResult(i + 1, task.text, status, res))
        except TaskInputError as e:
            results.append(TaskResult(i + 1, task.text, "input-error", error=str(e)))
        except DOMAIN_ERRORS as e:
            results.append(TaskResult(i + 1, task.text, "fail", error=str(e)))
        except Exception as e:  # an invariant of the library itself broke
            results.append(TaskResult(i + 1, task.text, "internal-error", error=f"{type(e).__name__}: {e}"))
    return RunReport(prob.name, cfg, results)


def load_problem(path: str) -> Problem:
    with open(path, encoding="utf-8") as fh:
        source = fh.read()
    return parse_problem(source, os.path.basename(path))
