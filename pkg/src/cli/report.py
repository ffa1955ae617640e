""" Audit documents: the outcome of one command, shown as a rich table and written as YAML or JSON """
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import rich.syntax
import yaml
from rich.console import Console
from rich.table import Table

from src import __version__
from src.effects import errors
from src.effects.axioms import CheckResult, Witness
from src.effects.core import Effect
from src.backends.states import State
from src.utils.run import get_logger

log = get_logger(__name__)

TOOL = "cosea"
FORMATS = ("yaml", "json")


@dataclass
class AuditDocument:
    command: str
    digest: str
    seed: int
    tolerance: Dict[str, float]
    checks: Dict[str, CheckResult] = field(default_factory=dict)
    data: Dict = field(default_factory=dict)
    errors: List[Dict] = field(default_factory=list)
    wall_time: Optional[float] = None
    tool: str = TOOL
    version: str = __version__

    @property
    def failed(self):
        return [name for name, r in self.checks.items() if not r.ok]

    @property
    def ok(self):
        return not self.failed and not self.errors

    def add(self, result: CheckResult):
        self.checks[result.name] = result

    def record_error(self, e: "errors.CoseaError"):
        self.errors.append(dict(
            type=type(e).__name__, message=str(e), name=e.name,
            residual=None if e.residual is None else float(e.residual),
        ))
        log.debug(f"{self.command}: {type(e).__name__}: {e}")


def residual_check(name, residual, threshold, group="", inputs=None) -> CheckResult:
    """A single-sample check from one computed residual"""
    residual = float(residual)
    result = CheckResult(name, group, 1, float(threshold), max_residual=residual)
    if residual > threshold:
        result.failed = 1
        result.witnesses.append(Witness(0, 0, residual, inputs or {}))
    else:
        result.passed = 1
    return result


""" Plain data """


def _number(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def plain(x):
    """Nested builtins only; complex arrays become [re, im] pairs and non-finite floats strings"""
    if isinstance(x, Effect):
        return plain(x.payload)
    if isinstance(x, State):
        if x.is_zero:
            return 0
        if isinstance(x.payload, tuple):
            return dict(weights=plain(x.weights), parts=[plain(p) for p in x.payload])
        return plain(x.payload)
    if isinstance(x, Witness):
        out = dict(index=x.index, seed=x.seed, residual=_number(x.residual), inputs=plain(x.inputs))
        if x.error is not None:
            out["error"] = x.error
        return out
    if isinstance(x, CheckResult):
        return dict(
            status="pass" if x.ok else "fail", group=x.group, samples=x.samples, passed=x.passed, failed=x.failed,
            vacuous=x.vacuous, max_residual=_number(x.max_residual), threshold=_number(x.threshold),
            witnesses=[plain(w) for w in x.witnesses],
        )
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return np.stack([x.real, x.imag], axis=-1).tolist()
        return plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _number(x)
    if isinstance(x, complex):
        return [_number(x.real), _number(x.imag)]
    return x


def to_dict(doc: AuditDocument, timing=False) -> Dict:
    out = dict(
        tool=doc.tool, version=doc.version, command=doc.command, input_digest=doc.digest, seed=doc.seed,
        tolerance=plain(doc.tolerance), status="pass" if doc.ok else "fail",
        checks={name: plain(r) for name, r in doc.checks.items()}, data=plain(doc.data), errors=plain(doc.errors),
    )
    if timing and doc.wall_time is not None:
        out["wall_time"] = round(float(doc.wall_time), 6)
    return out


def dumps(doc: AuditDocument, fmt="yaml", timing=False) -> str:
    if fmt not in FORMATS:
        raise errors.UnknownName(f"unknown report format '{fmt}'", name=fmt)
    body = to_dict(doc, timing)
    if fmt == "json":
        return json.dumps(body, indent=2, ensure_ascii=False) + "\n"
    return yaml.safe_dump(body, sort_keys=False, allow_unicode=True)


""" Output """


def render(doc: AuditDocument, console: Console):
    table = Table(title=f"{doc.tool} {doc.command} (seed {doc.seed})")
    for column in ("check", "group", "samples", "passed", "failed", "vacuous", "max residual", "threshold"):
        table.add_column(column, justify="left" if column in ("check", "group") else "right")
    table.add_column("status")
    for name, r in doc.checks.items():
        table.add_row(
            name, r.group, str(r.samples), str(r.passed), str(r.failed), str(r.vacuous),
            f"{r.max_residual:.3e}", f"{r.threshold:.1e}", "[green]pass" if r.ok else "[red]fail",
        )
    if doc.checks:
        console.print(table)
    if doc.data:
        console.print(rich.syntax.Syntax(yaml.safe_dump(plain(doc.data), sort_keys=False), "yaml"))
    for e in doc.errors:
        who = f" ({e['name']})" if e["name"] is not None else ""
        console.print(f"[red]{e['type']}{who}: {e['message']}")
    summary = f"{len(doc.checks) - len(doc.failed)}/{len(doc.checks)} checks passed"
    if doc.wall_time is not None:
        summary += f" in {doc.wall_time:.2f}s"
    console.print(f"[bold]{summary}[/bold]" + ("" if doc.ok else " [red]FAILED"))


def exit_status(doc: AuditDocument) -> int:
    return 0 if doc.ok else 1


def emit_report(doc: AuditDocument, path=None, fmt="yaml", console=None, timing=False) -> int:
    """Print the summary and, with a path, write the machine-readable report; returns the exit status"""
    text = dumps(doc, fmt, timing)
    render(doc, console or Console())
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        except OSError as e:
            raise errors.IoError(f"cannot write {path}: {e.strerror}", name=str(path)) from e
        log.info(f"report written to {path}")
    return exit_status(doc)
