"""File formats and the ``lqss-synth`` command line.

Complex numbers are stored as ``[re, im]`` pairs and matrices as row-major
nested lists.  General systems store only the upper blocks
``S1, S2, N1, N2, M1, M2``, so parsed systems are doubled-up by
construction.  Output is canonical: 2-space indent, insertion-ordered
keys, shortest round-trip floats.

Exit codes: 0 success, 2 unreadable input, 3 structural violation,
4 synthesis failure, 5 verification failure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional

import numpy as np
import typer

from assembly_verification import EquivalenceReport, assemble, frequency_grid, verify_equivalence
from config import ORDERING_POLICIES, config
from errors import LqssError, ParseError, VerificationFailed
from krein_linalg import blocks, double_up
from logger import get_logger, set_level
from lqss_model import CavityPort, CavitySpec, GeneralLqss, Lqss, PassiveLqss, require_valid, transfer_function
from realization_synthesis import (
    CascadeRealization,
    CoupledCavityPair,
    FeedbackCavity,
    FeedbackRealization,
    FreeParameters,
    SpectrumAudit,
    cascade_general,
    cascade_passive,
    feedback_general,
    feedback_passive,
)
from static_decomposition import BeamSplit, PhaseShift, Squeeze, StaticDecomposition, decompose_static

logger = get_logger(__name__)

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Encoding helpers
# ---------------------------------------------------------------------------


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_matrix(X) -> list:
    X = np.asarray(X, dtype=complex)
    return [[encode_complex(z) for z in row] for row in X]


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def decode_complex(value: Any, path: str) -> complex:
    if not isinstance(value, list) or len(value) != 2 or not all(_is_number(v) for v in value):
        raise ParseError(f"expected a complex number [re, im], got {value!r}", path)
    return complex(value[0], value[1])


def decode_matrix(value: Any, path: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Decode a nested list, checking the shape when ``rows``/``cols`` are given."""
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise ParseError("expected a matrix (list of rows)", path)
    if rows is not None and len(value) != rows:
        raise ParseError(f"expected {rows} rows, got {len(value)}", path)
    width = cols if cols is not None else (len(value[0]) if value else 0)
    out = np.zeros((len(value), width), dtype=complex)
    for i, row in enumerate(value):
        if len(row) != width:
            raise ParseError(f"expected {width} columns, got {len(row)}", f"{path}[{i}]")
        for j, entry in enumerate(row):
            out[i, j] = decode_complex(entry, f"{path}[{i}][{j}]")
    return out


def _field(data: dict, key: str, path: str = "") -> Any:
    if not isinstance(data, dict):
        raise ParseError("expected an object", path or "$")
    if key not in data:
        raise ParseError(f"missing field {key!r}", path or "$")
    return data[key]


def _count(data: dict, key: str) -> int:
    value = _field(data, key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ParseError(f"expected a non-negative integer, got {value!r}", key)
    return value


def _number(value: Any, path: str) -> float:
    if not _is_number(value):
        raise ParseError(f"expected a number, got {value!r}", path)
    return float(value)


def _check_version(data: dict) -> None:
    version = _field(data, "format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}", "format_version")


def dumps(document: dict) -> str:
    """Canonical JSON text of ``document``."""
    return json.dumps(document, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def load_json(path: Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", str(path)) from exc


def write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# System files
# ---------------------------------------------------------------------------


def system_to_dict(sys: Lqss) -> dict:
    document: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "mode": "passive" if sys.passive else "general",
        "n_modes": sys.n_modes,
        "n_io": sys.n_io,
    }
    if sys.passive:
        document.update(S=encode_matrix(sys.S), N=encode_matrix(sys.N), M=encode_matrix(sys.M))
        return document
    for name in ("S", "N", "M"):
        first, second = blocks(getattr(sys, name))
        document[f"{name}1"] = encode_matrix(first)
        document[f"{name}2"] = encode_matrix(second)
    return document


def _mode(data: dict) -> str:
    mode = _field(data, "mode")
    if mode not in ("passive", "general"):
        raise ParseError(f"mode must be 'passive' or 'general', got {mode!r}", "mode")
    return mode


def parse_system(data: dict) -> Lqss:
    """Decode and validate a system document.

    Raises:
        ParseError: On a malformed document.
        ValidationError: If the decoded triple violates its structure.
    """
    _check_version(data)
    mode = _mode(data)
    n, m = _count(data, "n_modes"), _count(data, "n_io")
    shapes = {"S": (m, m), "N": (m, n), "M": (n, n)}
    if mode == "passive":
        mats = {k: decode_matrix(_field(data, k), k, *shape) for k, shape in shapes.items()}
        sys: Lqss = PassiveLqss(**mats)
    else:
        mats = {
            k: double_up(
                decode_matrix(_field(data, f"{k}1"), f"{k}1", *shape),
                decode_matrix(_field(data, f"{k}2"), f"{k}2", *shape),
            )
            for k, shape in shapes.items()
        }
        sys = GeneralLqss(**mats)
    require_valid(sys, what=f"{mode} system")
    return sys


def load_system(path: Path) -> Lqss:
    return parse_system(load_json(path))


def write_system(sys: Lqss, path: Path) -> None:
    write_text(path, dumps(system_to_dict(sys)))


def parse_static_matrix(data: dict) -> np.ndarray:
    """Static network matrix of a static-matrix document or a system file's ``S``."""
    _check_version(data)
    mode = _mode(data)
    m = _count(data, "n_io")
    if mode == "passive":
        return decode_matrix(_field(data, "S"), "S", m, m)
    return double_up(decode_matrix(_field(data, "S1"), "S1", m, m),
                     decode_matrix(_field(data, "S2"), "S2", m, m))


# ---------------------------------------------------------------------------
# Netlists
# ---------------------------------------------------------------------------


@dataclass
class Netlist:
    """A realization plus optional element lists of its static blocks and the verification report."""

    realization: CascadeRealization | FeedbackRealization
    static_elements: dict[str, StaticDecomposition] = field(default_factory=dict)
    verification: dict | None = None

    @property
    def kind(self) -> str:
        return "cascade" if isinstance(self.realization, CascadeRealization) else "feedback"


def element_to_dict(element) -> dict:
    if isinstance(element, PhaseShift):
        return {"type": "phase", "channel": element.channel, "theta": element.theta}
    if isinstance(element, BeamSplit):
        return {
            "type": "beamsplitter",
            "channels": list(element.pair),
            "theta": element.theta,
            "phi": element.phi,
            "psi": element.psi,
            "zeta": element.zeta,
        }
    return {"type": "squeezer", "channel": element.channel, "x": element.x, "phi": element.phi, "psi": element.psi}


def parse_element(data: dict, path: str):
    kind = _field(data, "type", path)
    num = lambda key: _number(_field(data, key, path), f"{path}.{key}")  # noqa: E731
    if kind == "phase":
        return PhaseShift(int(num("channel")), num("theta"))
    if kind == "beamsplitter":
        pair = _field(data, "channels", path)
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError("beam splitter needs two channels", f"{path}.channels")
        return BeamSplit((int(pair[0]), int(pair[1])), num("theta"), num("phi"), num("psi"), num("zeta"))
    if kind == "squeezer":
        return Squeeze(int(num("channel")), num("x"), num("phi"), num("psi"))
    raise ParseError(f"unknown element type {kind!r}", f"{path}.type")


def decomposition_to_dict(decomposition: StaticDecomposition) -> dict:
    document: dict[str, Any] = {
        "kind": decomposition.kind,
        "n_channels": decomposition.n_channels,
        "elements": [element_to_dict(e) for e in decomposition.elements],
    }
    if decomposition.factors is not None:
        U1, x, U2 = decomposition.factors
        document["factors"] = {"U1": encode_matrix(U1), "x": [float(v) for v in x], "U2": encode_matrix(U2)}
    return document


def parse_decomposition(data: dict, path: str) -> StaticDecomposition:
    elements = tuple(
        parse_element(e, f"{path}.elements[{i}]") for i, e in enumerate(_field(data, "elements", path))
    )
    factors = None
    if "factors" in data:
        raw = data["factors"]
        factors = (
            decode_matrix(_field(raw, "U1"), f"{path}.factors.U1"),
            np.array([_number(v, f"{path}.factors.x") for v in _field(raw, "x")]),
            decode_matrix(_field(raw, "U2"), f"{path}.factors.U2"),
        )
    return StaticDecomposition(
        kind=_field(data, "kind", path),
        n_channels=int(_field(data, "n_channels", path)),
        elements=elements,
        factors=factors,
    )


def _port_to_dict(port: CavityPort) -> dict:
    return {"kappa": port.kappa, "phi": port.phi, "g": port.g, "theta": port.theta}


def _cavity_to_dict(spec: CavitySpec) -> dict:
    return {"detuning": spec.detuning, "ports": [_port_to_dict(p) for p in spec.ports]}


def _parse_cavity(data: dict, path: str) -> CavitySpec:
    ports = []
    for i, raw in enumerate(_field(data, "ports", path)):
        where = f"{path}.ports[{i}]"
        ports.append(CavityPort(**{k: _number(_field(raw, k, where), f"{where}.{k}") for k in ("kappa", "phi", "g", "theta")}))
    return CavitySpec(detuning=_number(_field(data, "detuning", path), f"{path}.detuning"), ports=tuple(ports))


def _ordering_to_json(ordering):
    if ordering is None or isinstance(ordering, str):
        return ordering
    return [encode_complex(z) for z in ordering]


def _static_block(role: str, matrix: np.ndarray, netlist: Netlist) -> dict:
    block: dict[str, Any] = {"role": role, "matrix": encode_matrix(matrix)}
    if role in netlist.static_elements:
        block["elements"] = decomposition_to_dict(netlist.static_elements[role])
    return block


def netlist_to_dict(netlist: Netlist) -> dict:
    r = netlist.realization
    document: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "kind": netlist.kind,
        "mode": r.kind,
        "n_modes": r.n_modes,
        "n_io": r.n_io,
    }
    if isinstance(r, CascadeRealization):
        document["static_blocks"] = [_static_block("pre", r.pre_network, netlist)]
        document["cavities"] = [_cavity_to_dict(c) for c in r.cavities]
        document["feedback_gain"] = None
        document["free_params"] = None
        document["audit"] = {
            "ordering": _ordering_to_json(r.ordering),
            "eigen_order": [encode_complex(z) for z in r.eigen_order],
            "transform": encode_matrix(r.transform),
        }
    else:
        document["static_blocks"] = [
            _static_block("pre", r.pre_network, netlist),
            _static_block("post", r.post_network, netlist),
        ]
        document["cavities"] = [
            {**_cavity_to_dict(c.spec), "channels": list(c.channels), "interconnect_port": c.interconnect_port}
            for c in r.cavities
        ]
        document["pairs"] = [
            {"modes": list(p.modes), "channels": list(p.channels), "coupler": encode_matrix(p.coupler)}
            for p in r.pairs
        ]
        document["feedback_gain"] = encode_matrix(r.feedback_gain)
        document["free_params"] = {
            "detunings": list(r.free_params.detunings),
            "couplings": list(r.free_params.couplings),
        }
        audit = r.spectrum_audit
        document["audit"] = {
            "spectrum": {
                "r_plus": audit.r_plus,
                "r_minus": audit.r_minus,
                "r_complex": audit.r_complex,
                "rank": audit.rank,
                "n_kernel": audit.n_kernel,
            },
            "Nhat": encode_matrix(r.Nhat),
            "Mhat": encode_matrix(r.Mhat),
            "Mbar": encode_matrix(r.Mbar),
            "X": encode_matrix(r.X),
        }
    if netlist.verification is not None:
        document["verification"] = netlist.verification
    return document


def _static_blocks(data: dict) -> dict[str, dict]:
    found = {}
    for i, block in enumerate(_field(data, "static_blocks")):
        found[_field(block, "role", f"static_blocks[{i}]")] = {"index": i, **block}
    return found


def parse_netlist(data: dict) -> Netlist:
    """Decode a netlist document.

    Raises:
        ParseError: On a malformed document.
    """
    _check_version(data)
    kind = _field(data, "kind")
    mode = _mode(data)
    m = _count(data, "n_io")
    dim = m if mode == "passive" else 2 * m
    statics = _static_blocks(data)
    elements = {
        role: parse_decomposition(block["elements"], f"static_blocks[{block['index']}].elements")
        for role, block in statics.items() if "elements" in block
    }

    def static(role: str) -> np.ndarray:
        if role not in statics:
            raise ParseError(f"missing static block {role!r}", "static_blocks")
        block = statics[role]
        return decode_matrix(block["matrix"], f"static_blocks[{block['index']}].matrix", dim, dim)

    raw_cavities = _field(data, "cavities")
    audit = _field(data, "audit")
    if kind == "cascade":
        ordering = audit.get("ordering")
        if isinstance(ordering, list):
            ordering = tuple(decode_complex(z, "audit.ordering") for z in ordering)
        realization = CascadeRealization(
            kind=mode,
            pre_network=static("pre"),
            cavities=tuple(_parse_cavity(c, f"cavities[{i}]") for i, c in enumerate(raw_cavities)),
            transform=decode_matrix(_field(audit, "transform", "audit"), "audit.transform"),
            eigen_order=tuple(decode_complex(z, "audit.eigen_order") for z in _field(audit, "eigen_order", "audit")),
            ordering=ordering,
        )
    elif kind == "feedback":
        cavities = tuple(
            FeedbackCavity(
                spec=_parse_cavity(c, f"cavities[{i}]"),
                channels=tuple(int(ch) for ch in _field(c, "channels", f"cavities[{i}]")),
            )
            for i, c in enumerate(raw_cavities)
        )
        pairs = tuple(
            CoupledCavityPair(
                modes=tuple(_field(p, "modes", f"pairs[{i}]")),
                channels=tuple(_field(p, "channels", f"pairs[{i}]")),
                coupler=decode_matrix(_field(p, "coupler", f"pairs[{i}]"), f"pairs[{i}].coupler", 2, 2),
            )
            for i, p in enumerate(data.get("pairs", []))
        )
        free = _field(data, "free_params")
        spectrum = _field(audit, "spectrum", "audit")
        realization = FeedbackRealization(
            kind=mode,
            pre_network=static("pre"),
            post_network=static("post"),
            cavities=cavities,
            pairs=pairs,
            feedback_gain=decode_matrix(_field(data, "feedback_gain"), "feedback_gain"),
            free_params=FreeParameters(
                detunings=tuple(_number(v, "free_params.detunings") for v in _field(free, "detunings", "free_params")),
                couplings=tuple(_number(v, "free_params.couplings") for v in _field(free, "couplings", "free_params")),
            ),
            spectrum_audit=SpectrumAudit(
                r_plus=int(_field(spectrum, "r_plus", "audit.spectrum")),
                r_minus=int(_field(spectrum, "r_minus", "audit.spectrum")),
                r_complex=int(_field(spectrum, "r_complex", "audit.spectrum")),
                n_kernel=int(_field(spectrum, "n_kernel", "audit.spectrum")),
            ),
            Nhat=decode_matrix(_field(audit, "Nhat", "audit"), "audit.Nhat"),
            Mhat=decode_matrix(_field(audit, "Mhat", "audit"), "audit.Mhat"),
            Mbar=decode_matrix(_field(audit, "Mbar", "audit"), "audit.Mbar"),
            X=decode_matrix(_field(audit, "X", "audit"), "audit.X"),
        )
    else:
        raise ParseError(f"kind must be 'cascade' or 'feedback', got {kind!r}", "kind")
    return Netlist(realization=realization, static_elements=elements, verification=data.get("verification"))


def load_netlist(path: Path) -> Netlist:
    return parse_netlist(load_json(path))


def write_netlist(netlist: Netlist, path: Path) -> None:
    write_text(path, dumps(netlist_to_dict(netlist)))


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------


app = typer.Typer(
    add_completion=False,
    no_args_is_help=True,
    help="Synthesize cavity networks realizing linear quantum stochastic systems.",
)


def parse_ordering(text: Optional[str]):
    """A policy name, or comma-separated complex targets such as ``"-1-2j,-3+0.5j"``."""
    if text is None:
        return None
    if text.strip().lower() in ORDERING_POLICIES:
        return text.strip().lower()
    try:
        return [complex(part.strip().replace(" ", "")) for part in text.split(",")]
    except ValueError:
        raise ParseError(
            f"ordering must be one of {', '.join(ORDERING_POLICIES)} or a list of complex numbers",
            "--ordering",
        )


def parse_points(values: List[str]) -> list[complex]:
    try:
        return [complex(v.strip().replace(" ", "")) for v in values]
    except ValueError:
        raise ParseError(f"cannot read complex frequencies {values!r}", "--s")


def _fail(exc: LqssError) -> typer.Exit:
    logger.error("%s: %s", type(exc).__name__, exc)
    typer.echo(f"error: {exc}", err=True)
    return typer.Exit(code=exc.exit_code)


def _grid(freq_min, freq_max, freq_count) -> list[complex]:
    return frequency_grid(freq_min, freq_max, freq_count)


def _report_lines(report: EquivalenceReport) -> list[str]:
    lines = [
        f"verdict: {report.verdict}",
        f"max relative error: {report.max_rel_error:.3e} (tolerance {report.tolerance:.1e})",
        f"samples: {len(report.frequencies)}",
    ]
    for check in report.structural_checks:
        state = "ok" if check.passed else "FAILED"
        lines.append(f"  {check.name}: {check.residual:.3e} [{state}]")
    return lines


def _summary(netlist: Netlist) -> list[str]:
    r = netlist.realization
    lines = [f"{netlist.kind} realization of a {r.kind} system: {r.n_modes} cavities, {r.n_io} channels"]
    if isinstance(r, CascadeRealization):
        lines.append("detunings: " + ", ".join(f"{c.detuning:.4f}" for c in r.cavities))
    else:
        a = r.spectrum_audit
        lines.append(f"rank {a.rank} (r+={a.r_plus}, r-={a.r_minus}, pairs={a.r_complex}, kernel={a.n_kernel})")
        counts = r.port_counts()
        lines.append("cavities by port count: " + ", ".join(f"{k}-port x{counts[k]}" for k in sorted(counts)))
    return lines


def synthesize_netlist(
    sys: Lqss,
    method: str,
    ordering=None,
    detunings: Optional[list[float]] = None,
    couplings: Optional[list[float]] = None,
    decompose: bool = False,
) -> Netlist:
    """Run the synthesis path matching ``method`` and the system's mode."""
    if method == "cascade":
        realization = cascade_passive(sys, ordering) if sys.passive else cascade_general(sys, ordering)
    elif method == "feedback":
        synth = feedback_passive if sys.passive else feedback_general
        realization = synth(sys, detunings or None, couplings or None)
    else:
        raise ParseError(f"method must be 'cascade' or 'feedback', got {method!r}", "--method")
    netlist = Netlist(realization=realization)
    if decompose:
        netlist.static_elements["pre"] = decompose_static(realization.pre_network, kind=realization.kind)
        if isinstance(realization, FeedbackRealization):
            netlist.static_elements["post"] = decompose_static(realization.post_network, kind=realization.kind)
    return netlist


@app.callback()
def main_callback(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Override LOG_LEVEL for this run"),
) -> None:
    """Synthesize cavity networks realizing linear quantum stochastic systems."""
    if log_level:
        set_level(log_level)


@app.command("synthesize")
def cmd_synthesize(
    input_path: Path = typer.Argument(..., help="System file"),
    method: str = typer.Option("cascade", "--method", help="cascade or feedback"),
    ordering: Optional[str] = typer.Option(
        None, "--ordering", help=f"Eigenvalue placement: {', '.join(ORDERING_POLICIES)} or 'a+bj,c+dj,...'"
    ),
    detuning: List[float] = typer.Option([], "--detuning", help="Feedback cavity detuning (repeat per mode)"),
    coupling: List[float] = typer.Option(
        [], "--interconnect-coupling", help="Interconnection coupling amplitude (repeat per mode)"
    ),
    decompose: bool = typer.Option(False, "--decompose-static", help="Attach element lists to static blocks"),
    tol: Optional[float] = typer.Option(None, "--tol", help=f"Verification tolerance (default {config.VERIFY_TOL:g})"),
    freq_min: Optional[float] = typer.Option(None, "--freq-min"),
    freq_max: Optional[float] = typer.Option(None, "--freq-max"),
    freq_count: Optional[int] = typer.Option(None, "--freq-count"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Netlist file (stdout when omitted)"),
    json_report: Optional[Path] = typer.Option(None, "--json-report", help="Machine-readable run report"),
) -> None:
    """Synthesize a netlist, verify it and write it out."""
    try:
        sys = load_system(input_path)
        netlist = synthesize_netlist(sys, method, parse_ordering(ordering), detuning, coupling, decompose)
        report = verify_equivalence(
            sys, assemble(netlist.realization), _grid(freq_min, freq_max, freq_count), tol
        )
        netlist.verification = report.to_dict()
        text = dumps(netlist_to_dict(netlist))
        if output is not None:
            write_text(output, text)
            for line in _summary(netlist) + _report_lines(report):
                typer.echo(line)
            typer.echo(f"netlist written to {output}")
        else:
            typer.echo(text, nl=False)
        if json_report is not None:
            write_text(json_report, dumps({"command": "synthesize", "input": str(input_path),
                                           "method": method, "verification": report.to_dict()}))
        if not report.passed:
            raise VerificationFailed(
                f"realization deviates by {report.max_rel_error:.3e} (tolerance {report.tolerance:.1e})",
                report,
            )
    except LqssError as exc:
        raise _fail(exc)
    except ValueError as exc:
        raise _fail(ParseError(str(exc)))


@app.command("verify")
def cmd_verify(
    system_path: Path = typer.Argument(..., help="System file"),
    netlist_path: Path = typer.Argument(..., help="Netlist file"),
    tol: Optional[float] = typer.Option(None, "--tol"),
    freq_min: Optional[float] = typer.Option(None, "--freq-min"),
    freq_max: Optional[float] = typer.Option(None, "--freq-max"),
    freq_count: Optional[int] = typer.Option(None, "--freq-count"),
    json_report: Optional[Path] = typer.Option(None, "--json-report"),
) -> None:
    """Check that a netlist reproduces the transfer function of a system."""
    try:
        sys = load_system(system_path)
        netlist = load_netlist(netlist_path)
        report = verify_equivalence(
            sys, assemble(netlist.realization), _grid(freq_min, freq_max, freq_count), tol
        )
        for line in _report_lines(report):
            typer.echo(line)
        if json_report is not None:
            write_text(json_report, dumps({"command": "verify", "system": str(system_path),
                                           "netlist": str(netlist_path), "verification": report.to_dict()}))
        if not report.passed:
            raise VerificationFailed(f"netlist does not reproduce {system_path}", report)
    except LqssError as exc:
        raise _fail(exc)
    except ValueError as exc:
        raise _fail(ParseError(str(exc)))


@app.command("transfer")
def cmd_transfer(
    system_path: Path = typer.Argument(..., help="System file"),
    s: List[str] = typer.Option([], "--s", help="Sample point such as '0+2j' (repeatable)"),
    freq_min: Optional[float] = typer.Option(None, "--freq-min"),
    freq_max: Optional[float] = typer.Option(None, "--freq-max"),
    freq_count: Optional[int] = typer.Option(None, "--freq-count"),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
) -> None:
    """Tabulate G(s) at the given points or on the frequency grid."""
    try:
        sys = load_system(system_path)
        points = parse_points(s) if s else _grid(freq_min, freq_max, freq_count)
        samples = [{"s": encode_complex(p), "G": encode_matrix(transfer_function(sys, p))} for p in points]
        text = dumps({"format_version": FORMAT_VERSION, "mode": "passive" if sys.passive else "general",
                      "samples": samples})
        if output is not None:
            write_text(output, text)
            typer.echo(f"{len(samples)} samples written to {output}")
        else:
            typer.echo(text, nl=False)
    except LqssError as exc:
        raise _fail(exc)
    except ValueError as exc:
        raise _fail(ParseError(str(exc)))


@app.command("decompose-static")
def cmd_decompose_static(
    input_path: Path = typer.Argument(..., help="Static matrix file or system file"),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
) -> None:
    """Factor a static network into phase shifters, beam splitters and squeezers."""
    try:
        data = load_json(input_path)
        decomposition = decompose_static(parse_static_matrix(data), kind=data.get("mode"))
        text = dumps({"format_version": FORMAT_VERSION, **decomposition_to_dict(decomposition)})
        if output is not None:
            write_text(output, text)
            typer.echo(
                f"{len(decomposition.elements)} elements "
                f"({decomposition.count('beamsplitter')} beam splitters, "
                f"{decomposition.count('squeezer')} squeezers, "
                f"{decomposition.count('phase')} phase shifters) written to {output}"
            )
        else:
            typer.echo(text, nl=False)
    except LqssError as exc:
        raise _fail(exc)
    except ValueError as exc:
        raise _fail(ParseError(str(exc)))
