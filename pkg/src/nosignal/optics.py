"""Optical elements as complex transfer matrices, circuits, and isometry checks.

Every lossless passive device maps input-mode amplitudes to output-mode
amplitudes through a matrix ``M`` with ``M^dag M = I``.  This module builds
those matrices for beam splitters, mirrors, phase shifters and deflectors,
composes them into feed-forward circuits, and validates the isometry
property numerically.

It also provides the one deliberately *impossible* device, the
"hypothetical canceller": a two-in/one-out element that would superimpose
two packets onto a single mode.  It is constructible here precisely so that
its failure can be demonstrated: it never passes :func:`is_isometry`, and
when applied anyway it can map a normalized superposition to the zero
vector.

Conventions: the balanced beam splitter is the real Hadamard
``[[1, 1], [1, -1]]/sqrt(2)``; mirrors and deflectors only redirect
propagation, acting as the identity on their mode.  Any fixed phase a real
device would add on reflection is unobservable in every probability
computed in this package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np

from .modes import ModeState, check_labels, make_state

#: Tolerance for declaring a transfer matrix an isometry.
ISOMETRY_TOL = 1e-12

#: Phase-shifter settings for the two canonical interferometer arrangements.
PHASE_OFF = 0.0
PHASE_ON = math.pi

_BALANCED_ANGLE = math.pi / 4


class WiringError(ValueError):
    """Circuit elements reference modes that are not live where they appear."""


class NonPhysicalCircuitError(RuntimeError):
    """Refusal to apply a circuit that fails isometry validation.

    Pass ``allow_nonphysical=True`` to :func:`apply` to run the circuit
    anyway, e.g. to demonstrate what the impossible canceller would do.
    """

    def __init__(self, report: "ValidationReport"):
        self.report = report
        failures = ", ".join(
            f"element {f.element_index}: {f.reason} (deviation {f.deviation:.3g})"
            for f in report.failures
        )
        super().__init__(f"circuit is not physical: {failures}")


@dataclass(frozen=True)
class TransferMatrix:
    """Complex linear map from labelled input modes to labelled output modes."""

    input_modes: tuple[str, ...]
    output_modes: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        inputs = check_labels(self.input_modes)
        outputs = check_labels(self.output_modes)
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.shape != (len(outputs), len(inputs)):
            raise ValueError(
                f"matrix shape {entries.shape} does not match "
                f"{len(outputs)} outputs x {len(inputs)} inputs"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "input_modes", inputs)
        object.__setattr__(self, "output_modes", outputs)
        object.__setattr__(self, "entries", entries)

    @property
    def is_physical(self) -> bool:
        return is_isometry(self)[0]


@dataclass(frozen=True)
class Element:
    """One optical device with its wiring.

    ``kind`` is one of ``beam_splitter``, ``mirror``, ``phase_shifter``,
    ``deflector``, ``canceller`` or ``custom``.  ``angle`` holds the mixing
    angle of a beam splitter or the phase of a shifter/canceller; ``matrix``
    holds explicit entries for ``custom`` elements.
    """

    kind: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    angle: float | None = None
    matrix: tuple[tuple[complex, ...], ...] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", check_labels(self.inputs))
        object.__setattr__(self, "outputs", check_labels(self.outputs))

    @property
    def is_physical(self) -> bool:
        """The canceller is non-physical by definition; customs are measured."""
        if self.kind == "canceller":
            return False
        if self.kind == "custom":
            return matrix_of(self).is_physical
        return True


def beam_splitter(
    inputs: tuple[str, str], outputs: tuple[str, str], theta: float = _BALANCED_ANGLE
) -> Element:
    """Two-port splitter with mixing angle ``theta``; pi/4 gives the balanced one."""
    return Element("beam_splitter", tuple(inputs), tuple(outputs), angle=float(theta))


def mirror(mode: str) -> Element:
    """Direction change only: identity on the mode amplitude."""
    return Element("mirror", (mode,), (mode,))


def deflector(mode: str) -> Element:
    """Same mode-level action as a mirror; redirects a beam toward a detector."""
    return Element("deflector", (mode,), (mode,))


def phase_shifter(mode: str, phi: float) -> Element:
    """Multiplies one mode amplitude by ``exp(i*phi)``."""
    return Element("phase_shifter", (mode,), (mode,), angle=float(phi))


def hypothetical_canceller(
    inputs: tuple[str, str], output: str, phi: float = 0.0
) -> Element:
    """The impossible two-in/one-out recombiner ``(1, e^{i phi})/sqrt(2)``.

    It would superimpose two parallel packets onto one mode so that a phase
    choice could make them vanish.  No lossless device can do this; the
    element exists so tests can exhibit the contradiction.
    """
    return Element("canceller", tuple(inputs), (output,), angle=float(phi))


def custom_element(
    matrix: Sequence[Sequence[complex]],
    inputs: Sequence[str],
    outputs: Sequence[str],
) -> Element:
    """Element with explicit transfer-matrix entries (used for diagnostics)."""
    rows = tuple(tuple(complex(x) for x in row) for row in matrix)
    return Element("custom", tuple(inputs), tuple(outputs), matrix=rows)


def matrix_of(element: Element) -> TransferMatrix:
    """Transfer matrix of a single element."""
    kind = element.kind
    if kind == "beam_splitter":
        if len(element.inputs) != 2 or len(element.outputs) != 2:
            raise ValueError("beam splitter wires two inputs to two outputs")
        c, s = math.cos(element.angle), math.sin(element.angle)
        entries = np.array([[c, s], [s, -c]], dtype=np.complex128)
    elif kind in ("mirror", "deflector"):
        entries = np.eye(len(element.inputs), dtype=np.complex128)
    elif kind == "phase_shifter":
        entries = np.array([[np.exp(1j * element.angle)]])
    elif kind == "canceller":
        if len(element.inputs) != 2 or len(element.outputs) != 1:
            raise ValueError("canceller merges two inputs into one output")
        entries = np.array([[1.0, np.exp(1j * element.angle)]]) / math.sqrt(2)
    elif kind == "custom":
        if element.matrix is None:
            raise ValueError("custom element requires explicit matrix entries")
        entries = np.array(element.matrix, dtype=np.complex128)
    else:
        raise ValueError(f"unknown element kind: {kind!r}")
    return TransferMatrix(element.inputs, element.outputs, entries)


def is_isometry(
    matrix: TransferMatrix | np.ndarray, tol: float = ISOMETRY_TOL
) -> tuple[bool, float]:
    """Check ``M^dag M = I`` on the input modes.

    Returns ``(flag, deviation)`` where ``deviation`` is the max-entry
    magnitude of ``M^dag M - I`` and ``flag`` is ``deviation <= tol``.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    entries = matrix.entries if isinstance(matrix, TransferMatrix) else np.asarray(matrix)
    gram = entries.conj().T @ entries
    deviation = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
    return deviation <= tol, deviation


@dataclass(frozen=True)
class ElementFailure:
    element_index: int
    deviation: float
    reason: str


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_circuit`: physical iff no element failed."""

    physical: bool
    failures: tuple[ElementFailure, ...]

    def to_json_dict(self) -> dict:
        return {
            "physical": self.physical,
            "failures": [
                {
                    "element_index": f.element_index,
                    "deviation": f.deviation,
                    "reason": f.reason,
                }
                for f in self.failures
            ],
        }


@dataclass(frozen=True)
class Circuit:
    """Feed-forward sequence of elements over a declared set of input modes."""

    elements: tuple[Element, ...]
    input_modes: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "input_modes", check_labels(self.input_modes))


def _advance_live(
    live: tuple[str, ...], element: Element, index: int
) -> tuple[str, ...]:
    """Mode set after ``element`` consumes its inputs and emits its outputs."""
    missing = [m for m in element.inputs if m not in live]
    if missing:
        raise WiringError(
            f"element {index} ({element.kind}) consumes {missing} which the "
            f"preceding elements do not provide (live modes: {list(live)})"
        )
    consumed = set(element.inputs)
    passthrough = set(live) - consumed
    clash = [m for m in element.outputs if m in passthrough]
    if clash:
        raise WiringError(
            f"element {index} ({element.kind}) emits {clash} which would "
            "collide with modes passing through it"
        )
    out: list[str] = []
    emitted = False
    for mode in live:
        if mode in consumed:
            if not emitted:
                out.extend(element.outputs)
                emitted = True
        else:
            out.append(mode)
    return tuple(out)


def _embedded_matrix(
    live: tuple[str, ...], nxt: tuple[str, ...], element: Element
) -> np.ndarray:
    """Element matrix extended by the identity on untouched live modes."""
    tm = matrix_of(element)
    emb = np.zeros((len(nxt), len(live)), dtype=np.complex128)
    wired = set(element.outputs)
    for row, mode in enumerate(nxt):
        if mode not in wired:
            emb[row, live.index(mode)] = 1.0
    for row_local, out_mode in enumerate(element.outputs):
        row = nxt.index(out_mode)
        for col_local, in_mode in enumerate(element.inputs):
            emb[row, live.index(in_mode)] = tm.entries[row_local, col_local]
    return emb


def mode_sequence(circuit: Circuit) -> list[tuple[str, ...]]:
    """Live-mode tuples before/after each element; raises WiringError on mismatch."""
    live = circuit.input_modes
    seq = [live]
    for index, element in enumerate(circuit.elements):
        live = _advance_live(live, element, index)
        seq.append(live)
    return seq


def validate_circuit(circuit: Circuit) -> ValidationReport:
    """Check wiring and per-element isometry at ``ISOMETRY_TOL``.

    Isometry failures are classified: an element whose singular values are
    all at most 1, some strictly below, only attenuates amplitudes -- still
    forbidden, since a lossless device must move probability to the
    complement of a region, never swallow it.
    """
    mode_sequence(circuit)  # raises WiringError on bad wiring
    failures = []
    for index, element in enumerate(circuit.elements):
        tm = matrix_of(element)
        ok, deviation = is_isometry(tm)
        if ok:
            continue
        singulars = np.linalg.svd(tm.entries, compute_uv=False)
        if np.all(singulars <= 1.0 + ISOMETRY_TOL) and np.min(singulars) < 1.0 - ISOMETRY_TOL:
            reason = "partial attenuation"
        else:
            reason = "not an isometry"
        failures.append(ElementFailure(index, deviation, reason))
    return ValidationReport(physical=not failures, failures=tuple(failures))


def circuit_matrix(circuit: Circuit) -> TransferMatrix:
    """Product of the embedded element matrices, wiring order respected."""
    seq = mode_sequence(circuit)
    total = np.eye(len(circuit.input_modes), dtype=np.complex128)
    for index, element in enumerate(circuit.elements):
        total = _embedded_matrix(seq[index], seq[index + 1], element) @ total
    return TransferMatrix(circuit.input_modes, seq[-1], total)


def apply(circuit: Circuit, state: ModeState, allow_nonphysical: bool = False) -> ModeState:
    """Run ``state`` through the circuit, element by element.

    Refuses non-physical circuits unless ``allow_nonphysical`` is set; the
    opt-in exists so the canceller's absurd consequence (a vanishing state)
    can be produced on purpose.
    """
    report = validate_circuit(circuit)
    if not report.physical and not allow_nonphysical:
        raise NonPhysicalCircuitError(report)
    unknown = [m for m in state.labels if m not in circuit.input_modes]
    if unknown:
        raise WiringError(f"state uses modes {unknown} outside the circuit inputs")
    live = circuit.input_modes
    vec = np.array([state.amplitude(m) for m in live], dtype=np.complex128)
    for index, element in enumerate(circuit.elements):
        nxt = _advance_live(live, element, index)
        vec = _embedded_matrix(live, nxt, element) @ vec
        live = nxt
    return ModeState(live, vec)


# ---------------------------------------------------------------------------
# Canonical devices
# ---------------------------------------------------------------------------

def interferometer_output(phi: float) -> ModeState:
    """Final state of the split-and-deflect device: ``(|u> + e^{i phi}|l>)/sqrt(2)``.

    The two packets leave the final deflectors travelling parallel on the
    upper ("u") and lower ("l") routes; ``phi`` is the shifter setting on
    the lower route.
    """
    return make_state([("u", 1 / math.sqrt(2)), ("l", np.exp(1j * phi) / math.sqrt(2))])


def mz_output(phi: float) -> ModeState:
    """Output of a full Mach-Zehnder: a second balanced splitter recombines.

    Amplitudes are ``(1 + e^{i phi})/2`` on the horizontal port "H" and
    ``(1 - e^{i phi})/2`` on the vertical port "V", i.e. the detection
    probabilities are ``cos^2(phi/2)`` and ``sin^2(phi/2)``.
    """
    z = np.exp(1j * phi)
    return make_state([("H", (1 + z) / 2), ("V", (1 - z) / 2)])


def splitter_circuit(phi: float = PHASE_OFF) -> Circuit:
    """The split-shift-deflect device: splitter, two mirrors, shifter, deflectors."""
    return Circuit(
        elements=(
            beam_splitter(("in", "vac"), ("u", "l")),
            mirror("u"),
            mirror("l"),
            phase_shifter("l", phi),
            deflector("u"),
            deflector("l"),
        ),
        input_modes=("in", "vac"),
    )


def mach_zehnder_circuit(phi: float = PHASE_OFF) -> Circuit:
    """Standard Mach-Zehnder: the splitter circuit plus a recombining splitter."""
    base = splitter_circuit(phi)
    return Circuit(
        elements=base.elements + (beam_splitter(("u", "l"), ("H", "V")),),
        input_modes=base.input_modes,
    )


def canceller_circuit(phi: float = PHASE_ON) -> Circuit:
    """Splitter followed by the impossible perfect recombiner.

    With ``phi = pi`` the two routes meet the canceller exactly out of
    phase and the output amplitude is zero everywhere: a normalized state
    mapped to the zero vector, which is the reason no such device exists.
    """
    return Circuit(
        elements=(
            beam_splitter(("in", "vac"), ("u", "l")),
            phase_shifter("l", phi),
            hypothetical_canceller(("u", "l"), "merged", 0.0),
        ),
        input_modes=("in", "vac"),
    )


# ---------------------------------------------------------------------------
# Circuit description files
# ---------------------------------------------------------------------------

def element_to_json_dict(element: Element) -> dict:
    params: dict = {}
    if element.kind == "beam_splitter":
        params["theta"] = element.angle
    elif element.kind in ("phase_shifter", "canceller"):
        params["phi"] = element.angle
    elif element.kind == "custom":
        params["matrix"] = [
            [[x.real, x.imag] for x in row] for row in element.matrix
        ]
    return {
        "kind": element.kind,
        "params": params,
        "in": list(element.inputs),
        "out": list(element.outputs),
    }


def element_from_json_dict(data: dict) -> Element:
    kind = data["kind"]
    params = data.get("params", {})
    inputs = tuple(data["in"])
    outputs = tuple(data["out"])
    if kind == "beam_splitter":
        return beam_splitter(inputs, outputs, theta=params.get("theta", _BALANCED_ANGLE))
    if kind == "mirror":
        return Element("mirror", inputs, outputs)
    if kind == "deflector":
        return Element("deflector", inputs, outputs)
    if kind == "phase_shifter":
        return Element("phase_shifter", inputs, outputs, angle=float(params["phi"]))
    if kind == "canceller":
        return Element("canceller", inputs, outputs, angle=float(params.get("phi", 0.0)))
    if kind == "custom":
        rows = tuple(
            tuple(complex(re, im) for re, im in row) for row in params["matrix"]
        )
        return Element("custom", inputs, outputs, matrix=rows)
    raise ValueError(f"unknown element kind: {kind!r}")


def circuit_to_json(circuit: Circuit) -> str:
    """Serialize as a JSON list of element descriptions."""
    return json.dumps([element_to_json_dict(e) for e in circuit.elements], indent=2)


def circuit_from_json(text: str) -> Circuit:
    """Parse a JSON element list; input modes are those consumed before produced."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("circuit file must contain a JSON list of elements")
    elements = tuple(element_from_json_dict(item) for item in data)
    produced: set[str] = set()
    inputs: list[str] = []
    for element in elements:
        for mode in element.inputs:
            if mode not in produced and mode not in inputs:
                inputs.append(mode)
        produced.update(element.outputs)
    return Circuit(elements, tuple(inputs))


def bundled_circuit_path(name: str):
    """Filesystem path of a circuit description shipped with the package."""
    if not name.endswith(".json"):
        name = f"{name}.circuit.json"
    return resources.files(__package__) / "circuits" / name


def load_bundled_circuit(name: str) -> Circuit:
    return circuit_from_json(bundled_circuit_path(name).read_text())
