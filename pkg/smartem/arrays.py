"""
Phased-array and RIS beam synthesis with finite phase quantization.

Arrays are linear, with element ``n`` at ``n·d`` (d in wavelengths) and a
``cos^q θ`` power pattern per element; θ is measured from broadside in the
scan plane. Directivity is normalized by the radiated power integrated over
the sphere, assuming rotational symmetry around the array axis, so that
``D(θ) = 2·P(θ) / ∫ P(θ') cos θ' dθ'``.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import trapezoid

from smartem.errors import DomainError

TWO_PI = 2.0 * math.pi

# Largest codeword space (in total bits) searched exhaustively
EXHAUSTIVE_LIMIT_BITS = 20

# Minimum integration samples across one main lobe (null to null)
MIN_LOBE_SAMPLES = 16

# Phase grid used by the continuous coordinate ascent
CONTINUOUS_SEARCH_LEVELS = 720

_TIE_EPS = 1e-9
_CHUNK_ROWS = 4096
_DIRECTIVITY_FLOOR = 1e-30

BitsSpec = Union[int, tuple[int, ...], Literal["continuous"]]


class ArraySpec(BaseModel):
    """Geometry of a uniform linear array."""

    model_config = ConfigDict(frozen=True)

    n_elements: int = Field(default=8, ge=1)
    spacing_wavelengths: float = Field(default=0.5, gt=0)
    element_exponent: float = Field(default=2.0, ge=0)
    geometry: Literal["linear"] = "linear"

    @property
    def positions(self) -> np.ndarray:
        """Element positions in wavelengths."""
        return np.arange(self.n_elements, dtype=float) * self.spacing_wavelengths


class PhaseCodeword(BaseModel):
    """Per-element phases (radians in [0, 2π)) with unit amplitudes."""

    model_config = ConfigDict(frozen=True)

    phases: tuple[float, ...]
    bits: BitsSpec = "continuous"

    @property
    def amplitudes(self) -> tuple[float, ...]:
        return (1.0,) * len(self.phases)

    def excitation(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.phases, dtype=float))

    def is_on_grid(self) -> bool:
        """True when every phase sits on its element's quantization grid."""
        if self.bits == "continuous":
            return True
        bits = _per_element_bits(self.bits, len(self.phases))
        for phase, b in zip(self.phases, bits):
            step = TWO_PI / (2**b)
            k = phase / step
            if abs(k - round(k)) > 1e-9 or not (0 <= round(k) < 2**b):
                return False
        return True


class CodebookEntry(BaseModel):
    """One pre-designed beam: the direction pair it serves and its phases."""

    incident_rad: float
    departure_rad: float
    codeword: PhaseCodeword


class Codebook(BaseModel):
    """A set of codewords sharing one quantization depth."""

    bits: BitsSpec
    entries: list[CodebookEntry] = Field(min_length=1)


class EnvelopePoint(BaseModel):
    """Best achievable directivity at one scan angle."""

    angle_rad: float
    directivity_dbi: float
    codeword: PhaseCodeword


def hybrid_bits(n_elements: int) -> tuple[int, ...]:
    """Alternating 1/2-bit assignment (1, 2, 1, 2, ...)."""
    return tuple(1 if n % 2 == 0 else 2 for n in range(n_elements))


def parse_bits_label(label: str, n_elements: int) -> BitsSpec:
    """
    Translate a CLI bits token into a bit assignment.

    Args:
        label: ``"1"``..``"4"``, ``"hybrid"`` or ``"continuous"``.
        n_elements: Array size, used to expand ``hybrid``.
    """
    token = label.strip().lower()
    if token in ("continuous", "cont", "inf"):
        return "continuous"
    if token == "hybrid":
        return hybrid_bits(n_elements)
    try:
        bits = int(token)
    except ValueError:
        raise DomainError(f"unknown bits label: {label!r}") from None
    if bits not in (1, 2, 3, 4):
        raise DomainError(f"bits must be within 1..4, got {bits}")
    return bits


def _per_element_bits(bits: BitsSpec, n_elements: int) -> tuple[int, ...]:
    if bits == "continuous":
        raise DomainError("continuous codewords have no bit grid")
    if isinstance(bits, int):
        per_element = (bits,) * n_elements
    else:
        per_element = tuple(int(b) for b in bits)
    if len(per_element) != n_elements:
        raise DomainError(
            f"bit assignment has {len(per_element)} entries for {n_elements} elements"
        )
    if any(b not in (1, 2, 3, 4) for b in per_element):
        raise DomainError(f"bits must be within 1..4, got {per_element}")
    return per_element


def _wrap(phases: np.ndarray) -> np.ndarray:
    wrapped = np.mod(phases, TWO_PI)
    wrapped[wrapped >= TWO_PI] = 0.0
    return wrapped


def _check_angle(angle: float) -> None:
    if not abs(angle) <= math.pi / 2 + 1e-12:
        raise DomainError(f"angle must lie within ±π/2, got {angle}")


def element_pattern(spec: ArraySpec, angles: np.ndarray) -> np.ndarray:
    """Element power pattern cos^q θ (zero behind the array plane)."""
    return np.clip(np.cos(angles), 0.0, None) ** spec.element_exponent


def _steering(spec: ArraySpec, angles: np.ndarray) -> np.ndarray:
    """Per-element propagation phasors, shape (N, A)."""
    return np.exp(1j * TWO_PI * np.outer(spec.positions, np.sin(angles)))


def _integration_angles(spec: ArraySpec) -> np.ndarray:
    step = math.radians(1.0)
    aperture = spec.n_elements * spec.spacing_wavelengths
    step = min(step, (2.0 / aperture) / MIN_LOBE_SAMPLES)
    samples = int(math.ceil(math.pi / step)) + 1
    return np.linspace(-math.pi / 2, math.pi / 2, samples)


@lru_cache(maxsize=64)
def _radiation_matrix(spec: ArraySpec) -> np.ndarray:
    """Hermitian matrix R with radiated power = a^H R a (up to 2π)."""
    theta = _integration_angles(spec)
    v = _steering(spec, theta)
    weight = element_pattern(spec, theta) * np.cos(theta)
    integrand = np.conj(v)[:, None, :] * v[None, :, :] * weight
    matrix = trapezoid(integrand, theta, axis=-1)
    matrix.setflags(write=False)
    return matrix


def _directivity_linear(
    spec: ArraySpec, excitations: np.ndarray, angles: np.ndarray
) -> np.ndarray:
    """Linear directivity for K excitations (K, N) at A angles -> (K, A)."""
    excitations = np.atleast_2d(excitations)
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    af = excitations @ _steering(spec, angles)
    numerator = np.abs(af) ** 2 * element_pattern(spec, angles)
    radiated = np.real(
        np.einsum(
            "kn,nm,km->k", np.conj(excitations), _radiation_matrix(spec), excitations
        )
    )
    return 2.0 * numerator / radiated[:, None]


def _to_dbi(linear: np.ndarray) -> np.ndarray:
    return 10.0 * np.log10(np.maximum(linear, _DIRECTIVITY_FLOOR))


def directivity_pattern(
    spec: ArraySpec, codeword: PhaseCodeword, angles: Sequence[float]
) -> np.ndarray:
    """Directivity in dBi of ``codeword`` at every angle of ``angles``."""
    if len(codeword.phases) != spec.n_elements:
        raise DomainError(
            f"codeword has {len(codeword.phases)} phases for {spec.n_elements} elements"
        )
    angles_arr = np.asarray(angles, dtype=float)
    return _to_dbi(_directivity_linear(spec, codeword.excitation(), angles_arr)[0])


def array_factor_directivity(
    spec: ArraySpec, codeword: PhaseCodeword, angle: float
) -> float:
    """
    Directivity (dBi) of the element-weighted array factor at ``angle``.

    Args:
        spec: Array geometry.
        codeword: Element phases.
        angle: Scan angle in radians, |angle| <= π/2.
    """
    _check_angle(angle)
    return float(directivity_pattern(spec, codeword, [angle])[0])


def steer_continuous(spec: ArraySpec, target_angle: float) -> PhaseCodeword:
    """Phase-conjugate steering: φ_n = −2π·x_n·sin(θ0) mod 2π."""
    _check_angle(target_angle)
    phases = _wrap(-TWO_PI * spec.positions * math.sin(target_angle))
    return PhaseCodeword(phases=tuple(float(p) for p in phases), bits="continuous")


def _quantize_phases(phases: np.ndarray, bits: Sequence[int]) -> np.ndarray:
    levels = np.asarray([2**b for b in bits], dtype=float)
    step = TWO_PI / levels
    position = _wrap(np.asarray(phases, dtype=float)) / step
    lower = np.floor(position)
    upper = lower + 1.0
    d_lower = position - lower
    d_upper = upper - position
    k_lower = np.mod(lower, levels)
    k_upper = np.mod(upper, levels)
    k = np.where(
        d_upper < d_lower - _TIE_EPS,
        k_upper,
        np.where(d_lower < d_upper - _TIE_EPS, k_lower, np.minimum(k_lower, k_upper)),
    )
    return k * step


def quantize(codeword: PhaseCodeword, bits: BitsSpec) -> PhaseCodeword:
    """
    Snap every phase to the nearest point of its 2^b grid on the circle.

    Ties go to the smaller grid index. ``bits`` is either one depth for all
    elements or a per-element tuple (hybrid arrays).
    """
    per_element = _per_element_bits(bits, len(codeword.phases))
    phases = _quantize_phases(np.asarray(codeword.phases), per_element)
    out_bits: BitsSpec = bits if isinstance(bits, int) else per_element
    return PhaseCodeword(phases=tuple(float(p) for p in phases), bits=out_bits)


def expected_quantization_loss_db(bits: BitsSpec) -> float:
    """Large-array mean loss −20·log10(sinc(π/2^b)); 0 for continuous phases."""
    if bits == "continuous":
        return 0.0
    if not isinstance(bits, int):
        raise DomainError("expected loss needs a single bit depth")
    if bits not in (1, 2, 3, 4):
        raise DomainError(f"bits must be within 1..4, got {bits}")
    return float(-20.0 * math.log10(np.sinc(1.0 / 2**bits)))


def quantization_loss_db(
    spec: ArraySpec,
    target_angle: float,
    bits: BitsSpec,
    illumination: Optional[Sequence[float]] = None,
) -> float:
    """
    Directivity lost at ``target_angle`` by quantizing the steering codeword.

    Args:
        spec: Array geometry.
        target_angle: Steering angle in radians.
        bits: Quantization depth (single or per element).
        illumination: Optional per-element incident phases that the codeword
            compensates (RIS illumination); zero when omitted.

    Returns:
        Continuous directivity minus quantized directivity, in dB.
    """
    _check_angle(target_angle)
    incident = (
        np.zeros(spec.n_elements)
        if illumination is None
        else np.asarray(illumination, dtype=float)
    )
    if incident.shape != (spec.n_elements,):
        raise DomainError("illumination needs one phase per element")

    steering = np.asarray(steer_continuous(spec, target_angle).phases)
    continuous = _wrap(steering - incident)
    quantized = _quantize_phases(continuous, _per_element_bits(bits, spec.n_elements))

    excitations = np.exp(1j * (incident + np.vstack([continuous, quantized])))
    directivity = _directivity_linear(spec, excitations, np.array([target_angle]))[:, 0]
    return float(_to_dbi(directivity[0:1])[0] - _to_dbi(directivity[1:2])[0])


def _level_table(bits: Sequence[int]) -> list[np.ndarray]:
    return [TWO_PI * np.arange(2**b) / 2**b for b in bits]


def _exhaustive_best(
    spec: ArraySpec, bits: tuple[int, ...], angles: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Best directivity per angle over the full codeword grid.

    Element 0 is pinned to phase 0, which loses nothing because a global
    phase rotation leaves every pattern unchanged.
    """
    levels = _level_table(bits)
    best_value = np.full(angles.shape, -np.inf)
    best_phases = np.zeros((angles.size, spec.n_elements))

    combos = itertools.product(*levels[1:])
    while True:
        chunk = list(itertools.islice(combos, _CHUNK_ROWS))
        if not chunk:
            break
        phases = np.zeros((len(chunk), spec.n_elements))
        if spec.n_elements > 1:
            phases[:, 1:] = np.asarray(chunk, dtype=float)
        directivity = _directivity_linear(spec, np.exp(1j * phases), angles)
        winner = np.argmax(directivity, axis=0)
        value = directivity[winner, np.arange(angles.size)]
        better = value > best_value
        best_value[better] = value[better]
        best_phases[better] = phases[winner[better]]
    return best_value, best_phases


def _ascend(
    spec: ArraySpec,
    phases: np.ndarray,
    angle: float,
    levels: list[np.ndarray],
) -> tuple[float, np.ndarray]:
    """Coordinate ascent: retune one element at a time until nothing improves."""
    phases = phases.copy()
    target = np.array([angle])
    current = float(_directivity_linear(spec, np.exp(1j * phases), target)[0, 0])
    improved = True
    while improved:
        improved = False
        for n in range(spec.n_elements):
            trial = np.repeat(phases[None, :], levels[n].size, axis=0)
            trial[:, n] = levels[n]
            values = _directivity_linear(spec, np.exp(1j * trial), target)[:, 0]
            k = int(np.argmax(values))
            if values[k] > current * (1.0 + 1e-12):
                current = float(values[k])
                phases = trial[k]
                improved = True
    return current, phases


def _greedy_best(
    spec: ArraySpec, bits: tuple[int, ...], angle: float
) -> tuple[float, np.ndarray]:
    start = np.asarray(quantize(steer_continuous(spec, angle), bits).phases)
    return _ascend(spec, start, angle, _level_table(bits))


def _continuous_best(
    spec: ArraySpec, angle: float, starts: list[np.ndarray]
) -> tuple[float, np.ndarray]:
    grid = TWO_PI * np.arange(CONTINUOUS_SEARCH_LEVELS) / CONTINUOUS_SEARCH_LEVELS
    levels = [grid] * spec.n_elements
    best_value, best_phases = -np.inf, starts[0]
    for start in starts:
        value, phases = _ascend(spec, start, angle, levels)
        if value > best_value:
            best_value, best_phases = value, phases
    return best_value, best_phases


def scan_loss_envelope(
    spec: ArraySpec,
    bits_assignment: BitsSpec,
    angle_grid: Sequence[float],
    method: Literal["auto", "exhaustive", "greedy"] = "auto",
    workers: int = 1,
) -> list[EnvelopePoint]:
    """
    Best achievable directivity at each scan angle under a bit assignment.

    Quantized spaces of at most 2^20 codewords are searched exhaustively;
    larger ones start from the quantized steering codeword and apply
    single-element phase changes (ascending element index) until no change
    improves directivity. The continuous envelope runs the same ascent over a
    fine phase grid, started from the conjugate steering codeword and, when
    affordable, from the exhaustive 2-bit optimum.

    Args:
        spec: Array geometry.
        bits_assignment: ``"continuous"``, one depth, or per-element depths.
        angle_grid: Scan angles in radians.
        method: Force ``exhaustive`` or ``greedy``; ``auto`` picks by size.
        workers: Thread count for per-angle searches.
    """
    angles = np.asarray(angle_grid, dtype=float)
    if angles.size == 0:
        raise DomainError("angle grid must not be empty")
    for angle in angles:
        _check_angle(float(angle))

    if bits_assignment == "continuous":
        starts_by_angle: list[list[np.ndarray]] = [
            [np.asarray(steer_continuous(spec, float(a)).phases)] for a in angles
        ]
        two_bit = (2,) * spec.n_elements
        if sum(two_bit) <= EXHAUSTIVE_LIMIT_BITS:
            _, seeds = _exhaustive_best(spec, two_bit, angles)
            for starts, seed in zip(starts_by_angle, seeds):
                starts.append(seed)

        def _solve_continuous(i: int) -> tuple[float, np.ndarray]:
            return _continuous_best(spec, float(angles[i]), starts_by_angle[i])

        with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
            solved = list(executor.map(_solve_continuous, range(angles.size)))
        return [
            EnvelopePoint(
                angle_rad=float(a),
                directivity_dbi=float(_to_dbi(np.array([value]))[0]),
                codeword=PhaseCodeword(
                    phases=tuple(float(p) for p in _wrap(phases)), bits="continuous"
                ),
            )
            for a, (value, phases) in zip(angles, solved)
        ]

    bits = _per_element_bits(bits_assignment, spec.n_elements)
    out_bits: BitsSpec = bits_assignment if isinstance(bits_assignment, int) else bits
    exhaustive = method == "exhaustive" or (
        method == "auto" and sum(bits) <= EXHAUSTIVE_LIMIT_BITS
    )

    if exhaustive:
        values, phases = _exhaustive_best(spec, bits, angles)
        solved = list(zip(values, phases))
    else:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
            solved = list(
                executor.map(lambda a: _greedy_best(spec, bits, float(a)), angles)
            )

    return [
        EnvelopePoint(
            angle_rad=float(a),
            directivity_dbi=float(_to_dbi(np.array([value]))[0]),
            codeword=PhaseCodeword(phases=tuple(float(p) for p in ph), bits=out_bits),
        )
        for a, (value, ph) in zip(angles, solved)
    ]


def ris_reflection_codeword(
    spec: ArraySpec, incident_angle: float, departure_angle: float
) -> PhaseCodeword:
    """Continuous phase profile redirecting ``incident_angle`` to ``departure_angle``.

    Both angles are signed from the surface normal; the specular partner of
    θi is θo = −θi.
    """
    for angle, what in ((incident_angle, "incident"), (departure_angle, "departure")):
        if not abs(angle) < math.pi / 2:
            raise DomainError(f"{what} direction {angle} rad is not in front of the surface")
    phases = _wrap(
        -TWO_PI
        * spec.positions
        * (math.sin(incident_angle) + math.sin(departure_angle))
    )
    return PhaseCodeword(phases=tuple(float(p) for p in phases), bits="continuous")


def build_ris_codebook(
    spec: ArraySpec,
    incident_angle: float,
    departure_angles: Sequence[float],
    bits: BitsSpec,
) -> Codebook:
    """
    Site-specific RIS codebook: one beam per departure direction.

    Each entry conjugates the summed incident and departure path phases per
    element, then quantizes to ``bits``.

    Raises:
        DomainError: If a direction is behind the surface or no departure
            direction is given.
    """
    if not departure_angles:
        raise DomainError("a codebook needs at least one departure direction")
    entries = []
    for departure in departure_angles:
        codeword = ris_reflection_codeword(spec, incident_angle, departure)
        if bits != "continuous":
            codeword = quantize(codeword, bits)
        entries.append(
            CodebookEntry(
                incident_rad=float(incident_angle),
                departure_rad=float(departure),
                codeword=codeword,
            )
        )
    return Codebook(bits=bits, entries=entries)


def bistatic_array_factor_db(
    spec: ArraySpec,
    codeword: PhaseCodeword,
    incident_angle: float,
    departure_angles: Sequence[float],
) -> np.ndarray:
    """Normalized reflected array factor |AF|/N in dB over departure angles."""
    departures = np.asarray(departure_angles, dtype=float)
    path = TWO_PI * np.outer(spec.positions, math.sin(incident_angle) + np.sin(departures))
    af = np.exp(1j * (path + np.asarray(codeword.phases)[:, None])).sum(axis=0)
    return 20.0 * np.log10(np.maximum(np.abs(af) / spec.n_elements, 1e-15))


def wide_beam_codeword(
    spec: ArraySpec,
    center_angle: float,
    width: float,
    bits: BitsSpec = "continuous",
    curvatures: int = 64,
) -> PhaseCodeword:
    """
    Wide initial-access beam: steering plus a quadratic phase spread.

    The spread is picked from a grid to maximize the minimum directivity over
    ``[center − width/2, center + width/2]``, sampled every degree.
    """
    _check_angle(center_angle)
    if width <= 0:
        raise DomainError(f"beam width must be positive, got {width}")
    low = max(-math.pi / 2, center_angle - width / 2)
    high = min(math.pi / 2, center_angle + width / 2)
    sector = np.linspace(low, high, max(2, int(math.degrees(high - low)) + 1))

    steering = np.asarray(steer_continuous(spec, center_angle).phases)
    offsets = spec.positions - spec.positions.mean()
    half_aperture = max(float(np.abs(offsets).max()), spec.spacing_wavelengths)
    spreads = np.linspace(0.0, 4.0 * math.pi / half_aperture**2, curvatures)

    candidates = _wrap(steering[None, :] + spreads[:, None] * offsets[None, :] ** 2)
    if bits != "continuous":
        per_element = _per_element_bits(bits, spec.n_elements)
        candidates = np.vstack([_quantize_phases(row, per_element) for row in candidates])
    worst = _directivity_linear(spec, np.exp(1j * candidates), sector).min(axis=1)
    best = int(np.argmax(worst))
    return PhaseCodeword(phases=tuple(float(p) for p in candidates[best]), bits=bits)


def codebook_to_json(codebook: Codebook) -> str:
    """Export a codebook as JSON with phases at 9 significant digits."""
    rounded = codebook.model_copy(
        update={
            "entries": [
                entry.model_copy(
                    update={
                        "codeword": entry.codeword.model_copy(
                            update={
                                "phases": tuple(
                                    float(f"{p:.9g}") for p in entry.codeword.phases
                                )
                            }
                        )
                    }
                )
                for entry in codebook.entries
            ]
        }
    )
    return rounded.model_dump_json(indent=2)
