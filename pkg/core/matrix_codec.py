"""
JSON wire format for matrices, maps, Hamiltonians, states and results.
Parses documents into toolkit objects and builds plain dicts back.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from core.bogoliubov import BogoliubovMap, Statistics
from core.diagonalizer import DiagonalizationResult, QuadraticHamiltonian
from core.errors import BogoliubovError, ParseError
from core.fock_space import StateVector
from core.mode_decomposition import BosonicMode, ModeDecomposition

logger = logging.getLogger(__name__)


class MatrixCodec:
    """Decodes and encodes the toolkit's JSON documents."""

    def parse_document(self, source: Union[str, Path, dict]) -> Dict[str, Any]:
        """
        Load a JSON document from a path, a JSON string or an already decoded dict.

        Raises:
            ParseError: unreadable file or malformed JSON
        """
        if isinstance(source, dict):
            return source
        text = str(source)
        try:
            path = Path(text)
            if not text.lstrip().startswith(("{", "[")) and path.exists():
                text = path.read_text(encoding="utf-8")
            data = json.loads(text)
        except (OSError, ValueError) as e:
            logger.error(f"Could not read document '{str(source)[:80]}': {e}")
            raise ParseError(f"Malformed JSON document: {e}") from e
        if not isinstance(data, dict):
            raise ParseError("Top-level JSON value must be an object")
        return data

    def parse_matrix(self, data: Any, name: str = "matrix") -> np.ndarray:
        """
        Decode {rows, cols, re, im} (row-major) into a complex array.

        Args:
            data: Matrix object; `im` may be omitted for real matrices
            name: Field name used in error messages

        Returns:
            Complex ndarray of shape (rows, cols)
        """
        if not isinstance(data, dict):
            raise ParseError(f"'{name}' must be a matrix object")
        try:
            rows, cols = int(data["rows"]), int(data["cols"])
            re = np.asarray(data["re"], dtype=float).ravel()
            im = np.asarray(data.get("im", np.zeros(rows * cols)), dtype=float).ravel()
        except KeyError as e:
            raise ParseError(f"'{name}' is missing field {e}") from e
        except (TypeError, ValueError) as e:
            raise ParseError(f"'{name}' has non-numeric entries: {e}") from e
        if rows < 0 or cols < 0 or re.size != rows * cols or im.size != rows * cols:
            raise ParseError(f"'{name}' declares {rows}x{cols} but carries {re.size} real and {im.size} imaginary entries")
        return (re + 1j * im).reshape(rows, cols)

    def build_matrix(self, matrix) -> Dict[str, Any]:
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return {
            "rows": matrix.shape[0],
            "cols": matrix.shape[1],
            "re": matrix.real.ravel().tolist(),
            "im": matrix.imag.ravel().tolist(),
        }

    def _statistics(self, data: Dict[str, Any]) -> Statistics:
        try:
            return Statistics.parse(data["statistics"])
        except KeyError as e:
            raise ParseError("Document has no 'statistics' field") from e
        except BogoliubovError as e:
            raise ParseError(str(e)) from e

    def parse_map(self, source) -> BogoliubovMap:
        data = self.parse_document(source)
        statistics = self._statistics(data)
        u = self.parse_matrix(data.get("u"), "u")
        v = self.parse_matrix(data.get("v"), "v")
        return BogoliubovMap(u, v, statistics)

    def build_map(self, bmap: BogoliubovMap) -> Dict[str, Any]:
        return {
            "statistics": bmap.statistics.value,
            "u": self.build_matrix(bmap.u),
            "v": self.build_matrix(bmap.v),
        }

    def parse_hamiltonian(self, source, tol: Optional[float] = None) -> QuadraticHamiltonian:
        data = self.parse_document(source)
        statistics = self._statistics(data)
        h = self.parse_matrix(data.get("h"), "h")
        k = self.parse_matrix(data.get("k"), "k")
        if tol is None:
            return QuadraticHamiltonian(h, k, statistics)
        return QuadraticHamiltonian(h, k, statistics, tol)

    def build_hamiltonian(self, ham: QuadraticHamiltonian) -> Dict[str, Any]:
        return {
            "statistics": ham.statistics.value,
            "h": self.build_matrix(ham.h),
            "k": self.build_matrix(ham.k),
        }

    def parse_state(self, source) -> StateVector:
        data = self.parse_document(source)
        if data.get("basis", "occupation") != "occupation":
            raise ParseError(f"Unsupported basis '{data.get('basis')}'")
        try:
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"Bad state vector: {e}") from e
        if re.shape != im.shape:
            raise ParseError("State vector 're' and 'im' differ in length")
        return StateVector(re + 1j * im, data.get("statistics", "bosonic"))

    def build_state(self, state: StateVector) -> Dict[str, Any]:
        return {
            "basis": "occupation",
            "statistics": state.statistics.value,
            "cutoff": state.cutoff,
            "re": state.amplitudes.real.tolist(),
            "im": state.amplitudes.imag.tolist(),
        }

    def _vector(self, vector) -> Optional[Dict[str, Any]]:
        if vector is None:
            return None
        vector = np.asarray(vector, dtype=complex)
        return {"re": vector.real.tolist(), "im": vector.imag.tolist()}

    def build_decomposition(self, decomposition: ModeDecomposition) -> Dict[str, Any]:
        modes = []
        for mode in decomposition.modes:
            if isinstance(mode, BosonicMode):
                modes.append({
                    "kind": "bosonic",
                    "index": mode.index,
                    "mu": mode.mu,
                    "nu": mode.nu,
                    "vectors": {"f": self._vector(mode.f), "g": self._vector(mode.g)},
                })
            else:
                vectors = {"f": self._vector(mode.f), "eta": self._vector(mode.eta)}
                if mode.f_odd is not None:
                    vectors["f_odd"] = self._vector(mode.f_odd)
                    vectors["eta_odd"] = self._vector(mode.eta_odd)
                modes.append({
                    "kind": mode.kind.value,
                    "index": mode.index,
                    "alpha": mode.alpha,
                    "beta": mode.beta,
                    "vectors": vectors,
                })
        return {
            "statistics": decomposition.statistics.value,
            "n": decomposition.n,
            "residual": decomposition.residual,
            "modes": modes,
        }

    def build_diagonalization(self, result: DiagonalizationResult,
                              normal_ordering: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        data = {
            "statistics": result.statistics.value,
            "V": self.build_map(result.map),
            "E": [float(e) for e in np.real(result.energies)],
            "residual": result.residual,
        }
        if normal_ordering is not None:
            data["normal_ordering"] = normal_ordering
        return data


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars, complex numbers and arrays for json.dumps."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value
