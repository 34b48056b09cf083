"""JSON encodings for states, operators, graphs, and certificates.

Density matrices: {"m": int, "n": int, "matrix": [[[re, im], ...], ...]}
row-major.  The exact-rational form marks itself with "rational": true
and encodes each scalar part as {"num": "<int>", "den": "<int>"} strings
so arbitrary-precision integers survive the trip.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import Array, DensityMatrix
from .qsep import QRat, QsepCertificate, QsepInstance


class InputFormatError(ValueError):
    """Input file is malformed."""


def matrix_to_json(mat: Array) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in mat]


def matrix_from_json(obj) -> Array:
    try:
        rows = [[complex(cell[0], cell[1]) for cell in row] for row in obj]
    except (TypeError, IndexError) as exc:
        raise InputFormatError(f"bad matrix encoding: {exc}") from exc
    mat = np.array(rows, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InputFormatError(f"matrix must be square, got shape {mat.shape}")
    return mat


def _fraction_to_json(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _fraction_from_json(obj) -> Fraction:
    try:
        return Fraction(int(obj["num"]), int(obj["den"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad rational scalar: {exc}") from exc


def _qrat_to_json(x: QRat) -> dict:
    return {"re": _fraction_to_json(x.re), "im": _fraction_to_json(x.im)}


def _qrat_from_json(obj) -> QRat:
    try:
        return QRat(_fraction_from_json(obj["re"]), _fraction_from_json(obj["im"]))
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"bad complex rational: {exc}") from exc


def density_to_json(rho: DensityMatrix) -> dict:
    return {"m": rho.m, "n": rho.n, "matrix": matrix_to_json(rho.mat)}


def density_from_json(obj) -> DensityMatrix:
    try:
        m, n = int(obj["m"]), int(obj["n"])
        matrix = obj["matrix"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"density matrix JSON needs m, n, matrix: {exc}") from exc
    if obj.get("rational"):
        mat = rational_matrix_from_json(matrix)
        dense = np.array(
            [[float(x.re) + 1j * float(x.im) for x in row] for row in mat], dtype=complex
        )
        try:
            return DensityMatrix.make(m, n, dense)
        except ValueError as exc:
            raise InputFormatError(str(exc)) from exc
    try:
        return DensityMatrix.make(m, n, matrix_from_json(matrix))
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc


def rational_matrix_to_json(mat) -> list:
    return [[_qrat_to_json(x) for x in row] for row in mat]


def rational_matrix_from_json(obj):
    try:
        return tuple(tuple(_qrat_from_json(x) for x in row) for row in obj)
    except TypeError as exc:
        raise InputFormatError(f"bad rational matrix: {exc}") from exc


def rational_density_from_json(obj):
    """(matrix of QRat, m, n) for the exact-rational pipeline."""
    try:
        m, n = int(obj["m"]), int(obj["n"])
        mat = rational_matrix_from_json(obj["matrix"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"rational density JSON needs m, n, matrix: {exc}") from exc
    return mat, m, n


def qsep_instance_to_json(inst: QsepInstance) -> dict:
    return {
        "m": inst.m,
        "n": inst.n,
        "rational": True,
        "matrix": rational_matrix_to_json(inst.rho),
        "delta_p": _fraction_to_json(inst.delta_p),
        "eps_prime": _fraction_to_json(inst.eps_prime),
        "delta_prime": _fraction_to_json(inst.delta_prime),
    }


def qsep_instance_from_json(obj) -> QsepInstance:
    mat, m, n = rational_density_from_json(obj)
    try:
        return QsepInstance(
            m,
            n,
            mat,
            delta_p=_fraction_from_json(obj["delta_p"]),
            eps_prime=_fraction_from_json(obj["eps_prime"]),
            delta_prime=_fraction_from_json(obj["delta_prime"]),
        )
    except KeyError as exc:
        raise InputFormatError(f"instance JSON missing field: {exc}") from exc


def qsep_certificate_to_json(cert: QsepCertificate) -> dict:
    return {
        "m": cert.m,
        "n": cert.n,
        "terms": [
            {
                "weight": _fraction_to_json(p),
                "alpha": [_qrat_to_json(x) for x in alpha],
                "beta": [_qrat_to_json(x) for x in beta],
            }
            for p, alpha, beta in cert.terms
        ],
    }


def qsep_certificate_from_json(obj) -> QsepCertificate:
    try:
        terms = tuple(
            (
                _fraction_from_json(t["weight"]),
                tuple(_qrat_from_json(x) for x in t["alpha"]),
                tuple(_qrat_from_json(x) for x in t["beta"]),
            )
            for t in obj["terms"]
        )
        return QsepCertificate(int(obj["m"]), int(obj["n"]), terms)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad certificate JSON: {exc}") from exc


def graph_from_json(obj):
    from .gadgets import Graph

    try:
        return Graph.from_edges(int(obj["n"]), [tuple(e) for e in obj["edges"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"graph JSON needs n and edges: {exc}") from exc


def graph_to_json(graph) -> dict:
    edges = [
        [i, j]
        for i in range(graph.n)
        for j in range(i + 1, graph.n)
        if graph.adjacency[i, j]
    ]
    return {"n": graph.n, "edges": edges}


def load_json(path: str | Path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputFormatError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON in {path}: {exc}") from exc


def dump_json(obj, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")
