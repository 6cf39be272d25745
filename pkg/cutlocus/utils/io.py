"""
Mesh readers and field writers.

Formats:
- OFF (ASCII) for embedded meshes.
- INTRINSIC for edge-length meshes: a header ``INTRINSIC nv nf ne``, then nf
  lines ``i j k``, then ne lines ``i j length``. Lines starting with ``#`` are
  comments.
- Legacy VTK ASCII with POINT_DATA / CELL_DATA scalars.
- Two-column CSV (``vertex_id,value``) for vertex fields and labelings, and
  ``face_id,value`` for face fields.
"""

from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import csv
import json
import logging

import numpy as np

from ..core.mesh import TriangleMesh
from .logging import to_jsonable

logger = logging.getLogger(__name__)

# hausdorff_shifted: sup over the exact set at lambda + shift of the distance to
# the extracted lambda set (lambda > 0 rows only)
SWEEP_COLUMNS = ("m", "lambda", "sup_gap", "max_grad", "hausdorff_sym", "hausdorff_E_to_GT",
                 "hausdorff_GT_to_E", "hausdorff_shifted", "C_hat", "iters", "converged")


def _content_lines(path: Path) -> List[str]:
    if not path.exists():
        raise FileNotFoundError(f"file not found: {path}")
    with open(path, "r") as f:
        return [line.split("#", 1)[0].strip() for line in f if line.split("#", 1)[0].strip()]


def read_off(path: str) -> TriangleMesh:
    """
    Read an ASCII OFF mesh.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: On a malformed file or non-triangular faces
    """
    path = Path(path)
    lines = _content_lines(path)
    if not lines or not lines[0].startswith("OFF"):
        raise ValueError(f"{path}: missing OFF header")
    header = lines[0][3:].split() or lines[1].split()
    body = lines[1:] if lines[0][3:].split() else lines[2:]
    try:
        nv, nf = int(header[0]), int(header[1])
        vertices = np.array([[float(x) for x in body[k].split()[:3]] for k in range(nv)])
        faces = []
        for k in range(nv, nv + nf):
            tokens = [int(x) for x in body[k].split()]
            if tokens[0] != 3:
                raise ValueError(f"{path}: face {k - nv} is not a triangle")
            faces.append(tokens[1:4])
    except (IndexError, ValueError) as e:
        raise ValueError(f"{path}: malformed OFF file ({e})") from e
    logger.debug(f"Read {nv} vertices and {nf} faces from {path}")
    return TriangleMesh.from_vertices(vertices, np.array(faces))


def write_off(path: str, mesh: TriangleMesh) -> Path:
    """Write an embedded mesh as ASCII OFF."""
    if mesh.vertices is None:
        raise ValueError("intrinsic meshes cannot be written as OFF; use write_intrinsic")
    path = Path(path)
    coords = mesh.vertices if mesh.vertices.shape[1] == 3 else np.column_stack(
        [mesh.vertices, np.zeros(mesh.vertex_count)])
    with open(path, "w") as f:
        f.write(f"OFF\n{mesh.vertex_count} {mesh.face_count} {mesh.edge_count}\n")
        for v in coords:
            f.write(f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for face in mesh.faces:
            f.write(f"3 {face[0]} {face[1]} {face[2]}\n")
    return path


def read_intrinsic(path: str) -> TriangleMesh:
    """
    Read an INTRINSIC edge-length mesh.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: On a malformed file or inconsistent lengths
    """
    path = Path(path)
    lines = _content_lines(path)
    header = lines[0].split() if lines else []
    if len(header) != 4 or header[0] != "INTRINSIC":
        raise ValueError(f"{path}: expected header 'INTRINSIC nv nf ne'")
    nv, nf, ne = (int(x) for x in header[1:])
    if len(lines) < 1 + nf + ne:
        raise ValueError(f"{path}: expected {nf} faces and {ne} edges")
    try:
        faces = np.array([[int(x) for x in lines[1 + k].split()] for k in range(nf)])
        lengths = {}
        for k in range(ne):
            i, j, value = lines[1 + nf + k].split()
            lengths[(int(i), int(j))] = float(value)
    except ValueError as e:
        raise ValueError(f"{path}: malformed INTRINSIC file ({e})") from e
    if faces.ndim != 2 or faces.shape[1] != 3:
        raise ValueError(f"{path}: faces must be vertex triples")
    return TriangleMesh.from_edge_lengths(faces, lengths, vertex_count=nv)


def write_intrinsic(path: str, mesh: TriangleMesh) -> Path:
    """Write a mesh in the INTRINSIC format."""
    path = Path(path)
    with open(path, "w") as f:
        f.write(f"INTRINSIC {mesh.vertex_count} {mesh.face_count} {mesh.edge_count}\n")
        for face in mesh.faces:
            f.write(f"{face[0]} {face[1]} {face[2]}\n")
        for (i, j), length in zip(mesh.edges, mesh.edge_lengths):
            f.write(f"{i} {j} {float(length)!r}\n")
    return path


def load_mesh(path: str) -> TriangleMesh:
    """Read a mesh by extension (.off or .intrinsic/.txt)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"mesh file not found: {path}")
    if path.suffix.lower() == ".off":
        return read_off(path)
    return read_intrinsic(path)


def write_vtk(path: str, mesh: TriangleMesh, point_data: Optional[Dict[str, np.ndarray]] = None,
              cell_data: Optional[Dict[str, np.ndarray]] = None) -> Path:
    """
    Write legacy VTK ASCII with scalar fields.

    Intrinsic meshes use their parameter coordinates (or zeros) as points.
    """
    path = Path(path)
    if mesh.vertices is not None:
        coords = mesh.vertices
    elif mesh.params is not None:
        coords = mesh.params
    else:
        coords = np.zeros((mesh.vertex_count, 3))
    if coords.shape[1] == 2:
        coords = np.column_stack([coords, np.zeros(len(coords))])

    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\ncutlocus field\nASCII\nDATASET POLYDATA\n")
        f.write(f"POINTS {mesh.vertex_count} double\n")
        for v in coords:
            f.write(f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        f.write(f"POLYGONS {mesh.face_count} {4 * mesh.face_count}\n")
        for face in mesh.faces:
            f.write(f"3 {face[0]} {face[1]} {face[2]}\n")
        for kind, data, count in (("POINT_DATA", point_data, mesh.vertex_count),
                                  ("CELL_DATA", cell_data, mesh.face_count)):
            if not data:
                continue
            f.write(f"{kind} {count}\n")
            for name, values in data.items():
                values = np.asarray(values, dtype=float).reshape(-1)
                if values.shape != (count,):
                    raise ValueError(f"field {name!r} has {values.size} values, expected {count}")
                f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                f.writelines(f"{float(x)!r}\n" for x in values)
    return path


def read_vtk_scalars(path: str) -> Dict[str, np.ndarray]:
    """Read the scalar fields of a VTK file written by ``write_vtk``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"file not found: {path}")
    lines = path.read_text().splitlines()
    fields = {}
    k = 0
    while k < len(lines):
        parts = lines[k].split()
        if parts and parts[0] in ("POINT_DATA", "CELL_DATA"):
            count = int(parts[1])
            k += 1
            while k < len(lines) and lines[k].startswith("SCALARS"):
                name = lines[k].split()[1]
                values = np.array([float(x) for x in lines[k + 2:k + 2 + count]])
                fields[name] = values
                k += 2 + count
            continue
        k += 1
    return fields


def write_field_csv(path: str, values, id_column: str = "vertex_id", value_column: str = "value") -> Path:
    """Write a vertex or face field as two-column CSV."""
    path = Path(path)
    values = np.asarray(values).reshape(-1)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([id_column, value_column])
        for i, value in enumerate(values):
            writer.writerow([i, int(value) if values.dtype == bool else repr(float(value))])
    return path


def read_field_csv(path: str) -> np.ndarray:
    """Read a two-column field CSV back into an array ordered by id."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"file not found: {path}")
    with open(path, "r", newline="") as f:
        rows = list(csv.reader(f))[1:]
    values = np.empty(len(rows))
    for ident, value in rows:
        values[int(ident)] = float(value)
    return values


def write_profile_csv(path: str, t, r) -> Path:
    """Write a revolution profile as two-column (t, r) CSV."""
    path = Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["t", "r"])
        writer.writerows((repr(float(a)), repr(float(b))) for a, b in zip(t, r))
    return path


def read_profile_csv(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Read a (t, r) profile CSV; a header row is optional."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"profile not found: {path}")
    with open(path, "r", newline="") as f:
        rows = [row for row in csv.reader(f) if row]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    try:
        data = np.array([[float(row[0]), float(row[1])] for row in rows])
    except (IndexError, ValueError) as e:
        raise ValueError(f"{path}: profile rows must be 't,r' numbers") from e
    if data.ndim != 2 or len(data) == 0:
        raise ValueError(f"{path}: empty profile")
    return data[:, 0], data[:, 1]


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def write_table_csv(path: str, rows: Iterable[dict], columns: Sequence[str]) -> Path:
    """Write dict rows under a fixed column order."""
    path = Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format_cell(row.get(k)) for k in columns})
    return path


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_sweep_csv(path: str, rows: Iterable[dict]) -> Path:
    """Write sweep rows with the fixed sweep columns."""
    return write_table_csv(path, rows, SWEEP_COLUMNS)


def read_sweep_csv(path: str) -> List[dict]:
    """Read a sweep CSV into typed rows."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"sweep table not found: {path}")
    with open(path, "r", newline="") as f:
        rows = list(csv.DictReader(f))
    typed = []
    for row in rows:
        out = {}
        for key, value in row.items():
            if key == "converged":
                out[key] = value == "true"
            elif key == "iters":
                out[key] = int(value) if value else None
            else:
                out[key] = float(value) if value else None
        typed.append(out)
    return typed


def write_json(path: str, data: dict) -> Path:
    """Write a JSON document (numpy values converted)."""
    path = Path(path)
    with open(path, "w") as f:
        json.dump(to_jsonable(data), f, indent=2)
    return path
