"""Triangle meshes of revolved profiles and Wavefront OBJ output."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .geometry import SurfaceMesh


def triangulate(mesh: SurfaceMesh, wrap_x: bool | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Vertices (V, 3) and zero-based triangles (F, 3); always periodic in y."""
    nx, ny = mesh.shape
    wrap_x = mesh.closed_x if wrap_x is None else wrap_x
    V = mesh.vertices.reshape(-1, 3)
    idx = np.arange(nx * ny).reshape(nx, ny)
    rows = nx if wrap_x else nx - 1
    faces = []
    for i in range(rows):
        i2 = (i + 1) % nx
        for j in range(ny):
            j2 = (j + 1) % ny
            a, b, c, d = idx[i, j], idx[i, j2], idx[i2, j2], idx[i2, j]
            faces.append((a, b, c))
            faces.append((a, c, d))
    F = np.array(faces, dtype=np.int64)
    # (i,j) -> (i,j+1) -> (i+1,j+1) gives Z_y x Z_x; flip to make closed meshes enclose positive volume
    if signed_volume(V, F) < 0:
        F = F[:, ::-1]
    return V, F


def signed_volume(V: np.ndarray, F: np.ndarray) -> float:
    a, b, c = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6)


def euler_characteristic(F: np.ndarray, n_vertices: int) -> int:
    edges = np.sort(np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]]), axis=1)
    n_edges = np.unique(edges, axis=0).shape[0]
    return int(n_vertices - n_edges + F.shape[0])


def write_obj(path, V: np.ndarray, F: np.ndarray, header: list | None = None) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        for line in header or []:
            fh.write(f"# {line}\n")
        for v in V:
            fh.write(f"v {v[0]:.12g} {v[1]:.12g} {v[2]:.12g}\n")
        for f in F + 1:
            fh.write(f"f {f[0]} {f[1]} {f[2]}\n")
    return path


def read_obj(path) -> tuple[np.ndarray, np.ndarray]:
    V, F = [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("v "):
            V.append([float(t) for t in line.split()[1:4]])
        elif line.startswith("f "):
            F.append([int(t.split("/")[0]) - 1 for t in line.split()[1:4]])
    return np.array(V), np.array(F, dtype=np.int64)
