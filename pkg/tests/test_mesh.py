import json

import numpy as np
import pytest

from vemlab.mesh import (MeshError, element_geometry, load_mesh, make_mesh,
                         polygon_geometry, regularity_report, save_mesh)
from vemlab.meshgen import GeneratorSpec, generate, square_mesh

UNIT_SQUARE = {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "cells": [[0, 1, 2, 3]]}


def write_json(tmp_path, doc, name="mesh.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestLoadMesh:
    def test_unit_square(self, tmp_path):
        mesh = load_mesh(write_json(tmp_path, UNIT_SQUARE))
        assert mesh.num_cells == 1
        assert mesh.num_vertices == 4
        assert len(mesh.boundary_edges()) == 4
        assert mesh.boundary_vertices.all()
        assert len(mesh.boundary_edge_list) == 4

    def test_reversed_ring_names_cell(self, tmp_path):
        doc = {"vertices": UNIT_SQUARE["vertices"], "cells": [[3, 2, 1, 0]]}
        with pytest.raises(MeshError, match="cell 0"):
            load_mesh(write_json(tmp_path, doc))

    def test_5x5_grid_counts(self, tmp_path):
        mesh = square_mesh(5)
        path = write_json(tmp_path, {
            "vertices": mesh.vertices.tolist(),
            "cells": [r.tolist() for r in mesh.cells],
        })
        loaded = load_mesh(path)
        assert loaded.num_cells == 25
        assert loaded.num_vertices == 36
        assert len(loaded.boundary_edges()) == 20

    def test_parse_failure(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(MeshError, match="cannot read"):
            load_mesh(str(path))

    def test_missing_key(self, tmp_path):
        with pytest.raises(MeshError, match="required key"):
            load_mesh(write_json(tmp_path, {"vertices": [[0, 0]]}))

    def test_non_manifold_edge(self):
        # three triangles all sharing edge (0, 1)
        verts = [[0, 0], [1, 0], [0, 1], [1, 1], [0.5, -1]]
        cells = [[0, 1, 2], [1, 0, 4], [0, 1, 3]]
        with pytest.raises(MeshError, match=r"(non-manifold|traversed twice)"):
            make_mesh(verts, cells)

    def test_repeated_vertex_in_ring(self):
        with pytest.raises(MeshError, match="repeats"):
            make_mesh(UNIT_SQUARE["vertices"], [[0, 1, 1, 2]])

    def test_short_ring(self):
        with pytest.raises(MeshError, match="fewer than 3"):
            make_mesh(UNIT_SQUARE["vertices"], [[0, 1]])

    def test_inconsistent_boundary_list(self, tmp_path):
        doc = dict(UNIT_SQUARE, boundary_vertices=[0, 1])
        with pytest.raises(MeshError, match="boundary"):
            load_mesh(write_json(tmp_path, doc))


class TestSaveMesh:
    @pytest.mark.parametrize("spec", [
        GeneratorSpec("square", 25),
        GeneratorSpec("lloyd0", 100, seed=5),
    ])
    def test_round_trip_bit_exact(self, tmp_path, spec):
        mesh = generate(spec)
        path = str(tmp_path / "m.json")
        save_mesh(mesh, path)
        back = load_mesh(path)
        assert np.array_equal(back.vertices, mesh.vertices)
        assert len(back.cells) == len(mesh.cells)
        for a, b in zip(back.cells, mesh.cells):
            assert np.array_equal(a, b)
        assert np.array_equal(back.boundary_vertices, mesh.boundary_vertices)

    def test_unwritable_path(self):
        mesh = square_mesh(2)
        with pytest.raises(OSError):
            save_mesh(mesh, "/nonexistent-dir/mesh.json")


class TestElementGeometry:
    def test_unit_square(self):
        geom = polygon_geometry(np.array(UNIT_SQUARE["vertices"], dtype=float))
        assert geom.area == pytest.approx(1.0, abs=1e-15)
        assert geom.centroid == pytest.approx([0.5, 0.5], abs=1e-15)
        assert geom.diameter == pytest.approx(np.sqrt(2.0), abs=1e-15)

    def test_triangle(self):
        geom = polygon_geometry(np.array([[0, 0], [1, 0], [0, 1]], dtype=float))
        assert geom.area == pytest.approx(0.5, abs=1e-15)
        assert geom.centroid == pytest.approx([1 / 3, 1 / 3], abs=1e-15)

    def test_closed_polygon_identity_on_voronoi_cells(self):
        mesh = generate(GeneratorSpec("lloyd0", 100, seed=1))
        for ci in range(mesh.num_cells):
            geom = element_geometry(mesh, ci)
            resultant = (geom.edge_lengths[:, None] * geom.edge_normals).sum(axis=0)
            assert np.abs(resultant).max() < 1e-12

    def test_degenerate_cell_rejected(self):
        flat = np.array([[0, 0], [1, 0], [2, 0]], dtype=float)
        with pytest.raises(MeshError):
            polygon_geometry(flat)

    def test_outward_normals(self):
        geom = polygon_geometry(np.array(UNIT_SQUARE["vertices"], dtype=float))
        expected = np.array([[0, -1], [1, 0], [0, 1], [-1, 0]], dtype=float)
        assert np.allclose(geom.edge_normals, expected)


class TestRegularity:
    def test_unit_square_rho(self):
        mesh = square_mesh(1)
        rep = regularity_report(mesh)
        assert rep.rho[0] == pytest.approx(0.5 / np.sqrt(2.0), abs=1e-6)
        assert rep.non_star_cells.size == 0

    def test_concave_cells_star_shaped(self):
        mesh = generate(GeneratorSpec("concave", 25))
        rep = regularity_report(mesh)
        assert rep.min_rho > 0.01
        assert rep.non_star_cells.size == 0

    def test_lloyd_improves_edge_ratio(self):
        r0 = regularity_report(generate(GeneratorSpec("lloyd0", 100, seed=2)))
        r100 = regularity_report(generate(GeneratorSpec("lloyd100", 100, seed=2)))
        assert r100.min_edge_ratio > r0.min_edge_ratio

    def test_rho_in_unit_interval(self):
        mesh = generate(GeneratorSpec("lloyd0", 40, seed=9))
        rep = regularity_report(mesh)
        assert np.all(rep.rho > 0.0)
        assert np.all(rep.rho <= 1.0)


def test_partition_of_unity_all_families():
    for spec in (GeneratorSpec("square", 100), GeneratorSpec("concave", 100),
                 GeneratorSpec("lloyd0", 100, seed=3),
                 GeneratorSpec("lloyd100", 100, seed=3)):
        mesh = generate(spec)
        total = sum(element_geometry(mesh, ci).area for ci in range(mesh.num_cells))
        assert total == pytest.approx(1.0, rel=1e-12)
