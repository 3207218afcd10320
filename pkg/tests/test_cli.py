import json

from foldkin import build_exact_sequence, generate, serialize_fold, surface_from_document
from foldkin.cli import main
from foldkin.linalg import column_space


def write_doc(tmp_path, doc, name="surface.json"):
    path = tmp_path / name
    path.write_bytes(serialize_fold(doc))
    return str(path)


def test_analyze_passes_on_grid(tmp_path, capsys):
    path = write_doc(tmp_path, generate("grid", 3, 3))
    assert main(["analyze", path]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out


def test_analyze_json_is_deterministic(tmp_path, capsys):
    path = write_doc(tmp_path, generate("torus", 4, 4))
    assert main(["analyze", path, "--format", "json"]) == 0
    first = capsys.readouterr().out
    assert main(["analyze", path, "--format", "json"]) == 0
    second = capsys.readouterr().out
    assert first == second
    payload = json.loads(first)
    assert payload["all_ok"] is True
    assert payload["dims"]["rigid_h1"] == 12


def test_analyze_malformed_file_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["analyze", str(path)]) == 2


def test_analyze_missing_file_exits_2(tmp_path):
    assert main(["analyze", str(tmp_path / "absent.json")]) == 2


def test_analyze_degenerate_surface_exits_2(tmp_path):
    path = tmp_path / "degenerate.json"
    path.write_text(json.dumps({
        "vertices_coords": [[0, 0, 0], [1, 1, 1], [2, 2, 2]],
        "faces_vertices": [[0, 1, 2]],
    }))
    assert main(["analyze", str(path)]) == 2


def test_gen_writes_parseable_file(tmp_path, capsys):
    out = tmp_path / "chain.json"
    assert main(["gen", "chain", "5", "--out", str(out), "--seed", "3"]) == 0
    s = surface_from_document(
        __import__("foldkin").parse_fold(out.read_bytes()))
    assert s.num_faces == 6


def test_gen_stdout_and_determinism(tmp_path, capsys):
    assert main(["gen", "miura", "2", "3"]) == 0
    first = capsys.readouterr().out
    assert main(["gen", "miura", "2", "3"]) == 0
    assert capsys.readouterr().out == first


def test_gen_bad_params_exit_2(capsys):
    assert main(["gen", "chain", "0"]) == 2
    assert main(["gen", "chain", "two"]) == 2


def test_serial_check_passes(capsys):
    assert main(["serial", "5", "--seed", "42", "--check"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out


def test_serial_json_residuals(capsys):
    assert main(["serial", "8", "--seed", "42", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    for value in payload["residuals"].values():
        assert value < 1e-10


def test_serial_zero_exits_2(capsys):
    assert main(["serial", "0"]) == 2


def convert_setup(tmp_path, shape_args, seed=0):
    doc = generate(*shape_args, seed=seed)
    path = write_doc(tmp_path, doc)
    surface = surface_from_document(doc)
    seq = build_exact_sequence(surface)
    return path, surface, seq


def test_convert_fan_hinge_to_truss(tmp_path, capsys):
    path, surface, seq = convert_setup(tmp_path, ("single_vertex", 4, 0.5))
    rates = seq.hinge_h1().basis[:, 0]
    sol_path = tmp_path / "rates.json"
    sol_path.write_text(json.dumps(
        {f"e{e}": rates[k] for k, e in enumerate(surface.interior_edges())}))
    out_path = tmp_path / "out.json"
    code = main(["convert", path, "--input-solution", str(sol_path),
                 "--from", "hinge", "--to", "truss", "--out", str(out_path)])
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["obstructed"] is False
    assert payload["residuals"]["truss"] < 1e-9
    assert f"v0" in payload["solution"]
    assert "a0" in payload["solution"]


def test_convert_zero_vector(tmp_path, capsys):
    path, surface, seq = convert_setup(tmp_path, ("single_vertex", 4, 0.5))
    sol_path = tmp_path / "zero.json"
    sol_path.write_text("{}")
    code = main(["convert", path, "--input-solution", str(sol_path),
                 "--from", "hinge", "--to", "spatial"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    flat = [x for chunk in payload["solution"].values() for x in chunk]
    assert max(abs(x) for x in flat) == 0.0


def test_convert_obstructed_ring_exits_1(tmp_path, capsys):
    path, surface, seq = convert_setup(tmp_path, ("annulus", 1, 8))
    iota_star = seq.loop_obstruction_matrix()
    coords = column_space(iota_star.T, scale=1.0)[:, 0]
    rates = seq.hinge_h1().embed(coords)
    sol_path = tmp_path / "cycle.json"
    sol_path.write_text(json.dumps(
        {f"e{e}": rates[k] for k, e in enumerate(surface.interior_edges())}))
    code = main(["convert", path, "--input-solution", str(sol_path),
                 "--from", "hinge", "--to", "spatial"])
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["obstructed"] is True
    assert len(payload["obstruction"]) == 6
    assert max(abs(x) for x in payload["obstruction"]) > 1e-6
    assert payload["solution"] is None


def test_convert_unknown_cell_id(tmp_path, capsys):
    path, surface, seq = convert_setup(tmp_path, ("single_vertex", 4, 0.5))
    sol_path = tmp_path / "bad.json"
    sol_path.write_text(json.dumps({"e999": 1.0}))
    code = main(["convert", path, "--input-solution", str(sol_path),
                 "--from", "hinge", "--to", "spatial"])
    assert code == 2


def test_convert_spatial_to_truss(tmp_path, capsys, rng):
    path, surface, seq = convert_setup(tmp_path, ("grid", 2, 2))
    basis = seq.spatial_h2()
    values = basis.embed(rng.normal(size=basis.dim))
    sol_path = tmp_path / "spatial.json"
    sol_path.write_text(json.dumps(
        {f"f{f}": list(values[6 * f:6 * f + 6])
         for f in range(surface.num_faces)}))
    code = main(["convert", path, "--input-solution", str(sol_path),
                 "--from", "spatial", "--to", "truss"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["residuals"]["truss"] < 1e-9


def test_convert_non_cycle_exits_1(tmp_path, capsys):
    path, surface, seq = convert_setup(tmp_path, ("single_vertex", 4, 0.5))
    sol_path = tmp_path / "noncycle.json"
    e = surface.interior_edges()[0]
    sol_path.write_text(json.dumps({f"e{e}": 1.0}))
    # A single folding hinge at a degree-4 vertex violates the vertex
    # constraint, so the input is not a solution at all.
    code = main(["convert", path, "--input-solution", str(sol_path),
                 "--from", "hinge", "--to", "spatial"])
    assert code == 1
