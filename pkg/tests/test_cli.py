import json
import sys
import subprocess


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "shallowrange.cli", *args],
                          capture_output=True, text=True)


def write_queries(path, rows):
    with open(path, "w") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")


TRI_Q = {"type": "fat_triangle",
         "vertices": [[0.2, 0.2], [0.8, 0.25], [0.5, 0.7]]}
CAP_Q = {"type": "cap", "center": [0.5, 0.5], "radius": 0.2,
         "chord": [0.0, 1.0, 0.45]}
NEAR_Q = {"type": "nearest_above", "q": [0.5, 0.6],
          "line": [0.0, 1.0, 0.4]}
APPROX_Q = {"type": "approx_count", "center": [0.5, 0.5], "radius": 0.3,
            "chord": [0.0, 1.0, 0.4], "delta": 0.25}


def gen_points(tmp_path, n=256):
    pts = str(tmp_path / "pts.csv")
    r = run_cli("gen", "--n", str(n), "--seed", "3", "--out", pts)
    assert r.returncode == 0, r.stderr
    return pts


def test_gen_build_query_round_trip(tmp_path):
    pts = gen_points(tmp_path)
    idx = str(tmp_path / "caps.shtr")
    r = run_cli("build", "--points", pts, "--family", "cap",
                "--seed", "3", "--leaf-size", "64", "--out", idx)
    assert r.returncode == 0, r.stderr

    qf = str(tmp_path / "q.jsonl")
    write_queries(qf, [CAP_Q, NEAR_Q, APPROX_Q])

    out1 = str(tmp_path / "o1.jsonl")
    out2 = str(tmp_path / "o2.jsonl")
    r1 = run_cli("query", "--index", idx, "--queries", qf, "--out", out1)
    assert r1.returncode == 0, r1.stderr
    # same answers whether the tree is loaded or rebuilt from the points
    r2 = run_cli("query", "--points", pts, "--family", "cap", "--seed", "3",
                 "--leaf-size", "64", "--queries", qf, "--out", out2)
    assert r2.returncode == 0, r2.stderr
    assert open(out1, "rb").read() == open(out2, "rb").read()

    lines = open(out1).read().splitlines()
    assert "header" in json.loads(lines[0])
    assert len(lines) == 4
    for line in lines[1:]:
        rec = json.loads(line)
        assert "result" in rec
        assert "error" not in rec


def test_verify_exit_zero(tmp_path):
    pts = gen_points(tmp_path, n=200)
    qf = str(tmp_path / "q.jsonl")
    write_queries(qf, [TRI_Q, CAP_Q, NEAR_Q])
    r = run_cli("verify", "--points", pts, "--queries", qf, "--seed", "5")
    assert r.returncode == 0, r.stderr + r.stdout


def test_empty_query_file_is_header_only(tmp_path):
    pts = gen_points(tmp_path, n=128)
    qf = str(tmp_path / "empty.jsonl")
    open(qf, "w").close()
    out = str(tmp_path / "o.jsonl")
    r = run_cli("query", "--points", pts, "--family", "triangle",
                "--seed", "1", "--queries", qf, "--out", out)
    assert r.returncode == 0, r.stderr
    lines = open(out).read().splitlines()
    assert len(lines) == 1
    assert "header" in json.loads(lines[0])


def test_malformed_query_reports_line(tmp_path):
    pts = gen_points(tmp_path, n=128)
    qf = str(tmp_path / "bad.jsonl")
    with open(qf, "w") as f:
        f.write(json.dumps(TRI_Q) + "\n")
        f.write("{not json\n")
    out = str(tmp_path / "o.jsonl")
    r = run_cli("query", "--points", pts, "--family", "triangle",
                "--seed", "1", "--queries", qf, "--out", out)
    assert r.returncode == 2
    assert "line 2" in r.stderr


def test_family_mismatch_marks_query(tmp_path):
    pts = gen_points(tmp_path, n=128)
    qf = str(tmp_path / "q.jsonl")
    write_queries(qf, [TRI_Q])
    out = str(tmp_path / "o.jsonl")
    r = run_cli("query", "--points", pts, "--family", "cap",
                "--seed", "1", "--queries", qf, "--out", out)
    assert r.returncode == 0, r.stderr
    rec = json.loads(open(out).read().splitlines()[1])
    assert "error" in rec


def test_bench_writes_csv(tmp_path):
    out = str(tmp_path / "bench.csv")
    r = run_cli("bench", "--sizes", "256", "--families", "triangle",
                "--queries", "20", "--seed", "2", "--out", out)
    assert r.returncode == 0, r.stderr
    rows = [r for r in open(out).read().splitlines() if not r.startswith("#")]
    assert len(rows) >= 2
    header = rows[0].split(",")
    assert "build_s" in header


def test_seed_required_for_bench(tmp_path):
    r = run_cli("bench", "--sizes", "256", "--out", str(tmp_path / "b.csv"))
    assert r.returncode != 0


def test_missing_points_file(tmp_path):
    qf = str(tmp_path / "q.jsonl")
    write_queries(qf, [TRI_Q])
    r = run_cli("query", "--points", str(tmp_path / "nope.csv"),
                "--family", "triangle", "--seed", "1",
                "--queries", qf, "--out", str(tmp_path / "o.jsonl"))
    assert r.returncode == 2
