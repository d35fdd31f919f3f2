"""End-to-end checks of the graphtopo command-line tool.

Usage: cli_test.py <graphtopo binary> <schema directory>
"""

import json
import os
import random
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

BIN = os.path.abspath(sys.argv[1])
SCHEMAS = Path(sys.argv[2])
failures = []


def check(cond, what):
    print(("ok    " if cond else "FAIL  ") + what)
    if not cond:
        failures.append(what)


def run(*args, env=None, cwd=None):
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, env=env, cwd=cwd)


def load_schemas():
    docs = {p.name: json.loads(p.read_text()) for p in SCHEMAS.glob("*.schema.json")}
    registry = Registry().with_resources((name, Resource.from_contents(doc)) for name, doc in docs.items())
    return {name: jsonschema.Draft202012Validator(doc, registry=registry) for name, doc in docs.items()}


def valid(validator, path):
    errors = list(validator.iter_errors(json.loads(Path(path).read_text())))
    for e in errors[:3]:
        print("      ", e.message)
    return not errors


def main():
    validators = load_schemas()
    for v in validators.values():
        v.check_schema(v.schema)
    os.chdir(tempfile.mkdtemp(prefix="graphtopo_cli_"))

    # Generator determinism and validation.
    r1 = run("synth", "--kind", "chain", "--n", 5, "--t", 100, "--seed", 7, "--graph", "g1.csv", "--signals", "y1.csv")
    r2 = run("synth", "--kind", "chain", "--n", 5, "--t", 100, "--seed", 7, "--graph", "g2.csv", "--signals", "y2.csv")
    check(r1.returncode == 0 and r2.returncode == 0, "synth chain exits 0")
    check(Path("g1.csv").read_bytes() == Path("g2.csv").read_bytes(), "synth graph byte-identical for equal seeds")
    check(Path("y1.csv").read_bytes() == Path("y2.csv").read_bytes(), "synth signals byte-identical for equal seeds")
    r3 = run("synth", "--kind", "chain", "--n", 5, "--t", 100, "--seed", 8, "--graph", "g3.csv", "--signals", "y3.csv")
    check(r3.returncode == 0 and Path("y3.csv").read_bytes() != Path("y1.csv").read_bytes(), "synth seed changes signals")
    bad = run("synth", "--kind", "erdos_renyi", "--p", 1.5, "--graph", "x.csv", "--signals", "x2.csv")
    check(bad.returncode == 2 and "probability" in bad.stderr, "synth p = 1.5 exits 2")

    # Usage and input errors.
    r = run("smooth-learn", "--alpha", 1, "--beta", 1)
    check(r.returncode == 2 and "--input" in r.stderr and "Usage" in r.stderr, "missing --input exits 2 with usage")
    Path("ragged.csv").write_text("1,2,3\n4,5,6\n7,8\n")
    r = run("smooth-learn", "--input", "ragged.csv", "--alpha", 1, "--beta", 1)
    check(r.returncode == 2 and "row length mismatch at line 3" in r.stderr, "ragged CSV exits 2 naming the line")
    Path("nan.csv").write_text("1,2,3\n4,nan,6\n")
    r = run("smooth-learn", "--input", "nan.csv")
    check(r.returncode == 2, "NaN in input exits 2")
    r = run("no-such-command")
    check(r.returncode == 2, "unknown subcommand exits 2")
    r = run()
    check(r.returncode == 2, "no subcommand exits 2")
    r = run("jd", "--input", "y1.csv", "--segments", "g1.csv", "--anchors", "0,1")
    check(r.returncode == 2, "malformed anchors exit 2")
    r = run("smooth-learn", "--help")
    check(r.returncode == 0 and "--alpha" in r.stdout, "--help exits 0")

    # Shared inputs.
    run("synth", "--kind", "random_dag", "--n", 6, "--t", 300, "--p", 0.4, "--seed", 3, "--weight-low", 0.5,
        "--weight-high", 0.9, "--signed", "--graph", "dag.csv", "--signals", "dy.csv")
    run("synth", "--kind", "erdos_renyi", "--n", 6, "--t", 200, "--p", 0.4, "--seed", 4, "--graph", "er.csv",
        "--signals", "ey.csv")
    run("synth", "--kind", "random_dag", "--n", 6, "--t", 200, "--p", 0.4, "--seed", 9, "--graph", "dag200.csv",
        "--signals", "dy200.csv")
    r = run("sem", "--input", "dy.csv", "--exog", "ey.csv")
    check(r.returncode == 2 and "same shape" in r.stderr, "sem: input shape mismatch exits 2")
    Path("seg.txt").write_text("0,100,200\n")
    Path("seg3.txt").write_text("0\n100\n200\n300\n")
    rng = random.Random(5)
    rows = [line.split(",") for line in Path("dy.csv").read_text().splitlines()]
    Path("partial.csv").write_text(
        "\n".join(",".join("" if (rng.random() < 0.4 and t % 5) else c for t, c in enumerate(r)) for r in rows)
        + "\n")

    jobs = {
        "corr": (["--input", "ey.csv", "--weights", "rho"], "graph"),
        "glasso": (["--input", "ey.csv", "--lambda", 0.05], "graph"),
        "glasso-laplacian": (["--input", "ey.csv", "--lambda", 0.01, "--laplacian"], "graph"),
        "smooth-learn": (["--input", "ey.csv", "--alpha", 1, "--beta", 1], "graph"),
        "disc-learn": (["--input", "ey.csv", "--input", "ey.csv", "--gamma", 0.5], "sequence"),
        "sem": (["--input", "dy200.csv", "--exog", "ey.csv", "--alpha", 0.5], "graph"),
        "dag": (["--input", "dy.csv"], "graph"),
        "varm": (["--input", "dy.csv", "--select-order", 2], "graph"),
        "ksvarm": (["--input", "dy.csv", "--kernels", "linear,gaussian"], "graph"),
        "tv-smooth": (["--input", "ey.csv", "--segments", "seg.txt", "--eta", 2], "sequence"),
        "tv-glasso": (["--input", "ey.csv", "--segments", "seg.txt", "--lambda", 0.05], "sequence"),
        "dyn-sem": (["--input", "ey.csv", "--input", "ey.csv", "--exog", "ey.csv", "--gamma", 0.9], "sequence"),
        "jd": (["--input", "dy.csv", "--segments", "seg3.txt", "--anchors", "0,1,0.5"], "graph"),
        "jisg": (["--input", "partial.csv", "--sweeps", 5, "--signals", "SIGNALS"], "graph"),
    }

    for name, (args, kind) in jobs.items():
        command = name.split("-laplacian")[0]
        outputs = []
        for rep in range(2):
            # Same file names in separate directories, so reports match byte for byte.
            d = Path(f"{name}.{rep}")
            d.mkdir()
            a = ["signals.csv" if x == "SIGNALS" else
                 f"../{x}" if str(x).endswith((".csv", ".txt")) else x for x in args]
            r_csv = run(command, *a, "--output", "out.csv", "--report", "report.json", cwd=d)
            r_json = run(command, *a, "--output", "out.json", "--format", "json", cwd=d)
            check(r_csv.returncode == 0 and r_json.returncode == 0, f"{name}: exits 0 (rep {rep})")
            if r_csv.returncode or r_json.returncode:
                print(r_csv.stderr, r_json.stderr)
                break
            files = ["out.csv", "report.json", "out.json"] + (["signals.csv"] if "SIGNALS" in args else [])
            outputs.append([(d / f).read_bytes() for f in files])
        if len(outputs) != 2:
            continue
        check(outputs[0] == outputs[1], f"{name}: repeated run gives identical outputs")
        d = Path(f"{name}.0")
        check(valid(validators["report.schema.json"], d / "report.json"), f"{name}: report matches schema")
        schema = "graph.schema.json" if kind == "graph" else "graph_sequence.schema.json"
        check(valid(validators[schema], d / "out.json"), f"{name}: JSON output matches schema")

        # CSV and JSON outputs carry the same doubles.
        doc = json.loads((d / "out.json").read_text())
        graphs = [doc] if kind == "graph" else doc["graphs"]
        from_json = [(s + 1, e["i"], e["j"], e["weight"]) for s, g in enumerate(graphs) for e in g["edges"]]
        from_csv = []
        for line in (d / "out.csv").read_text().splitlines():
            cells = line.split(",")
            if kind == "graph":
                cells = ["1"] + cells
            from_csv.append((int(cells[0]), int(cells[1]), int(cells[2]), float(cells[3])))
        check(from_json == from_csv, f"{name}: CSV weights round-trip to the JSON doubles")

    # Structural checks on specific outputs.
    dag = json.loads(Path("dag.0/out.json").read_text())
    check(dag["directed"], "dag: output graph is directed")
    jisg_report = json.loads(Path("jisg.0/report.json").read_text())
    trace = jisg_report["diagnostics"]["objective_trace"]
    check(all(b <= a for a, b in zip(trace, trace[1:])), "jisg: objective trace is nonincreasing")
    sig = [line.split(",") for line in Path("jisg.0/signals.csv").read_text().splitlines()]
    check(len(sig) == 6 and all(len(r) == 300 and all(c for c in r) for r in sig), "jisg: signals fully reconstructed")

    # Scoring.
    r = run("score", "--estimate", "dag.0/out.csv", "--truth", "dag.csv", "--n", 6, "--directed", "--output", "score.json")
    check(r.returncode == 0 and valid(validators["score.schema.json"], "score.json"), "score: output matches schema")
    run("score", "--estimate", "dag.csv", "--truth", "dag.csv", "--n", 6, "--directed", "--output", "self.json")
    check(json.loads(Path("self.json").read_text())["f1"] == 1.0, "score: truth against itself has F1 = 1")

    # Config file, overridden by flags.
    cfg = {"input": "ey.csv", "alpha": 2, "beta": 0.5, "format": "json"}
    Path("cfg.json").write_text(json.dumps(cfg))
    check(valid(validators["config.schema.json"], "cfg.json"), "config matches schema")
    r = run("smooth-learn", "--config", "cfg.json", "--beta", 1, "--output", "c.json", "--report", "c.report.json")
    params = json.loads(Path("c.report.json").read_text())["parameters"] if r.returncode == 0 else {}
    check(params.get("alpha") == 2 and params.get("beta") == 1 and params.get("format") == "json",
          "config values apply and flags override them")
    r = run("smooth-learn", "--input", "ey.csv", "--alpha", 2, "--beta", 1, "--format", "json", "--output", "d.json")
    check(Path("c.json").read_bytes() == Path("d.json").read_bytes(), "config run equals the explicit-flag run")
    Path("badcfg.json").write_text("{not json")
    check(run("smooth-learn", "--config", "badcfg.json").returncode == 2, "malformed config exits 2")

    # Thread cap: flag, environment, identical results.
    env = dict(os.environ, GRAPHTOPO_THREADS="1")
    r1 = run("jisg", "--input", "partial.csv", "--sweeps", 3, "--output", "t1.csv", env=env)
    r4 = run("--threads", 4, "jisg", "--input", "partial.csv", "--sweeps", 3, "--output", "t4.csv")
    check(r1.returncode == 0 and r4.returncode == 0, "thread cap via environment and flag")
    check(Path("t1.csv").read_bytes() == Path("t4.csv").read_bytes(), "results do not depend on the thread count")
    bad_env = dict(os.environ, GRAPHTOPO_THREADS="many")
    check(run("corr", "--input", "ey.csv", env=bad_env).returncode == 2, "invalid GRAPHTOPO_THREADS exits 2")

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
