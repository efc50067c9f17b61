#!/usr/bin/env python3
"""Black-box contract tests for the annulus_bem command-line tool.

Usage: cli_contract.py /path/to/annulus_bem

Covers exit codes (0 success, 1 numerical failure, 2 usage/config error),
artifact names and formats, and byte determinism across reruns and thread
counts. Prints one PASS/FAIL line per check; exits with the failure count.
"""
import json
import math
import os
import pathlib
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
T_O = 1.0 + 0.75 * math.log(8.0 / 3.0)

failures = []


def check(name, cond, detail=""):
    tag = "PASS" if cond else "FAIL"
    print(f"{tag} {name}" + (f": {detail}" if detail else ""))
    if not cond:
        failures.append(name)


def run(args, cwd, threads=None):
    env = os.environ.copy()
    if threads is not None:
        env["ANNULUS_BEM_THREADS"] = str(threads)
    return subprocess.run([BIN] + args, capture_output=True, text=True,
                          env=env, cwd=str(cwd))


def write_config(path, doc):
    path.write_text(json.dumps(doc, indent=1))
    return str(path)


def general_config(prefix="bench", nodes=64, max_iterations=500, seed="zero"):
    return {
        "mode": "general",
        "geometry": {
            "outer": {"kind": "circle", "radius": 2.0},
            "inner": {"kind": "circle", "radius": 0.75},
            "outer_nodes": nodes,
            "inner_nodes": nodes,
        },
        "data": {"dirichlet": {"kind": "constant", "value": T_O}},
        "problem": {
            "transmission": {"kind": "polynomial",
                             "coefficients": [1.0, 1.0, -2.0, 1.0]},
            "flux": {"kind": "constant", "value": 1.0},
        },
        "solver": {"max_iterations": max_iterations, "seed": seed},
        "output": {"grid": 10, "prefix": prefix},
    }


def perturbed_config(prefix="pert", nodes=64, inner_radius=0.75, end=1.2,
                     samples=(0.5,)):
    return {
        "mode": "perturbed",
        "geometry": {
            "outer": {"kind": "circle", "radius": 2.0},
            "inner": {"kind": "circle", "radius": inner_radius},
            "outer_nodes": nodes,
            "inner_nodes": nodes,
        },
        "data": {"dirichlet": {"kind": "constant", "value": T_O}},
        "problem": {
            "lambda": 0.5,
            "phi": {"kind": "polynomial",
                    "coefficients": [1.0, 0.5, -2.0, 1.0]},
            "flux": {"kind": "constant", "value": 1.0},
            "eps_range": {"start": 0.0, "end": end, "step": 0.1,
                          "samples": list(samples)},
        },
        "output": {"prefix": prefix},
    }


def radial_config(prefix="rad", perturbed=False, eps=0.5):
    doc = {
        "mode": "radial",
        "geometry": {
            "outer": {"kind": "circle", "radius": 2.0},
            "inner": {"kind": "circle", "radius": 0.75},
        },
        "data": {"dirichlet": {"kind": "constant", "value": T_O}},
        "problem": {
            "transmission": {"kind": "polynomial",
                             "coefficients": [1.0, 1.0, -2.0, 1.0]},
            "flux": {"kind": "constant", "value": 1.0},
        },
        "output": {"grid": 8, "prefix": prefix},
    }
    if perturbed:
        doc["problem"]["lambda"] = 0.5
        doc["problem"]["phi"] = {"kind": "polynomial",
                                 "coefficients": [1.0, 0.5, -2.0, 1.0]}
        doc["problem"]["eps"] = eps
    return doc


def perturbed_oracle_root(eps):
    # root of 0.5 t + eps Phi(t) + ratio - t_o, with ratio - t_o = -1 exactly
    def h(t):
        return 0.5 * t + eps * (t ** 3 - 2.0 * t ** 2 + 0.5 * t + 1.0) - 1.0

    lo, hi = 0.5, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (h(lo) < 0.0) == (h(mid) < 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main():
    top = pathlib.Path(tempfile.mkdtemp(prefix="annulus_cli_"))

    # ------------------------------------------------------------- verify
    d = top / "verify"
    d.mkdir()
    cfg = write_config(d / "cfg.json", general_config(prefix="v"))
    r = run(["verify", "--config", cfg, "--out", str(d)], d)
    check("verify exit 0", r.returncode == 0, r.stderr.strip())
    vpath = d / "v_verify.json"
    check("verify report exists", vpath.exists())
    if vpath.exists():
        doc = json.loads(vpath.read_text())
        check("verify all_pass", doc.get("all_pass") is True)
        check("verify has checks", len(doc.get("checks", [])) > 0)
    check("verify run log exists", (d / "v_run.log").exists())

    # verify in perturbed mode rejects the unit-radius inner circle
    d = top / "verify_capacity"
    d.mkdir()
    cfg = write_config(d / "cfg.json",
                       perturbed_config(prefix="cap", inner_radius=1.0))
    r = run(["verify", "--config", cfg, "--out", str(d)], d)
    check("capacity verify exit 1", r.returncode == 1, f"rc={r.returncode}")
    doc = json.loads((d / "cap_verify.json").read_text())
    cap = doc.get("capacity", {})
    check("capacity flagged", cap.get("pass") is False)
    check("capacity magnitude reported",
          abs(cap.get("equilibrium_constant", 1.0)) < 1e-6)

    # -------------------------------------------------------------- solve
    d = top / "solve"
    d.mkdir()
    cfg = write_config(d / "cfg.json", general_config(prefix="s"))
    r = run(["solve", "--config", cfg, "--out", str(d),
             "--seed-branch", "radial:1"], d)
    check("solve exit 0", r.returncode == 0, r.stderr.strip())
    rep = json.loads((d / "s_report.json").read_text())
    check("solve converged", rep.get("converged") is True)
    check("solve seed echoed", rep.get("seed") == "radial:1")
    check("solve finds the second branch",
          abs(rep.get("u_i_mean", 0.0) - 1.0) < 1e-6,
          f"u_i_mean={rep.get('u_i_mean')}")
    csv = (d / "s_fields.csv").read_text().splitlines()
    check("fields csv header", csv and csv[0] == "x,y,region,value")
    regions = {row.split(",")[2] for row in csv[1:]}
    check("fields csv has both regions", {"inner", "annulus"} <= regions,
          str(regions))
    for row in csv[1:]:
        x, y, region, value = row.split(",")
        if region == "inner":
            check("inner field value", abs(float(value) - 1.0) < 1e-6, row)
            break

    # zero seed reaches the first branch
    d = top / "solve_zero"
    d.mkdir()
    cfg = write_config(d / "cfg.json", general_config(prefix="z"))
    r = run(["solve", "--config", cfg, "--out", str(d)], d)
    check("zero-seed solve exit 0", r.returncode == 0, r.stderr.strip())
    rep = json.loads((d / "z_report.json").read_text())
    check("zero seed lands on the first branch",
          abs(rep.get("u_i_mean", 1.0)) < 1e-6, f"u_i_mean={rep.get('u_i_mean')}")

    # starved iteration budget is a numerical failure, not a usage error
    d = top / "solve_fail"
    d.mkdir()
    cfg = write_config(d / "cfg.json",
                       general_config(prefix="f", max_iterations=3))
    r = run(["solve", "--config", cfg, "--out", str(d)], d)
    check("starved solve exit 1", r.returncode == 1, f"rc={r.returncode}")
    rep = json.loads((d / "f_report.json").read_text())
    check("starved solve reported", rep.get("converged") is False)

    # ------------------------------------------------------ determinism
    runs = []
    for tag, threads in (("a", 1), ("b", 4), ("c", None)):
        d = top / f"det_{tag}"
        d.mkdir()
        cfg = write_config(d / "cfg.json", general_config(prefix="det"))
        r = run(["solve", "--config", cfg, "--out", str(d),
                 "--seed-branch", "radial:0"], d, threads=threads)
        check(f"determinism run {tag} exit 0", r.returncode == 0)
        runs.append(((d / "det_report.json").read_bytes(),
                     (d / "det_fields.csv").read_bytes()))
    check("solve outputs byte-identical across reruns", runs[0] == runs[2])
    check("solve outputs byte-identical across thread counts",
          runs[0] == runs[1])

    # ----------------------------------------------------------- continue
    d = top / "continue"
    d.mkdir()
    cfg = write_config(d / "cfg.json", perturbed_config(prefix="c"))
    r = run(["continue", "--config", cfg, "--out", str(d)], d)
    check("continue exit 0", r.returncode == 0, r.stderr.strip())
    lines = [json.loads(t) for t in
             (d / "c_branch.jsonl").read_text().splitlines()]
    check("branch file nonempty", len(lines) >= 2)
    summary = lines[-1]
    check("branch summary present", summary.get("summary") is True)
    check("fold detected near eps = 1",
          summary.get("fold") is True and 0.95 <= summary.get("fold_eps", 0.0) <= 1.05,
          f"fold_eps={summary.get('fold_eps')}")
    oracle = perturbed_oracle_root(0.5)
    hit = [p for p in lines[:-1] if abs(p["eps"] - 0.5) < 1e-12]
    check("must-hit sample present", len(hit) == 1)
    if hit:
        check("sampled value matches the closed-form root",
              abs(hit[0]["u_i_mean"] - oracle) < 1e-5,
              f"{hit[0]['u_i_mean']} vs {oracle}")
    check("branch points carry conditioning",
          all(p.get("sigma_min", 0.0) > 0.0 for p in lines[:-1]))

    # continue is deterministic too
    d2 = top / "continue_rerun"
    d2.mkdir()
    cfg2 = write_config(d2 / "cfg.json", perturbed_config(prefix="c"))
    run(["continue", "--config", cfg2, "--out", str(d2)], d2, threads=2)
    check("continue output byte-identical",
          (d / "c_branch.jsonl").read_bytes() == (d2 / "c_branch.jsonl").read_bytes())

    # ------------------------------------------------------------- radial
    d = top / "radial"
    d.mkdir()
    cfg = write_config(d / "cfg.json", radial_config(prefix="r"))
    r = run(["radial", "--config", cfg, "--out", str(d)], d)
    check("radial exit 0", r.returncode == 0, r.stderr.strip())
    doc = json.loads((d / "r_radial.json").read_text())
    roots = doc.get("roots", [])
    check("radial finds both benchmark roots",
          len(roots) == 2 and abs(roots[0]) < 1e-8 and abs(roots[1] - 1.0) < 1e-6,
          str(roots))
    csv = (d / "r_radial.csv").read_text().splitlines()
    check("radial csv header", csv and csv[0] == "t_i,radius,value")
    check("radial csv row count", len(csv) - 1 == len(roots) * 8)

    d = top / "radial_perturbed"
    d.mkdir()
    cfg = write_config(d / "cfg.json",
                       radial_config(prefix="rp", perturbed=True, eps=0.5))
    r = run(["radial", "--config", cfg, "--out", str(d)], d)
    check("perturbed radial exit 0", r.returncode == 0, r.stderr.strip())
    doc = json.loads((d / "rp_radial.json").read_text())
    roots = doc.get("roots", [])
    check("perturbed radial root matches oracle",
          len(roots) == 1 and abs(roots[0] - perturbed_oracle_root(0.5)) < 1e-8,
          str(roots))

    # --------------------------------------------------- usage and errors
    d = top / "errors"
    d.mkdir()
    r = run(["solve", "--config", str(d / "missing.json")], d)
    check("missing config exit 2", r.returncode == 2, f"rc={r.returncode}")

    bad = d / "bad.json"
    bad.write_text("this is not json")
    r = run(["solve", "--config", str(bad)], d)
    check("corrupt config exit 2", r.returncode == 2, f"rc={r.returncode}")

    cfg = write_config(d / "ok.json", general_config(prefix="e"))
    r = run(["solve", "--config", cfg, "--bogus"], d)
    check("unknown flag exit 2", r.returncode == 2, f"rc={r.returncode}")

    r = run(["solve", "--config", cfg, "--nodes", "65"], d)
    check("odd node override exit 2", r.returncode == 2, f"rc={r.returncode}")

    r = run(["solve", "--config", cfg, "--seed-branch", "radial:x"], d)
    check("bad seed exit 2", r.returncode == 2, f"rc={r.returncode}")

    pcfg = write_config(d / "pert.json", perturbed_config(prefix="e2"))
    r = run(["solve", "--config", pcfg, "--out", str(d)], d)
    check("mode mismatch exit 2", r.returncode == 2, f"rc={r.returncode}")

    r = run([], d)
    check("missing subcommand exit 2", r.returncode == 2, f"rc={r.returncode}")

    print(f"{len(failures)} CLI contract checks failed")
    return len(failures)


if __name__ == "__main__":
    sys.exit(main())
