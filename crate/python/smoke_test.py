"""Smoke test for the pydagsched extension.

Build and install it first, e.g.

    cd crates/py && maturin develop --release

or, without maturin, copy target/release/libpydagsched.so next to this script
as pydagsched.so.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

import pydagsched as ds


def main():
    dag = ds.generate_dag(25, width=4, seed=3)
    plat = ds.generate_platform(3, seed=3)
    assert len(dag) == 25 and len(plat) == 3

    heights = dag.heights()
    assert min(heights.values()) == 1
    assert all(heights[t] == 1 for t in dag.ready())

    # documents round-trip
    again = ds.TaskGraph.from_json(dag.to_json())
    assert again.to_json() == dag.to_json()
    assert json.loads(plat.to_json())["machines"]

    ga = ds.schedule_ga(dag, plat, seed=7, pop_size=50, iters=30)
    ga2 = ds.schedule_ga(dag, plat, seed=7, pop_size=50, iters=30)
    assert ga.log == ga2.log, "same seed must give the same schedule"
    mm = ds.schedule_minmin(dag, plat)
    lb = ds.lower_bound(dag, plat)
    assert lb <= ga.makespan + 1e-9 and lb <= mm.makespan + 1e-9

    # re-timing the GA's own chromosome gives the same makespan
    replay = ds.evaluate(dag, plat, ga.order, ga.machines)
    assert abs(replay.makespan - ga.makespan) < 1e-9
    assert ga.log.rstrip().splitlines()[-1].startswith("Simulation Time: ")

    try:
        ds.TaskGraph.from_json('{"tasks": [{"id": "a", "name": "a", "work": 1}],'
                               ' "edges": [{"src": "a", "dst": "a", "bytes": 0}]}')
    except ValueError as e:
        print("rejected self loop:", e)
    else:
        raise AssertionError("self loop accepted")

    print(f"ga {ga.makespan:.3f} ({ga.iterations} generations), "
          f"min-min {mm.makespan:.3f}, lower bound {lb:.3f}")
    print("smoke test ok")


if __name__ == "__main__":
    main()
