# Running the verification suites from Python instead of the command line.
#
# Run:  python3 demos/verification_walkthrough.py

from solibound import suites
from solibound.verify import run_suite

for name in ("kp-seed", "kp-lax", "toda-ex3", "negative-typos"):
    outs = run_suite(suites.build_suite(name))
    print(name)
    for o in outs:
        d = o.as_dict()
        print("  %-4s %-55s %-10s %.2e  order=%s"
              % ("ok" if o.passed else "FAIL", o.name, o.equation,
                 d["max_residual"] if d["max_residual"] is not None else float("nan"),
                 d["convergence_order"]))
