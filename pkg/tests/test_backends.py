import os
import subprocess
import sys

SNIPPET = """
from rank1_landscape import kernels, rational_lp
from rank1_landscape.landscape import FuzzConfig, fuzz_equivalence
assert not kernels.COMPILED
assert rational_lp.BACKEND == "fraction"
rep = fuzz_equivalence(FuzzConfig(num_instances=15, seed=9, points_per_instance=8))
assert rep.ok, rep.to_json()
print("ok")
"""


def test_pure_fallback_end_to_end():
    env = dict(os.environ, RANK1_LANDSCAPE_PURE="1")
    proc = subprocess.run([sys.executable, "-c", SNIPPET], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "ok"
