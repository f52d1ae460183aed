"""
Command-line workflow
=====================

The same capabilities are scriptable without Python: each subcommand reads
the sectioned config, runs deterministically, and emits plain text or CSV.
This demo shells out to the installed `sfgcavity` entry point using the
bundled reference config.
"""
import subprocess
import sys
from pathlib import Path

config = Path(__file__).resolve().parent.parent / "configs" / "reference-sfg.ini"


def run(*args: str) -> str:
    proc = subprocess.run(
        [sys.executable, "-m", "sfgcavity.cli", *args],
        capture_output=True,
        text=True,
        check=False,
    )
    print(f"$ sfgcavity {' '.join(args)}   (exit {proc.returncode})")
    print(proc.stdout, end="")
    if proc.stderr:
        print(proc.stderr, end="", file=sys.stderr)
    print()
    return proc.stdout


run("simulate", "--config", str(config))
run("linewidth", "--config", str(config))
run("sweep", "--config", str(config), "--out", "cli_sweep.csv")
print("wrote cli_sweep.csv:")
print("\n".join(Path("cli_sweep.csv").read_text().splitlines()[:4]))
