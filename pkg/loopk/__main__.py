import sys

from loopk.cli.main import run

sys.exit(run())
