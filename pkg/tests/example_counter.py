"""pytest plugin: count passing hypothesis examples per property.

Load with ``-p example_counter``; counts are written as JSON to the path in
``$EXAMPLE_COUNTS``.
"""
import json
import os
from collections import Counter

from hypothesis.internal import observability

COUNTS = Counter()


def _record(obs):
    if obs.type == "test_case" and obs.status == "passed" and obs.how_generated == "during generate phase":
        COUNTS[obs.property] += 1


def pytest_configure(config):
    # line coverage per example would slow the suites down several times over
    observability.OBSERVABILITY_COLLECT_COVERAGE = False
    observability.add_observability_callback(_record)


def pytest_unconfigure(config):
    observability.remove_observability_callback(_record)
    out = os.environ.get("EXAMPLE_COUNTS")
    if out:
        with open(out, "w") as fh:
            json.dump(COUNTS, fh)
