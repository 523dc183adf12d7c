"""
Run reports and their JSON form.

Reports are written with sorted keys and fixed float formatting so that
two runs of the same config and seed differ only in the ``timestamp`` key.
"""

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..parsers.config_parser import SCHEMA_VERSION

logger = logging.getLogger(__name__)

STATUSES = ('pass', 'fail', 'skipped')


@dataclass
class CheckResult:
    """
    One check in a report.

    ``operation`` names the library operation exercised, ``property`` the
    structural claim being tested.
    """
    name: str
    status: str
    value: object = None
    tolerance: object = None
    operation: str = ''
    property: str = ''
    witness: object = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError('unknown check status {!r}'.format(self.status))


@dataclass
class RunReport:
    checks: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    timestamp: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self):
        return all(c.status != 'fail' for c in self.checks)

    def failed(self):
        return [c for c in self.checks if c.status == 'fail']

    def add(self, check):
        self.checks.append(check)
        return check


def plain(obj):
    """JSON-safe copy: numpy scalars and arrays become Python values, non-finite floats strings."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def report_to_dict(report):
    return plain({
        'schema_version': report.schema_version,
        'status': 'pass' if report.passed else 'fail',
        'summary': {s: sum(1 for c in report.checks if c.status == s) for s in STATUSES},
        'checks': [{'name': c.name, 'status': c.status, 'value': c.value,
                    'tolerance': c.tolerance, 'operation': c.operation,
                    'property': c.property, 'witness': c.witness, 'details': c.details}
                   for c in report.checks],
        'provenance': report.provenance,
        'timestamp': report.timestamp,
    })


def emit_report(report, path):
    """
    Write a report as JSON with stable key order.

    Args:
        report: RunReport
        path: Output file

    Returns:
        str: The path written
    """
    text = json.dumps(report_to_dict(report), sort_keys=True, indent=2)
    with open(path, 'w', encoding='utf-8') as fh:
        fh.write(text + '\n')
    logger.info('report written to %s (%d checks)', path, len(report.checks))
    return path
