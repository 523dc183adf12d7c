"""
Parser for TOML experiment configurations.
"""

import logging
import os
import sys
from dataclasses import dataclass, field
from fnmatch import fnmatch

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
OUT_ENV = 'LEASTGRAD_OUT'

ALL_CHECKS = (
    'nestedness', 'boundary-values', 'separation', 'component-reaches-boundary',
    'trace-containment', 'superlevel-recovery', 'boundary-trace', 'continuity-modulus',
    'exact-sup-error', 'interface-hausdorff', 'local-minimality', 'coarea',
    'submodularity-random', 'coarea-random', 'oracle-equivalence', 'tv-gap',
    'tv-superlevel-minimality', 'tv-cross-method', 'competitor-inequality',
    'barrier', 'conformal-circle', 'conformal-sphere', 'mse-line', 'mse-oracle',
    'mse-jacobian', 'mse-ellipticity', 'mse-comparison',
)

DEFAULT_TOLERANCES = {
    # None means derived from the run: lip * 5h + level step
    'boundary_values': None,
    'trace_containment': None,
    'exact_sup_error': 0.05,
    'interface_cells': 3.0,
    'coarea': 1e-10,
    'submodularity': 1e-12,
    'superlevel_ratio': 1.05,
    'cross_l1': 1e-2,
    'conformal_circle': 1e-6,
    'conformal_sphere': 1e-4,
    'mse_line': 1e-8,
    'mse_oracle': 1e-6,
    'mse_jacobian': 1e-5,
}

DEFAULT_CHECK_PARAMS = {
    'exact': None,
    'random_instances': 200,
    'coarea_instances': 100,
    'submodularity_pairs': 500,
    'oracle_max_cells': 16,
    'local_radius': 3,
    'barrier_points': 16,
    'barrier_eps': 0.3,
    'barrier_margin': None,
    'barrier_at': None,
    'barrier_expect': 'pass',
    'barrier_select': 'minimal',
    'local_levels': 8,
    'circle_segments': 10000,
    'sphere_subdivisions': 5,
    'mse_nodes': 2001,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Validated experiment description.

    ``domain``, ``weight`` and ``boundary`` keep their config tables; named
    forms inside them resolve through :mod:`leastgrad.registry`.
    """
    path: str
    domain: dict
    weight: dict
    boundary: dict
    h: float
    collar_width: int = 4
    neighborhood: int = None
    K: int = 64
    threads: int = 1
    seed: int = 0
    checks: tuple = ALL_CHECKS
    check_params: dict = field(default_factory=lambda: dict(DEFAULT_CHECK_PARAMS))
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    tv: dict = field(default_factory=dict)
    mse: dict = field(default_factory=dict)
    run_tv: bool = True
    out_dir: str = 'leastgrad-out'
    write_masks: bool = True
    schema_version: int = SCHEMA_VERSION

    def resolve_path(self, name):
        """Resolve a file referenced by the config relative to the config file."""
        if os.path.isabs(name):
            return name
        return os.path.join(os.path.dirname(os.path.abspath(self.path)), name)


def _table(doc, key):
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError('[{}] must be a table'.format(key))
    return dict(value)


def _positive_int(value, what, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError('{} must be an integer >= {}, got {!r}'.format(what, minimum, value))
    return value


def _select(enabled, patterns):
    """Enabled checks in canonical order, narrowed by shell-style patterns."""
    return tuple(c for c in ALL_CHECKS if c in enabled
                 and (not patterns or any(fnmatch(c, p) for p in patterns)))


def load_config(path, overrides=None):
    """
    Read and validate an experiment config.

    Args:
        path: TOML file
        overrides: Optional dict with ``out``, ``seed``, ``threads`` and
            ``checks`` coming from the command line

    Returns:
        ExperimentConfig

    Raises:
        ConfigError: on malformed or inconsistent settings
        OSError: if the file cannot be read
    """
    with open(path, 'rb') as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError('{}: {}'.format(path, exc))
    return config_from_dict(doc, path, overrides)


def config_from_dict(doc, path='<memory>', overrides=None):
    """Build an :class:`ExperimentConfig` from an already parsed document."""
    overrides = overrides or {}
    version = doc.get('schema_version', SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError('unsupported schema_version {} (expected {})'
                          .format(version, SCHEMA_VERSION))

    domain = _table(doc, 'domain')
    if 'shape' not in domain and 'mask' not in domain:
        raise ConfigError('[domain] needs a "shape" or a "mask" entry')
    h = domain.get('h')
    if not isinstance(h, (int, float)) or isinstance(h, bool) or h <= 0:
        raise ConfigError('[domain] h must be a positive number, got {!r}'.format(h))
    collar_width = _positive_int(domain.get('collar_width', 4), '[domain] collar_width', 3)

    weight = _table(doc, 'weight') or {'form': 'constant'}
    if 'form' not in weight and 'raster' not in weight:
        raise ConfigError('[weight] needs a "form" or a "raster" entry')
    boundary = _table(doc, 'boundary')
    if 'form' not in boundary and 'csv' not in boundary:
        raise ConfigError('[boundary] needs a "form" or a "csv" entry')

    stencil = _table(doc, 'stencil')
    neighborhood = stencil.get('neighborhood')
    if neighborhood is not None:
        neighborhood = _positive_int(neighborhood, '[stencil] neighborhood', 4)

    K = _positive_int(_table(doc, 'levels').get('K', 64), '[levels] K')

    solver = _table(doc, 'solver')
    tv = solver.get('tv', {})
    mse = solver.get('mse', {})
    run_tv = bool(solver.get('run_tv', True))

    checks_table = _table(doc, 'checks')
    enabled = checks_table.pop('enabled', list(ALL_CHECKS))
    if not isinstance(enabled, list):
        raise ConfigError('[checks] enabled must be a list of check names')
    unknown = sorted(set(enabled) - set(ALL_CHECKS))
    if unknown:
        raise ConfigError('unknown check names: {}'.format(', '.join(unknown)))
    check_params = dict(DEFAULT_CHECK_PARAMS)
    extra = sorted(set(checks_table) - set(check_params))
    if extra:
        raise ConfigError('unknown [checks] keys: {}'.format(', '.join(extra)))
    check_params.update(checks_table)
    if check_params['barrier_expect'] not in ('pass', 'fail'):
        raise ConfigError('[checks] barrier_expect must be "pass" or "fail", got {!r}'
                          .format(check_params['barrier_expect']))
    if check_params['barrier_select'] not in ('minimal', 'maximal'):
        raise ConfigError('[checks] barrier_select must be "minimal" or "maximal", got {!r}'
                          .format(check_params['barrier_select']))

    tolerances = dict(DEFAULT_TOLERANCES)
    given = _table(doc, 'tolerances')
    extra = sorted(set(given) - set(tolerances))
    if extra:
        raise ConfigError('unknown [tolerances] keys: {}'.format(', '.join(extra)))
    tolerances.update(given)

    output = _table(doc, 'output')
    out_dir = overrides.get('out') or os.environ.get(OUT_ENV) or output.get('dir', 'leastgrad-out')

    seed = overrides.get('seed')
    if seed is None:
        seed = doc.get('seed', 0)
    threads = overrides.get('threads')
    if threads is None:
        threads = doc.get('threads', 1)

    config = ExperimentConfig(
        path=str(path), domain=domain, weight=weight, boundary=boundary, h=float(h),
        collar_width=collar_width, neighborhood=neighborhood, K=K,
        threads=_positive_int(threads, 'threads'), seed=_positive_int(seed, 'seed', 0),
        checks=_select(enabled, overrides.get('checks')), check_params=check_params,
        tolerances=tolerances, tv=dict(tv), mse=dict(mse), run_tv=run_tv,
        out_dir=str(out_dir), write_masks=bool(output.get('write_masks', True)),
        schema_version=version)
    logger.debug('loaded config %s: h=%g K=%d checks=%d', path, config.h, K, len(config.checks))
    return config
