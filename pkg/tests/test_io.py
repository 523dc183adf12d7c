import logging

import numpy as np
import pytest

from leastgrad.converters import CheckResult, dimacs_lines, emit_field, emit_mask, plain
from leastgrad.core import build_inputs
from leastgrad.domain import superlevel_exterior
from leastgrad.errors import ConfigError
from leastgrad.fields import ScalarField
from leastgrad.parsers import (config_from_dict, load_config, read_boundary_csv, read_field_csv,
                               read_field_pgm, read_mask, read_off, read_polyline_csv,
                               read_sidecar)
from leastgrad.registry import resolve_shape, resolve_weight
from leastgrad.solvers import build_cut_problem
from leastgrad.utils.log_utils import setup_logging

from conftest import x1


def minimal_doc(**extra):
    doc = {'domain': {'shape': 'square', 'h': 0.25}, 'boundary': {'form': 'x1'}}
    for key, value in extra.items():
        if isinstance(value, dict):
            doc.setdefault(key, {}).update(value)
        else:
            doc[key] = value
    return doc


def test_defaults_fill_a_minimal_config(monkeypatch):
    monkeypatch.delenv('LEASTGRAD_OUT', raising=False)
    config = config_from_dict(minimal_doc())
    assert config.collar_width == 4
    assert config.K == 64
    assert config.weight == {'form': 'constant'}
    assert config.out_dir == 'leastgrad-out'
    assert config.check_params['local_levels'] == 8


@pytest.mark.parametrize('doc', [
    minimal_doc(checks={'enabled': ['nestedness', 'no-such-check']}),
    minimal_doc(checks={'wobble': 1}),
    minimal_doc(tolerances={'nearly': 0.1}),
    minimal_doc(schema_version=2),
    minimal_doc(domain={'collar_width': 2}),
    minimal_doc(domain={'h': -0.5}),
    minimal_doc(levels={'K': 0}),
    minimal_doc(seed=-1),
    minimal_doc(checks={'barrier_expect': 'maybe'}),
    {'domain': {'h': 0.25}, 'boundary': {'form': 'x1'}},
    {'domain': {'shape': 'square', 'h': 0.25}},
])
def test_invalid_configs_are_rejected(doc):
    with pytest.raises(ConfigError):
        config_from_dict(doc)


def test_output_directory_precedence(monkeypatch):
    doc = minimal_doc(output={'dir': 'from-config'})
    monkeypatch.delenv('LEASTGRAD_OUT', raising=False)
    assert config_from_dict(doc).out_dir == 'from-config'
    monkeypatch.setenv('LEASTGRAD_OUT', 'from-env')
    assert config_from_dict(doc).out_dir == 'from-env'
    assert config_from_dict(doc, overrides={'out': 'from-cli'}).out_dir == 'from-cli'


def test_check_filter_keeps_canonical_order():
    config = config_from_dict(minimal_doc(), overrides={'checks': ['boundary-*']})
    assert config.checks == ('boundary-values', 'boundary-trace')


def test_unreadable_toml_is_a_config_error(tmp_path):
    path = tmp_path / 'broken.toml'
    path.write_text('[domain\nh = 0.1\n')
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_unsupported_neighborhood_fails_when_building_inputs():
    config = config_from_dict(minimal_doc(stencil={'neighborhood': 5}))
    with pytest.raises(ConfigError):
        build_inputs(config)


def test_registry_reports_unknown_names_and_parameters():
    with pytest.raises(ConfigError, match='wobbly'):
        resolve_weight('wobbly')
    with pytest.raises(ConfigError):
        resolve_shape({'name': 'disk', 'radius': 1.0, 'bogus': 2})
    with pytest.raises(ConfigError):
        resolve_shape({'radius': 1.0})
    assert resolve_shape({'name': 'disk', 'radius': 0.5}).radius == 0.5


def test_plain_pgm_orientation(tmp_path):
    path = tmp_path / 'mask.pgm'
    path.write_text('P2\n# two rows\n3 2\n255\n0 0 255\n255 255 255\n')
    mask = read_mask(str(path))
    assert mask.shape == (3, 2)
    assert mask[:, 0].all()
    assert mask[:, 1].tolist() == [False, False, True]


def test_mask_image_round_trip(tmp_path, rng):
    mask = rng.random((5, 7)) < 0.5
    path = emit_mask(mask, str(tmp_path / 'm.pgm'))
    assert np.array_equal(read_mask(path), mask)


def test_field_files_round_trip(tmp_path, square_x1):
    dom, _, _, bd = square_x1
    field = ScalarField(dom, x1(dom.centers()) ** 3)
    csv_path, pgm_path, _ = emit_field(field, str(tmp_path / 'u'))
    assert np.array_equal(read_field_csv(csv_path, dom).values, field.values)
    restored = read_field_pgm(pgm_path)
    span = field.values.max() - field.values.min()
    assert np.max(np.abs(restored - field.values)) <= span / 65535


def test_constant_field_image_keeps_its_value(tmp_path, unit_square):
    field = ScalarField(unit_square, np.full(unit_square.shape, 0.3))
    _, pgm_path, _ = emit_field(field, str(tmp_path / 'c'))
    assert np.all(read_field_pgm(pgm_path) == 0.3)


def test_missing_sidecar_means_unit_range(tmp_path):
    assert read_sidecar(str(tmp_path / 'absent.json')) == {'min': 0.0, 'max': 1.0,
                                                           'constant': False}


def test_boundary_values_from_csv(tmp_path, unit_square):
    dom = unit_square
    cells = np.argwhere(dom.boundary)
    lines = ['i0,i1,value'] + ['{},{},{}'.format(i, j, 0.5 * i) for i, j in cells]
    path = tmp_path / 'g.csv'
    path.write_text('\n'.join(lines) + '\n')
    values = read_boundary_csv(str(path), dom)
    assert len(values) == len(cells)
    i, j = cells[0]
    assert values[int(np.ravel_multi_index((i, j), dom.shape))] == 0.5 * i


def test_field_csv_with_missing_cells_is_rejected(tmp_path, unit_square):
    path = tmp_path / 'short.csv'
    path.write_text('i0,i1,value\n0,0,1.0\n')
    with pytest.raises(ValueError):
        read_field_csv(str(path), unit_square)


def test_off_quads_are_fanned(tmp_path):
    path = tmp_path / 'quad.off'
    path.write_text('OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n')
    mesh = read_off(str(path))
    assert mesh.faces.tolist() == [[0, 1, 2], [0, 2, 3]]


def test_polyline_with_header(tmp_path):
    path = tmp_path / 'line.csv'
    path.write_text('x,y\n0,0\n1,0\n1,1\n')
    curve = read_polyline_csv(str(path), closed=False)
    assert curve.points.shape == (3, 2)
    assert not curve.closed


def test_dimacs_arc_count(square_x1):
    dom, w, st, bd = square_x1
    problem = build_cut_problem(dom, w, st, dom.interior, superlevel_exterior(bd, 0.5).values)
    lines = dimacs_lines(problem)
    header = [ln for ln in lines if ln.startswith('p ')][0].split()
    arcs = [ln for ln in lines if ln.startswith('a ')]
    assert int(header[3]) == len(arcs)
    assert len(arcs) == 2 * len(problem.units) + len(problem.nodes) - problem.n_free
    assert int(header[2]) == len(problem.nodes) + 2


def test_plain_values():
    assert plain(float('nan')) == 'nan'
    assert plain(np.float64(-np.inf)) == '-inf'
    assert plain({'n': np.int64(3)}) == {'n': 3}
    assert type(plain(np.int64(3))) is int
    assert plain(np.array([True, False])) == [True, False]


def test_check_status_is_validated():
    with pytest.raises(ValueError):
        CheckResult(name='x', status='maybe')


def test_setup_logging_is_idempotent():
    logger = setup_logging('debug')
    setup_logging('warning')
    ours = [h for h in logger.handlers if getattr(h, '_leastgrad', False)]
    assert len(ours) == 1
    assert logger.level == logging.WARNING
