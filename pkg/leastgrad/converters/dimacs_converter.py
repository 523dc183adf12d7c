"""
Convert a cut problem to the DIMACS max-flow text format.
"""


def dimacs_lines(problem):
    """
    DIMACS lines for a CutProblem.

    Graph nodes are numbered from 1 in the order of ``problem.nodes``; the
    source and sink follow. Undirected stencil edges become two arcs.
    """
    n_nodes = len(problem.nodes) + 2
    source, sink = problem.source + 1, problem.sink + 1
    pin = problem.pin_units
    arcs = []
    for a, b, c in zip(problem.tails.tolist(), problem.heads.tolist(), problem.units.tolist()):
        arcs.append((a + 1, b + 1, c))
        arcs.append((b + 1, a + 1, c))
    for node, inside in zip(range(problem.n_free, len(problem.nodes)), problem.pinned_inside()):
        arcs.append((source, node + 1, pin) if inside else (node + 1, sink, pin))

    lines = ['c leastgrad constrained perimeter cut',
             'c free cells: {}, capacity scale: {!r}'.format(problem.n_free, problem.scale),
             'p max {} {}'.format(n_nodes, len(arcs)),
             'n {} s'.format(source),
             'n {} t'.format(sink)]
    lines.extend('a {} {} {}'.format(*arc) for arc in arcs)
    return lines


def dump_dimacs(problem, path):
    """Write :func:`dimacs_lines` to ``path`` and return the path."""
    with open(path, 'w', encoding='ascii') as fh:
        fh.write('\n'.join(dimacs_lines(problem)) + '\n')
    return path
