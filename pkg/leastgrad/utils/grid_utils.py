"""
Array helpers for regular grids: neighbor pairs, boundary layers,
connected components and image orientation.
"""

import numpy as np
from scipy import ndimage


def face_offsets(ndim):
    """
    Unit offsets of the face neighborhood in both directions.

    Args:
        ndim: Grid dimension

    Returns:
        list: Offsets as integer tuples
    """
    offsets = []
    for axis in range(ndim):
        for sign in (1, -1):
            off = [0] * ndim
            off[axis] = sign
            offsets.append(tuple(off))
    return offsets


def pair_slices(shape, offset):
    """
    Slices selecting every pair (p, p + offset) lying inside the box.

    ``arr[src]`` holds the first cell of each pair and ``arr[dst]`` the
    second one, in matching C order.

    Args:
        shape: Grid shape
        offset: Integer offset tuple

    Returns:
        tuple: (src, dst) tuples of slices
    """
    src, dst = [], []
    for size, off in zip(shape, offset):
        if off >= 0:
            src.append(slice(0, size - off))
            dst.append(slice(off, size))
        else:
            src.append(slice(-off, size))
            dst.append(slice(0, size + off))
    return tuple(src), tuple(dst)


def shifted(arr, offset, fill):
    """
    Return ``out`` with ``out[p] = arr[p + offset]`` and ``fill`` outside the box.
    """
    out = np.full(arr.shape, fill, dtype=arr.dtype)
    src, dst = pair_slices(arr.shape, offset)
    out[src] = arr[dst]
    return out


def face_boundary(mask):
    """
    Cells of ``mask`` with at least one face neighbor outside ``mask``.

    Cells beyond the box count as outside.
    """
    mask = np.asarray(mask, dtype=bool)
    out = np.zeros_like(mask)
    for off in face_offsets(mask.ndim):
        out |= mask & ~shifted(mask, off, False)
    return out


def inner_boundary(members, region):
    """
    Cells of ``members`` inside ``region`` that have a face neighbor in
    ``region`` which is not a member.

    Only pairs of cells that both lie in ``region`` are compared, so the
    region's own border never counts as a boundary of ``members``.
    """
    members = np.asarray(members, dtype=bool)
    region = np.asarray(region, dtype=bool)
    inside = members & region
    out = np.zeros_like(inside)
    for off in face_offsets(members.ndim):
        nbr_region = shifted(region, off, False)
        nbr_member = shifted(members, off, False)
        out |= inside & nbr_region & ~nbr_member
    return out


def contact_cells(members, cells):
    """
    Cells of ``cells`` whose membership differs from some face neighbor.
    """
    members = np.asarray(members, dtype=bool)
    out = np.zeros_like(members)
    for off in face_offsets(members.ndim):
        # cells on the box edge have no partner in that direction
        valid = shifted(np.ones_like(members), off, False)
        out |= valid & (members != shifted(members, off, False))
    return out & np.asarray(cells, dtype=bool)


def label_components(mask, full=False):
    """
    Label connected components of a boolean mask.

    Args:
        mask: Boolean array
        full: Use vertex adjacency (3**n - 1 neighbors) instead of faces

    Returns:
        tuple: (labels array, number of components)
    """
    mask = np.asarray(mask, dtype=bool)
    rank = mask.ndim if full else 1
    structure = ndimage.generate_binary_structure(mask.ndim, rank)
    return ndimage.label(mask, structure=structure)


def dilate(mask, full=True, iterations=1):
    """Binary dilation with face or vertex adjacency."""
    mask = np.asarray(mask, dtype=bool)
    rank = mask.ndim if full else 1
    structure = ndimage.generate_binary_structure(mask.ndim, rank)
    return ndimage.binary_dilation(mask, structure=structure, iterations=iterations)


def array_to_image(arr):
    """
    Orient a 2D grid array (axis 0 = x1, axis 1 = x2) as an image with x2
    pointing up. 3D arrays are stacked slice by slice along x3.
    """
    arr = np.asarray(arr)
    if arr.ndim == 2:
        return arr.T[::-1]
    return np.concatenate([array_to_image(arr[:, :, k]) for k in range(arr.shape[2])], axis=0)


def image_to_array(img):
    """Inverse of :func:`array_to_image` for 2D images."""
    img = np.asarray(img)
    return img[::-1].T.copy()
