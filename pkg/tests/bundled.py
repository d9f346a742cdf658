"""The designs with at most 100 points that the invariant suites sweep over."""

from pbdim.algebra import affine_space, projective_plane, steiner_triple_system, transversal_design
from pbdim.constructions import delete_point, wfc
from pbdim.designs import PBDesign, pbd_as_gdd
from pbdim.ingredients import IngredientProvider


def bundled_pbds():
    out = {f"ag{d}({q})": affine_space(q, d) for q, d in [(3, 2), (4, 2), (5, 2), (7, 2), (8, 2), (9, 2), (3, 3),
                                                         (4, 3), (2, 3)]}
    out.update({f"pg({q})": projective_plane(q) for q in (2, 3, 4, 5, 7, 8)})
    out.update({f"sts({v})": steiner_triple_system(v) for v in (7, 9, 13, 15, 19, 21, 25, 27, 31)})
    out["line(6)"] = PBDesign(6, [tuple(range(6))])
    return out


def bundled_gdds():
    out = {f"td({k},{n})": transversal_design(k, n) for k, n in [(3, 2), (3, 3), (3, 4), (3, 5), (4, 4),
                                                                (4, 5), (5, 5), (3, 7)]}
    out["ag2(3)-pt"] = delete_point(affine_space(3, 2), 0)
    out["ag2(4)-pt"] = delete_point(affine_space(4, 2), 5)
    out["ag3(3)-pt"] = delete_point(affine_space(3, 3), 0)
    out["pg(3)-pt"] = delete_point(projective_plane(3), 0)
    out["sts(13)-pt"] = delete_point(steiner_triple_system(13), 4)
    out["fano-as-gdd"] = pbd_as_gdd(projective_plane(2))
    out["ag2(3)x4"] = wfc(pbd_as_gdd(affine_space(3, 2)), 4, IngredientProvider(), {3})
    return out
