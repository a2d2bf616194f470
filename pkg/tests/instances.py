"""Small enumerable AEL compositions shared by the test modules."""

from functools import lru_cache

from aelq.ael import AelCode
from aelq.css import code_422, parity_code, qgrs_code, random_css, trivial_code
from aelq.duality import field_downgrade
from aelq.gf import field_make
from aelq.graph import graph_complete, graph_random_regular

F2, F4, F8 = field_make(2), field_make(2, 2), field_make(2, 3)


def _outer(n, b, stab_dim, code_dim, seed):
    return random_css(F2, n * b, stab_dim, code_dim, b=b, seed=seed)


BUILDERS = {
    # complete graphs (lambda = 0)
    "main": lambda: AelCode(field_downgrade(qgrs_code(F4, 4, 3, 3)), code_422(), graph_complete(4)),
    "tiny": lambda: AelCode(field_downgrade(qgrs_code(F4, 2, 2, 1)), trivial_code(2), graph_complete(2)),
    "k4_outer32": lambda: AelCode(field_downgrade(qgrs_code(F4, 4, 3, 2)), code_422(), graph_complete(4)),
    "k3_parity": lambda: AelCode(field_downgrade(qgrs_code(F4, 3, 2, 2)), parity_code(3), graph_complete(3)),
    "k2_trivial_rand": lambda: AelCode(_outer(2, 2, 1, 3, 4), trivial_code(2), graph_complete(2)),
    "k3_trivial": lambda: AelCode(_outer(3, 3, 2, 6, 1), trivial_code(3), graph_complete(3)),
    # random regular graphs
    "r63_parity": lambda: AelCode(_outer(6, 2, 3, 7, 2), parity_code(3), graph_random_regular(6, 3, 1)),
    "r64_422": lambda: AelCode(_outer(6, 2, 3, 7, 3), code_422(), graph_random_regular(6, 4, 2)),
    "r83_parity": lambda: AelCode(_outer(8, 2, 5, 10, 5), parity_code(3), graph_random_regular(8, 3, 1)),
    "r84_422": lambda: AelCode(_outer(8, 2, 5, 10, 6), code_422(), graph_random_regular(8, 4, 3)),
    "r52_trivial": lambda: AelCode(_outer(5, 2, 3, 7, 7), trivial_code(2), graph_random_regular(5, 2, 4)),
    "r63_qgrs8": lambda: AelCode(field_downgrade(qgrs_code(F8, 6, 4, 4)), trivial_code(3), graph_random_regular(6, 3, 2)),
    "r42_qgrs4": lambda: AelCode(field_downgrade(qgrs_code(F4, 4, 3, 3)), trivial_code(2), graph_random_regular(4, 2, 1)),
    "r73_parity": lambda: AelCode(_outer(7, 2, 4, 9, 8), parity_code(3), graph_random_regular(7, 3, 6)),
}

COMPLETE = ["main", "tiny", "k4_outer32", "k3_parity", "k2_trivial_rand", "k3_trivial"]
RANDOM = ["r63_parity", "r64_422", "r83_parity", "r84_422", "r52_trivial", "r63_qgrs8", "r42_qgrs4", "r73_parity"]


@lru_cache(maxsize=None)
def instance(name: str) -> AelCode:
    return BUILDERS[name]()
