import json
from fractions import Fraction

import pytest

from l2lab.fixtures import lamplighter_markov, random_complex, wedge_of_circles, zpoly
from l2lab.group_ring import GroupRingElement
from l2lab.groups import DirectProduct, FiniteGroup, FreeAbelianGroup, FreeProduct
from l2lab.io import (FormatError, cells_from_json, complex_from_json, complex_to_json,
                      group_from_json, group_to_json, load_json, matrix_from_json, matrix_to_json)
from l2lab.matrix import GRMatrix
from l2lab.scalars import QI


def roundtrip(A):
    return matrix_from_json(json.loads(json.dumps(matrix_to_json(A))))


def test_matrix_roundtrips():
    assert roundtrip(lamplighter_markov()) == lamplighter_markov()
    assert roundtrip(zpoly([Fraction(-1, 3), 0, 2], low=-1)) == zpoly([Fraction(-1, 3), 0, 2], low=-1)
    W = wedge_of_circles().differentials[0]
    assert roundtrip(W) == W


def test_complex_coefficients_roundtrip():
    Z = FreeAbelianGroup(1)
    A = GRMatrix(Z, [[GroupRingElement(Z, {(1,): QI(Fraction(1, 2), -2)})]])
    assert roundtrip(A) == A


def test_product_groups_roundtrip():
    G = DirectProduct([FreeAbelianGroup(1), FiniteGroup.cyclic(2)])
    assert group_from_json(group_to_json(G)) == G
    H = FreeProduct([FiniteGroup.cyclic(2), FiniteGroup.cyclic(3)])
    u = GroupRingElement(H, {H.mul(H.syllable(0, 1), H.syllable(1, 2)): 1})
    A = GRMatrix(H, [[u]])
    assert roundtrip(A) == A


def test_complex_roundtrip():
    C = random_complex(1)
    D = complex_from_json(complex_to_json(C))
    assert D.ranks == C.ranks
    assert all(a == b for a, b in zip(C.differentials, D.differentials))


def test_free_word_strings():
    obj = {"group": {"family": "free", "generators": ["a", "b"]}, "rows": 1, "cols": 1,
           "entries": [[[{"coeff": 1, "word": "a b^-1"}, {"coeff": "-1/2", "word": []}]]]}
    A = matrix_from_json(obj)
    assert A.entries[0][0].coeff((1, -2)) == 1


@pytest.mark.parametrize("obj, where", [
    ({"rows": 1, "cols": 1, "entries": [[[]]]}, "/group"),
    ({"group": {"family": "nope"}, "rows": 1, "cols": 1, "entries": [[[]]]}, "/group"),
    ({"group": {"family": "zn", "n": 1}, "rows": 2, "cols": 1, "entries": [[[]]]}, "/entries"),
    ({"group": {"family": "zn", "n": 1}, "rows": 1, "cols": 1,
      "entries": [[[{"coeff": 1, "word": [1, 2]}]]]}, "/entries/0/0/0/word"),
    ({"group": {"family": "zn", "n": 1}, "rows": 1, "cols": 1,
      "entries": [[[{"coeff": [1, 0], "word": [1]}]]]}, "/entries/0/0/0/coeff"),
    ({"group": {"family": "finite", "order": 3, "table": [[0, 1], [1, 0]]}, "rows": 1,
      "cols": 1, "entries": [[[]]]}, "/group"),
])
def test_malformed_inputs_carry_location(obj, where):
    with pytest.raises(FormatError) as info:
        matrix_from_json(obj)
    assert info.value.location == where


def test_cells():
    cells = cells_from_json([{"dim": 0, "isotropy": 2}, {"dim": 1, "isotropy": "inf"}, {"dim": 2}])
    assert [c.isotropy_order for c in cells][0] == 2 and cells[2].isotropy_order == 1
    with pytest.raises(FormatError):
        cells_from_json([{"isotropy": 2}])


def test_invalid_json_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"group": ')
    with pytest.raises(FormatError) as info:
        load_json(p)
    assert "line" in info.value.location
