import itertools
import random
import unittest

from analysis.level_geometry.level_geometry import level_cone_unique
from analysis.uniqueness.uniqueness import (
    Problem,
    Space,
    UniquenessVerdict,
    VerdictKind,
    decide,
    is_minimal_cone,
    is_transversal,
    is_unique_cone,
    is_unique_linear,
    missed_subcube,
    mle_exists,
    support_verdict,
    validate_witness,
)
from core.errors import DimensionError
from core.hypercube import (
    LevelSpec,
    SignedPermutation,
    enumerate_vertices,
    format_subcube,
    level_set,
    parse_subcube,
    parse_vertex,
)
from core.walsh_basis import CoeffVector, dimension, subcube_indicator


def W(k, *D):
    return level_set(LevelSpec(k, set(D)))


def points(*texts):
    return {parse_vertex(t) for t in texts}


class TestLinearUniqueness(unittest.TestCase):
    def test_full_cube(self):
        self.assertTrue(is_unique_linear(2, 2, enumerate_vertices(2)).is_unique)

    def test_too_few_points(self):
        for k, q in ((3, 1), (4, 2), (5, 2)):
            U = enumerate_vertices(k)[: dimension(k, q) - 1]
            verdict = is_unique_linear(k, q, U)
            with self.subTest(k=k, q=q):
                self.assertFalse(verdict.is_unique)
                self.assertTrue(validate_witness(Problem(k, q, frozenset(U), Space.LINEAR), verdict))

    def test_origin_and_neighbours(self):
        U = points("---", "+--", "-+-", "--+")
        self.assertTrue(is_unique_linear(3, 1, U).is_unique)

    def test_empty_set(self):
        verdict = is_unique_linear(3, 1, [])
        self.assertEqual(verdict.witness.coeffs, {0: 1})


class TestConeUniqueness(unittest.TestCase):
    def test_gap_two_levels(self):
        self.assertTrue(is_unique_cone(4, 2, W(4, 0, 2)).is_unique)

    def test_adjacent_levels_witness(self):
        verdict = is_unique_cone(4, 2, W(4, 0, 1))
        self.assertFalse(verdict.is_unique)
        self.assertEqual(verdict.witness.coeffs, subcube_indicator(parse_subcube("++**")).coeffs)

    def test_antipodal_levels_witness(self):
        verdict = is_unique_cone(4, 2, W(4, 0, 4))
        self.assertFalse(verdict.is_unique)
        self.assertEqual(verdict.witness.coeffs, subcube_indicator(parse_subcube("+-**")).coeffs)

    def test_antipodal_pair_for_q1(self):
        self.assertTrue(is_unique_cone(3, 1, points("---", "+++")).is_unique)

    def test_single_point_is_never_enough(self):
        for k in (2, 3, 4):
            with self.subTest(k=k):
                self.assertFalse(is_unique_cone(k, 1, points("-" * k)).is_unique)

    def test_formulations_agree(self):
        k, q = 3, 2
        X = enumerate_vertices(k)
        for size in range(1, 6):
            for U in itertools.combinations(X, size):
                values = is_unique_cone(k, q, U, formulation="values", shortcuts=False)
                coefficients = is_unique_cone(k, q, U, formulation="coefficients", shortcuts=False)
                shortcut = is_unique_cone(k, q, U)
                problem = Problem(k, q, frozenset(U))
                with self.subTest(U=[str(x) for x in U]):
                    self.assertEqual(values.kind, coefficients.kind)
                    self.assertEqual(values.kind, shortcut.kind)
                    for verdict in (values, coefficients, shortcut):
                        self.assertTrue(validate_witness(problem, verdict))

    def test_lp_witness_when_transversal(self):
        # W_{2,3} meets every 3-subcube of the 5-cube but has a level gap of one
        U = W(5, 2, 3)
        self.assertTrue(is_transversal(5, 2, U))
        verdict = is_unique_cone(5, 2, U)
        self.assertFalse(verdict.is_unique)
        self.assertEqual(verdict.method, "lp-values")
        self.assertTrue(validate_witness(Problem(5, 2, frozenset(U)), verdict))

    def test_unknown_formulation(self):
        with self.assertRaises(ValueError):
            is_unique_cone(3, 1, points("---"), formulation="simplex")


class TestMonotonicity(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        # verdicts on every subset of the cube, keyed by (k, q, subset bitmap)
        cls.linear, cls.cone = {}, {}
        for k in range(1, 4):
            vertices = enumerate_vertices(k)
            for q in range(k + 1):
                for subset in range(1 << (1 << k)):
                    U = [x for x in vertices if (subset >> x.bits) & 1]
                    cls.linear[k, q, subset] = is_unique_linear(k, q, U).is_unique
                    cls.cone[k, q, subset] = is_unique_cone(k, q, U, shortcuts=False).is_unique

    def test_adding_points_keeps_uniqueness(self):
        for table in (self.linear, self.cone):
            for (k, q, subset), unique in table.items():
                if not unique:
                    continue
                for x in range(1 << k):
                    with self.subTest(k=k, q=q, subset=subset, x=x):
                        self.assertTrue(table[k, q, subset | (1 << x)])

    def test_lower_degree_keeps_uniqueness(self):
        for table in (self.linear, self.cone):
            for (k, q, subset), unique in table.items():
                if unique and q > 0:
                    with self.subTest(k=k, q=q, subset=subset):
                        self.assertTrue(table[k, q - 1, subset])

    def test_linear_implies_cone(self):
        for key, unique in self.linear.items():
            if unique:
                with self.subTest(key=key):
                    self.assertTrue(self.cone[key])

    def test_adding_points_keeps_uniqueness_randomized(self):
        rng = random.Random(17)
        for k in range(4, 7):
            vertices = enumerate_vertices(k)
            for trial in range(12):
                q = rng.randint(1, k - 1)
                U = set(rng.sample(vertices, rng.randint(dimension(k, q), min(1 << k, 2 * dimension(k, q)))))
                V = U | set(rng.sample(vertices, rng.randint(1, 4)))
                with self.subTest(k=k, q=q, trial=trial):
                    if is_unique_linear(k, q, U).is_unique:
                        self.assertTrue(is_unique_linear(k, q, V).is_unique)
                    if is_unique_cone(k, q, U).is_unique:
                        self.assertTrue(is_unique_cone(k, q, V).is_unique)

    def test_linear_implies_cone_on_level_sets(self):
        for k in range(2, 7):
            for q in range(k + 1):
                for mask in range(1, 1 << (k + 1)):
                    D = {j for j in range(k + 1) if (mask >> j) & 1}
                    U = level_set(LevelSpec(k, D))
                    if len(U) < dimension(k, q) or not is_unique_linear(k, q, U).is_unique:
                        continue
                    with self.subTest(k=k, q=q, D=sorted(D)):
                        self.assertTrue(level_cone_unique(k, q, D).is_unique)
                        if k <= 4:
                            self.assertTrue(is_unique_cone(k, q, U, shortcuts=False).is_unique)


class TestSymmetry(unittest.TestCase):
    def test_signed_permutations_preserve_verdicts(self):
        rng = random.Random(23)
        for k in range(2, 6):
            vertices = enumerate_vertices(k)
            for trial in range(10):
                q = rng.randint(0, k)
                U = rng.sample(vertices, rng.randint(1, 1 << k))
                perm = list(range(k))
                rng.shuffle(perm)
                sigma = SignedPermutation(tuple(perm), rng.randrange(1 << k))
                image = [sigma.apply(x) for x in U]
                with self.subTest(k=k, q=q, trial=trial):
                    self.assertEqual(is_unique_linear(k, q, U).is_unique, is_unique_linear(k, q, image).is_unique)
                    self.assertEqual(is_unique_cone(k, q, U).is_unique, is_unique_cone(k, q, image).is_unique)


class TestTransversals(unittest.TestCase):
    def test_missed_subcube_order(self):
        self.assertEqual(format_subcube(missed_subcube(4, 2, W(4, 0, 1))), "++**")
        self.assertEqual(format_subcube(missed_subcube(4, 2, W(4, 0, 4))), "+-**")

    def test_full_cube_is_transversal(self):
        self.assertTrue(is_transversal(3, 3, enumerate_vertices(3)))
        self.assertIsNone(missed_subcube(3, 2, enumerate_vertices(3)))


class TestMinimality(unittest.TestCase):
    def test_w1k(self):
        self.assertTrue(is_minimal_cone(4, 2, W(4, 1, 4)))

    def test_full_cube_not_minimal_for_q2(self):
        self.assertFalse(is_minimal_cone(3, 2, enumerate_vertices(3)))

    def test_full_cube_minimal_for_q_eq_k(self):
        self.assertTrue(is_minimal_cone(3, 3, enumerate_vertices(3)))


class TestVerdicts(unittest.TestCase):
    def test_witness_presence_enforced(self):
        with self.assertRaises(ValueError):
            UniquenessVerdict(VerdictKind.NOT_UNIQUE, None, "rank")
        with self.assertRaises(ValueError):
            UniquenessVerdict(VerdictKind.UNIQUE, CoeffVector(2, 0, {0: 1}), "rank")

    def test_decide_dispatches_on_space(self):
        U = frozenset(points("---", "+++"))
        self.assertTrue(decide(Problem(3, 1, U, Space.CONE)).is_unique)
        self.assertFalse(decide(Problem(3, 1, U, Space.LINEAR)).is_unique)

    def test_problem_checks_dimensions(self):
        with self.assertRaises(DimensionError):
            Problem(3, 1, frozenset(points("--")))
        with self.assertRaises(DimensionError):
            Problem(3, 4, frozenset())

    def test_validate_rejects_wrong_witness(self):
        problem = Problem(4, 2, frozenset(W(4, 0, 1)))
        bad = UniquenessVerdict.not_unique(subcube_indicator(parse_subcube("--**")), "transversal")
        self.assertFalse(validate_witness(problem, bad))


class TestMleExistence(unittest.TestCase):
    def test_antipodal_sample(self):
        self.assertTrue(mle_exists(3, 1, [parse_vertex("---"), parse_vertex("+++")]))

    def test_counts_are_ignored(self):
        sample = {parse_vertex("---"): 5, parse_vertex("+++"): 1, parse_vertex("+--"): 0}
        self.assertTrue(mle_exists(3, 1, sample))

    def test_sample_inside_adjacent_levels(self):
        sample = {x: 3 for x in W(4, 0, 1)}
        self.assertFalse(mle_exists(4, 2, sample))
        self.assertEqual(support_verdict(4, 2, sample).method, "transversal")

    def test_empty_sample(self):
        with self.assertRaises(ValueError):
            support_verdict(3, 1, {})


if __name__ == "__main__":
    unittest.main()
